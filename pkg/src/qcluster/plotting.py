"""Figures for counting runs: sampled point counts against the fitted polynomial."""

from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 8,
    "axes.titlesize": 8,
    "axes.labelsize": 8,
    "legend.fontsize": 7,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
}


def _grid(n: int):
    cols = min(4, max(1, n))
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(2.4 * cols, 2.0 * rows), squeeze=False)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    return fig, list(axes.flat[:n])


def _poly_values(coeffs, xs):
    return [float(sum(Fraction(c) * Fraction(x) ** k for k, c in enumerate(coeffs))) for x in xs]


def _dense(samples):
    lo, hi = min(p for p, _ in samples), max(p for p, _ in samples)
    return [lo + (hi - lo) * t / 60 for t in range(61)]


def counting_figure(entries: list[dict], path: str | Path, title: str = "") -> Path:
    """One panel per class e: samples (dots), held-out primes (open) and the certified curve."""
    entries = [e for e in entries if e.get("samples")]
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, axes = _grid(max(1, len(entries)))
        for ax, entry in zip(axes, entries):
            fitted = entry["samples"]
            held = entry.get("held_out", [])
            ax.plot([p for p, _ in fitted], [c for _, c in fitted], "o", ms=3, label="fit")
            if held:
                ax.plot([p for p, _ in held], [c for _, c in held], "o", ms=4, mfc="none",
                        label="held out")
            if entry.get("polynomial"):
                xs = _dense(fitted + held)
                ax.plot(xs, _poly_values(entry["polynomial"], xs), "-", lw=0.8)
            ax.set_title(f"e={tuple(entry['e'])}  {entry.get('text', '')}")
            ax.set_xlabel("p")
            ax.set_ylabel("# points")
            if max((c for _, c in fitted + held), default=0) > 50:
                ax.set_yscale("log")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return path


def refutation_figure(report: dict, path: str | Path) -> Path:
    """Sampled counts with every candidate interpolant; a refutation shows none fits them all."""
    path = Path(path)
    samples = report["samples"]
    xs = _dense(samples)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 3.0))
        for fit in report["fits"]:
            ys = _poly_values(fit["coefficients"], xs)
            ax.plot(xs, ys, lw=0.7, label=f"degree {fit['degree']}")
        ax.plot([p for p, _ in samples], [c for _, c in samples], "ko", ms=3, label="counts")
        lo = min(c for _, c in samples)
        hi = max(c for _, c in samples)
        pad = max(1, hi - lo)
        ax.set_ylim(lo - pad, hi + pad)
        ax.set_xlabel("p")
        ax.set_ylabel("# points")
        ax.set_title(f"e={tuple(report['e'])} of {tuple(report['dims'])}: {report['status']}")
        ax.legend(ncol=3, loc="lower left", fontsize=6)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return path
