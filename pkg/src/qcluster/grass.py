"""Certified counting polynomials of quiver Grassmannians.

A counting polynomial is found by sampling point counts at the smallest
primes, interpolating through ``bound + 1`` of them and checking the rest.
For Grassmannians of rigid modules the result is the Serre polynomial.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .cluster import Quiver
from .errors import NotPolynomialCount, RigiditySamplingError
from .exact import (
    IntPolyQ,
    interpolate_counting_poly,
    interpolate_palindromic_poly,
    interpolate_rational,
    primes,
)
from .reps import (
    DEFAULT_CEILING,
    DEFAULT_TRIALS,
    QuiverRep,
    count_subreps,
    hom_dim,
    random_rep,
    random_rigid_rep,
    euler_form,
)


def degree_bound(m_vec: Sequence[int], e: Sequence[int]) -> int:
    """Dimension of the ambient product of ordinary Grassmannians."""
    return sum(k * (d - k) for d, k in zip(m_vec, e))


def rigid_degree_bound(q: Quiver, m_vec: Sequence[int], e: Sequence[int]) -> int:
    """Dimension <e, m-e> of Gr_e(M) for rigid M.

    Gr_e(M) is then smooth projective with tangent space Hom(U, M/U) of this
    dimension at every point, so a counting polynomial has exactly this
    degree and is palindromic (Poincare duality) when the variety is nonempty.
    """
    rest = [d - k for d, k in zip(m_vec, e)]
    return max(0, euler_form(q, e, rest))


def required_samples(bound: int, palindromic: bool = False) -> int:
    """Primes needed to fit a polynomial of this degree bound and hold one out."""
    return (bound // 2 + 1 if palindromic else bound + 1) + 1


def derived_seed(*parts) -> int:
    """Stable integer seed from arbitrary printable parts (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class CountingPolynomial:
    poly: IntPolyQ
    evidence: tuple[tuple[int, int], ...]
    held_out: tuple[tuple[int, int], ...]
    bound: int
    skipped: tuple[int, ...] = ()
    palindromic: bool = False

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.bound,
            "fit": "palindromic" if self.palindromic else "general",
            "samples": [list(s) for s in self.evidence],
            "held_out": [list(s) for s in self.held_out],
            "skipped_primes": list(self.skipped),
            "polynomial": list(self.poly.coeffs),
            "text": str(self.poly),
        }


class RigidModelSampler:
    """Caches one accepted rigid model per (dimension vector, prime).

    Models are drawn from an RNG seeded by ``(seed, m_vec, prime)``, so the
    result does not depend on the order of requests.
    """

    def __init__(self, quiver: Quiver, seed: int = 0, max_trials: int = DEFAULT_TRIALS):
        self.quiver = quiver
        self.seed = seed
        self.max_trials = max_trials
        self._cache: dict[tuple, QuiverRep | None] = {}

    def model(self, m_vec, prime: int) -> QuiverRep:
        key = (tuple(m_vec), prime)
        if key not in self._cache:
            rng = random.Random(derived_seed(self.seed, key))
            try:
                self._cache[key] = random_rigid_rep(self.quiver, key[0], prime, rng, self.max_trials)
            except RigiditySamplingError:
                self._cache[key] = None
        rep = self._cache[key]
        if rep is None:
            raise RigiditySamplingError(f"no rigid model of {key[0]} over F_{prime}")
        return rep

    def fresh_model(self, m_vec, prime: int, salt) -> QuiverRep:
        """An independent accepted model (not cached)."""
        rng = random.Random(derived_seed(self.seed, tuple(m_vec), prime, "fresh", salt))
        return random_rigid_rep(self.quiver, tuple(m_vec), prime, rng, self.max_trials)


def sample_counts(builder: Callable[[int], QuiverRep], e, n_samples: int,
                  ceiling: int = DEFAULT_CEILING, max_prime_tries: int | None = None):
    """Point counts at the first ``n_samples`` primes where ``builder`` succeeds."""
    samples, skipped = [], []
    limit = max_prime_tries or n_samples + 8
    for p in primes():
        if len(samples) == n_samples:
            break
        if len(samples) + len(skipped) >= limit:
            raise RigiditySamplingError(
                f"no rigid representation found at enough primes (skipped {skipped})")
        try:
            rep = builder(p)
        except RigiditySamplingError:
            skipped.append(p)
            continue
        samples.append((p, count_subreps(rep, e, ceiling)))
    return samples, skipped


def counting_polynomial_from(builder: Callable[[int], QuiverRep], m_vec, e,
                             n_samples: int | None = None,
                             ceiling: int = DEFAULT_CEILING,
                             bound: int | None = None,
                             palindromic: bool = False) -> CountingPolynomial:
    """Certified counting polynomial for Gr_e of the per-prime modules from ``builder``.

    ``bound`` defaults to the ambient bound.  With ``palindromic`` the bound is
    read as the exact degree of a palindromic polynomial (rigid modules, see
    :func:`rigid_degree_bound`), which halves the number of primes needed.
    """
    bound = degree_bound(m_vec, e) if bound is None else bound
    unknowns = required_samples(bound, palindromic) - 1
    n_samples = n_samples or unknowns + 1
    if n_samples < unknowns + 1:
        raise ValueError(f"need at least {unknowns + 1} primes for degree bound {bound}")
    if any(k < 0 or k > d for k, d in zip(e, m_vec)):
        return CountingPolynomial(IntPolyQ(), (), (), bound, (), palindromic)
    samples, skipped = sample_counts(builder, e, n_samples, ceiling)
    if palindromic:
        poly = interpolate_palindromic_poly(samples, bound)
    else:
        poly = interpolate_counting_poly(samples, bound)
    if not poly.is_nonnegative():
        raise NotPolynomialCount("positivity", "counting polynomial has a negative coefficient")
    return CountingPolynomial(poly, tuple(samples[:unknowns]), tuple(samples[unknowns:]),
                              bound, tuple(skipped), palindromic)


def counting_polynomial(q: Quiver, m_vec, e, n_samples: int | None = None,
                        sampler: RigidModelSampler | None = None,
                        ceiling: int = DEFAULT_CEILING, seed: int = 0,
                        ambient_bound: bool = False) -> CountingPolynomial:
    """Counting polynomial of Gr_e(M) for the generic rigid module M of class ``m_vec``.

    By default uses the exact dimension and palindromic symmetry; with
    ``ambient_bound`` it falls back to the ambient Grassmannian dimension and a
    general fit (more primes, fewer assumptions).
    """
    sampler = sampler or RigidModelSampler(q, seed)
    if ambient_bound:
        bound, pal = degree_bound(m_vec, e), False
    else:
        bound, pal = rigid_degree_bound(q, m_vec, e), True
    return counting_polynomial_from(lambda p: sampler.model(m_vec, p), m_vec, e,
                                    n_samples, ceiling, bound, pal)


def euler_characteristic(c: CountingPolynomial | IntPolyQ) -> int:
    poly = c.poly if isinstance(c, CountingPolynomial) else c
    return poly(1)


def serre_polynomials(q: Quiver, m_vec, sampler: RigidModelSampler,
                      ceiling: int = DEFAULT_CEILING,
                      ambient_bound: bool = False,
                      min_samples: int = 0) -> dict[tuple[int, ...], CountingPolynomial]:
    """Certified counting polynomials for every e in the box 0 <= e <= m_vec.

    Each class uses ``max(min_samples, required)`` primes.
    """
    out = {}
    for e in itertools.product(*(range(d + 1) for d in m_vec)):
        if ambient_bound:
            need = required_samples(degree_bound(m_vec, e))
        else:
            need = required_samples(rigid_degree_bound(q, m_vec, e), True)
        out[e] = counting_polynomial(q, m_vec, e, max(min_samples, need), sampler, ceiling,
                                     ambient_bound=ambient_bound)
    return out


# --- refutation -------------------------------------------------------------

def refute_counting_polynomial(builder: Callable[[int], QuiverRep], m_vec, e,
                               n_samples: int | None = None,
                               ceiling: int = DEFAULT_CEILING) -> dict:
    """Try to certify a counting polynomial; report a refutation if every degree fails.

    For each candidate degree ``d <= bound`` the interpolant through the first
    ``d + 1`` samples is checked on all remaining samples.  The outcome is a
    finite-budget statement, labelled as such.
    """
    bound = degree_bound(m_vec, e)
    n_samples = n_samples or bound + 2
    samples, skipped = sample_counts(builder, e, n_samples, ceiling)
    fits = []
    certified = None
    for d in range(bound + 1):
        coeffs = interpolate_rational(samples[: d + 1])
        integral = all(c.denominator == 1 for c in coeffs)
        mismatches = []
        for p, count in samples[d + 1:]:
            val = sum(c * p ** k for k, c in enumerate(coeffs))
            if val != count:
                mismatches.append({"prime": p, "count": count, "predicted": str(val)})
        fits.append({"degree": d, "coefficients": [str(c) for c in coeffs],
                     "integral": integral, "mismatches": mismatches})
        if integral and not mismatches and certified is None:
            certified = IntPolyQ([int(c) for c in coeffs])
    report = {
        "e": list(e),
        "dims": list(m_vec),
        "degree_bound": bound,
        "samples": [list(s) for s in samples],
        "skipped_primes": skipped,
        "fits": fits,
    }
    if certified is None:
        report["status"] = "refutation at budget"
    else:
        report["status"] = "no refutation found at this budget"
        report["polynomial"] = list(certified.coeffs)
    return report


def generic_brick_builder(q: Quiver, m_vec, seed: int = 0, max_trials: int = DEFAULT_TRIALS):
    """Per-prime builder of random representations whose endomorphism ring is the field.

    Used for dimension vectors without a rigid model; the brick condition is
    the genericity certificate (a generic module of a Schur root is a brick).
    """
    m_vec = tuple(m_vec)

    def build(p: int) -> QuiverRep:
        rng = random.Random(derived_seed(seed, m_vec, p, "brick"))
        for _ in range(max_trials):
            rep = random_rep(q, m_vec, p, rng)
            if hom_dim(rep, rep) == 1:
                return rep
        raise RigiditySamplingError(f"no brick of dimension {m_vec} found over F_{p}")

    return build
