"""Command-line front end: ``qcluster mutate|verify|count|reproduce``.

Exit status: 0 success or match, 1 verification mismatch, 2 usage or parse
error, 3 enumeration ceiling exceeded.
"""

from __future__ import annotations

import argparse
import ast
import itertools
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import report as rep
from .cc import Verifier
from .cluster import (
    IceQuiver,
    dim_vector_from_F,
    extract_g_and_F,
    load_quiver,
    parse_word,
    walk,
)
from .errors import InputError, QClusterError
from .grass import (
    RigidModelSampler,
    counting_polynomial,
    degree_bound,
    generic_brick_builder,
    refute_counting_polynomial,
    required_samples,
    rigid_degree_bound,
)
from .reps import DEFAULT_CEILING
from .torus import OffsetSolver, TorusElement

TABLES = {"a2": "golden_a2.json", "e6": "golden_e6.json"}


def data_path(name: str) -> Path:
    return Path(str(resources.files("qcluster") / "data" / name))


def parse_vector(text: str | None, what: str) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        vec = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise InputError(f"bad {what} {text!r}") from None
    if any(x < 0 for x in vec):
        raise InputError(f"bad {what} {text!r}: entries must be nonnegative")
    return vec


# --- commands ----------------------------------------------------------------

def _load(args) -> tuple[IceQuiver, object]:
    if not args.quiver:
        raise InputError("--quiver is required")
    return load_quiver(args.quiver)


def _variable_rows(seed, pair, solver):
    out = []
    for i, x in enumerate(seed.vars, 1):
        g, F = extract_g_and_F(x, pair.btilde, solver)
        out.append({"index": i, "frozen": i > pair.n, "variable": x.to_records(),
                    "g_vector": list(g), "F_polynomial": F.to_records()})
    return out


def cmd_mutate(args) -> tuple[dict, int]:
    quiver, pair = _load(args)
    word = parse_word(args.word)
    solver = OffsetSolver(pair.btilde)
    seeds = walk(pair, word)
    report = rep.new_report("mutate", args.seed, quiver=str(args.quiver), word=list(word),
                            word_order="left-to-right")
    report["seeds"] = [{
        "word": list(s.word),
        "btilde": [list(r) for r in s.btilde],
        "lambda": [list(r) for r in s.lam.matrix],
        "variables": _variable_rows(s, pair, solver),
    } for s in seeds]
    return report, 0


def _new_variables(pair, word):
    """(position, index, variable) for the variable created at each step of the walk."""
    seeds = walk(pair, word)
    if not word:
        return [(0, i, x) for i, x in enumerate(seeds[0].vars[:pair.n], 1)]
    return [(t, k, s.vars[k - 1]) for t, (k, s) in enumerate(zip(word, seeds[1:]), 1)]


def _verify_one(job):
    quiver, pair, seed, ceiling, ambient, min_samples, x = job
    v = Verifier(quiver, pair, seed, ceiling, ambient_bound=ambient, min_samples=min_samples)
    return v.verify_cluster_variable(x)


def _verify_all(quiver, pair, xs, args) -> list[dict]:
    ambient = getattr(args, "ambient_bound", False)
    min_samples = args.primes or 0
    if args.jobs > 1 and len(xs) > 1:
        jobs = [(quiver, pair, args.seed, args.ceiling, ambient, min_samples, x) for x in xs]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(_verify_one, jobs))
    v = Verifier(quiver, pair, args.seed, args.ceiling, ambient_bound=ambient,
                 min_samples=min_samples)
    return [v.verify_cluster_variable(x) for x in xs]


def _status(records) -> int:
    codes = [r.get("exit_code", 1) for r in records if r["verdict"] == "error"]
    if any(r["verdict"] == "mismatch" for r in records) or 1 in codes:
        return 1
    if codes:
        return max(codes)
    return 0


def _finish_records(records, steps, timings: bool):
    out = []
    for (t, k, _), r in zip(steps, records):
        r = dict(r, position=t, index=k)
        r.pop("label", None)
        seconds = r.pop("seconds", None)
        if timings:
            r["seconds"] = seconds
        out.append(r)
    return out


def cmd_verify(args) -> tuple[dict, int]:
    quiver, pair = _load(args)
    word = parse_word(args.word)
    steps = _new_variables(pair, word)
    start = time.perf_counter()
    records = _verify_all(quiver, pair, [x for _, _, x in steps], args)
    records = _finish_records(records, steps, args.timings)
    report = rep.new_report("verify", args.seed, quiver=str(args.quiver), word=list(word),
                            word_order="left-to-right", ceiling=args.ceiling,
                            degree_bound="ambient" if args.ambient_bound else "rigid")
    report["records"] = records
    report["summary"] = _summary(records)
    if args.timings:
        report["seconds"] = round(time.perf_counter() - start, 3)
    if args.figures:
        _verify_figures(records, args.figures, "verify")
    return report, _status(records)


def _summary(records) -> dict:
    verdicts = [r["verdict"] for r in records]
    return {"variables": len(records), "match": verdicts.count("match"),
            "mismatch": verdicts.count("mismatch"), "error": verdicts.count("error")}


def _verify_figures(records, directory, stem):
    from .plotting import counting_figure

    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for r in records:
        entries = [s for s in r.get("serre", []) if len(s["polynomial"]) > 1]
        if entries:
            counting_figure(entries, out / f"{stem}_{r['position']}_{r['index']}.png",
                            f"m={tuple(r['m_vec'])}")


def cmd_count(args) -> tuple[dict, int]:
    quiver, _ = _load(args)
    q = quiver.principal_quiver()
    dims = parse_vector(args.dims, "dimension vector")
    if dims is None or len(dims) != q.n:
        raise InputError(f"--dims needs {q.n} entries")
    e_arg = parse_vector(args.e, "class")
    if e_arg is not None and len(e_arg) != q.n:
        raise InputError(f"--e needs {q.n} entries")
    report = rep.new_report("count", args.seed, quiver=str(args.quiver), dims=list(dims),
                            ceiling=args.ceiling)
    if args.refute:
        if e_arg is None:
            raise InputError("--refute needs --e")
        builder = generic_brick_builder(q, dims, args.seed)
        need = required_samples(degree_bound(dims, e_arg))
        result = refute_counting_polynomial(builder, dims, e_arg, max(args.primes or 0, need),
                                            args.ceiling)
        result["genericity"] = "brick certificate (dim End = 1) per prime"
        report["refutation"] = result
        if args.figures:
            from .plotting import refutation_figure

            Path(args.figures).mkdir(parents=True, exist_ok=True)
            refutation_figure(result, Path(args.figures) / "refutation.png")
        return report, 0
    classes = [e_arg] if e_arg is not None else list(
        itertools.product(*(range(d + 1) for d in dims)))
    sampler = RigidModelSampler(q, args.seed)
    entries = []
    for e in classes:
        if args.ambient_bound:
            need = required_samples(degree_bound(dims, e))
        else:
            need = required_samples(rigid_degree_bound(q, dims, e), True)
        cert = counting_polynomial(q, dims, e, max(args.primes or 0, need), sampler,
                                   args.ceiling, ambient_bound=args.ambient_bound)
        entries.append(dict(e=list(e), **cert.to_dict()))
    report["degree_bound"] = "ambient" if args.ambient_bound else "rigid"
    report["polynomials"] = entries
    if args.figures:
        from .plotting import counting_figure

        Path(args.figures).mkdir(parents=True, exist_ok=True)
        counting_figure(entries, Path(args.figures) / "counts.png", f"m={dims}")
    return report, 0


# --- reproduction of the stored golden data -------------------------------------

def load_golden(table: str) -> dict:
    import json

    return json.loads(data_path(TABLES[table]).read_text(encoding="utf-8"))


def expand_commutative(expr: str, n: int) -> dict[tuple[int, ...], int]:
    """Expand a +, *, ** expression in y1..yn into {exponent: coefficient}."""

    def mul(a, b):
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return {e: c for e, c in out.items() if c}

    def add(a, b):
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + c
        return {e: c for e, c in out.items() if c}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return {(0,) * n: node.value} if node.value else {}
        if isinstance(node, ast.Name) and node.id.startswith("y"):
            i = int(node.id[1:]) - 1
            if not 0 <= i < n:
                raise InputError(f"variable {node.id} out of range")
            return {tuple(int(j == i) for j in range(n)): 1}
        if isinstance(node, ast.BinOp):
            left = ev(node.left)
            if isinstance(node.op, ast.Add):
                return add(left, ev(node.right))
            if isinstance(node.op, ast.Mult):
                return mul(left, ev(node.right))
            if isinstance(node.op, ast.Pow) and isinstance(node.right, ast.Constant):
                out = {(0,) * n: 1}
                for _ in range(node.right.value):
                    out = mul(out, left)
                return out
        raise InputError(f"unsupported expression element {ast.dump(node)[:40]}")

    return ev(ast.parse(expr, mode="eval"))


def _reproduce_a2(args, golden) -> tuple[dict, int]:
    quiver, pair = load_quiver(data_path(golden["quiver"]))
    solver = OffsetSolver(pair.btilde)
    word = tuple(golden["word"])
    steps = _new_variables(pair, word)
    rows = []
    ok = True
    for (t, k, x), entry in zip(steps, golden["entries"]):
        expected = TorusElement.from_records(entry["variable"], x.form)
        _, F = extract_g_and_F(x, pair.btilde, solver)
        row = {"position": t, "index": k, "printed": entry["printed"],
               "engine_equals_printed": x == expected and k == entry["index"],
               "dim_vector_equals_printed":
                   list(dim_vector_from_F(F)) + [0] * (pair.m - pair.n) == entry["dim_vector"]}
        ok &= row["engine_equals_printed"] and row["dim_vector_equals_printed"]
        rows.append(row)
    records = _finish_records(_verify_all(quiver, pair, [x for *_, x in steps], args), steps,
                              args.timings)
    return {"rows": rows, "records": records}, (0 if ok else 1) or _status(records)


def _reproduce_e6(args, golden) -> tuple[dict, int]:
    quiver, pair = load_quiver(data_path(golden["quiver"]))
    solver = OffsetSolver(pair.btilde)
    word = tuple(golden["word"])
    x = walk(pair, word)[-1].vars[golden["index"] - 1]
    g, F = extract_g_and_F(x, pair.btilde, solver)
    expected = TorusElement.from_records(golden["variable"], x.form)
    nontrivial = [(list(e), c.to_pairs()) for e, c in sorted(x.terms.items())
                  if c.to_pairs() != [[0, 1]]]
    printed_F = expand_commutative(golden["commutative_F"], pair.n)
    checks = {
        "g_vector": list(g) == golden["g_vector"],
        "dim_vector": list(dim_vector_from_F(F)) == golden["dim_vector"],
        "support": sorted(x.terms) == sorted(expected.terms),
        "variable": x == expected,
        "commutative_F": F.at_one() == printed_F,
    }
    summary = {
        "distinct_exponents": len(x.terms),
        "weighted_terms": sum(abs(c) for lv in x.terms.values() for _, c in lv.to_pairs()),
        "nontrivial_coefficients": nontrivial,
    }
    steps = [(len(word), golden["index"], x)]
    records = _finish_records(_verify_all(quiver, pair, [x], args), steps, args.timings)
    ok = all(checks.values())
    return {"checks": checks, "summary": summary, "records": records}, (
        0 if ok else 1) or _status(records)


def cmd_reproduce(args) -> tuple[dict, int]:
    golden = load_golden(args.table)
    body, status = (_reproduce_a2 if args.table == "a2" else _reproduce_e6)(args, golden)
    report = rep.new_report("reproduce", args.seed, table=args.table, word=golden["word"],
                            word_order=golden["word_order"], golden=TABLES[args.table])
    report.update(body)
    if args.figures:
        _verify_figures(body["records"], args.figures, f"reproduce_{args.table}")
    return report, status


# --- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiver", help="quiver file")
    common.add_argument("--word", default="", help="mutation word, e.g. 1,2,1 (applied left to right)")
    common.add_argument("--primes", type=int, default=None,
                        help="sample at least N primes per class (more if the degree bound needs it)")
    common.add_argument("--ceiling", type=int, default=DEFAULT_CEILING,
                        help="enumeration work ceiling per count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    common.add_argument("--ambient-bound", action="store_true",
                        help="use the ambient Grassmannian dimension as degree bound")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock times (makes reports run-dependent)")

    parser = argparse.ArgumentParser(prog="qcluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mutate", parents=[common], help="run a mutation walk")
    sub.add_parser("verify", parents=[common], help="compare mutation with the counting formula")
    p = sub.add_parser("count", parents=[common], help="counting polynomials of Grassmannians")
    p.add_argument("--dims", required=True)
    p.add_argument("--e")
    p.add_argument("--refute", action="store_true",
                   help="generic (non-rigid) module; try to refute a counting polynomial")
    p = sub.add_parser("reproduce", parents=[common], help="check against the stored golden data")
    p.add_argument("--table", required=True, choices=sorted(TABLES))
    return parser


COMMANDS = {"mutate": cmd_mutate, "verify": cmd_verify, "count": cmd_count,
            "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1 or args.ceiling < 1 or (args.primes is not None and args.primes < 2):
        parser.error("--jobs and --ceiling must be positive, --primes at least 2")
    try:
        report, status = COMMANDS[args.command](args)
    except QClusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = rep.write(report, args.out)
    if not args.out:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
