"""Ice quivers, compatible pairs, seed mutation and F-polynomial extraction."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError
from .exact import LaurentV, identity, invert_integer_matrix, mat_mul, transpose
from .torus import (
    Exp,
    OffsetSolver,
    SkewForm,
    TorusElement,
    frame_monomial,
    left_divide,
    minimal_degree,
    torus_mul,
)


@dataclass(frozen=True)
class IceQuiver:
    """Quiver on vertices 1..m; vertices n+1..m are frozen.

    Arrows are stored 1-based, as ``(source, target)`` pairs with repetition.
    """

    m: int
    n: int
    arrows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.n <= self.m:
            raise InputError("invalid vertex counts")
        counts = Counter(self.arrows)
        for (i, j) in counts:
            if not (1 <= i <= self.m and 1 <= j <= self.m):
                raise InputError(f"arrow {i}->{j} out of range")
            if i == j:
                raise InputError(f"loop at vertex {i}")
            if (j, i) in counts:
                raise InputError(f"2-cycle between {i} and {j}")
        if not _is_acyclic(range(1, self.n + 1), self.principal_arrows):
            raise InputError("principal part not acyclic")

    @property
    def principal_arrows(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j in self.arrows if i <= self.n and j <= self.n)

    @property
    def fully_acyclic(self) -> bool:
        return _is_acyclic(range(1, self.m + 1), self.arrows)

    def principal_quiver(self) -> "Quiver":
        return Quiver(self.n, tuple((i - 1, j - 1) for i, j in self.principal_arrows))

    @classmethod
    def principal_framing(cls, n: int, arrows: Iterable[tuple[int, int]]) -> "IceQuiver":
        """Frozen copy i+n with one arrow i+n -> i for each mutable vertex i."""
        arrows = tuple(arrows) + tuple((i + n, i) for i in range(1, n + 1))
        return cls(2 * n, n, arrows)


@dataclass(frozen=True)
class Quiver:
    """Acyclic quiver on vertices 0..n-1 (0-based; used by the representation code)."""

    n: int
    arrows: tuple[tuple[int, int], ...]

    def topological_order(self) -> list[int]:
        indeg = [0] * self.n
        for _, j in self.arrows:
            indeg[j] += 1
        ready = [v for v in range(self.n) if not indeg[v]]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for i, j in self.arrows:
                if i == v:
                    indeg[j] -= 1
                    if not indeg[j]:
                        ready.append(j)
        if len(order) != self.n:
            raise InputError("principal part not acyclic")
        return order

    def opposite(self) -> "Quiver":
        return Quiver(self.n, tuple((j, i) for i, j in self.arrows))

    def bmatrix(self) -> list[list[int]]:
        b = [[0] * self.n for _ in range(self.n)]
        for i, j in self.arrows:
            b[i][j] += 1
            b[j][i] -= 1
        return b


def _is_acyclic(vertices, arrows) -> bool:
    vertices = list(vertices)
    indeg = {v: 0 for v in vertices}
    for _, j in arrows:
        indeg[j] += 1
    ready = [v for v in vertices if not indeg[v]]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for i, j in arrows:
            if i == v:
                indeg[j] -= 1
                if not indeg[j]:
                    ready.append(j)
    return seen == len(vertices)


def bmatrix_from_quiver(q: IceQuiver) -> list[list[int]]:
    """m x n matrix with b_ij = #(i->j) - #(j->i)."""
    return [row[: q.n] for row in extended_bmatrix(q)]


def extended_bmatrix(q: IceQuiver) -> list[list[int]]:
    b = [[0] * q.m for _ in range(q.m)]
    for i, j in q.arrows:
        b[i - 1][j - 1] += 1
        b[j - 1][i - 1] -= 1
    return b


# --- compatible pairs ------------------------------------------------------

@dataclass(frozen=True)
class CompatiblePair:
    lam: SkewForm
    btilde: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        check_unital(self.lam, self.btilde)

    @property
    def m(self) -> int:
        return len(self.btilde)

    @property
    def n(self) -> int:
        return len(self.btilde[0]) if self.btilde else 0

    @property
    def principal(self) -> list[list[int]]:
        return [list(r) for r in self.btilde[: self.n]]


def check_unital(lam: SkewForm, btilde) -> None:
    m = len(btilde)
    n = len(btilde[0]) if m else 0
    if lam.rank != m:
        raise InputError("pair not unitally compatible")
    prod = mat_mul([[-x for x in r] for r in lam.matrix], btilde)
    target = [[int(i == j) for j in range(n)] for i in range(m)]
    if prod != target:
        raise InputError("pair not unitally compatible")


def lambda_from_extended(bcirc: Sequence[Sequence[int]], n: int | None = None) -> SkewForm | CompatiblePair:
    """``(B°)^{-T}``; with ``n`` given, returns the validated pair with the left n columns."""
    try:
        inv = invert_integer_matrix(bcirc)
    except ValueError:
        raise InputError("extended matrix singular") from None
    if any(x.denominator != 1 for row in inv for x in row):
        raise InputError("Λ not integral")
    lam = SkewForm.of(transpose([[int(x) for x in row] for row in inv]))
    if n is None:
        return lam
    btilde = tuple(tuple(row[:n]) for row in bcirc)
    return CompatiblePair(lam, btilde)


def pair_from_quiver(q: IceQuiver, lam: Sequence[Sequence[int]] | None = None) -> CompatiblePair:
    if lam is None:
        return lambda_from_extended(extended_bmatrix(q), q.n)
    return CompatiblePair(SkewForm.of(lam), tuple(tuple(r) for r in bmatrix_from_quiver(q)))


# --- matrix mutation -------------------------------------------------------

def e_matrix(btilde, k: int, eps: int) -> list[list[int]]:
    """m x m matrix E_eps for 0-based mutable index k."""
    m = len(btilde)
    e = identity(m)
    for i in range(m):
        e[i][k] = -1 if i == k else max(0, -eps * btilde[i][k])
    return e


def f_matrix(btilde, k: int, eps: int) -> list[list[int]]:
    n = len(btilde[0])
    f = identity(n)
    for j in range(n):
        f[k][j] = -1 if j == k else max(0, eps * btilde[k][j])
    return f


def mutate_matrices(lam: SkewForm, btilde, k: int, eps: int | None = None):
    """Mutate (Lambda, B~) at 1-based mutable index k; returns (Lambda', B~').

    Both signs are evaluated and must agree.
    """
    n = len(btilde[0]) if btilde else 0
    if not 1 <= k <= n:
        raise InputError("cannot mutate frozen/invalid vertex")
    k0 = k - 1
    results = []
    for s in ((eps,) if eps else (1, -1)):
        em = e_matrix(btilde, k0, s)
        fm = f_matrix(btilde, k0, s)
        lam2 = mat_mul(mat_mul(transpose(em), [list(r) for r in lam.matrix]), em)
        b2 = mat_mul(mat_mul(em, [list(r) for r in btilde]), fm)
        results.append((lam2, b2))
    if len(results) == 2 and results[0] != results[1]:
        raise AssertionError("mutation depends on the sign choice")
    lam2, b2 = results[0]
    return SkewForm.of(lam2), tuple(tuple(r) for r in b2)


def mutate_bmatrix(btilde, k: int):
    """Classical matrix mutation formula (1-based k); independent of E/F route."""
    m, n = len(btilde), len(btilde[0])
    k0 = k - 1
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            if i == k0 or j == k0:
                row.append(-btilde[i][j])
            else:
                a, b = btilde[i][k0], btilde[k0][j]
                row.append(btilde[i][j] + (abs(a) * b + a * abs(b)) // 2)
        out.append(tuple(row))
    return tuple(out)


# --- seeds ----------------------------------------------------------------

@dataclass(frozen=True)
class QuantumSeed:
    lam: SkewForm
    btilde: tuple[tuple[int, ...], ...]
    vars: tuple[TorusElement, ...]
    basis_change: tuple[tuple[int, ...], ...]
    word: tuple[int, ...] = ()
    commutative: bool = False

    @property
    def m(self) -> int:
        return len(self.btilde)

    @property
    def n(self) -> int:
        return len(self.btilde[0])

    def g_vector(self, i: int) -> Exp:
        """Column i (1-based) of the basis change matrix."""
        return tuple(row[i - 1] for row in self.basis_change)


def initial_seed(pair: CompatiblePair, commutative: bool = False) -> QuantumSeed:
    """Root seed; with ``commutative`` the ambient torus form is zero (the v = 1 engine)."""
    m = pair.m
    ambient = SkewForm.zero(m) if commutative else pair.lam
    frame = SkewForm.zero(m) if commutative else pair.lam
    vars = tuple(TorusElement.monomial(tuple(int(i == j) for j in range(m)), ambient)
                 for i in range(m))
    return QuantumSeed(frame, pair.btilde, vars, tuple(map(tuple, identity(m))), (), commutative)


def exchange_rhs(seed: QuantumSeed, k: int) -> TorusElement:
    """The two-term right-hand side of X_k * X_k' (1-based k)."""
    k0 = k - 1
    col = [row[k0] for row in seed.btilde]
    plus = tuple(max(0, b) for b in col)
    minus = tuple(max(0, -b) for b in col)
    ek = tuple(int(i == k0) for i in range(seed.m))
    lam = seed.lam
    t1 = frame_monomial(plus, lam, seed.vars).scale_v(lam(ek, plus))
    t2 = frame_monomial(minus, lam, seed.vars).scale_v(lam(ek, minus))
    return t1 + t2


def mutate_seed(seed: QuantumSeed, k: int, solver: OffsetSolver | None = None,
                term_ceiling: int | None = None) -> QuantumSeed:
    """Mutate at 1-based mutable index k.

    ``solver`` decides the partial order for the initial B~ (needed to track
    the basis-change matrix, whose k-th column must be the new g-vector).
    """
    if not 1 <= k <= seed.n:
        raise InputError("cannot mutate frozen/invalid vertex")
    rhs = exchange_rhs(seed, k)
    new_var = left_divide(rhs, seed.vars[k - 1])
    if term_ceiling is not None and len(new_var) > term_ceiling:
        from .errors import ResourceCeiling
        raise ResourceCeiling(f"cluster variable exceeds {term_ceiling} terms")
    if seed.commutative:
        lam2 = seed.lam
        b2 = mutate_bmatrix(seed.btilde, k)
    else:
        lam2, b2 = mutate_matrices(seed.lam, seed.btilde, k)
    vars = seed.vars[: k - 1] + (new_var,) + seed.vars[k:]
    basis = _next_basis_change(seed, k, new_var, solver)
    return QuantumSeed(lam2, b2, vars, basis, seed.word + (k,), seed.commutative)


def _next_basis_change(seed, k, new_var, solver):
    g = [list(r) for r in seed.basis_change]
    candidates = []
    for eps in (1, -1):
        cand = mat_mul(g, e_matrix(seed.btilde, k - 1, eps))
        candidates.append(tuple(map(tuple, cand)))
    if solver is None or candidates[0] == candidates[1]:
        return candidates[0]
    target = minimal_degree(new_var, solver.bmat, solver)
    for cand in candidates:
        if tuple(row[k - 1] for row in cand) == target:
            return cand
    raise AssertionError("neither sign reproduces the minimal degree of the new variable")


def walk(pair: CompatiblePair, word: Sequence[int], commutative: bool = False,
         term_ceiling: int | None = None) -> list[QuantumSeed]:
    """Seeds along the path from the root, first letter of ``word`` applied first."""
    for k in word:
        if not 1 <= k <= pair.n:
            raise InputError(f"mutation index {k} is not a mutable vertex")
    solver = OffsetSolver(pair.btilde)
    seeds = [initial_seed(pair, commutative)]
    for k in word:
        seeds.append(mutate_seed(seeds[-1], k, solver, term_ceiling))
    return seeds


def words_up_to(n: int, depth: int) -> list[tuple[int, ...]]:
    """All reduced words (no letter repeated twice in a row) of length <= depth."""
    out = [()]
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for k in range(1, n + 1):
                if not w or w[-1] != k:
                    nxt.append(w + (k,))
        out.extend(nxt)
        frontier = nxt
    return out


def explore(pair: CompatiblePair, depth: int, commutative: bool = False) -> dict[tuple[int, ...], QuantumSeed]:
    """Every seed reachable by a reduced word of length <= depth, keyed by word."""
    solver = OffsetSolver(pair.btilde)
    seeds = {(): initial_seed(pair, commutative)}
    for w in words_up_to(pair.n, depth):
        if w:
            seeds[w] = mutate_seed(seeds[w[:-1]], w[-1], solver)
    return seeds


# --- F-polynomials ---------------------------------------------------------

class FPolynomial:
    """Element of the y-torus: nonnegative exponent e in Z^n -> Laurent coefficient."""

    __slots__ = ("terms", "n")

    def __init__(self, terms, n: int):
        self.terms = {tuple(e): c if isinstance(c, LaurentV) else LaurentV({0: c})
                      for e, c in terms.items()}
        self.terms = {e: c for e, c in self.terms.items() if c}
        self.n = n

    def __eq__(self, other):
        return isinstance(other, FPolynomial) and self.terms == other.terms

    def __repr__(self):
        return f"FPolynomial({dict(sorted(self.terms.items()))!r})"

    @property
    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def at_one(self) -> dict[tuple[int, ...], int]:
        return {e: c.at_one() for e, c in self.terms.items() if c.at_one()}

    def substitute(self, btilde, form: SkewForm) -> TorusElement:
        """Image under y^e -> X^{B~ e}."""
        out = {}
        for e, c in self.terms.items():
            g = tuple(sum(r * x for r, x in zip(row, e)) for row in btilde)
            out[g] = c
        return TorusElement(out, form)

    def to_records(self) -> list[dict]:
        return [{"e": list(e), "coeff": c.to_pairs()} for e, c in sorted(self.terms.items())]


def extract_g_and_F(x: TorusElement, btilde, solver: OffsetSolver | None = None):
    """Split ``x = F|_{y^e -> X^{B~e}} * X^g`` into (g, F)."""
    solver = solver or OffsetSolver(btilde)
    g = minimal_degree(x, btilde, solver)
    n = solver.n
    terms = {}
    for h, coeff in x.terms.items():
        e = solver.nonneg_offset(h, g)
        if e is None:
            raise ValueError("not a cluster-monomial expansion")
        bte = tuple(sum(r * y for r, y in zip(row, e)) for row in btilde)
        terms[e] = coeff.shift(-x.form(bte, g))
    return g, FPolynomial(terms, n)


def rebuild_from_F(F: FPolynomial, g: Sequence[int], btilde, form: SkewForm) -> TorusElement:
    return torus_mul(F.substitute(btilde, form), TorusElement.monomial(tuple(g), form))


def dim_vector_from_F(F: FPolynomial) -> tuple[int, ...]:
    """Componentwise maximum of the support, which must itself lie in the support."""
    if not F.terms:
        raise ValueError("zero F-polynomial")
    top = tuple(max(e[i] for e in F.terms) for i in range(F.n))
    if top not in F.terms:
        raise ValueError("F support not an interval under componentwise order")
    return top


# --- quiver files ----------------------------------------------------------

def parse_quiver_text(text: str, source: str = "<string>") -> tuple[IceQuiver, list[list[int]] | None]:
    """Parse the line-oriented quiver format. Returns (quiver, explicit Lambda or None)."""
    m = None
    frozen: list[int] = []
    arrows: list[tuple[int, int]] = []
    lam_rows: list[list[int]] = []
    lam_auto = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            args = [int(x) for x in rest[1:]] if head == "lambda" else [int(x) for x in rest]
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-integer argument") from None
        if head == "vertices":
            if len(args) != 1 or args[0] < 1:
                raise InputError(f"{source}:{lineno}: expected 'vertices m'")
            m = args[0]
        elif head == "frozen":
            frozen.extend(args)
        elif head == "arrow":
            if len(args) != 2:
                raise InputError(f"{source}:{lineno}: expected 'arrow i j'")
            arrows.append((args[0], args[1]))
        elif head == "lambda":
            if rest == ["auto"]:
                lam_auto = True
            elif rest and rest[0] == "row":
                lam_rows.append(args)
            else:
                raise InputError(f"{source}:{lineno}: expected 'lambda auto' or 'lambda row ...'")
        else:
            raise InputError(f"{source}:{lineno}: unknown directive {head!r}")
    if m is None:
        raise InputError(f"{source}: missing 'vertices' directive")
    n = m - len(frozen)
    if sorted(frozen) != list(range(n + 1, m + 1)):
        raise InputError(f"{source}: frozen vertices must be the last ones ({n + 1}..{m})")
    if lam_rows and (lam_auto or len(lam_rows) != m or any(len(r) != m for r in lam_rows)):
        raise InputError(f"{source}: lambda needs exactly {m} rows of length {m}")
    return IceQuiver(m, n, tuple(arrows)), (lam_rows or None)


def load_quiver(path: str | Path) -> tuple[IceQuiver, CompatiblePair]:
    path = Path(path)
    q, lam = parse_quiver_text(path.read_text(encoding="utf-8"), str(path))
    return q, pair_from_quiver(q, lam)


def parse_word(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        word = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise InputError(f"bad mutation word {text!r}") from None
    if any(k < 1 for k in word):
        raise InputError(f"bad mutation word {text!r}: indices start at 1")
    return word
