"""Based quantum torus over Z[v, v^-1] with v = q^(1/2).

Elements are finite sums ``sum_g P_g(v) X^g`` with the multiplication rule
``X^g X^h = v^{g^T L h} X^{g+h}`` for a skew-symmetric integer matrix ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import LaurentViolation
from .exact import LaurentV, left_inverse, mat_vec

Exp = tuple[int, ...]


@dataclass(frozen=True)
class SkewForm:
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = len(self.matrix)
        for i in range(m):
            if len(self.matrix[i]) != m:
                raise ValueError("skew form matrix must be square")
            for j in range(m):
                if self.matrix[i][j] != -self.matrix[j][i]:
                    raise ValueError("matrix is not skew-symmetric")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "SkewForm":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def zero(cls, m: int) -> "SkewForm":
        return cls(tuple((0,) * m for _ in range(m)))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def __call__(self, g: Sequence[int], h: Sequence[int]) -> int:
        return sum(gi * sum(r * hj for r, hj in zip(row, h))
                   for gi, row in zip(g, self.matrix) if gi)

    def apply(self, h: Sequence[int]) -> tuple[int, ...]:
        """The vector ``L h``."""
        return tuple(sum(r * x for r, x in zip(row, h)) for row in self.matrix)


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _order_key(g: Exp):
    # graded lex; compatible with addition on Z^m
    return (sum(g), g)


class TorusElement:
    """Element of the quantum torus attached to ``form``. Immutable."""

    __slots__ = ("terms", "form")

    def __init__(self, terms: Mapping[Sequence[int], LaurentV], form: SkewForm):
        m = form.rank
        clean: dict[Exp, LaurentV] = {}
        for g, c in terms.items():
            g = tuple(int(x) for x in g)
            if len(g) != m:
                raise ValueError("rank mismatch")
            if not isinstance(c, LaurentV):
                c = LaurentV({0: c})
            if c:
                clean[g] = clean[g] + c if g in clean else c
                if not clean[g]:
                    del clean[g]
        self.terms = clean
        self.form = form

    @classmethod
    def _raw(cls, terms, form):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.form = form
        return obj

    @classmethod
    def monomial(cls, g: Sequence[int], form: SkewForm, coeff: LaurentV | int = 1) -> "TorusElement":
        return cls({tuple(g): coeff}, form)

    @classmethod
    def unit(cls, form: SkewForm) -> "TorusElement":
        return cls.monomial((0,) * form.rank, form)

    @property
    def rank(self) -> int:
        return self.form.rank

    @property
    def support(self) -> list[Exp]:
        return sorted(self.terms)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        body = " + ".join(f"({c!r})X{g}" for g, c in sorted(self.terms.items()))
        return f"TorusElement({body or '0'})"

    def __add__(self, other: "TorusElement") -> "TorusElement":
        _check_rank(self, other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            s = out[g] + c if g in out else c
            if s:
                out[g] = s
            else:
                out.pop(g, None)
        return TorusElement._raw(out, self.form)

    def __neg__(self):
        return TorusElement._raw({g: -c for g, c in self.terms.items()}, self.form)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TorusElement):
            return torus_mul(self, other)
        if isinstance(other, (int, LaurentV)):
            c = other if isinstance(other, LaurentV) else LaurentV({0: other})
            return TorusElement({g: p * c for g, p in self.terms.items()}, self.form)
        return NotImplemented

    __rmul__ = __mul__

    def scale_v(self, k: int) -> "TorusElement":
        """Multiply every coefficient by ``v**k``."""
        return TorusElement._raw({g: c.shift(k) for g, c in self.terms.items()}, self.form)

    def __pow__(self, n: int) -> "TorusElement":
        if n < 0:
            raise ValueError("negative powers of torus elements are not supported")
        out = TorusElement.unit(self.form)
        for _ in range(n):
            out = torus_mul(out, self)
        return out

    def leading(self) -> tuple[Exp, LaurentV]:
        g = max(self.terms, key=_order_key)
        return g, self.terms[g]

    def trailing(self) -> tuple[Exp, LaurentV]:
        g = min(self.terms, key=_order_key)
        return g, self.terms[g]

    def with_form(self, form: SkewForm) -> "TorusElement":
        return TorusElement._raw(dict(self.terms), form)

    def to_records(self) -> list[dict]:
        """Report serialization: records sorted lexicographically by exponent."""
        return [{"exponent": list(g), "coeff": c.to_pairs()}
                for g, c in sorted(self.terms.items())]

    @classmethod
    def from_records(cls, records, form: SkewForm) -> "TorusElement":
        return cls({tuple(r["exponent"]): LaurentV({k: c for k, c in r["coeff"]})
                    for r in records}, form)


def _check_rank(a: TorusElement, b: TorusElement):
    if a.form.rank != b.form.rank:
        raise ValueError("rank mismatch")


def torus_mul(a: TorusElement, b: TorusElement) -> TorusElement:
    """Twisted product ``a * b``."""
    _check_rank(a, b)
    form = a.form
    lam_b = {h: form.apply(h) for h in b.terms}
    out: dict[Exp, LaurentV] = {}
    for g, cg in a.terms.items():
        for h, ch in b.terms.items():
            twist = sum(x * y for x, y in zip(g, lam_b[h]))
            k = _vadd(g, h)
            term = (cg * ch).shift(twist)
            out[k] = out[k] + term if k in out else term
    return TorusElement._raw({k: c for k, c in out.items() if c}, form)


def frame_monomial(c: Sequence[int], form: SkewForm, vars: Sequence[TorusElement]) -> TorusElement:
    """Normalized toric-frame monomial for a nonnegative exponent vector ``c``.

    ``form`` is the Lambda-matrix of the frame (not the ambient torus form).
    """
    if any(x < 0 for x in c):
        raise ValueError("negative frame exponent unsupported")
    if len(c) != len(vars) or len(c) != form.rank:
        raise ValueError("rank mismatch")
    m = len(c)
    twist = -sum(c[i] * c[j] * form.matrix[i][j] for i in range(m) for j in range(i + 1, m))
    out = TorusElement.unit(vars[0].form) if vars else None
    for ci, x in zip(c, vars):
        for _ in range(ci):
            out = torus_mul(out, x)
    return out.scale_v(twist)


def _corner(a: TorusElement, pick) -> Exp:
    return tuple(pick(col) for col in zip(*a.terms))


def left_divide(b: TorusElement, a: TorusElement, max_steps: int = 1_000_000) -> TorusElement:
    """The unique ``c`` with ``a * c == b``.

    Leading-term elimination under graded lex order; every coefficient
    quotient must be exact in Z[v, v^-1].
    """
    _check_rank(a, b)
    fail = "division failed: Laurent phenomenon violated (likely input bug)"
    if not a:
        raise ZeroDivisionError("division by zero torus element")
    if not b:
        return TorusElement._raw({}, a.form)
    form = a.form
    ga, ca = a.leading()
    floor = _order_key(_vsub(b.trailing()[0], a.trailing()[0]))
    # Newton polytopes add under multiplication, so supp(c) lies in this box
    # (graded lex alone is not a well-order on Z^m)
    lo = _vsub(_corner(b, min), _corner(a, min))
    hi = _vsub(_corner(b, max), _corner(a, max))
    lam_ga = [sum(ga[i] * form.matrix[i][j] for i in range(len(ga))) for j in range(len(ga))]
    rem = dict(b.terms)
    quot: dict[Exp, LaurentV] = {}
    steps = 0
    while rem:
        steps += 1
        if steps > max_steps:
            raise LaurentViolation(fail)
        g = max(rem, key=_order_key)
        h = _vsub(g, ga)
        if _order_key(h) < floor or any(x < l or x > u for x, l, u in zip(h, lo, hi)):
            raise LaurentViolation(fail)
        twist = sum(x * y for x, y in zip(lam_ga, h))
        c = rem[g].exact_div(ca.shift(twist))
        if c is None:
            raise LaurentViolation(fail)
        quot[h] = c
        step = torus_mul(a, TorusElement._raw({h: c}, form))
        for k, p in step.terms.items():
            s = rem[k] - p if k in rem else -p
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return TorusElement._raw(quot, form)


def bar_involution(a: TorusElement) -> TorusElement:
    return TorusElement._raw({g: c.bar() for g, c in a.terms.items()}, a.form)


def specialize_v1(a: TorusElement) -> dict[Exp, int]:
    """Image in the commutative Laurent ring: exponent -> integer coefficient."""
    out = {}
    for g, c in a.terms.items():
        val = c.at_one()
        if val:
            out[g] = val
    return out


def commutative_mul(a: Mapping[Exp, int], b: Mapping[Exp, int]) -> dict[Exp, int]:
    out: dict[Exp, int] = {}
    for g, x in a.items():
        for h, y in b.items():
            k = _vadd(g, h)
            out[k] = out.get(k, 0) + x * y
    return {k: c for k, c in out.items() if c}


class OffsetSolver:
    """Decides ``d in B Z^n`` and recovers ``e`` with ``B e = d`` for full-rank B."""

    def __init__(self, bmat: Sequence[Sequence[int]]):
        self.bmat = [list(r) for r in bmat]
        self.n = len(bmat[0]) if bmat else 0
        self._linv = left_inverse(self.bmat)

    def solve(self, d: Sequence[int]) -> tuple[int, ...] | None:
        """Integer ``e`` with ``B e = d`` or None."""
        e = mat_vec(self._linv, d)
        if any(isinstance(x, Fraction) and x.denominator != 1 for x in e):
            return None
        e = tuple(int(x) for x in e)
        if list(mat_vec(self.bmat, e)) != list(d):
            return None
        return e

    def nonneg_offset(self, g: Sequence[int], h: Sequence[int]) -> tuple[int, ...] | None:
        """``e >= 0`` with ``g = h + B e``, or None."""
        e = self.solve(_vsub(g, h))
        if e is None or any(x < 0 for x in e):
            return None
        return e


def minimal_degree(a: TorusElement, bmat, solver: OffsetSolver | None = None) -> Exp:
    """Unique minimum of the support of ``a`` under ``g >= h iff g - h in B Z^n_{>=0}``."""
    if not a:
        raise ValueError("minimal degree of zero element")
    solver = solver or OffsetSolver(bmat)
    support = a.support
    # candidate: the order-minimal element w.r.t. any linear extension; test it
    for h in sorted(support, key=_order_key):
        if all(g == h or solver.nonneg_offset(g, h) is not None for g in support):
            return h
    raise ValueError("minimal degree not unique")
