"""Exact scalar and linear algebra.

Everything here works over Python integers, :class:`fractions.Fraction` or a
prime field; there is no floating point anywhere.  numpy is used only for
batched rank computations mod p on small integer arrays.  The formal variable ``v``
stands for ``q**(1/2)``, so a q-exponent ``k`` is the v-exponent ``2k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import NotPolynomialCount


class LaurentV:
    """Laurent polynomial in ``v`` with integer coefficients.

    Instances are treated as immutable. Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        self._terms = {int(k): int(c) for k, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentV":
        return cls._raw({exp: coeff} if coeff else {})

    @classmethod
    def one(cls) -> "LaurentV":
        return cls._raw({0: 1})

    @classmethod
    def zero(cls) -> "LaurentV":
        return cls._raw({})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentV({0: other})
        if not isinstance(other, LaurentV):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "LaurentV(0)"
        return "LaurentV(" + " + ".join(f"{c}*v^{k}" for k, c in self.items()) + ")"

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentV({0: other})
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LaurentV._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentV._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return LaurentV.zero()
            return LaurentV._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, LaurentV):
            return NotImplemented
        out: dict[int, int] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                out[a + b] = out.get(a + b, 0) + ca * cb
        return LaurentV._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentV":
        """Multiply by ``v**k``."""
        if not k:
            return self
        return LaurentV._raw({e + k: c for e, c in self._terms.items()})

    def bar(self) -> "LaurentV":
        """Substitute ``v -> v**-1``."""
        return LaurentV._raw({-k: c for k, c in self._terms.items()})

    def at_one(self) -> int:
        return sum(self._terms.values())

    def min_exp(self) -> int:
        return min(self._terms)

    def max_exp(self) -> int:
        return max(self._terms)

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def exact_div(self, other: "LaurentV") -> "LaurentV | None":
        """Return ``self / other`` if it is a Laurent polynomial, else None."""
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if not self:
            return LaurentV.zero()
        if len(other._terms) == 1:
            (k, c), = other._terms.items()
            out = {}
            for e, a in self._terms.items():
                if a % c:
                    return None
                out[e - k] = a // c
            return LaurentV._raw(out)
        rem = dict(self._terms)
        top_b = other.max_exp()
        lead_b = other._terms[top_b]
        low_b = other.min_exp()
        floor = self.min_exp() - low_b
        quot: dict[int, int] = {}
        while rem:
            top = max(rem)
            k = top - top_b
            if k < floor:
                return None
            c, r = divmod(rem[top], lead_b)
            if r:
                return None
            quot[k] = c
            for e, a in other._terms.items():
                s = rem.get(e + k, 0) - c * a
                if s:
                    rem[e + k] = s
                else:
                    rem.pop(e + k, None)
        return LaurentV._raw(quot)

    def to_q_poly(self) -> "IntPolyQ | None":
        """Reinterpret as a polynomial in ``q = v**2`` if all exponents are even and >= 0."""
        if any(k < 0 or k % 2 for k in self._terms):
            return None
        return IntPolyQ({k // 2: c for k, c in self._terms.items()})

    def to_pairs(self) -> list[list[int]]:
        return [[k, c] for k, c in self.items()]


class IntPolyQ:
    """Integer polynomial in ``q``; immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | Sequence[int] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        d = {int(k): int(c) for k, c in items if c}
        if any(k < 0 for k in d):
            raise ValueError("negative q-exponent in IntPolyQ")
        top = max(d, default=-1)
        self.coeffs = tuple(d.get(i, 0) for i in range(top + 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolyQ([other])
        return isinstance(other, IntPolyQ) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolyQ([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolyQ([c * other for c in self.coeffs])
        out = [0] * max(len(self.coeffs) + len(other.coeffs) - 1, 0)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolyQ(out)

    def shift(self, k: int) -> "IntPolyQ":
        """Multiply by ``q**k`` (k >= 0)."""
        return IntPolyQ((0,) * k + self.coeffs) if self.coeffs else self

    def __call__(self, q):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def to_laurent(self) -> LaurentV:
        return LaurentV({2 * k: c for k, c in enumerate(self.coeffs)})

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "IntPolyQ(0)"
        parts = [f"{c}*q^{k}" for k, c in enumerate(self.coeffs) if c]
        return "IntPolyQ(" + " + ".join(parts) + ")"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if mono and abs(c) == 1:
                term = mono
            else:
                term = f"{abs(c)}{'*' + mono if mono else ''}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, term))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {t}" for s, t in parts[1:])


def gaussian_binomial(n: int, k: int) -> IntPolyQ:
    """Gaussian binomial ``[n choose k]_q``; zero when k > n."""
    if k < 0 or n < 0 or k > n:
        return IntPolyQ()
    row = [IntPolyQ([1])]  # row[j] = [i choose j] for the current i
    for i in range(1, n + 1):
        new = [IntPolyQ([1])]
        for j in range(1, min(i, k) + 1):
            left = row[j - 1]
            right = row[j] if j < len(row) else IntPolyQ()
            new.append(left + right.shift(j))
        row = new
    return row[k]


def gaussian_binomial_at(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def primes(start: int = 2) -> Iterator[int]:
    """Primes >= start in increasing order."""
    p = max(start, 2)
    while True:
        if all(p % d for d in range(2, int(p ** 0.5) + 1)):
            yield p
        p += 1


def first_primes(count: int) -> list[int]:
    return list(itertools.islice(primes(), count))


def interpolate_rational(points: Sequence[tuple[int, int]]) -> list[Fraction]:
    """Coefficients (low to high) of the Lagrange interpolant through ``points``."""
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xj * basis[t + 1]
            denom *= xi - xj
        scale = Fraction(yi, denom)
        for t, b in enumerate(basis):
            coeffs[t] += b * scale
    return coeffs


def interpolate_counting_poly(samples: Sequence[tuple[int, int]], degree_bound: int) -> IntPolyQ:
    """Fit a polynomial of degree <= degree_bound and certify it.

    The first ``degree_bound + 1`` samples determine the interpolant; every
    remaining sample must be reproduced exactly and the coefficients must be
    integers.

    Raises
    ------
    NotPolynomialCount
        with ``kind`` ``"integrality"`` or ``"consistency"``.
    """
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    if len(samples) < degree_bound + 2:
        raise ValueError(f"need at least {degree_bound + 2} samples, got {len(samples)}")
    if len({p for p, _ in samples}) != len(samples):
        raise ValueError("sample primes must be pairwise distinct")
    fit = interpolate_rational(samples[: degree_bound + 1])
    if any(c.denominator != 1 for c in fit):
        raise NotPolynomialCount("integrality")
    poly = IntPolyQ([int(c) for c in fit])
    for p, count in samples[degree_bound + 1:]:
        if poly(p) != count:
            raise NotPolynomialCount("consistency")
    return poly


def _palindromic_basis(degree: int) -> list[dict[int, int]]:
    """q^j + q^(degree-j) for j <= degree/2 (a single term in the middle)."""
    out = []
    for j in range(degree // 2 + 1):
        out.append({j: 1} if 2 * j == degree else {j: 1, degree - j: 1})
    return out


def interpolate_palindromic_poly(samples: Sequence[tuple[int, int]], degree: int) -> IntPolyQ:
    """Fit a palindromic polynomial of exact degree ``degree`` and certify it.

    A palindromic polynomial of degree D has D//2 + 1 free coefficients; they
    are determined by that many samples and the rest are held out.  Same
    failure kinds as :func:`interpolate_counting_poly`.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    basis = _palindromic_basis(degree)
    k = len(basis)
    if len(samples) < k + 1:
        raise ValueError(f"need at least {k + 1} samples, got {len(samples)}")
    if len({p for p, _ in samples}) != len(samples):
        raise ValueError("sample primes must be pairwise distinct")
    system = [[sum(c * p ** e for e, c in b.items()) for b in basis] for p, _ in samples[:k]]
    rhs = [y for _, y in samples[:k]]
    sol = solve_rational(system, rhs)
    if any(c.denominator != 1 for c in sol):
        raise NotPolynomialCount("integrality")
    coeffs: dict[int, int] = {}
    for c, b in zip(sol, basis):
        for e in b:
            coeffs[e] = int(c)
    poly = IntPolyQ(coeffs)
    for p, count in samples[k:]:
        if poly(p) != count:
            raise NotPolynomialCount("consistency")
    return poly


# --- rational matrices -----------------------------------------------------

def solve_rational(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve the square system a x = b exactly."""
    inv = invert_integer_matrix(a)
    return [sum(x * y for x, y in zip(row, b)) for row in inv]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def mat_vec(a, x):
    return [sum(r * y for r, y in zip(row, x)) for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def invert_integer_matrix(a: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse over Q by Gauss-Jordan elimination."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix not square")
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix not invertible")
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def left_inverse(b: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Rational n x m matrix L with L b = I for a full-column-rank m x n matrix b."""
    bt = transpose(b)
    gram = mat_mul(bt, b)
    try:
        g_inv = invert_integer_matrix(gram)
    except ValueError:
        raise ValueError("matrix does not have full column rank") from None
    return mat_mul(g_inv, bt)


# --- prime fields ----------------------------------------------------------

@dataclass(frozen=True)
class PrimeFieldMatrix:
    modulus: int
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], modulus: int, cols: int | None = None):
        data = tuple(tuple(x % modulus for x in r) for r in rows)
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        return cls(modulus, len(data), ncols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int):
        return cls(modulus, rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __matmul__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        p = self.modulus
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        data = tuple(tuple(sum(x * y for x, y in zip(r, c)) % p for c in cols)
                     for r in self.entries)
        return PrimeFieldMatrix(p, self.rows, other.cols, data)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        p = self.modulus
        return tuple(sum(x * y for x, y in zip(r, vec)) % p for r in self.entries)


def rref_mod_p(rows: Sequence[Sequence[int]], p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F_p; returns (nonzero rows, pivot columns)."""
    m = [[x % p for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_mod_p(rows, p: int, ncols: int) -> int:
    return len(rref_mod_p(rows, p, ncols)[1])


def solve_linear_fp(a: PrimeFieldMatrix) -> tuple[int, list[tuple[int, ...]]]:
    """Null space of ``a`` over F_p: (nullity, basis)."""
    p = a.modulus
    red, pivots = rref_mod_p(a.entries, p, a.cols)
    free = [c for c in range(a.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        vec = [0] * a.cols
        vec[f] = 1
        for row, pc in zip(red, pivots):
            vec[pc] = -row[f] % p
        basis.append(tuple(vec))
    return len(free), basis


def batched_rank_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices, shape (N, rows, cols) -> (N,)."""
    a = np.array(a, dtype=np.int64) % p
    n, nrows, ncols = a.shape
    rank = np.zeros(n, dtype=np.int64)
    if nrows == 0 or ncols == 0 or n == 0:
        return rank
    inv_table = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    row_ids = np.arange(nrows)
    for c in range(ncols):
        cand = (a[:, :, c] != 0) & (row_ids[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = np.nonzero(has)[0]
        piv = cand[idx].argmax(axis=1)
        r = rank[idx]
        piv_rows = a[idx, piv].copy()
        a[idx, piv] = a[idx, r]
        piv_rows = piv_rows * inv_table[piv_rows[:, c]][:, None] % p
        a[idx, r] = piv_rows
        factors = a[idx, :, c].copy()
        factors[np.arange(len(idx)), r] = 0
        a[idx] = (a[idx] - factors[:, :, None] * piv_rows[:, None, :]) % p
        rank[idx] += 1
    return rank
