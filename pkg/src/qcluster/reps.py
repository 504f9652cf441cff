"""Representations of an acyclic quiver over prime fields.

Convention: for an arrow ``a: i -> j`` the structure map goes from the
vertex-j space to the vertex-i space (a ``dims[i] x dims[j]`` matrix), and a
subrepresentation ``U`` must satisfy ``M_a(U_j) <= U_i``.  The Euler form is
calibrated to match: ``<d, f> = sum_v d_v f_v - sum_{i->j} d_j f_i``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .cluster import Quiver
from .errors import ResourceCeiling, RigiditySamplingError
from .exact import (
    PrimeFieldMatrix,
    batched_rank_mod_p,
    gaussian_binomial_at,
    rank_mod_p,
    rref_mod_p,
    solve_linear_fp,
)

DEFAULT_CEILING = 10 ** 8
DEFAULT_TRIALS = 64


def euler_form(q: Quiver, d: Sequence[int], f: Sequence[int]) -> int:
    return (sum(x * y for x, y in zip(d, f))
            - sum(d[j] * f[i] for i, j in q.arrows))


def antisymmetrized_euler_form(q: Quiver, d, f) -> int:
    return euler_form(q, d, f) - euler_form(q, f, d)


@dataclass(frozen=True)
class QuiverRep:
    quiver: Quiver
    prime: int
    dims: tuple[int, ...]
    maps: tuple[PrimeFieldMatrix, ...]  # one per arrow, in quiver.arrows order

    def __post_init__(self):
        if len(self.dims) != self.quiver.n or len(self.maps) != len(self.quiver.arrows):
            raise ValueError("representation does not match its quiver")
        for (i, j), mat in zip(self.quiver.arrows, self.maps):
            if (mat.rows, mat.cols) != (self.dims[i], self.dims[j]) or mat.modulus != self.prime:
                raise ValueError(f"bad matrix shape for arrow {i}->{j}")

    @classmethod
    def zero_maps(cls, q: Quiver, dims, prime: int) -> "QuiverRep":
        maps = tuple(PrimeFieldMatrix.zeros(dims[i], dims[j], prime) for i, j in q.arrows)
        return cls(q, prime, tuple(dims), maps)

    @classmethod
    def simple(cls, q: Quiver, v: int, prime: int) -> "QuiverRep":
        return cls.zero_maps(q, tuple(int(i == v) for i in range(q.n)), prime)

    def dump(self) -> str:
        """Plain-text dump: prime, dims, then each arrow matrix row-major."""
        lines = [f"prime {self.prime}", "dims " + " ".join(map(str, self.dims))]
        for (i, j), mat in zip(self.quiver.arrows, self.maps):
            flat = [x for r in mat.entries for x in r]
            lines.append(f"arrow {i + 1} {j + 1} " + " ".join(map(str, flat)))
        return "\n".join(lines) + "\n"


def hom_dim(m: QuiverRep, n: QuiverRep) -> int:
    """dim Hom(M, N): families (phi_v) with phi_i M_a = N_a phi_j for each arrow a: i->j."""
    if m.prime != n.prime:
        raise ValueError("representations over different fields")
    p = m.prime
    q = m.quiver
    # unknown phi_v is a dims_n[v] x dims_m[v] matrix, stored row-major
    offsets, total = [], 0
    for v in range(q.n):
        offsets.append(total)
        total += n.dims[v] * m.dims[v]
    if total == 0:
        return 0

    def var(v, r, c):
        return offsets[v] + r * m.dims[v] + c

    rows = []
    for (i, j), ma, na in zip(q.arrows, m.maps, n.maps):
        for r in range(n.dims[i]):
            for c in range(m.dims[j]):
                eq = [0] * total
                for s in range(m.dims[i]):  # (phi_i M_a)[r, c]
                    if ma.entries[s][c]:
                        eq[var(i, r, s)] += ma.entries[s][c]
                for s in range(n.dims[j]):  # (N_a phi_j)[r, c]
                    if na.entries[r][s]:
                        eq[var(j, s, c)] -= na.entries[r][s]
                if any(x % p for x in eq):
                    rows.append(eq)
    if not rows:
        return total
    nullity, _ = solve_linear_fp(PrimeFieldMatrix.from_rows(rows, p, total))
    return nullity


def ext_dim(m: QuiverRep, n: QuiverRep) -> int:
    """dim Ext^1(M, N), via the Euler form (the path algebra is hereditary)."""
    return hom_dim(m, n) - euler_form(m.quiver, m.dims, n.dims)


def is_rigid(m: QuiverRep) -> bool:
    return hom_dim(m, m) == euler_form(m.quiver, m.dims, m.dims)


def random_rep(q: Quiver, dims, prime: int, rng: random.Random) -> QuiverRep:
    maps = tuple(
        PrimeFieldMatrix.from_rows(
            [[rng.randrange(prime) for _ in range(dims[j])] for _ in range(dims[i])],
            prime, cols=dims[j])
        for i, j in q.arrows)
    return QuiverRep(q, prime, tuple(dims), maps)


def random_rigid_rep(q: Quiver, m_vec, prime: int, rng: random.Random | int = 0,
                     max_trials: int = DEFAULT_TRIALS) -> QuiverRep:
    """Uniformly random representation accepted by its rigidity certificate."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    m_vec = tuple(m_vec)
    chi = euler_form(q, m_vec, m_vec)
    if any(m_vec) and chi <= 0:
        raise RigiditySamplingError(
            f"no rigid representation found: <m,m> = {chi} but dim End(M) >= 1")
    for _ in range(max_trials):
        rep = random_rep(q, m_vec, prime, rng)
        if hom_dim(rep, rep) == chi:
            return rep
    raise RigiditySamplingError(
        "no rigid representation found (dimension vector may not be a rigid class, "
        "or field too small)")


def direct_sum(m: QuiverRep, n: QuiverRep) -> QuiverRep:
    if m.prime != n.prime or m.quiver != n.quiver:
        raise ValueError("direct sum needs a common quiver and field")
    dims = tuple(a + b for a, b in zip(m.dims, n.dims))
    maps = []
    for (i, j), a, b in zip(m.quiver.arrows, m.maps, n.maps):
        rows = [list(r) + [0] * n.dims[j] for r in a.entries]
        rows += [[0] * m.dims[j] + list(r) for r in b.entries]
        maps.append(PrimeFieldMatrix.from_rows(rows, m.prime, cols=dims[j]))
    return QuiverRep(m.quiver, m.prime, dims, tuple(maps))


# --- subspaces -------------------------------------------------------------

def enumerate_subspaces(d: int, r: int, p: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Each r-dimensional subspace of F_p^d once, as its RREF basis."""
    if r < 0 or r > d:
        return
    if r == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(d), r):
        pivset = set(pivots)
        # free slots: row t, column c > pivots[t], c not a pivot
        slots = [(t, c) for t, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivset]
        for values in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * d for _ in range(r)]
            for t, pc in enumerate(pivots):
                rows[t][pc] = 1
            for (t, c), x in zip(slots, values):
                rows[t][c] = x
            yield tuple(tuple(row) for row in rows)


def _supersets(w_rows, w_pivots, d, r, p):
    """Subspaces U of F_p^d with W <= U, dim U = r (W in RREF)."""
    free = [c for c in range(d) if c not in set(w_pivots)]
    for sub in enumerate_subspaces(len(free), r - len(w_rows), p):
        lifted = []
        for row in sub:
            vec = [0] * d
            for c, x in zip(free, row):
                vec[c] = x
            lifted.append(vec)
        yield [list(x) for x in w_rows] + lifted


def dual_rep(m: QuiverRep) -> QuiverRep:
    """Transpose representation on the opposite quiver.

    Taking annihilators identifies subrepresentations of class e in ``m``
    with subrepresentations of class ``dims - e`` in the dual.
    """
    maps = tuple(PrimeFieldMatrix.from_rows(list(zip(*mat.entries)) if mat.rows else
                                            [[] for _ in range(mat.cols)],
                                            m.prime, cols=mat.rows)
                 for mat in m.maps)
    return QuiverRep(m.quiver.opposite(), m.prime, m.dims, maps)


def _enumerated(q: Quiver) -> set[int]:
    """Vertices whose subspace is enumerated: arrow targets (they constrain their sources).

    Every other vertex is a source and is counted in closed form.
    """
    return {j for _, j in q.arrows}


def estimated_work(m: QuiverRep, e) -> int:
    """Upper bound on the number of enumerated subspace tuples (closed-form vertices are free)."""
    work = 1
    for v in _enumerated(m.quiver):
        work *= gaussian_binomial_at(m.dims[v], e[v], m.prime)
    return work


def count_subreps(m: QuiverRep, e: Sequence[int], ceiling: int = DEFAULT_CEILING) -> int:
    """Number of subrepresentations of ``m`` with dimension vector ``e`` (F_p-points of Gr_e).

    Works on ``m`` or on its dual, whichever needs less enumeration.
    """
    e = tuple(e)
    if len(e) != len(m.dims) or any(k < 0 or k > d for k, d in zip(e, m.dims)):
        return 0
    co = tuple(d - k for d, k in zip(m.dims, e))
    dual = dual_rep(m)
    work, dual_work = estimated_work(m, e), estimated_work(dual, co)
    if min(work, dual_work) > ceiling:
        raise ResourceCeiling(f"instance too large (work estimate above {ceiling})")
    if dual_work < work:
        return _count(dual, co)
    return _count(m, e)


_BATCH_MIN = 64
_CHUNK = 1 << 16


def _count(m: QuiverRep, e: tuple[int, ...]) -> int:
    q, p = m.quiver, m.prime
    enum = _enumerated(q)
    order = [v for v in reversed(q.topological_order()) if v in enum]  # targets first
    sources = [v for v in range(q.n) if v not in enum]
    # out_maps[v]: maps M_a: M_j -> M_v for arrows v -> j (constraints on U_v)
    out_maps = {v: [] for v in range(q.n)}
    for (i, j), mat in zip(q.arrows, m.maps):
        out_maps[i].append((j, mat))
    # closed-form factor of a source vertex as a function of the rank of its forced part
    tables = {v: [gaussian_binomial_at(m.dims[v] - r, e[v] - r, p) if r <= e[v] else 0
                  for r in range(m.dims[v] + 1)] for v in sources}
    chosen: dict[int, list] = {}

    def images(v, skip=None):
        return [mat.apply(u) for j, mat in out_maps[v] if j != skip for u in chosen[j]]

    def source_product():
        total = 1
        for v in sources:
            total *= tables[v][rank_mod_p(images(v), p, m.dims[v])]
            if not total:
                break
        return total

    def last_level(v, w_rows, w_piv):
        d, k = m.dims[v], e[v]
        total = 0
        for batch in _superset_batches(w_rows, w_piv, d, k, p):
            if len(batch) < _BATCH_MIN:
                for u in batch:
                    chosen[v] = u.tolist()
                    total += source_product()
                continue
            weight = np.ones(len(batch), dtype=object)
            for s in sources:
                fixed = images(s, skip=v)
                parts = [batch @ _as_array(mat).T % p for j, mat in out_maps[s] if j == v]
                if fixed:
                    parts.append(np.broadcast_to(np.array(fixed, dtype=np.int64),
                                                 (len(batch), len(fixed), m.dims[s])))
                if parts and m.dims[s]:
                    ranks = batched_rank_mod_p(np.concatenate(parts, axis=1), p)
                else:
                    ranks = np.zeros(len(batch), dtype=np.int64)
                weight = weight * np.array(tables[s], dtype=object)[ranks]
            total += int(weight.sum())
        chosen.pop(v, None)
        return total

    def rec(idx: int) -> int:
        if idx == len(order):
            return source_product()
        v = order[idx]
        d, k = m.dims[v], e[v]
        imgs = images(v)
        w_rows, w_piv = rref_mod_p(imgs, p, d) if imgs else ([], [])
        if len(w_rows) > k:
            return 0
        if idx == len(order) - 1:
            return last_level(v, w_rows, w_piv)
        total = 0
        for u in _supersets(w_rows, w_piv, d, k, p):
            chosen[v] = u
            total += rec(idx + 1)
        chosen.pop(v, None)
        return total

    return rec(0)


def _as_array(mat: PrimeFieldMatrix) -> np.ndarray:
    return np.array(mat.entries, dtype=np.int64).reshape(mat.rows, mat.cols)


def _superset_batches(w_rows, w_piv, d, r, p):
    """Same subspaces as :func:`_supersets`, as int64 arrays of shape (N, r, d)."""
    free = [c for c in range(d) if c not in set(w_piv)]
    base = np.zeros((r, d), dtype=np.int64)
    for t, row in enumerate(w_rows):
        base[t] = row
    extra = r - len(w_rows)
    if extra == 0:
        yield base[None]
        return
    for pivots in itertools.combinations(range(len(free)), extra):
        pivset = set(pivots)
        slots = [(t, c) for t, pc in enumerate(pivots) for c in range(pc + 1, len(free))
                 if c not in pivset]
        total = p ** len(slots)
        for lo in range(0, total, _CHUNK):
            idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
            out = np.broadcast_to(base, (len(idx), r, d)).copy()
            for t, pc in enumerate(pivots):
                out[:, len(w_rows) + t, free[pc]] = 1
            for s, (t, c) in enumerate(slots):
                out[:, len(w_rows) + t, free[c]] = (idx // p ** s) % p
            yield out


def count_subreps_brute(m: QuiverRep, e: Sequence[int]) -> int:
    """Reference count: all tuples of subspaces, filtered by stability. Tiny inputs only."""
    q, p = m.quiver, m.prime
    choices = [list(enumerate_subspaces(d, k, p)) for d, k in zip(m.dims, e)]
    total = 0
    for combo in itertools.product(*choices):
        ok = True
        for (i, j), mat in zip(q.arrows, m.maps):
            target_rank = len(combo[i])
            for u in combo[j]:
                img = mat.apply(u)
                if len(rref_mod_p(list(combo[i]) + [img], p, m.dims[i])[1]) > target_rank:
                    ok = False
                    break
            if not ok:
                break
        total += ok
    return total
