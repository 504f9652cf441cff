import itertools
import random

import pytest
from hypothesis import given, strategies as st

from qcluster.cluster import Quiver
from qcluster.errors import ResourceCeiling, RigiditySamplingError
from qcluster.exact import PrimeFieldMatrix, gaussian_binomial
from qcluster.reps import (
    QuiverRep,
    antisymmetrized_euler_form,
    count_subreps,
    count_subreps_brute,
    direct_sum,
    dual_rep,
    enumerate_subspaces,
    euler_form,
    ext_dim,
    hom_dim,
    is_rigid,
    random_rep,
    random_rigid_rep,
)
from qcluster import reps as reps_module

A2 = Quiver(2, ((0, 1),))
E6 = Quiver(7, ((0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)))
K4 = Quiver(2, ((0, 1),) * 4)


def rep(q, dims, p, *mats):
    maps = tuple(PrimeFieldMatrix.from_rows(m, p, cols=dims[j])
                 for m, (i, j) in zip(mats, q.arrows))
    return QuiverRep(q, p, tuple(dims), maps)


def spans(d, k, p):
    """All k-dimensional subspaces of F_p^d as explicit vector sets."""
    vectors = list(itertools.product(range(p), repeat=d))
    level = {frozenset([(0,) * d])}
    for _ in range(k):
        level = {frozenset(tuple((a + c * b) % p for a, b in zip(s, v)) for s in span
                           for c in range(p))
                 for span in level for v in vectors if v not in span}
    return level


def count_by_vector_sets(m, e):
    """Independent oracle: subspaces as sets of vectors, stability checked vector by vector."""
    p = m.prime
    if any(k < 0 or k > d for k, d in zip(e, m.dims)):
        return 0
    choices = [list(spans(d, k, p)) for d, k in zip(m.dims, e)]
    total = 0
    for combo in itertools.product(*choices):
        total += all(mat.apply(u) in combo[i] if mat.cols else True
                     for (i, j), mat in zip(m.quiver.arrows, m.maps) for u in combo[j])
    return total


P11 = rep(A2, (1, 1), 5, [[1]])


# --- Euler form ---------------------------------------------------------------

def test_euler_form_examples():
    assert euler_form(A2, (1, 0), (0, 1)) == 0
    assert euler_form(A2, (0, 1), (1, 0)) == -1
    assert euler_form(A2, (1, 1), (1, 1)) == 1
    s1 = (1, 0, 0, 0, 0, 0, 0)
    m = (2, 1, 1, 1, 1, 1, 1)
    assert euler_form(E6, s1, tuple(a - b for a, b in zip(m, s1))) == 1


@pytest.mark.parametrize("q", [A2, E6, K4, Quiver(3, ((0, 1), (1, 2)))])
def test_antisymmetrized_form_is_the_exchange_matrix(q):
    b = q.bmatrix()
    for i, j in itertools.product(range(q.n), repeat=2):
        ei = tuple(int(k == i) for k in range(q.n))
        ej = tuple(int(k == j) for k in range(q.n))
        assert antisymmetrized_euler_form(q, ei, ej) == b[i][j]


# --- Hom and Ext --------------------------------------------------------------

def test_hom_examples():
    s1, s2 = QuiverRep.simple(A2, 0, 3), QuiverRep.simple(A2, 1, 3)
    assert hom_dim(s1, s1) == 1
    assert hom_dim(s1, s2) == 0
    assert hom_dim(P11, P11) == 1
    # P(1,1) has S1 as a sub and S2 as a quotient in this convention
    p = rep(A2, (1, 1), 3, [[1]])
    assert hom_dim(s1, p) == 1 and hom_dim(p, s2) == 1
    assert hom_dim(p, s1) == 0 and hom_dim(s2, p) == 0


@given(st.sampled_from([A2, K4, Quiver(3, ((0, 1), (2, 1)))]), st.integers(0, 10 ** 6),
       st.sampled_from([2, 3]))
def test_ext_is_nonnegative(q, seed, p):
    rng = random.Random(seed)
    dims_m = tuple(rng.randrange(3) for _ in range(q.n))
    dims_n = tuple(rng.randrange(3) for _ in range(q.n))
    m, n = random_rep(q, dims_m, p, rng), random_rep(q, dims_n, p, rng)
    assert ext_dim(m, n) >= 0


# --- rigid models -------------------------------------------------------------

def test_rigid_sampler_examples():
    m = random_rigid_rep(A2, (1, 1), 5, 0)
    assert m.maps[0].entries[0][0] != 0
    assert hom_dim(m, m) == euler_form(A2, (1, 1), (1, 1)) == 1
    s2 = random_rigid_rep(A2, (0, 1), 5, 0)
    assert s2.dims == (0, 1) and hom_dim(s2, s2) == 1


def test_four_kronecker_has_no_rigid_model():
    assert euler_form(K4, (3, 4), (3, 4)) == -23
    with pytest.raises(RigiditySamplingError, match="no rigid representation found"):
        random_rigid_rep(K4, (3, 4), 2, 0)


def test_rigid_e6_module_and_its_simple_quotient_grassmannian():
    m_vec = (2, 1, 1, 1, 1, 1, 1)
    s1 = (1, 0, 0, 0, 0, 0, 0)
    for p in (2, 3, 5):
        m = random_rigid_rep(E6, m_vec, p, p)
        assert is_rigid(m)
        assert count_subreps(m, s1) == p + 1


# --- subspaces ------------------------------------------------------------------

@pytest.mark.parametrize("d,r,p,expected", [(2, 1, 2, 3), (3, 0, 5, 1), (2, 2, 3, 1)])
def test_subspace_enumeration_examples(d, r, p, expected):
    assert len(list(enumerate_subspaces(d, r, p))) == expected


@pytest.mark.parametrize("d,p", [(3, 2), (4, 2), (3, 3)])
def test_subspace_enumeration_is_exhaustive_and_unique(d, p):
    for r in range(d + 1):
        bases = list(enumerate_subspaces(d, r, p))
        assert len(bases) == gaussian_binomial(d, r)(p)
        seen = set()
        for basis in bases:
            span = frozenset(tuple(sum(c * x for c, x in zip(cs, col)) % p for col in zip(*basis))
                             if basis else (0,) * d
                             for cs in itertools.product(range(p), repeat=r))
            seen.add(span)
        assert seen == spans(d, r, p)


# --- counting -------------------------------------------------------------------

def test_counting_examples_fix_the_convention():
    assert count_subreps(P11, (0, 1)) == 0
    assert count_subreps(P11, (1, 0)) == 1
    assert count_subreps(P11, (1, 1)) == 1
    point = Quiver(1, ())
    assert count_subreps(QuiverRep.zero_maps(point, (2,), 2), (1,)) == 3
    assert count_subreps(P11, (2, 0)) == 0
    assert count_subreps(P11, (-1, 0)) == 0


random_reps = st.tuples(
    st.sampled_from([A2, K4, Quiver(3, ((0, 1), (2, 1))), Quiver(3, ((0, 1), (1, 2)))]),
    st.sampled_from([2, 3]),
    st.integers(0, 10 ** 6),
)


def draw_rep(q, p, seed, top=3):
    rng = random.Random(seed)
    dims = tuple(rng.randrange(top) for _ in range(q.n))
    m = random_rep(q, dims, p, rng)
    e = tuple(rng.randrange(d + 1) for d in dims)
    return m, e


@given(random_reps)
def test_count_agrees_with_vector_set_oracle(args):
    m, e = draw_rep(*args)
    expected = count_by_vector_sets(m, e)
    assert count_subreps(m, e) == expected
    assert count_subreps_brute(m, e) == expected


@given(random_reps)
def test_duality(args):
    m, e = draw_rep(*args)
    co = tuple(d - k for d, k in zip(m.dims, e))
    assert count_subreps(m, e) == count_subreps(dual_rep(m), co)


@given(random_reps)
def test_trivial_classes(args):
    m, _ = draw_rep(*args)
    assert count_subreps(m, (0,) * m.quiver.n) == 1
    assert count_subreps(m, m.dims) == 1


def test_batched_path_matches_pure_path(monkeypatch):
    # large enough that the last level is batched; compare against the pure-Python loop
    # (both the module and its dual enumerate Gr(2, 4))
    rng = random.Random(7)
    cases = [(random_rep(A2, (4, 4), 3, rng), (2, 2)) for _ in range(2)]
    cases.append((QuiverRep.zero_maps(A2, (4, 4), 3), (2, 2)))
    cases.append((random_rep(K4, (4, 4), 3, rng), (2, 2)))
    calls = []
    original = reps_module.batched_rank_mod_p
    monkeypatch.setattr(reps_module, "batched_rank_mod_p",
                        lambda a, p: calls.append(len(a)) or original(a, p))
    batched = [count_subreps(m, e) for m, e in cases]
    assert calls and max(calls) >= reps_module._BATCH_MIN
    monkeypatch.setattr(reps_module, "_BATCH_MIN", 10 ** 12)
    assert [count_subreps(m, e) for m, e in cases] == batched


@pytest.mark.parametrize("q,dims,p", [(A2, (2, 1), 2), (Quiver(3, ((0, 1), (1, 2))), (1, 2, 1), 3),
                                      (K4, (2, 2), 2)])
def test_zero_map_sum_is_the_product_formula(q, dims, p):
    m = QuiverRep.zero_maps(q, dims, p)
    total = sum(count_subreps(m, e) for e in itertools.product(*(range(d + 1) for d in dims)))
    expected = 1
    for d in dims:
        expected *= sum(gaussian_binomial(d, r)(p) for r in range(d + 1))
    assert total == expected


def test_work_ceiling():
    m = random_rep(K4, (3, 4), 5, random.Random(0))
    with pytest.raises(ResourceCeiling, match="instance too large"):
        count_subreps(m, (2, 2), ceiling=10)


# --- direct sums ----------------------------------------------------------------

def test_direct_sum_examples():
    s1, s2 = QuiverRep.simple(A2, 0, 3), QuiverRep.simple(A2, 1, 3)
    both = direct_sum(s1, s2)
    assert both.dims == (1, 1) and both.maps[0].entries == ((0,),)
    zero = QuiverRep.zero_maps(A2, (0, 0), 3)
    m = rep(A2, (1, 1), 3, [[2]])
    assert direct_sum(m, zero) == m
    assert direct_sum(s1, s1).dims == (2, 0)


def test_dump_format():
    text = rep(A2, (1, 2), 3, [[1, 2]]).dump()
    assert text.splitlines() == ["prime 3", "dims 1 2", "arrow 1 2 1 2"]
