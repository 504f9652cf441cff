import pytest
from hypothesis import given, strategies as st

from qcluster.errors import LaurentViolation
from qcluster.exact import LaurentV
from qcluster.torus import (
    SkewForm,
    TorusElement,
    bar_involution,
    commutative_mul,
    frame_monomial,
    left_divide,
    minimal_degree,
    specialize_v1,
    torus_mul,
)

LAM2 = SkewForm.of([[0, 1], [-1, 0]])
LAM3 = SkewForm.of([[0, 1, -2], [-1, 0, 1], [2, -1, 0]])
BTILDE = ((0, 1), (-1, 0), (1, -1), (0, 1))


def mono(g, form, coeff=1):
    return TorusElement.monomial(tuple(g), form, coeff)


coeffs = st.dictionaries(st.integers(-3, 3), st.integers(-3, 3), min_size=1, max_size=2).map(LaurentV)
exps = st.tuples(*[st.integers(-2, 2)] * 3)
elements = st.dictionaries(exps, coeffs, max_size=4).map(lambda t: TorusElement(t, LAM3))


def test_defining_relation():
    x1, x2 = mono((1, 0), LAM2), mono((0, 1), LAM2)
    assert torus_mul(x1, x2) == mono((1, 1), LAM2, LaurentV({1: 1}))
    assert torus_mul(x2, x1) == mono((1, 1), LAM2, LaurentV({-1: 1}))
    zero = SkewForm.zero(2)
    a = mono((1, 0), zero) + mono((0, 1), zero)
    assert torus_mul(a, mono((1, 0), zero)) == mono((2, 0), zero) + mono((1, 1), zero)


def test_rank_mismatch_and_bad_forms():
    with pytest.raises(ValueError, match="rank mismatch"):
        torus_mul(mono((1, 0), LAM2), mono((1, 0, 0), LAM3))
    with pytest.raises(ValueError, match="skew"):
        SkewForm.of([[0, 1], [1, 0]])


@given(elements, elements, elements)
def test_associativity(a, b, c):
    assert torus_mul(torus_mul(a, b), c) == torus_mul(a, torus_mul(b, c))


@given(elements, elements)
def test_no_zero_divisors(a, b):
    if a and b:
        assert torus_mul(a, b)


@given(elements, elements)
def test_bar_is_an_antiautomorphism(a, b):
    assert bar_involution(torus_mul(a, b)) == torus_mul(bar_involution(b), bar_involution(a))
    assert bar_involution(bar_involution(a)) == a


def test_bar_examples():
    g = (1, -1, 0)
    assert bar_involution(mono(g, LAM3, LaurentV({1: 1}))) == mono(g, LAM3, LaurentV({-1: 1}))
    sym = mono(g, LAM3, LaurentV({1: 1, -1: 1}))
    assert bar_involution(sym) == sym


@given(elements, elements)
def test_specialization_is_a_ring_map(a, b):
    assert specialize_v1(torus_mul(a, b)) == commutative_mul(specialize_v1(a), specialize_v1(b))


def test_specialization_examples():
    g = (0, 2, -1)
    assert specialize_v1(mono(g, LAM3, LaurentV({1: 1, -1: 1}))) == {g: 2}
    assert specialize_v1(mono(g, LAM3)) == {g: 1}


@given(elements, elements)
def test_left_division_round_trip(a, c):
    if a and c:
        assert left_divide(torus_mul(a, c), a) == c


def test_left_division_examples():
    b = mono((1, 1), LAM2, LaurentV({1: 1}))
    assert left_divide(b, mono((1, 0), LAM2)) == mono((0, 1), LAM2)
    a = mono((1, 0), LAM2) + mono((0, 1), LAM2)
    assert left_divide(a, a) == TorusElement.unit(LAM2)


def test_left_division_failure_is_reported():
    a = mono((1, 0), LAM2) + mono((0, 1), LAM2)
    with pytest.raises(LaurentViolation, match="Laurent phenomenon violated"):
        left_divide(mono((3, 3), LAM2) + TorusElement.unit(LAM2), a)
    with pytest.raises(LaurentViolation):
        left_divide(mono((0, 0), LAM2, 1), mono((0, 0), LAM2, 2))


def test_frame_monomial():
    vars = [mono((1, 0), LAM2), mono((0, 1), LAM2)]
    assert frame_monomial((1, 0), LAM2, vars) == vars[0]
    assert frame_monomial((1, 1), LAM2, vars) == mono((1, 1), LAM2)
    assert frame_monomial((0, 0), LAM2, vars) == TorusElement.unit(LAM2)
    with pytest.raises(ValueError, match="negative frame exponent"):
        frame_monomial((-1, 0), LAM2, vars)


def test_frame_monomial_is_bar_invariant_on_initial_frame():
    vars = [mono(g, LAM3) for g in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    x = frame_monomial((2, 1, 3), LAM3, vars)
    assert x == mono((2, 1, 3), LAM3)


def test_minimal_degree_examples():
    lam = SkewForm.zero(4)
    assert minimal_degree(mono((1, 2, 3, 4), lam), BTILDE) == (1, 2, 3, 4)
    x = mono((-1, 0, 1, 0), lam) + mono((-1, 1, 0, 0), lam)
    assert minimal_degree(x, BTILDE) == (-1, 1, 0, 0)
    y = mono((-1, -1, 1, 0), lam) + mono((-1, 0, 0, 0), lam) + mono((0, -1, 0, 1), lam)
    assert minimal_degree(y, BTILDE) == (-1, 0, 0, 0)


def test_minimal_degree_not_unique():
    lam = SkewForm.zero(4)
    x = mono((1, 0, 0, 0), lam) + mono((0, 0, 0, 1), lam)
    with pytest.raises(ValueError, match="not unique"):
        minimal_degree(x, BTILDE)


def test_records_round_trip():
    x = mono((1, -1, 0), LAM3, LaurentV({-1: 1, 1: 1})) + mono((0, 0, 2), LAM3)
    records = x.to_records()
    assert records == sorted(records, key=lambda r: r["exponent"])
    assert records[0] == {"exponent": [0, 0, 2], "coeff": [[0, 1]]}
    assert TorusElement.from_records(records, LAM3) == x
