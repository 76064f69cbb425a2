import pytest
from hypothesis import given, settings, strategies as st

from helpers import field, mono
from swanlab.bestform import _valuation_below_zero, is_best, reduce_to_best
from swanlab.errors import SearchSpaceTooLarge
from swanlab.oracle import SearchBounds, brute_force_best, ghost_check, search_size_estimate
from swanlab.series import Series
from swanlab.witt import WittVec


def test_square_has_witness():
    F = field(2, 1)
    res = brute_force_best(WittVec(2, [mono(F, 1, -2)]))
    assert res.found
    assert res.witness.components == (mono(F, 1, -1),)
    assert res.improved_valuation == -1


def test_odd_valuation_has_no_witness():
    F = field(2, 1)
    res = brute_force_best(WittVec(2, [mono(F, 1, -3)]))
    assert not res.found
    assert res.searched == res.size - 1


def test_integral_vector_has_no_witness():
    F = field(2, 1)
    res = brute_force_best(WittVec(2, [mono(F, 1, 2), Series.one(F)]))
    assert not res.found and res.searched == 0


def test_window():
    b = SearchBounds(2, 2, 1, -4, -1, 2)
    assert list(b.exponents(0)) == [-2, -1]
    assert list(b.exponents(1)) == [-1]
    assert b.coefficient_count() == 8
    assert b.size() == 8**3
    assert search_size_estimate(b) == pytest.approx(3 * 0.90309, rel=1e-4)


def test_search_cap():
    F = field(3, 2)
    a = WittVec(3, [mono(F, 1, -9), mono(F, 1, -9)])
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_best(a)


@pytest.mark.parametrize("p,s", [(2, 2), (3, 3), (5, 1)])
def test_ghost_check(p, s):
    rep = ghost_check(1000, p, s)
    assert rep.ok and rep.trials == 1000


@st.composite
def small_vectors(draw):
    # p = 2, s <= 2, valuation >= -4, coefficients of degree <= 1 in b
    F = field(2, 1)
    s = draw(st.integers(1, 2))
    coeff = st.sampled_from([F.zero, F.one, F.gen(), F.gen() + 1])
    comps = []
    for k in range(s):
        i = s - 1 - k
        lo = -(4 // 2**i)
        comps.append(Series.from_dict(F, {j: draw(coeff) for j in range(lo, 1)}))
    return WittVec(2, comps)


@settings(max_examples=30)
@given(small_vectors())
def test_brute_force_agrees_with_best(a):
    res = brute_force_best(a, SearchBounds.for_vector(a, degree=1))
    assert res.found == (not is_best(a))
    if res.found:
        assert _valuation_below_zero(reduce_to_best(a).best) >= res.improved_valuation
