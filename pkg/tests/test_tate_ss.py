import pytest
from hypothesis import given
from hypothesis import strategies as st

from singerlab import fixtures
from singerlab.amodule import trivial_module
from singerlab.fp import GradedVectorSpace
from singerlab.singer import SingerBasis, filtration
from singerlab.tate import LambdaElement
from singerlab.tate_ss import (
    PageClass,
    certify_collapse,
    collapse_obstructions,
    dual_page_defects,
    e2_page,
    e2_term,
    filtration_compare,
    homological_representative,
    lambda_action_on_page,
    page_class_at,
    page_vs_singer_defects,
    representative,
    representative_defects,
)

spaces = st.tuples(st.sampled_from([2, 3, 5]), st.integers(0, 1000)).map(
    lambda t: fixtures.random_graded_space(t[0], t[1], max_dim=3, max_degree=3)
)


def test_e2_examples():
    point = GradedVectorSpace.from_degrees(2, {"a": 0})
    assert [e2_term(point, s, 0) for s in range(-4, 5)] == [1] * 9
    B = GradedVectorSpace.from_degrees(2, {"a": 0, "b": 1})
    assert e2_term(B, 0, 1) == 0  # the orbit {a b, b a} is free
    assert e2_term(B, 0, 2) == 1
    assert e2_term(B, 0, 3) == 0


@given(spaces)
def test_page_sits_on_diagonal_rows(B):
    p = B.prime
    page = e2_page(B, (-4, 4), (0, 3 * p + 1))
    rows = {p * B.degree(a) for a in B.names()}
    for (s, t), d in page.dims.items():
        assert t in rows
        assert d == sum(1 for a in B.names() if p * B.degree(a) == t)


@given(spaces)
def test_dual_page_matches(B):
    assert dual_page_defects(B, (-3, 3), (0, 3 * B.prime)) == []


def test_collapse_examples():
    for p in (2, 3, 5):
        assert certify_collapse(GradedVectorSpace.from_degrees(p, {"a": 2}), (-6, 6), (0, 12)).certified
    B = GradedVectorSpace.from_degrees(2, {"a": 0, "b": 5})
    report = certify_collapse(B, (-12, 12), (0, 12))
    assert report.certified and report.lines() == ["collapse certified"]


def test_collapse_detector_finds_adjacent_cells():
    assert collapse_obstructions({(0, 0): 1, (-2, 1): 1}, (-4, 4), (0, 4)) == [((0, 0), (-2, 1), 2)]
    assert collapse_obstructions({(0, 0): 1, (-1, 0): 1}, (-4, 4), (0, 4)) == []


def test_whole_page_scan_sees_pairs_between_blocks():
    # rows t = 0 and t = 10 are nine differentials apart; only the block-wise
    # argument rules these out
    B = GradedVectorSpace.from_degrees(2, {"a": 0, "b": 5})
    page = e2_page(B, (-12, 12), (0, 12))
    assert collapse_obstructions(page.dims, (-12, 12), (0, 12))


@given(spaces)
def test_collapse_is_certified(B):
    p = B.prime
    assert certify_collapse(B, (-6, 6), (0, p * max(B.degrees()) + p)).certified


def test_representative_examples():
    F2 = trivial_module(2)
    M = fixtures.truncated_free(2, [3], 3)
    a = M.names()[0]
    r = representative(SingerBasis(0, 7, a), M)
    assert (r.bidegree(), r.exponent, r.coefficient) == ((1 + 7 - 3, 6), 4, 1)
    for n in range(-4, 5):
        r = representative(SingerBasis(0, n - 1, "a"), F2)
        assert r.filtration == n == filtration(r.element, F2)
    F3 = trivial_module(3)
    r = representative(SingerBasis(1, 2, "a"), F3)
    assert (r.bidegree(), r.coefficient) == ((6, 0), 1)


def test_homological_representative():
    B3 = GradedVectorSpace.from_degrees(3, {"a": 0, "b": 1})
    coeff, c = homological_representative(1, 2, "a", B3)
    assert coeff == 1 and c.bidegree(B3) == (-1 - 4, 0)
    coeff, c = homological_representative(0, 2, "b", B3)
    # (-1)^1 nu(1)^{-1} = -1, at t^{2 + 1}
    assert coeff == 2 and c == PageClass(0, 3, "b") and c.bidegree(B3) == (-6, 3)
    B2 = GradedVectorSpace.from_degrees(2, {"a": 2})
    assert homological_representative(0, -1, "a", B2) == (1, PageClass(0, 1, "a"))


@pytest.mark.parametrize("p", [2, 3])
def test_filtration_boundary(p):
    M = trivial_module(p)
    for n in range(-3, 4):
        assert filtration_compare(M, n, (-10, 10)) == []


@given(st.sampled_from([2, 3, 5]), st.integers(0, 1000), st.integers(-6, 6))
def test_filtrations_agree(p, seed, n):
    M = fixtures.random_module(p, seed, max_dim=4, max_degree=4)
    assert filtration_compare(M, n, (-6, 12)) == []


@given(st.sampled_from([2, 3, 5]), st.integers(0, 1000))
def test_representatives_and_page_counts(p, seed):
    M = fixtures.random_module(p, seed, max_dim=4, max_degree=4)
    assert representative_defects(M, (-6, 12)) == []
    top = max(M.space.degrees())
    assert page_vs_singer_defects(M, (-6, 6), (0, p * top + p)) == []


def test_lambda_action():
    B3 = GradedVectorSpace.from_degrees(3, {"a": 0})
    c = page_class_at(B3, -3, "a")
    assert c == PageClass(1, 1, "a")
    (img,) = lambda_action_on_page(LambdaElement.t(3), c)
    assert img.bidegree(B3) == (-5, 0)
    assert lambda_action_on_page(LambdaElement.one(3), c) == {c: 1}
    assert lambda_action_on_page(LambdaElement.u(3), c) == {}
    B2 = GradedVectorSpace.from_degrees(2, {"a": 1})
    c2 = page_class_at(B2, 4, "a")
    (img,) = lambda_action_on_page(LambdaElement.u(2), c2)
    assert img.bidegree(B2) == (3, 2)


@given(st.integers(-5, 5), st.integers(0, 1), st.integers(-4, 4))
def test_lambda_action_matches_representatives(r, i, k):
    # u^i t^k . rep(u^0 t^r (x) alpha) = rep(u^i t^{r+k} (x) alpha)
    B = GradedVectorSpace.from_degrees(3, {"a": 1})
    lam = LambdaElement(3, {(i, k): 1})
    coeff, c = homological_representative(0, r, "a", B)
    coeff2, c2 = homological_representative(i, r + k, "a", B)
    assert lambda_action_on_page(lam, c) == {c2: 1} and coeff == coeff2
