import pytest
from hypothesis import given
from hypothesis import strategies as st

from singerlab import fixtures, singer, steenrod
from singerlab.amodule import trivial_module, validate_action
from singerlab.singer import (
    DualSingerElement,
    SingerBasis,
    dual_singer_action,
    dual_singer_action_transpose,
    epsilon,
    epsilon_map,
    epsilon_star,
    filtration,
    maximal_algebraic_test,
    rplus_truncation,
    singer_action,
    singer_degree,
)

B = steenrod.BOCKSTEIN
random_modules = st.tuples(st.sampled_from([2, 3, 5]), st.integers(0, 10_000)).map(
    lambda t: fixtures.random_module(t[0], t[1], max_dim=4, max_degree=5)
)


def test_action_examples():
    F2, F3 = trivial_module(2), trivial_module(3)
    assert singer_action(1, SingerBasis(0, 1, "a"), F2) == {SingerBasis(0, 2, "a"): 1}
    assert singer_action(1, SingerBasis(0, 5, "a"), F2) == {SingerBasis(0, 6, "a"): 1}
    assert singer_action(1, SingerBasis(0, 4, "a"), F2) == {}
    # beta(x y^{r-1} (x) a) = y^r (x) a before suspension; Sigma anticommutes with beta
    assert singer_action(B, SingerBasis(1, 3, "a"), F3, suspended=False) == {SingerBasis(0, 4, "a"): 1}
    assert singer_action(B, SingerBasis(1, 3, "a"), F3) == {SingerBasis(0, 4, "a"): 2}
    assert singer_action(B, SingerBasis(0, 3, "a"), F3) == {}


def test_degree_and_filtration():
    F2 = trivial_module(2)
    M = fixtures.truncated_free(5, [2], 2)
    a = M.names()[0]
    assert singer_degree(SingerBasis(0, 4, "a"), F2) == 5
    assert filtration(SingerBasis(0, 4, "a"), F2) == 5
    e = SingerBasis(1, 3, a)
    assert singer_degree(e, M) == 1 + 1 + 6 + 2
    assert filtration(e, M) == 1 + 1 + 6 - 4 * 2


def test_truncation_examples():
    F2 = trivial_module(2)
    T = rplus_truncation(F2, 1, (1, 3))
    assert T.module.names() == [SingerBasis(0, r, "a") for r in range(3)]
    assert [T.fil(e) for e in T.module.names()] == [1, 2, 3]
    assert rplus_truncation(F2, 50, (0, 10)).module.dim() == 0


def test_epsilon_examples():
    F2 = trivial_module(2)
    assert epsilon(SingerBasis(0, -1, "a"), F2) == {"a": 1}
    assert epsilon(SingerBasis(0, -2, "a"), F2) == {}
    M = fixtures.truncated_free(3, [0], 6)
    g = (0, ())
    # Sigma x y^1 (x) a is r = 1 in the odd-p formula: (-1)^1 P^1(a)
    assert epsilon(SingerBasis(1, 1, g), M) == {(0, (1,)): 2}


@given(random_modules, st.integers(-4, 4))
def test_truncations_are_modules_and_epsilon_is_linear(M, n):
    lo = n + M.prime * min(M.space.degrees())
    T = rplus_truncation(M, n, (lo, lo + 14))
    assert validate_action(T.module) == []
    assert T.leaks == ()
    assert epsilon_map(T).linearity_defects() == []


@given(random_modules, st.integers(-3, 3))
def test_window_stability_and_inclusion(M, n):
    lo = n + M.prime * min(M.space.degrees())
    small = rplus_truncation(M, n, (lo, lo + 8))
    big = rplus_truncation(M, n, (lo - 2, lo + 14))
    for (tok, e), img in small.module.action.items():
        assert big.module.action.get((tok, e)) == img
    deeper = rplus_truncation(M, n - 1, (lo - 2, lo + 8))
    assert singer.inclusion(small, deeper).linearity_defects() == []


def test_epsilon_star_examples():
    F2 = trivial_module(2)
    assert epsilon_star("a", F2).terms == {SingerBasis(0, -1, "a"): 1}
    M = fixtures.truncated_free(2, [0], 3)
    d = epsilon_star((0, (1,)), M)
    # u^0 (x) alpha + u^{-1} (x) Sq^1_*(alpha)
    assert d.terms == {SingerBasis(0, -1, (0, (1,))): 1, SingerBasis(0, 0, (0, ())): 1}


@given(random_modules)
def test_epsilon_star_is_the_dual_of_epsilon(M):
    p = M.prime
    lo = min(M.space.degrees())
    hi = max(M.space.degrees())
    T = rplus_truncation(M, lo - p * hi - 2, (lo, hi))
    for alpha in M.names():
        d = epsilon_star(alpha, M)
        for e in T.module.names():
            assert d.pair(e) == epsilon(e, M).get(alpha, 0) % p


def test_dual_action_on_the_witness():
    F2 = trivial_module(2)
    w = DualSingerElement.from_lambda(F2, {(-1, "a"): 1})
    for s in (1, 2, 4, 8):
        # C(-s, s) = 1 exactly when s is a power of 2
        assert dual_singer_action(s, w).terms == {SingerBasis(0, -s, "a"): 1}
    assert not dual_singer_action(3, w)
    assert dual_singer_action(0, w) == w


@given(random_modules, st.integers(-6, 6), st.integers(1, 8))
def test_dual_action_formula_matches_transpose(M, shift, s):
    if M.prime != 2:
        return
    for alpha in M.names():
        d = epsilon_star(alpha, M)
        terms = {SingerBasis(0, e.r + shift, e.a): c for e, c in d.terms.items()}
        e = DualSingerElement(M, terms)
        assert dual_singer_action(s, e) == dual_singer_action_transpose(s, e)


def test_maximal_algebraic_examples():
    F2 = trivial_module(2)
    assert maximal_algebraic_test(DualSingerElement(F2, {}), 16).finite
    assert maximal_algebraic_test(epsilon_star("a", F2), 16).finite
    w = DualSingerElement.from_lambda(F2, {(-1, "a"): 1})
    rep = maximal_algebraic_test(w, 16)
    assert rep.generator_degrees == (1, 2, 4, 8, 16)
    assert not rep.finite


@pytest.mark.parametrize("p", [2, 3, 5])
def test_epsilon_star_images_are_algebraic(p):
    for seed in range(3):
        M = fixtures.random_module(p, seed)
        for a in M.names():
            assert maximal_algebraic_test(epsilon_star(a, M), 24).finite
