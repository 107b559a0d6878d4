import pytest
from hypothesis import given
from hypothesis import strategies as st

from singerlab import fixtures, singer, steenrod
from singerlab.amodule import (
    alinear_hom_space,
    direct_sum,
    dual_comodule,
    identity_map,
    module_from_table,
    module_map,
    quotient,
    restrict,
    suspend,
    trivial_module,
    validate_action,
    zero_module,
)
from singerlab.errors import WindowTruncation

random_modules = st.tuples(st.sampled_from([2, 3, 5]), st.integers(0, 10_000)).map(
    lambda t: fixtures.random_module(*t)
)


def test_trivial_module_is_valid():
    for p in (2, 3, 5):
        assert validate_action(trivial_module(p)) == []
        assert validate_action(zero_module(p)) == []


@pytest.mark.parametrize("p", [2, 3])
def test_injected_defect_is_reported_once(p):
    report = validate_action(fixtures.sq1_defect(p))
    assert len(report) == 1
    v = report[0]
    assert v.element == "a" and v.lhs == {"c": 1} and v.rhs == {}


def test_singer_truncation_of_f2_is_valid():
    F = trivial_module(2)
    for n in (-3, 0, 2):
        assert validate_action(singer.rplus_truncation(F, n, (n - 1, n + 20)).module) == []


def test_joker_is_valid():
    J = fixtures.joker()
    assert J.dim() == 5 and validate_action(J) == []


@given(random_modules)
def test_fixture_modules_are_valid(M):
    assert validate_action(M) == []


@given(random_modules, st.integers(0, 10_000))
def test_corrupted_modules_are_caught(M, seed):
    try:
        bad = fixtures.corrupt(M, seed)
    except ValueError:
        return  # no single entry of this module can break a relation
    assert validate_action(bad)


def test_suspend():
    M = suspend(trivial_module(3), 5)
    assert M.degree("a") == 5 and M.window == (5, 5)


def test_apply():
    p = 2
    F = fixtures.truncated_free(p, [0], 6)
    g = (0, ())
    assert F.apply((), {g: 1}) == {g: 1}
    assert trivial_module(2).apply((1,), {"a": 1}) == {}
    lhs = F.apply((2, 1), {g: 1})
    rhs = F.apply((2,), F.apply((1,), {g: 1}))
    assert lhs == rhs == {(0, (2, 1)): 1}
    # Sq^1 Sq^1 is zero once normalized, and zero in the module too
    assert F.apply((1, 1), {g: 1}) == {}
    assert F.apply(steenrod.SteenrodElement(2, {(2, 2): 1}), {g: 1}) == {(0, (3, 1)): 1}


def test_truncated_module_refuses_unknown_degrees():
    T = singer.rplus_truncation(trivial_module(2), 0, (0, 4))
    e = singer.SingerBasis(0, 3, "a")  # degree 4, at the top of the window
    with pytest.raises(WindowTruncation):
        T.module.act(1, {e: 1})


def test_restrict_keeps_a_submodule():
    F = fixtures.truncated_free(2, [0], 6)
    R = restrict(F, 2, 6)
    assert min(R.space.degrees()) == 2 and validate_action(R) == []


@given(random_modules, random_modules)
def test_direct_sum_is_valid(M, N):
    if M.prime == N.prime:
        S = direct_sum(M, N)
        assert S.dim() == M.dim() + N.dim() and validate_action(S) == []


def test_quotient_by_generator_image():
    F = fixtures.truncated_free(2, [0], 4)
    Q, proj = quotient(F, [{(0, (1,)): 1}])
    assert validate_action(Q) == []
    assert proj[(0, (1,))] == {}
    # the quotient A//Sq^1 keeps Sq^2 and kills Sq^2 Sq^1 with Sq^3 = Sq^1 Sq^2
    assert set(Q.names()) == {(0, ()), (0, (2,)), (0, (4,))} | ({(0, (3,))} & set(Q.names()))


def test_module_maps():
    p = 2
    F = fixtures.truncated_free(p, [0], 5)
    assert identity_map(F).linearity_defects() == []
    good = module_map(F, trivial_module(2), {(0, ()): {"a": 1}})
    assert good.linearity_defects() == []
    # sending Sq^1 to a degree-1 class is not A-linear
    bad = module_map(F, F, {(0, ()): {(0, ()): 1}})
    assert bad.linearity_defects()


def test_hom_space_examples():
    for p in (2, 3, 5):
        assert len(alinear_hom_space(trivial_module(p), trivial_module(p))) == 1
    assert alinear_hom_space(trivial_module(2), suspend(trivial_module(2), 1)) == []


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [0, -2, -5])
def test_hom_from_singer_truncation_is_spanned_by_epsilon(p, n):
    F = trivial_module(p)
    T = singer.rplus_truncation(F, n, (n, n + 12))
    H = alinear_hom_space(T.module, F)
    assert len(H) == 1
    assert H[0].linear == singer.epsilon_map(T).linear


def test_dual_of_trivial_module():
    D = dual_comodule(trivial_module(3))
    assert D.coaction == {"a": {((), "a"): 1}}


def test_dual_of_truncated_free_module():
    F = fixtures.truncated_free(2, [0], 3)
    D = dual_comodule(F)
    assert D.coaction[(0, (1,))][((1,), (0, ()))] == 1
    assert D.counit_defects() == [] and D.coassociativity_defects() == []


@given(random_modules)
def test_dual_comodule_axioms_and_double_dual(M):
    D = dual_comodule(M)
    assert D.counit_defects() == []
    assert D.coassociativity_defects() == []
    assert D.double_dual().action == M.action


def test_module_rejects_inhomogeneous_action():
    with pytest.raises(ValueError):
        module_from_table(2, {"a": 0, "b": 3}, {(1, "a"): {"b": 1}})
