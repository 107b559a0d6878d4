"""Invariant suites behind ``singerlab verify``.

Each suite is deterministic given (prime, seed) and returns a
:class:`SuiteResult` whose failures name the violated invariant and a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import extpower, fixtures, singer, steenrod, tate, tate_ss
from .amodule import AModule, validate_action
from .fp import GradedVectorSpace, rank
from .parallel import pmap

SUITES = ("adem", "epsilon", "omega", "filtration", "duality", "maxalg", "coeffs")
FIXTURES = 10
WIDTH = 24
N_RANGE = range(-4, 5)


@dataclass
class SuiteResult:
    suite: str
    prime: int
    seed: int
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, invariant: str, witness) -> None:
        self.failures.append(f"{invariant}: {witness}")

    def lines(self) -> list[str]:
        head = f"{self.suite} p={self.prime} seed={self.seed}: {'PASS' if self.passed else 'FAIL'} ({self.checked} checks)"
        return [head] + [f"  {f}" for f in self.failures]


def _space(M: AModule) -> GradedVectorSpace:
    return GradedVectorSpace.from_degrees(M.prime, {a: M.degree(a) for a in M.names()})


def _bottom(M: AModule) -> int:
    return min(M.space.degrees())


def _top(M: AModule) -> int:
    return max(M.space.degrees())


def fixture_modules(p: int, seed: int, count: int = FIXTURES) -> list[AModule]:
    return fixtures.random_modules(p, count, seed)


def window_for(M: AModule, n: int, width: int = WIDTH) -> tuple[int, int]:
    """Degree window of the given width starting at the bottom of F^n R_+(M)."""
    lo = n + M.prime * _bottom(M)
    return lo, lo + width - 1


# --- suites --------------------------------------------------------------------------

def suite_adem(p: int, seed: int = 0, modules=None) -> SuiteResult:
    """Adem relations on F^n R_+(M), n in [-4, 4], windows of width 24.

    With ``modules`` given, the modules themselves are validated first.
    """
    res = SuiteResult("adem", p, seed)
    mods = fixture_modules(p, seed) if modules is None else list(modules)
    for M in mods:
        res.checked += 1
        for v in validate_action(M):
            res.fail(f"Adem relation on {M.label}", v.describe(p))
    if res.failures:
        return res
    jobs = [(M, n) for M in mods for n in N_RANGE]

    def run(job):
        M, n = job
        T = singer.rplus_truncation(M, n, window_for(M, n))
        return M, n, validate_action(T.module), T.leaks

    for M, n, report, leaks in pmap(run, jobs):
        res.checked += 1
        for v in report:
            res.fail(f"Adem relation on F^{n}R+({M.label})", v.describe(p))
        for tok, e, f in leaks:
            res.fail(f"F^{n}R+({M.label}) not closed", f"{steenrod.generator_name(tok, p)} {e} -> {f}")
    return res


def epsilon_surjectivity_defects(M: AModule, lo: int, hi: int) -> list[tuple]:
    """Degrees in [lo, hi] where epsilon: R_+(M) -> M is not onto.

    The whole of R_+(M) in degrees <= hi lies in F^n for n = lo - p top(M)
    restricted to the window, so this is the full construction.
    """
    p = M.prime
    n_full = lo - p * _top(M)
    T = singer.rplus_truncation(M, n_full, (lo, hi))
    eps = singer.epsilon_map(T)
    bad = []
    for d in range(max(lo, _bottom(M)), min(hi, _top(M)) + 1):
        want = M.dim(d)
        if not want:
            continue
        got = rank(eps.linear.matrix(d), p) if T.module.dim(d) else 0
        if got != want:
            bad.append((d, got, want))
    return bad


def suite_epsilon(p: int, seed: int = 0) -> SuiteResult:
    """epsilon is A-linear on every F^n window and onto on the full R_+ window."""
    res = SuiteResult("epsilon", p, seed)
    mods = fixture_modules(p, seed)
    jobs = [(M, n) for M in mods for n in N_RANGE]

    def run(job):
        M, n = job
        T = singer.rplus_truncation(M, n, window_for(M, n))
        return M, n, singer.epsilon_map(T).linearity_defects()

    for M, n, defects in pmap(run, jobs):
        res.checked += 1
        for tok, e in defects:
            res.fail(f"epsilon not A-linear on F^{n}R+({M.label})", f"{steenrod.generator_name(tok, p)} on {e}")
    for M in mods:
        res.checked += 1
        lo = min(window_for(M, n)[0] for n in N_RANGE)
        for d, got, want in epsilon_surjectivity_defects(M, lo, lo + WIDTH - 1 + 8):
            res.fail(f"epsilon not onto for {M.label}", f"degree {d}: rank {got} < {want}")
    return res


def suite_omega(p: int, seed: int = 0, stages: int = 8) -> SuiteResult:
    """omega o delta_star = omega across consecutive stages, and omega is bijective once stable."""
    res = SuiteResult("omega", p, seed)
    for M in fixture_modules(p, seed):
        B = _space(M)
        degrees = range(p * _bottom(M) - stages * p, p * _top(M) + 12)
        res.checked += 1
        for bad in extpower.omega_compat_defects(B, 0, stages, degrees):
            res.fail(f"omega o delta_star != omega for {M.label}", bad)
        for d in range(_bottom(M), _bottom(M) + 10):
            res.checked += 1
            n = max(0, extpower.stage_reaches(B, d))
            for bad in extpower.omega_bijection_defects(B, n, d):
                res.fail(f"omega not bijective in degree {d} at stage {n} for {M.label}", bad)
    return res


def suite_filtration(p: int, seed: int = 0) -> SuiteResult:
    """Collapse certificate, Tate vs filtration F^n, representative bidegrees."""
    res = SuiteResult("filtration", p, seed)
    for M in fixture_modules(p, seed):
        B = _space(M)
        s_window = (-8, 8)
        t_window = (p * _bottom(M), p * _top(M) + p)
        res.checked += 1
        cert = tate_ss.certify_collapse(B, s_window, t_window)
        for line in ([] if cert.certified else cert.lines()):
            res.fail(f"collapse not certified for {M.label}", line)
        window = (_bottom(M) - 12, _top(M) + 12)
        for n in range(-8, 9):
            res.checked += 1
            for bad in tate_ss.filtration_compare(M, n, window):
                res.fail(f"filtration mismatch at n={n} for {M.label}", bad)
        res.checked += 1
        for bad in tate_ss.representative_defects(M, window):
            res.fail(f"representative bidegree for {M.label}", bad)
        res.checked += 1
        for bad in tate_ss.page_vs_singer_defects(M, s_window, t_window):
            res.fail(f"page differs from the Singer count for {M.label}", bad)
    return res


def random_cp_modules(p: int, seed: int, count: int = 20) -> list[tuple]:
    out = []
    for k in range(count):
        space, sigma, blocks = fixtures.random_cp_sigma(p, seed * 1000 + k)
        out.append((tate.CpModule(space, sigma, f"J{tuple(blocks)}"), blocks))
    return out


def suite_duality(p: int, seed: int = 0, n_range=range(-8, 9)) -> SuiteResult:
    """Tate groups of trivial, free and random C_p-modules, and the two dualities."""
    res = SuiteResult("duality", p, seed)
    W = tate.CompleteResolutionWindow(p, min(n_range) - 2, max(n_range) + 2)
    res.checked += 1
    if W.d_squared_defects() or W.exactness_defects():
        res.fail("complete resolution", (W.d_squared_defects(), W.exactness_defects()))
    T, F = tate.trivial_cp(p), tate.free_cp(p)
    for n in n_range:
        res.checked += 2
        for name, M, want in (("trivial", T, 1), ("free", F, 0)):
            for kind, fn in (("H^", tate.tate_cohomology), ("H_", tate.tate_homology)):
                got = fn(M, n).dim()
                if got != want:
                    res.fail(f"{kind}{n} of the {name} module", f"dim {got} != {want}")
    for M, blocks in random_cp_modules(p, seed):
        # J_k is free for k = p and has one-dimensional Tate groups otherwise
        expected = sum(1 for b in blocks if b < p)
        Md = M.dual()
        for n in n_range:
            res.checked += 1
            hn = tate.tate_cohomology(M, n).dim()
            if hn != expected:
                res.fail(f"dim H^{n}({M.label})", f"{hn} != {expected} (block count)")
            h_shift = tate.tate_homology(M, -n - 1).dim()
            if hn != h_shift:
                res.fail(f"dim H^{n} != dim H_{-n - 1} for {M.label}", (hn, h_shift))
            hom, dual_coh = tate.tate_homology(M, n).dim(), tate.tate_cohomology(Md, n).dim()
            if hom != dual_coh:
                res.fail(f"dim H_{n}(M) != dim H^{n}(M*) for {M.label}", (hom, dual_coh))
            if not tate.degree_shift_iso(M, n).is_iso():
                res.fail(f"degree shift H^{n} -> H_{-n - 1} not invertible for {M.label}", n)
    return res


def witness_element(p: int = 2) -> singer.DualSingerElement:
    """u^{-1} (x) alpha for M = F_p in degree 0 (u^{-1} t^0 at odd p)."""
    from .amodule import trivial_module

    M = trivial_module(p)
    if p == 2:
        return singer.DualSingerElement.from_lambda(M, {(-1, "a"): 1})
    return singer.DualSingerElement.from_lambda(M, {(1, -1, "a"): 1})


def suite_maxalg(p: int, seed: int = 0, bound: int = 32) -> SuiteResult:
    """epsilon_* images have finite coaction; at p = 2 the witness u^{-1} (x) alpha does not."""
    res = SuiteResult("maxalg", p, seed)
    mods = fixture_modules(p, seed)[:4]
    for M in mods:
        for a in M.names():
            res.checked += 1
            d = singer.epsilon_star(a, M)
            rep = singer.maximal_algebraic_test(d, bound)
            if not rep.finite:
                res.fail(f"epsilon_*({a}) in {M.label} not algebraic", rep.beyond)
    if p == 2:
        res.checked += 1
        rep = singer.maximal_algebraic_test(witness_element(2), bound)
        want = tuple(2 ** e for e in range(6) if 2 ** e <= bound)
        if rep.generator_degrees != want:
            res.fail("witness u^-1 (x) alpha coaction degrees", (rep.generator_degrees, want))
        if rep.finite:
            res.fail("witness u^-1 (x) alpha reported algebraic", rep)
    return res


def suite_coeffs(p: int, seed: int = 0, q_range=range(-50, 51)) -> SuiteResult:
    res = SuiteResult("coeffs", p, seed)
    res.checked = len(q_range)
    for q, name, lhs, rhs in extpower.verify_coeff_identities(p, q_range):
        res.fail(name, f"q={q}: {lhs} != {rhs}")
    return res


def run_suite(name: str, p: int, seed: int = 0, **kw) -> SuiteResult:
    table = {
        "adem": suite_adem,
        "epsilon": suite_epsilon,
        "omega": suite_omega,
        "filtration": suite_filtration,
        "duality": suite_duality,
        "maxalg": suite_maxalg,
        "coeffs": suite_coeffs,
    }
    if name not in table:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return table[name](p, seed, **kw)
