"""The Tate spectral sequence of B^{smash p} at the E^2-page.

Homologically, E^2_{s,t} = H^{-s}(C_p; H_t(B)^{(x)p}); cohomologically,
E_2^{s,t} = H_{-s}(C_p; H^t(B)^{(x)p}).  Only the diagonal classes
a^{(x)p} contribute, so a nonzero cell (s, t) has t = p q for a class of
degree q.  Homological differentials are d^r: E^r_{s,t} -> E^r_{s-r, t+r-1}.

A class of the homological page is u^i t^k (x) alpha^{(x)p} in bidegree
(-i - 2k, pq) at odd p, and u^k (x) alpha^{(x)2} in (-k, 2q) at p = 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import singer
from .amodule import AModule
from .extpower import CoeffTable
from .fp import GradedVectorSpace
from .parallel import pmap
from .singer import SingerBasis
from .tate import LambdaElement, permutation_module, tate_cohomology, tate_homology


def e2_term(B: GradedVectorSpace, s: int, t: int, p: int | None = None) -> int:
    """dim of the homological E^2_{s,t}, from the Tate cohomology of the permutation module."""
    p = B.prime if p is None else p
    M = permutation_module(B, t, p).module
    if not M.space.dim():
        return 0
    return tate_cohomology(M, -s).dim()


def e2_term_cohomological(B: GradedVectorSpace, s: int, t: int, p: int | None = None) -> int:
    """dim of E_2^{s,t} = H_{-s}(C_p; H^t(B)^{(x)p}), with H^t(B) the dual of H_t(B)."""
    p = B.prime if p is None else p
    M = permutation_module(B, t, p).module
    if not M.space.dim():
        return 0
    return tate_homology(M.dual(), -s).dim()


@dataclass(frozen=True, order=True)
class PageClass:
    """u^i t^k (x) alpha^{(x)p} (at p = 2, i = 0 and k is the power of u)."""

    i: int
    k: int
    alpha: object

    def bidegree(self, B: GradedVectorSpace) -> tuple[int, int]:
        p = B.prime
        q = B.degree(self.alpha)
        s = -self.k if p == 2 else -self.i - 2 * self.k
        return s, p * q

    def label(self, p: int) -> str:
        if p == 2:
            return f"u^{self.k}({self.alpha})^2"
        return f"{'u' if self.i else ''}t^{self.k}({self.alpha})^{p}"


def page_class_at(B: GradedVectorSpace, s: int, alpha) -> PageClass:
    if B.prime == 2:
        return PageClass(0, -s, alpha)
    i = (-s) % 2
    return PageClass(i, (-s - i) // 2, alpha)


@dataclass(frozen=True)
class TateE2Page:
    prime: int
    source: GradedVectorSpace
    s_window: tuple[int, int]
    t_window: tuple[int, int]
    dims: dict  # {(s, t): dim} from Tate cohomology, zero cells omitted
    classes: dict = field(default_factory=dict)  # {(s, t): tuple of PageClass}

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def rows(self) -> list[tuple]:
        p = self.prime
        out = []
        for (s, t), d in sorted(self.dims.items()):
            out.append((s, t, d, tuple(c.label(p) for c in self.classes.get((s, t), ()))))
        return out


def e2_page(B: GradedVectorSpace, s_window: tuple[int, int], t_window: tuple[int, int]) -> TateE2Page:
    """The homological page on a window; cells computed independently and in parallel."""
    p = B.prime
    cells = [(s, t) for t in range(t_window[0], t_window[1] + 1) for s in range(s_window[0], s_window[1] + 1)]
    perms = {t: permutation_module(B, t, p) for t in range(t_window[0], t_window[1] + 1)}

    def cell(st):
        s, t = st
        M = perms[t].module
        return tate_cohomology(M, -s).dim() if M.space.dim() else 0

    values = pmap(cell, cells)
    dims, classes = {}, {}
    for (s, t), d in zip(cells, values):
        if d:
            dims[(s, t)] = d
            classes[(s, t)] = tuple(page_class_at(B, s, a) for a in perms[t].diagonal)
    return TateE2Page(p, B, tuple(s_window), tuple(t_window), dims, classes)


def dual_page_defects(B: GradedVectorSpace, s_window, t_window) -> list[tuple]:
    """Cells where the homological and cohomological pages have different dimensions."""
    bad = []
    for t in range(t_window[0], t_window[1] + 1):
        for s in range(s_window[0], s_window[1] + 1):
            a, b = e2_term(B, s, t), e2_term_cohomological(B, s, t)
            if a != b:
                bad.append((s, t, a, b))
    return bad


# --- collapse -----------------------------------------------------------------

def collapse_obstructions(dims: dict, s_window, t_window, r_max: int | None = None) -> list[tuple]:
    """Pairs ((s, t), (s - r, t + r - 1), r) with both cells nonzero, r >= 2, inside the window."""
    s0, s1 = s_window
    t0, t1 = t_window
    if r_max is None:
        r_max = (s1 - s0) + (t1 - t0) + 1
    bad = []
    for (s, t), d in sorted(dims.items()):
        if not d:
            continue
        for r in range(2, r_max + 1):
            tgt = (s - r, t + r - 1)
            if s0 <= tgt[0] <= s1 and t0 <= tgt[1] <= t1 and dims.get(tgt, 0):
                bad.append(((s, t), tgt, r))
    return bad


@dataclass(frozen=True)
class CollapseReport:
    obstructions: tuple  # (alpha, source, target, r) inside one building block
    uncovered: tuple  # cells of the full page not accounted for by the blocks

    @property
    def certified(self) -> bool:
        return not self.obstructions and not self.uncovered

    def lines(self) -> list[str]:
        out = [f"obstruction {a} {src} -> {tgt} r={r}" for a, src, tgt, r in self.obstructions]
        out += [f"uncovered s={s} t={t} dim={d} blocks={b}" for s, t, d, b in self.uncovered]
        return out or ["collapse certified"]


def certify_collapse(B: GradedVectorSpace, s_window, t_window) -> CollapseReport:
    """Certify that the page collapses on the window.

    Each basis class alpha of degree q gives a building block, the page of
    S^q, mapped into the page of B by alpha^{(x)p}.  A block page sits in the
    single row t = pq, so no differential has both ends nonzero inside a
    block; every class of the block is a permanent cycle, and naturality
    carries this over to B.  The certificate checks both halves: each block
    page has no obstruction, and the blocks account for every cell of the
    full page.
    """
    p = B.prime
    page = e2_page(B, s_window, t_window)
    obstructions = []
    block_dims: dict = {}
    for a in B.names():
        single = GradedVectorSpace.from_degrees(p, {a: B.degree(a)})
        sub = e2_page(single, s_window, t_window)
        for src, tgt, r in collapse_obstructions(sub.dims, s_window, t_window):
            obstructions.append((a, src, tgt, r))
        for key, d in sub.dims.items():
            block_dims[key] = block_dims.get(key, 0) + d
    uncovered = []
    for key in sorted(set(page.dims) | set(block_dims)):
        if page.dim(*key) != block_dims.get(key, 0):
            uncovered.append((key[0], key[1], page.dim(*key), block_dims.get(key, 0)))
    return CollapseReport(tuple(obstructions), tuple(uncovered))


# --- representatives and filtrations ---------------------------------------------

@dataclass(frozen=True)
class Representative:
    """Where a Singer basis element of R_+(H^*(B)) is detected in the cohomological page."""

    element: SingerBasis
    filtration: int
    t: int
    exponent: int  # power of y (of x at p = 2) in Sigma x^i y^{exponent} (x) a^{(x)p}
    coefficient: int

    def bidegree(self) -> tuple[int, int]:
        return self.filtration, self.t

    def label(self, p: int) -> str:
        e = self.element
        if p == 2:
            return f"Sx^{self.exponent}({e.a})^2"
        return f"S{'x' if e.i else ''}y^{self.exponent}({e.a})^{p}"


def representative(e: SingerBasis, M: AModule) -> Representative:
    """Cohomological representative of Sigma x^i y^r (x) a (Sigma x^r (x) a at p = 2).

    It is (-1)^q nu(q) Sigma x^i y^{r - mq} (x) a^{(x)p} in bidegree
    (1 + i + 2r - (p - 1) q, pq), and Sigma x^{r - q} (x) a^{(x)2} in
    (1 + r - q, 2q) at p = 2.
    """
    p = M.prime
    q = M.degree(e.a)
    if p == 2:
        return Representative(e, 1 + e.r - q, 2 * q, e.r - q, 1)
    C = CoeffTable(p)
    sign = -1 if q % 2 else 1
    return Representative(
        e, 1 + e.i + 2 * e.r - (p - 1) * q, p * q, e.r - C.m * q, (sign * C.nu(q)) % p
    )


def homological_representative(i: int, r: int, alpha, B: GradedVectorSpace) -> tuple[int, PageClass]:
    """(coefficient, class) representing u^i t^r (x) alpha in R_+(H_*(B))."""
    p = B.prime
    q = B.degree(alpha)
    if p == 2:
        return 1, PageClass(0, r + q, alpha)
    C = CoeffTable(p)
    sign = -1 if q % 2 else 1
    return (sign * C.nu_inv(q)) % p, PageClass(i, r + C.m * q, alpha)


def filtration_compare(M: AModule, n: int, window: tuple[int, int]) -> list[tuple]:
    """Singer basis elements in the degree window where membership in F^n R_+(M)
    disagrees with the representative having filtration >= n."""
    lo, hi = window
    T = singer.rplus_truncation(M, n, window)
    members = set(T.module.names())
    bad = []
    for d in range(lo, hi + 1):
        for e in singer.basis_in_degree(M, d):
            rep = representative(e, M)
            if (e in members) != (rep.filtration >= n):
                bad.append((e, e in members, rep.filtration))
    return bad


def representative_defects(M: AModule, window: tuple[int, int]) -> list[tuple]:
    """Representatives whose bidegree differs from (1 + i + 2r - (p - 1) q, pq) or whose
    page cell is zero."""
    p = M.prime
    B = GradedVectorSpace.from_degrees(p, {a: M.degree(a) for a in M.names()})
    bad = []
    for d in range(window[0], window[1] + 1):
        for e in singer.basis_in_degree(M, d):
            rep = representative(e, M)
            q = M.degree(e.a)
            want = (1 + e.i + 2 * e.r - (p - 1) * q, p * q) if p != 2 else (1 + e.r - q, 2 * q)
            if rep.bidegree() != want or rep.filtration != singer.filtration(e, M):
                bad.append((e, rep.bidegree(), want))
            elif e2_term_cohomological(B, rep.filtration, rep.t) == 0:
                bad.append((e, rep.bidegree(), "zero cell"))
    return bad


def page_vs_singer_defects(M: AModule, s_window, t_window) -> list[tuple]:
    """Cells of the cohomological page whose dimension differs from the number of Singer
    basis elements with that representative bidegree."""
    p = M.prime
    B = GradedVectorSpace.from_degrees(p, {a: M.degree(a) for a in M.names()})
    counts: dict = {}
    s0, s1 = s_window
    for a in M.names():
        q = M.degree(a)
        for s in range(s0, s1 + 1):
            # solve the filtration formula for (i, r)
            if p == 2:
                sols = [SingerBasis(0, s - 1 + q, a)]
            else:
                sols = []
                for i in (0, 1):
                    twice = s - 1 - i + (p - 1) * q
                    if twice % 2 == 0:
                        sols.append(SingerBasis(i, twice // 2, a))
            for e in sols:
                key = representative(e, M).bidegree()
                counts[key] = counts.get(key, 0) + 1
    bad = []
    for t in range(t_window[0], t_window[1] + 1):
        for s in range(s0, s1 + 1):
            d = e2_term_cohomological(B, s, t)
            if d != counts.get((s, t), 0):
                bad.append((s, t, d, counts.get((s, t), 0)))
    return bad


def lambda_action_on_page(lam: LambdaElement, c: PageClass) -> dict:
    """lam . c on the homological page, as {PageClass: coefficient}."""
    p = lam.prime
    out: dict = {}
    for (i, k), coeff in lam.terms.items():
        if p != 2 and i + c.i > 1:
            continue
        key = PageClass(i + c.i, k + c.k, c.alpha)
        out[key] = (out.get(key, 0) + coeff) % p
    return {k: v for k, v in out.items() if v}


def tower_stage_cutoff(n: int, p: int) -> int:
    """Filtration cutoff 1 - (p - 1) n matching stage n of the extended-power tower."""
    return 1 - (p - 1) * n
