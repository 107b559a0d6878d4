"""The algebraic Singer construction R_+(M) and its homological dual.

A basis element ``SingerBasis(i, r, a)`` stands for Sigma x^i y^r (x) a at odd
p and for Sigma x^r (x) a at p = 2 (where ``i`` is always 0).  The public
action is on R_+(M) itself; ``suspended=False`` gives the action on the
desuspension Sigma^{-1} R_+(M) = E(x) (x) P(y, 1/y) (x) M, which differs by
the Koszul sign (-1)^{|theta|} on odd-degree operations.

Dual elements are keyed by the Singer basis element they are dual to.  In
the Laurent notation of Lambda, u^{-r-1} (x) alpha is dual to Sigma x^r (x) a
(p = 2) and u^{1-i} t^{-r-1} (x) alpha is dual to Sigma x^i y^r (x) a.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Mapping

from . import steenrod
from .amodule import AModule, AModuleMap, dual_action, module_from_table, module_map
from .fp import binom_mod_p, vec_add

SingerBasis = namedtuple("SingerBasis", "i r a")


def singer_degree(e: SingerBasis, M: AModule, suspended: bool = True) -> int:
    p = M.prime
    q = M.degree(e.a)
    inner = e.r + q if p == 2 else e.i + 2 * e.r + q
    return inner + 1 if suspended else inner


def filtration(e: SingerBasis, M: AModule) -> int:
    """Tate filtration degree of a basis element."""
    p = M.prime
    q = M.degree(e.a)
    if p == 2:
        return 1 + e.r - q
    return 1 + e.i + 2 * e.r - (p - 1) * q


def label(e: SingerBasis, p: int) -> str:
    if p == 2:
        return f"Sx^{e.r}({e.a})"
    return f"S{'x' if e.i else ''}y^{e.r}({e.a})"


def dual_label(e: SingerBasis, p: int) -> str:
    if p == 2:
        return f"u^{-e.r - 1}({e.a}*)"
    return f"{'u' if e.i == 0 else ''}t^{-e.r - 1}({e.a}*)"


def _pj(M: AModule, j: int, a) -> dict:
    return {a: 1} if j == 0 else M.act(j, {a: 1})


def singer_action(token: int, e: SingerBasis, M: AModule, suspended: bool = True) -> dict:
    """One algebra generator applied to a basis element of R_+(M)."""
    p = M.prime
    out: dict = {}
    if p == 2:
        s, r = token, e.r
        for j in range(s // 2 + 1):
            c = binom_mod_p(r - j, s - 2 * j, 2)
            if c:
                for b, k in _pj(M, j, e.a).items():
                    vec_add(out, {SingerBasis(0, r + s - j, b): 1}, 2, c * k)
        return out

    sign = -1 if (suspended and steenrod.generator_degree(token, p) % 2) else 1
    if token == steenrod.BOCKSTEIN:
        if e.i == 1:
            # beta(x y^{r-1} (x) a) = y^r (x) a
            out[SingerBasis(0, e.r + 1, e.a)] = sign % p
        return out

    s = token
    if e.i == 0:
        r = e.r
        for j in range(s // p + 1):
            c = binom_mod_p(r - (p - 1) * j, s - p * j, p)
            if c:
                for b, k in _pj(M, j, e.a).items():
                    vec_add(out, {SingerBasis(0, r + (p - 1) * (s - j), b): 1}, p, c * k)
            c = binom_mod_p(r - (p - 1) * j - 1, s - p * j - 1, p)
            if c:
                bpj = M.act(steenrod.BOCKSTEIN, _pj(M, j, e.a))
                for b, k in bpj.items():
                    vec_add(out, {SingerBasis(1, r + (p - 1) * (s - j) - 1, b): 1}, p, c * k)
    else:
        r = e.r + 1  # x y^{r-1}
        for j in range(s // p + 1):
            c = binom_mod_p(r - (p - 1) * j - 1, s - p * j, p)
            if c:
                for b, k in _pj(M, j, e.a).items():
                    vec_add(out, {SingerBasis(1, r + (p - 1) * (s - j) - 1, b): 1}, p, c * k)
    return out


def singer_apply_word(word: tuple, v: Mapping, M: AModule, suspended: bool = True) -> dict:
    p = M.prime
    for tok in reversed(word):
        nxt: dict = {}
        for e, c in v.items():
            vec_add(nxt, singer_action(tok, e, M, suspended), p, c)
        v = nxt
    return v


def basis_in_degree(M: AModule, degree: int) -> list[SingerBasis]:
    """All basis elements of R_+(M) in a given degree, in sorted order."""
    p = M.prime
    out = []
    for a in M.names():
        q = M.degree(a)
        if p == 2:
            out.append(SingerBasis(0, degree - 1 - q, a))
        else:
            for i in (0, 1):
                twice = degree - 1 - i - q
                if twice % 2 == 0:
                    out.append(SingerBasis(i, twice // 2, a))
    return sorted(out)


@dataclass(frozen=True)
class SingerTruncation:
    """F^n R_+(M) in a degree window, realized as a (truncated) A-module."""

    source: AModule
    n: int
    window: tuple[int, int]
    module: AModule
    leaks: tuple = ()  # actions that left F^n; always empty for a correct formula

    def fil(self, e: SingerBasis) -> int:
        return filtration(e, self.source)

    def basis(self) -> list:
        return self.module.names()


def rplus_truncation(M: AModule, n: int, window: tuple[int, int]) -> SingerTruncation:
    """Basis {fil >= n} of R_+(M) in the degree window, with the full action table."""
    lo, hi = window
    p = M.prime
    degrees = {}
    for d in range(lo, hi + 1):
        for e in basis_in_degree(M, d):
            if filtration(e, M) >= n:
                degrees[e] = d
    action = {}
    leaks = []
    for tok in steenrod.generators_up_to(max(hi - lo, 0), p):
        gd = steenrod.generator_degree(tok, p)
        for e, d in degrees.items():
            if d + gd > hi:
                continue
            img = singer_action(tok, e, M)
            kept = {}
            for f, c in img.items():
                if f in degrees:
                    kept[f] = c
                else:
                    leaks.append((tok, e, f))
            if kept:
                action[(tok, e)] = kept
    # the window cuts off everything above hi, and R_+(M) is never bounded above
    module = module_from_table(p, degrees, action, (lo, hi), truncated=True,
                               label=f"F^{n}R+({M.label})")
    return SingerTruncation(M, n, (lo, hi), module, tuple(leaks))


def epsilon(e: SingerBasis, M: AModule) -> dict:
    """The Singer map R_+(M) -> M on a basis element."""
    p = M.prime
    if p == 2:
        R = e.r + 1
        if R < 0:
            return {}
        return _pj(M, R, e.a)
    if e.i == 0:
        if e.r < 0 or e.r % (p - 1):
            return {}
        R = e.r // (p - 1)
        c = -1 if R % 2 == 0 else 1  # -(-1)^R
        return {b: (c * k) % p for b, k in M.act(steenrod.BOCKSTEIN, _pj(M, R, e.a)).items()}
    if (e.r + 1) % (p - 1) or e.r + 1 < 0:
        return {}
    R = (e.r + 1) // (p - 1)
    c = 1 if R % 2 == 0 else -1
    return {b: (c * k) % p for b, k in _pj(M, R, e.a).items()}


def epsilon_map(T: SingerTruncation) -> AModuleMap:
    M = T.source
    cols = {e: epsilon(e, M) for e in T.module.names()}
    return module_map(T.module, M, cols)


def inclusion(T_small: SingerTruncation, T_big: SingerTruncation) -> AModuleMap:
    """F^n -> F^{n'} for n >= n' on shared windows."""
    cols = {e: {e: 1} for e in T_small.module.names() if e in T_big.module.space}
    return module_map(T_small.module, T_big.module, cols)


# --- homological side ------------------------------------------------------------

@dataclass(frozen=True)
class DualSingerElement:
    """Finite truncation of a formal series in R_+(M_*).

    ``terms`` maps the Singer basis element each term is dual to onto its
    coefficient.  ``level`` is the filtration n such that the element is
    known as an element of the dual of F^n R_+(M); ``None`` means exact.
    """

    M: AModule
    terms: Mapping
    level: int | None = None
    _frozen: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        p = self.M.prime
        clean = {}
        for e, c in self.terms.items():
            if c % p and (self.level is None or filtration(e, self.M) >= self.level):
                clean[e] = c % p
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_lambda(cls, M: AModule, terms: Mapping, level=None) -> "DualSingerElement":
        """Build from Laurent monomials: ``{(k, tag): c}`` for u^k (x) tag* at p = 2,
        ``{(e, k, tag): c}`` for u^e t^k (x) tag* at odd p."""
        out = {}
        for key, c in terms.items():
            if M.prime == 2:
                k, tag = key
                out[SingerBasis(0, -k - 1, tag)] = c
            else:
                eu, k, tag = key
                out[SingerBasis(1 - eu, -k - 1, tag)] = c
        return cls(M, out, level)

    def degree(self) -> int | None:
        ds = {singer_degree(e, self.M) for e in self.terms}
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return ds.pop() if ds else None

    def truncate(self, n: int) -> "DualSingerElement":
        level = n if self.level is None else max(n, self.level)
        return DualSingerElement(self.M, self.terms, level)

    def pair(self, e: SingerBasis) -> int:
        return self.terms.get(e, 0)

    def __bool__(self):
        return bool(self.terms)

    def labels(self) -> list[str]:
        p = self.M.prime
        return [f"{c}*{dual_label(e, p)}" for e, c in sorted(self.terms.items())]


def epsilon_star(alpha, M: AModule, n: int | None = None) -> DualSingerElement:
    """The dual Singer map M_* -> R_+(M_*) on a dual basis element, truncated at n."""
    p = M.prime
    out: dict = {}
    q = M.degree(alpha)
    bottom = min((M.degree(b) for b in M.names()), default=q)
    if p == 2:
        for R in range(0, q - bottom + 1):
            coeffs = {alpha: 1} if R == 0 else dual_action(M, (R,), alpha)
            for b, c in coeffs.items():
                # u^{-R} is dual to Sigma x^{R-1}
                vec_add(out, {SingerBasis(0, R - 1, b): 1}, p, c)
        return DualSingerElement(M, out, n)
    step = 2 * (p - 1)
    for R in range(0, (q - bottom) // step + 1):
        sign = 1 if R % 2 == 0 else -1
        word = (R,) if R else ()
        coeffs = {alpha: 1} if R == 0 else dual_action(M, word, alpha)
        for b, c in coeffs.items():
            vec_add(out, {SingerBasis(1, (p - 1) * R - 1, b): 1}, p, sign * c)
        for b, c in dual_action(M, (steenrod.BOCKSTEIN,) + word, alpha).items():
            vec_add(out, {SingerBasis(0, (p - 1) * R, b): 1}, p, -sign * c)
    return DualSingerElement(M, out, n)


def dual_singer_action(token: int, d: DualSingerElement) -> DualSingerElement:
    """theta_* on R_+(M_*): closed formula at p = 2, transposition at odd p."""
    M = d.M
    p = M.prime
    if p != 2:
        return dual_singer_action_transpose(token, d)
    s = token
    out: dict = {}
    for e, c in d.terms.items():
        k = -e.r - 1  # the term is u^k (x) alpha
        for j in range(s // 2 + 1):
            coeff = binom_mod_p(-k - s - 1, s - 2 * j, 2)
            if not coeff:
                continue
            images = {e.a: 1} if j == 0 else dual_action(M, (j,), e.a)
            for b, kb in images.items():
                # u^{k+s-j} is dual to Sigma x^{-(k+s-j)-1}
                vec_add(out, {SingerBasis(0, -(k + s - j) - 1, b): 1}, 2, coeff * c * kb)
    return DualSingerElement(M, out, d.level)


def dual_singer_action_transpose(token: int, d: DualSingerElement) -> DualSingerElement:
    """theta_* by transposing the Singer action: <theta_* d, e> = <d, theta e>."""
    M = d.M
    p = M.prime
    deg = d.degree()
    if deg is None:
        return DualSingerElement(M, {}, d.level)
    out = {}
    for e in basis_in_degree(M, deg - steenrod.generator_degree(token, p)):
        if d.level is not None and filtration(e, M) < d.level:
            continue
        c = sum(d.pair(f) * k for f, k in singer_action(token, e, M).items()) % p
        if c:
            out[e] = c
    return DualSingerElement(M, out, d.level)


def dual_apply_word(word: tuple, d: DualSingerElement) -> DualSingerElement:
    """(g_1 ... g_k)_* = (g_k)_* o ... o (g_1)_*; the leftmost generator acts first."""
    for tok in word:
        if not d:
            return d
        d = dual_singer_action(tok, d)
    return d


@dataclass(frozen=True)
class MaxAlgReport:
    verdict: str  # "finite-coaction" or "nonzero-beyond-bound"
    generator_degrees: tuple  # degrees s where a generator dual (Sq^s_*, P^k_*, beta_*) is nonzero
    monomial_degrees: tuple  # degrees s >= 1 where some admissible monomial dual is nonzero
    horizon: int  # components beyond this degree are impossible for algebraic elements
    beyond: tuple  # monomial degrees in (horizon, bound]

    @property
    def finite(self) -> bool:
        return self.verdict == "finite-coaction"


def maximal_algebraic_test(d: DualSingerElement, bound: int) -> MaxAlgReport:
    """Scan the windowed coaction of ``d`` up to coaction degree ``bound``.

    An element of epsilon_*(M_*) can only have coaction components up to
    degree deg(d) - bottom(M); any component past that horizon witnesses an
    element outside the maximal algebraic subcomodule.
    """
    M = d.M
    p = M.prime
    if not d:
        return MaxAlgReport("finite-coaction", (), (), 0, ())
    deg = d.degree()
    bottom = min(M.degree(b) for b in M.names())
    horizon = deg - bottom
    gen_degrees = []
    for tok in steenrod.generators_up_to(bound, p):
        if dual_singer_action(tok, d):
            gen_degrees.append(steenrod.generator_degree(tok, p))
    # monomial components, sharing prefixes: admissible words are built left to right
    cache = {(): d}

    def image(word):
        if word not in cache:
            cache[word] = dual_singer_action(word[-1], image(word[:-1]))
        return cache[word]

    mono = set()
    for s in range(1, bound + 1):
        for theta in steenrod.admissible_basis(s, p):
            if image(theta):
                mono.add(s)
                break
    beyond = tuple(s for s in sorted(mono) if s > horizon)
    verdict = "nonzero-beyond-bound" if beyond else "finite-coaction"
    return MaxAlgReport(verdict, tuple(sorted(set(gen_degrees))), tuple(sorted(mono)), horizon, beyond)
