"""Finite-window modules over the Steenrod algebra.

A module is a graded basis plus an action table on algebra generators.
Degrees above ``window[1]`` are either genuinely zero (``truncated=False``)
or unknown (``truncated=True``); asking for an unknown value raises
:class:`~singerlab.errors.WindowTruncation` instead of returning zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from . import steenrod
from .errors import WindowTruncation
from .fp import (
    GradedLinearMap,
    GradedVectorSpace,
    check_prime,
    kernel,
    vec_add,
    vec_clean,
)


@dataclass(frozen=True)
class AModule:
    space: GradedVectorSpace
    action: Mapping  # {(token, name): {name: residue}}
    truncated: bool = False
    label: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        p = self.space.prime
        clean = {}
        for (tok, name), image in self.action.items():
            if name not in self.space:
                raise KeyError(f"action on unknown basis element {name!r}")
            target = self.space.degree(name) + steenrod.generator_degree(tok, p)
            image = vec_clean(image, p)
            for n in image:
                if n not in self.space:
                    raise KeyError(f"action lands on unknown basis element {n!r}")
                if self.space.degree(n) != target:
                    raise ValueError(
                        f"{steenrod.generator_name(tok, p)}({name!r}) must have degree {target}"
                    )
            if image:
                clean[(tok, name)] = image
        object.__setattr__(self, "action", clean)

    @property
    def prime(self) -> int:
        return self.space.prime

    @property
    def window(self) -> tuple[int, int]:
        return self.space.window

    def degree(self, name) -> int:
        return self.space.degree(name)

    def names(self, degree: int | None = None) -> list:
        return self.space.names(degree)

    def dim(self, degree: int | None = None) -> int:
        return self.space.dim(degree)

    def is_zero(self) -> bool:
        return self.space.dim() == 0

    def known(self, degree: int) -> bool:
        """True when the module is fully known in ``degree``."""
        return degree <= self.window[1] or not self.truncated

    def act(self, token: int, v: Mapping) -> dict:
        """Apply a single generator to an element."""
        p = self.prime
        out: dict = {}
        for name, c in v.items():
            target = self.degree(name) + steenrod.generator_degree(token, p)
            if not self.known(target):
                raise WindowTruncation(
                    f"{steenrod.generator_name(token, p)} on {name!r} lands in degree {target}, "
                    f"beyond the window {self.window}"
                )
            vec_add(out, self.action.get((token, name), {}), p, c)
        return out

    def apply_word(self, word: tuple, v: Mapping) -> dict:
        """Apply a monomial, rightmost generator first, without normalizing."""
        for token in reversed(word):
            if not v:
                return {}
            v = self.act(token, v)
        return v

    def apply(self, theta, v: Mapping) -> dict:
        """Apply a Steenrod element (dict, SteenrodElement or monomial tuple)."""
        p = self.prime
        if isinstance(theta, tuple):
            terms = steenrod.adem_normalize(theta, p)
        elif isinstance(theta, steenrod.SteenrodElement):
            terms = theta.terms
        else:
            terms = {}
            for w, c in theta.items():
                vec_add(terms, steenrod.adem_normalize(w, p), p, c)
        out: dict = {}
        for w, c in terms.items():
            vec_add(out, self.apply_word(w, v), p, c)
        return out

    def generators(self) -> list[int]:
        lo, hi = self.window
        return steenrod.generators_up_to(max(hi - lo, 0), self.prime)


def module_from_table(
    prime: int,
    degrees: Mapping[Hashable, int],
    action: Mapping,
    window=None,
    truncated: bool = False,
    label: str = "",
) -> AModule:
    check_prime(prime)
    space = GradedVectorSpace.from_degrees(prime, degrees, window)
    return AModule(space, dict(action), truncated, label)


def zero_module(prime: int, window=(0, 0)) -> AModule:
    return AModule(GradedVectorSpace(prime, (), tuple(window)), {})


def trivial_module(prime: int, degree: int = 0, name="a") -> AModule:
    return module_from_table(prime, {name: degree}, {}, label=f"F_{prime}[{degree}]")


def suspend(M: AModule, k: int) -> AModule:
    """Shift all degrees by ``k``; the action table is unchanged."""
    return AModule(M.space.shift(k), M.action, M.truncated, M.label)


def dual_space(M: AModule) -> GradedVectorSpace:
    return M.space.dual()


def restrict(M: AModule, lo: int, hi: int) -> AModule:
    """Subquotient in degrees [lo, hi]: the submodule in degrees >= lo, cut above hi."""
    keep = {n: d for n, d in M.space.basis if lo <= d <= hi}
    action = {
        (t, n): {m: c for m, c in img.items() if m in keep}
        for (t, n), img in M.action.items()
        if n in keep
    }
    truncated = M.truncated or any(d > hi for _, d in M.space.basis)
    return module_from_table(M.prime, keep, action, (lo, hi), truncated, M.label)


# --- validation ------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    relation: tuple  # the non-admissible word whose Adem expansion fails
    element: Hashable
    lhs: dict
    rhs: dict

    def describe(self, p: int) -> str:
        return (
            f"{steenrod.monomial_name(self.relation, p)} on {self.element!r}: "
            f"{_fmt(self.lhs)} != {_fmt(self.rhs)}"
        )


def _fmt(v: Mapping) -> str:
    if not v:
        return "0"
    return " + ".join(f"{c}*{n!r}" if c != 1 else repr(n) for n, c in sorted(v.items(), key=repr))


def adem_relations(max_degree: int, p: int) -> list[tuple]:
    """Non-admissible two-generator words up to ``max_degree`` (plus beta^2)."""
    rels = []
    if p == 2:
        for total in range(2, max_degree + 1):
            for b in range(1, total):
                a = total - b
                if a < 2 * b:
                    rels.append((a, b))
        return rels
    if max_degree >= 2:
        rels.append((steenrod.BOCKSTEIN, steenrod.BOCKSTEIN))
    q = 2 * (p - 1)
    for a in range(1, max_degree // q + 1):
        for b in range(1, max_degree // q + 1):
            d = (a + b) * q
            if a < p * b and d <= max_degree:
                rels.append((a, b))
            if a <= p * b and d + 1 <= max_degree:
                rels.append((a, steenrod.BOCKSTEIN, b))
    return rels


def validate_action(M: AModule) -> list[Violation]:
    """Every (Adem relation, basis element) pair that fails inside the window."""
    p = M.prime
    lo, hi = M.window
    report = []
    for rel in adem_relations(hi - lo, p):
        rhs_terms = steenrod.adem_normalize(rel, p)
        d = steenrod.degree(rel, p)
        for name in M.names():
            if not M.known(M.degree(name) + d):
                continue
            v = {name: 1}
            try:
                lhs = M.apply_word(rel, v)
                rhs: dict = {}
                for w, c in rhs_terms.items():
                    vec_add(rhs, M.apply_word(w, v), p, c)
            except WindowTruncation:
                continue
            if lhs != rhs:
                report.append(Violation(rel, name, lhs, rhs))
    return report


# --- maps ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AModuleMap:
    source: AModule
    target: AModule
    linear: GradedLinearMap

    @property
    def degree_shift(self) -> int:
        return self.linear.degree_shift

    def __call__(self, v: Mapping) -> dict:
        return self.linear(v)

    def linearity_defects(self) -> list[tuple]:
        """(generator, basis element) pairs where f(g m) != g f(m) inside both windows."""
        defects = []
        src, tgt = self.source, self.target
        p = src.prime
        for tok in steenrod.generators_up_to(
            max(src.window[1] - src.window[0], tgt.window[1] - tgt.window[0], 0), p
        ):
            for name in src.names():
                try:
                    a = self(src.act(tok, {name: 1}))
                    b = tgt.act(tok, self({name: 1}))
                except WindowTruncation:
                    continue
                if a != _sign_twist(b, tok, self.degree_shift, p):
                    defects.append((tok, name))
        return defects

    def compose(self, other: "AModuleMap") -> "AModuleMap":
        return AModuleMap(other.source, self.target, self.linear.compose(other.linear))


def _sign_twist(v: Mapping, tok: int, shift: int, p: int) -> dict:
    # maps of odd degree anticommute with odd operations
    if (steenrod.generator_degree(tok, p) * shift) % 2:
        return {k: (-c) % p for k, c in v.items()}
    return dict(v)


def module_map(source: AModule, target: AModule, columns: Mapping, shift: int = 0) -> AModuleMap:
    cols = {n: {m: c for m, c in img.items() if m in target.space} for n, img in columns.items()}
    return AModuleMap(source, target, GradedLinearMap(source.space, target.space, shift, cols))


def identity_map(M: AModule) -> AModuleMap:
    return AModuleMap(M, M, GradedLinearMap.identity(M.space))


def inclusion_map(sub: AModule, M: AModule) -> AModuleMap:
    """Map sending each basis element of ``sub`` to the same-named element of ``M``."""
    return module_map(sub, M, {n: {n: 1} for n in sub.names() if n in M.space})


def alinear_hom_space(M: AModule, N: AModule, shift: int = 0) -> list[AModuleMap]:
    """Basis of A-linear maps M -> N raising degree by ``shift``, on the windows.

    Solves f(g m) = g f(m) for every generator g and basis element m whose
    both sides are known.  Window truncation can only add solutions.
    """
    p = M.prime
    unknowns = [
        (m, n) for m in M.names() for n in N.names(M.degree(m) + shift)
    ]
    index = {u: i for i, u in enumerate(unknowns)}
    if not unknowns:
        return []
    rows = []
    width = max(M.window[1] - M.window[0], N.window[1] - N.window[0], 0)
    for tok in steenrod.generators_up_to(width, p):
        gd = steenrod.generator_degree(tok, p)
        sign = -1 if (gd * shift) % 2 else 1
        for m in M.names():
            d_out = M.degree(m) + gd + shift
            if not (M.known(M.degree(m) + gd) and N.known(d_out)):
                continue
            gm = M.act(tok, {m: 1})
            # one equation per target basis element in degree d_out
            eqs: dict = {}
            for m2, c in gm.items():
                for n in N.names(d_out):
                    row = eqs.setdefault(n, np.zeros(len(unknowns), dtype=np.int64))
                    row[index[(m2, n)]] += c
            for n0 in N.names(M.degree(m) + shift):
                for n, c in N.act(tok, {n0: 1}).items():
                    row = eqs.setdefault(n, np.zeros(len(unknowns), dtype=np.int64))
                    row[index[(m, n0)]] -= sign * c
            rows.extend(eqs.values())
    if rows:
        mat = np.array(rows, dtype=np.int64) % p
        ker = kernel(mat, p)
    else:
        ker = np.eye(len(unknowns), dtype=np.int64)
    maps = []
    for vec in ker:
        cols: dict = {}
        for i in np.nonzero(vec)[0]:
            m, n = unknowns[i]
            cols.setdefault(m, {})[n] = int(vec[i])
        maps.append(module_map(M, N, cols, shift))
    return maps


# --- dual comodules --------------------------------------------------------------

@dataclass(frozen=True)
class CompleteComoduleWindow:
    """Dual of a module with its coaction, known up to a coaction-degree bound.

    Dual basis elements carry the tag of the module basis element they are
    dual to and sit in the same (homological) degree.  ``coaction[alpha]`` is
    ``{(theta, beta): c}`` meaning the term theta^* (x) beta.
    """

    module: AModule
    bound: int
    coaction: Mapping

    @property
    def prime(self) -> int:
        return self.module.prime

    def counit_defects(self) -> list:
        bad = []
        for alpha, terms in self.coaction.items():
            unit_part = {b: c for (t, b), c in terms.items() if t == ()}
            if unit_part != {alpha: 1}:
                bad.append(alpha)
        return bad

    def coassociativity_defects(self) -> list:
        """Basis elements where (psi (x) 1) nu != (1 (x) nu) nu up to the bound."""
        p = self.prime
        bad = []
        psi_cache: dict = {}
        for alpha, terms in self.coaction.items():
            left: dict = {}
            for (theta, beta), c in terms.items():
                d = steenrod.degree(theta, p)
                if theta not in psi_cache:
                    psi_cache[theta] = steenrod.coproduct_window(theta, (0, d), p)
                for (t1, t2), k in psi_cache[theta].items():
                    vec_add(left, {(t1, t2, beta): 1}, p, c * k)
            right: dict = {}
            for (t1, beta), c in terms.items():
                for (t2, gamma), k in self.coaction.get(beta, {}).items():
                    if steenrod.degree(t1, p) + steenrod.degree(t2, p) <= self.bound:
                        vec_add(right, {(t1, t2, gamma): 1}, p, c * k)
            if left != right:
                bad.append(alpha)
        return bad

    def double_dual(self) -> AModule:
        """Recover the module action from the coaction (generators only)."""
        p = self.prime
        action: dict = {}
        for alpha, terms in self.coaction.items():
            for (theta, beta), c in terms.items():
                if len(theta) == 1:
                    # <alpha, g b> = c  ->  g b has coefficient c on alpha
                    action.setdefault((theta[0], beta), {})[alpha] = c
        M = self.module
        return AModule(M.space, action, M.truncated, M.label)


def dual_action(M: AModule, word: tuple, alpha) -> dict:
    """theta_*(alpha) = sum_b <alpha, theta b> b^* for the monomial ``theta``."""
    p = M.prime
    d = steenrod.degree(word, p)
    out = {}
    for b in M.names(M.degree(alpha) - d):
        c = M.apply_word(word, {b: 1}).get(alpha, 0)
        if c:
            out[b] = c
    return out


def dual_comodule(M: AModule, bound: int | None = None) -> CompleteComoduleWindow:
    """Dual of ``M`` with coaction nu(alpha) = sum_theta theta^* (x) theta_*(alpha)."""
    p = M.prime
    lo, hi = M.window
    if bound is None:
        bound = hi - lo
    coaction = {}
    for alpha in M.names():
        terms: dict = {}
        q = M.degree(alpha)
        for s in range(0, min(bound, q - lo) + 1):
            for theta in steenrod.admissible_basis(s, p):
                for b, c in dual_action(M, theta, alpha).items():
                    terms[(theta, b)] = c
        coaction[alpha] = terms
    return CompleteComoduleWindow(M, bound, coaction)


def direct_sum(*modules: AModule, tags: Iterable[str] | None = None) -> AModule:
    """Direct sum; basis names become ``(tag, name)`` pairs."""
    p = modules[0].prime
    tags = list(tags) if tags is not None else [str(i) for i in range(len(modules))]
    degrees = {}
    action = {}
    lo = min(M.window[0] for M in modules)
    hi = max(M.window[1] for M in modules)
    for tag, M in zip(tags, modules):
        for n, d in M.space.basis:
            degrees[(tag, n)] = d
        for (t, n), img in M.action.items():
            action[(t, (tag, n))] = {(tag, m): c for m, c in img.items()}
    return module_from_table(p, degrees, action, (lo, hi), any(M.truncated for M in modules))


def submodule_closure(M: AModule, vectors: Iterable[Mapping]) -> dict:
    """Per-degree echelon bases of the submodule generated by homogeneous ``vectors``."""
    from .fp import RowSpace

    p = M.prime
    spaces: dict = {}
    todo = [dict(v) for v in vectors if v]
    while todo:
        v = todo.pop()
        d = M.degree(next(iter(v)))
        names = M.names(d)
        rs = spaces.setdefault(d, RowSpace(len(names), p))
        vec = np.zeros(len(names), dtype=np.int64)
        for n, c in v.items():
            vec[names.index(n)] = c
        if not rs.add(vec):
            continue
        for tok in M.generators():
            if M.known(d + steenrod.generator_degree(tok, p)):
                w = M.act(tok, v)
                if w:
                    todo.append(w)
    return spaces


def quotient(M: AModule, vectors: Iterable[Mapping], label: str = "") -> tuple[AModule, dict]:
    """M modulo the submodule generated by ``vectors``.

    The quotient keeps the basis elements of M that are not echelon pivots
    of the submodule.  Returns the module and the projection as a dict
    {old name: image vector}.
    """
    p = M.prime
    spaces = submodule_closure(M, vectors)
    proj: dict = {}
    keep = {}
    for d in M.space.degrees():
        names = M.names(d)
        rs = spaces.get(d)
        pivots = set(rs.pivots) if rs else set()
        kept = [n for i, n in enumerate(names) if i not in pivots]
        for n in kept:
            keep[n] = d
        for i, n in enumerate(names):
            vec = np.zeros(len(names), dtype=np.int64)
            vec[i] = 1
            if rs:
                vec = rs.reduce(vec)
            proj[n] = {names[j]: int(vec[j]) for j in np.nonzero(vec)[0]}
    action = {}
    for (tok, n), img in M.action.items():
        if n in keep:
            out: dict = {}
            for m, c in img.items():
                vec_add(out, proj[m], p, c)
            action[(tok, n)] = out
    Q = module_from_table(p, keep, action, M.window, M.truncated, label or M.label)
    return Q, proj


def rename(M: AModule, mapping: Mapping) -> AModule:
    degrees = {mapping[n]: d for n, d in M.space.basis}
    action = {(t, mapping[n]): {mapping[m]: c for m, c in img.items()} for (t, n), img in M.action.items()}
    return module_from_table(M.prime, degrees, action, M.window, M.truncated, M.label)
