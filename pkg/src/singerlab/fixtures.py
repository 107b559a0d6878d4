"""Seeded random modules used by the verification suites and the tests.

Random modules are quotients of truncated free modules by random
submodules, so they satisfy the Adem relations by construction.
"""

from __future__ import annotations

import random

from . import steenrod
from .amodule import AModule, module_from_table, quotient, rename, validate_action
from .fp import GradedLinearMap, GradedVectorSpace


def truncated_free(p: int, gen_degrees, top: int, label: str = "") -> AModule:
    """Free module on generators of the given degrees, cut off above ``top``.

    The cut is a quotient by a submodule, so the result is a genuine module
    that is zero (not unknown) above ``top``.
    """
    degrees = {}
    for g, d0 in enumerate(gen_degrees):
        for d in range(d0, top + 1):
            for theta in steenrod.admissible_basis(d - d0, p):
                degrees[(g, theta)] = d
    action = {}
    for (g, theta), d in degrees.items():
        for tok in steenrod.generators_up_to(top - d, p):
            img = {}
            for w, c in steenrod.adem_normalize((tok,) + theta, p).items():
                if (g, w) in degrees:
                    img[(g, w)] = c
            if img:
                action[(tok, (g, theta))] = img
    lo = min(gen_degrees)
    return module_from_table(p, degrees, action, (lo, top), label=label)


def _relabel(M: AModule) -> AModule:
    """Names ``m0, m1, ...`` in (degree, old name) order."""
    mapping = {n: f"m{i}" for i, n in enumerate(M.names())}
    return rename(M, mapping)


def random_module(p: int, seed: int, max_dim: int = 6, max_degree: int = 8) -> AModule:
    """A valid finite module with at most ``max_dim`` basis elements in degrees [0, max_degree]."""
    rng = random.Random(f"{p}:{seed}")
    ngen = rng.randint(1, 3)
    gens = sorted(rng.randint(0, max_degree) for _ in range(ngen))
    top = min(max_degree, gens[0] + rng.randint(0, max_degree))
    gens = [g for g in gens if g <= top]
    M = truncated_free(p, gens, top)
    # random relations, then chop the top until small enough
    rels = []
    names = M.names()
    upper = [n for n in names if M.degree(n) > gens[0]]
    for _ in range(rng.randint(0, 3) if upper else 0):
        n = rng.choice(upper)
        d = M.degree(n)
        v = {m: rng.randrange(p) for m in M.names(d)}
        rels.append({m: c for m, c in v.items() if c})
    M, _ = quotient(M, [r for r in rels if r])
    while M.dim() > max_dim:
        top_deg = max(M.space.degrees())
        M, _ = quotient(M, [{n: 1} for n in M.names(top_deg)])
        M = _drop_empty(M)
    M = _relabel(_drop_empty(M))
    return AModule(M.space, M.action, False, f"rand(p={p},seed={seed})")


def _drop_empty(M: AModule) -> AModule:
    """Shrink the window to the occupied degrees."""
    ds = M.space.degrees()
    if not ds:
        return M
    return module_from_table(M.prime, dict(M.space.basis), M.action, (ds[0], ds[-1]), M.truncated, M.label)


def random_modules(p: int, count: int, seed: int = 0, **kw) -> list[AModule]:
    return [random_module(p, seed * 1000 + i, **kw) for i in range(count)]


def corrupt(M: AModule, seed: int = 0) -> AModule:
    """Perturb one action entry so that some Adem relation fails.

    Returns a module for which :func:`validate_action` is non-empty, or
    raises ValueError if no single perturbation breaks ``M``.
    """
    rng = random.Random(seed)
    p = M.prime
    slots = []
    for tok in M.generators():
        gd = steenrod.generator_degree(tok, p)
        for n in M.names():
            targets = M.names(M.degree(n) + gd)
            if targets:
                slots.append((tok, n, targets))
    rng.shuffle(slots)
    for tok, n, targets in slots:
        for t in targets:
            action = {k: dict(v) for k, v in M.action.items()}
            img = action.setdefault((tok, n), {})
            img[t] = (img.get(t, 0) + 1) % p
            bad = AModule(M.space, action, M.truncated, M.label + "+defect")
            if validate_action(bad):
                return bad
    raise ValueError("no single-entry perturbation violates an Adem relation")


def sq1_defect(p: int = 2) -> AModule:
    """Three classes with Sq^1 Sq^1 acting nonzero (beta beta at odd p)."""
    tok = 1 if p == 2 else steenrod.BOCKSTEIN
    return module_from_table(p, {"a": 0, "b": 1, "c": 2}, {(tok, "a"): {"b": 1}, (tok, "b"): {"c": 1}})


def joker(label: str = "joker") -> AModule:
    """The p = 2 Joker A(1)/A(1)Sq^3: five classes in degrees 0..4."""
    F = truncated_free(2, [0], 4)
    Q, _ = quotient(F, [{(0, (3,)): 1}, {(0, (4,)): 1}])
    Q = _relabel(Q)
    return AModule(Q.space, Q.action, False, label)


def random_graded_space(p: int, seed: int, max_dim: int = 4, max_degree: int = 4) -> GradedVectorSpace:
    rng = random.Random(f"gs:{p}:{seed}")
    k = rng.randint(1, max_dim)
    degrees = {f"b{i}": rng.randint(0, max_degree) for i in range(k)}
    return GradedVectorSpace.from_degrees(p, degrees)


def random_cp_sigma(p: int, seed: int, max_blocks: int = 4):
    """Random C_p-action as a block-diagonal sum of Jordan blocks J_k (1 <= k <= p).

    Every finitely generated F_p[C_p]-module is such a sum; the block J_p is
    free and J_1 is trivial.  Returns (space, sigma, blocks): sigma is a
    degree-0 GradedLinearMap, blocks the Jordan block sizes, and all classes
    sit in degree 0.
    """
    rng = random.Random(f"cp:{p}:{seed}")
    blocks = [rng.randint(1, p) for _ in range(rng.randint(1, max_blocks))]
    degrees = {}
    cols = {}
    idx = 0
    for b in blocks:
        names = [f"v{idx + i:02d}" for i in range(b)]
        idx += b
        for n in names:
            degrees[n] = 0
        # sigma = 1 + nilpotent shift on the block
        for i, n in enumerate(names):
            img = {n: 1}
            if i + 1 < b:
                img[names[i + 1]] = 1
            cols[n] = img
    space = GradedVectorSpace.from_degrees(p, degrees)
    return space, GradedLinearMap(space, space, 0, cols), blocks
