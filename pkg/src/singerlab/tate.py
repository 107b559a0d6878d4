"""Modules over F_p[C_p], the periodic complete resolution and Tate groups.

The complete resolution of F_p has F_p[C_p] in every degree k, with
d_k = N = 1 + sigma + ... + sigma^{p-1} for k even and d_k = 1 - sigma for k
odd.  A map F_p[C_p] -> M is determined by the image of 1, so both
Hom_{C_p}(P_k, M) and P_k (x)_{C_p} M are copies of M and the induced maps
are the group-ring elements evaluated on sigma_M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import WindowError
from .fp import (
    GradedLinearMap,
    GradedVectorSpace,
    check_prime,
    rank,
    solve,
    subquotient,
    vec_add,
)


@dataclass(frozen=True)
class CpModule:
    """A graded F_p[C_p]-module: a graded space with a degree-0 automorphism sigma of order p."""

    space: GradedVectorSpace
    sigma: GradedLinearMap
    label: str = ""

    def __post_init__(self):
        p = self.space.prime
        if self.sigma.degree_shift != 0:
            raise ValueError("sigma must preserve degree")
        for n in self.space.names():
            if self.power({n: 1}, p) != {n: 1}:
                raise ValueError(f"sigma^p != 1 on {n!r}")

    @property
    def prime(self) -> int:
        return self.space.prime

    def matrix(self, d: int) -> np.ndarray:
        return self.sigma.matrix(d) % self.prime

    def power(self, v: dict, k: int) -> dict:
        """sigma^k v for k >= 0."""
        for _ in range(k):
            v = self.sigma(v)
        return v

    def evaluate(self, z, d: int) -> np.ndarray:
        """Matrix of the group-ring element sum z[k] sigma^k on the degree-d part."""
        p = self.prime
        names = self.space.names(d)
        idx = {n: i for i, n in enumerate(names)}
        out = np.zeros((len(names), len(names)), dtype=np.int64)
        for j, n in enumerate(names):
            v = {n: 1}
            for k in range(p):
                if z[k]:
                    for x, c in v.items():
                        out[idx[x], j] = (out[idx[x], j] + z[k] * c) % p
                if k + 1 < p:
                    v = self.sigma(v)
        return out

    def dual(self) -> "CpModule":
        """Hom(M, F_p) with sigma acting by the transpose of sigma^{-1}; degrees negated."""
        p = self.prime
        space = self.space.dual()
        cols = {}
        for n in self.space.names():
            # the transpose of sigma^{-1} = sigma^{p-1}
            for x, c in self.power({n: 1}, p - 1).items():
                cols.setdefault(x, {})[n] = c
        return CpModule(space, GradedLinearMap(space, space, 0, cols), f"{self.label}*")


def cp_module(p: int, degrees: dict, sigma: dict, label: str = "") -> CpModule:
    space = GradedVectorSpace.from_degrees(p, degrees)
    return CpModule(space, GradedLinearMap(space, space, 0, sigma), label)


def trivial_cp(p: int, degree: int = 0) -> CpModule:
    return cp_module(p, {"1": degree}, {"1": {"1": 1}}, "F_p")


def free_cp(p: int, degree: int = 0) -> CpModule:
    """The regular module F_p[C_p] on g^0, ..., g^{p-1}."""
    names = [f"g{k}" for k in range(p)]
    return cp_module(
        p, {n: degree for n in names}, {names[k]: {names[(k + 1) % p]: 1} for k in range(p)}, "F_p[C_p]"
    )


def jordan_cp(p: int, blocks, degree: int = 0) -> CpModule:
    """Direct sum of Jordan blocks J_k = F_p[C_p]/(sigma - 1)^k, 1 <= k <= p."""
    check_prime(p)
    degrees, cols = {}, {}
    idx = 0
    for b in blocks:
        if not 1 <= b <= p:
            raise ValueError(f"block size {b} outside [1, {p}]")
        names = [f"v{idx + i:02d}" for i in range(b)]
        idx += b
        for i, n in enumerate(names):
            degrees[n] = degree
            cols[n] = {n: 1}
            if i + 1 < b:
                cols[n][names[i + 1]] = 1
    return cp_module(p, degrees, cols, f"J{tuple(blocks)}")


# --- the complete resolution ---------------------------------------------------

def norm_element(p: int) -> np.ndarray:
    """N = 1 + sigma + ... + sigma^{p-1} as a coefficient vector on sigma^0..sigma^{p-1}."""
    return np.ones(p, dtype=np.int64)


def one_minus_sigma(p: int) -> np.ndarray:
    z = np.zeros(p, dtype=np.int64)
    z[0] = 1
    z[1 % p] = (z[1 % p] - 1) % p
    return z


def _regular(z: np.ndarray, p: int) -> np.ndarray:
    """Matrix of multiplication by z on F_p[C_p] in the basis sigma^0..sigma^{p-1}."""
    m = np.zeros((p, p), dtype=np.int64)
    for j in range(p):
        for k in range(p):
            m[(j + k) % p, j] = (m[(j + k) % p, j] + z[k]) % p
    return m


@dataclass(frozen=True)
class CompleteResolutionWindow:
    """Degrees n0..n1 of the periodic complete resolution of F_p over F_p[C_p].

    ``differential(k)`` is the group-ring element by which d_k: P_k -> P_{k-1}
    multiplies.
    """

    prime: int
    n0: int
    n1: int

    def differential(self, k: int) -> np.ndarray:
        return norm_element(self.prime) if k % 2 == 0 else one_minus_sigma(self.prime)

    def matrix(self, k: int) -> np.ndarray:
        return _regular(self.differential(k), self.prime)

    def d_squared_defects(self) -> list[int]:
        p = self.prime
        return [k for k in range(self.n0 + 1, self.n1 + 1) if ((self.matrix(k - 1) @ self.matrix(k)) % p).any()]

    def exactness_defects(self) -> list[int]:
        """Interior degrees k where ker d_k != im d_{k+1}."""
        p = self.prime
        bad = []
        for k in range(self.n0 + 1, self.n1):
            if p - rank(self.matrix(k), p) != rank(self.matrix(k + 1), p):
                bad.append(k)
        return bad


# --- Tate groups ---------------------------------------------------------------

@dataclass(frozen=True)
class TateGroup:
    """A Tate (co)homology group, graded by the internal degree of M.

    ``reps[name]`` is a cycle in M representing the basis element ``name``.
    """

    kind: str  # "cohomology" or "homology"
    n: int
    space: GradedVectorSpace
    reps: dict = field(default_factory=dict)

    def dim(self, degree: int | None = None) -> int:
        return self.space.dim(degree)


def _induced(M: CpModule, z: np.ndarray, d: int) -> np.ndarray:
    return M.evaluate(z, d)


def _tate(M: CpModule, n: int, kind: str, window: CompleteResolutionWindow | None) -> TateGroup:
    p = M.prime
    if window is None:
        window = CompleteResolutionWindow(p, n - 1, n + 1)
    elif not (window.n0 <= n - 1 and n + 1 <= window.n1):
        raise WindowError(f"degree {n} needs the resolution on [{n - 1}, {n + 1}]")
    if kind == "cohomology":
        # delta^k = precomposition with d_{k+1}
        cyc, bnd = window.differential(n + 1), window.differential(n)
    else:
        cyc, bnd = window.differential(n), window.differential(n + 1)
    degrees, reps = {}, {}
    for d in M.space.degrees():
        names = M.space.names(d)
        A = _induced(M, cyc, d)
        B = _induced(M, bnd, d)
        rows = subquotient(A, B, len(names), p)
        for i, row in enumerate(rows):
            key = f"h{n}[{d}]{i}"
            degrees[key] = d
            reps[key] = {names[j]: int(row[j]) for j in np.nonzero(row)[0]}
    space = GradedVectorSpace(p, tuple(degrees.items()), M.space.window)
    return TateGroup(kind, n, space, reps)


def tate_cohomology(M: CpModule, n: int, window: CompleteResolutionWindow | None = None) -> TateGroup:
    """H^n of Hom_{C_p}(P_*, M): ker(1 - sigma)/im N for n even, ker N/im(1 - sigma) for n odd."""
    return _tate(M, n, "cohomology", window)


def tate_homology(M: CpModule, n: int, window: CompleteResolutionWindow | None = None) -> TateGroup:
    """H_n of P_* (x) M: ker N/im(1 - sigma) for n even, ker(1 - sigma)/im N for n odd."""
    return _tate(M, n, "homology", window)


def group_homology(M: CpModule, j: int) -> int:
    """dim H_j(C_p; M) summed over internal degrees; H_0 is the coinvariants."""
    if j < 0:
        return 0
    if j >= 1:
        return tate_homology(M, j).dim()
    p = M.prime
    total = 0
    for d in M.space.degrees():
        n = M.space.dim(d)
        total += n - rank(_induced(M, one_minus_sigma(p), d), p)
    return total


def _reduce_mod(v: np.ndarray, bnd: np.ndarray, basis: np.ndarray, p: int) -> np.ndarray | None:
    """Coordinates of v in ``basis`` modulo the column span of ``bnd``."""
    mat = np.concatenate([basis.T, bnd], axis=1) if basis.size else bnd
    x = solve(mat, v, p)
    return None if x is None else x[: basis.shape[0]]


@dataclass(frozen=True)
class ShiftIso:
    """Basis-level correspondence H^n(M) -> H_{-n-1}(M), one matrix per internal degree."""

    n: int
    source: TateGroup
    target: TateGroup
    matrices: dict

    def is_iso(self) -> bool:
        p = self.source.space.prime
        for d, m in self.matrices.items():
            if m.shape[0] != m.shape[1] or (m.size and rank(m, p) != m.shape[0]):
                return False
        return self.source.dim() == self.target.dim()


def degree_shift_iso(M: CpModule, n: int) -> ShiftIso:
    """The identification H^n(C_p; M) = H_{-n-1}(C_p; M).

    Hom_{C_p}(P_k, M) and P_{-k-1} (x) M are both M, and the periodic
    resolution is self-dual with d_{k+1} matching d_{-k}, so a cocycle of
    degree n is a cycle of degree -n-1.  The matrix expresses each
    cohomology representative in the homology basis.
    """
    p = M.prime
    src = tate_cohomology(M, n)
    tgt = tate_homology(M, -n - 1)
    bnd_elt = CompleteResolutionWindow(p, -n - 3, -n + 1).differential(-n)
    mats = {}
    for d in M.space.degrees():
        names = M.space.names(d)
        idx = {x: i for i, x in enumerate(names)}
        s_names = src.space.names(d)
        t_names = tgt.space.names(d)
        basis = np.zeros((len(t_names), len(names)), dtype=np.int64)
        for i, k in enumerate(t_names):
            for x, c in tgt.reps[k].items():
                basis[i, idx[x]] = c
        bnd = _induced(M, bnd_elt, d)
        m = np.zeros((len(t_names), len(s_names)), dtype=np.int64)
        for j, k in enumerate(s_names):
            v = np.zeros(len(names), dtype=np.int64)
            for x, c in src.reps[k].items():
                v[idx[x]] = c
            coords = _reduce_mod(v, bnd, basis, p)
            if coords is None:
                raise ArithmeticError(f"cocycle {k} is not a cycle in degree {-n - 1}")
            m[:, j] = coords
        mats[d] = m
    return ShiftIso(n, src, tgt, mats)


# --- permutation modules on tensor powers -------------------------------------

@dataclass(frozen=True)
class PermutationModule:
    """Degree-t part of V^{(x)p} with C_p rotating the factors, and its orbit decomposition."""

    module: CpModule
    diagonal: tuple  # basis names a with a^{(x)p} in degree t
    free_orbits: tuple  # canonical representatives of the non-diagonal orbits

    @property
    def trivial_rank(self) -> int:
        return len(self.diagonal)

    @property
    def free_rank(self) -> int:
        return len(self.free_orbits)


def _words(names: tuple, degs: tuple, k: int, t: int):
    """Words of length k in ``names`` with total degree t, in lexicographic index order."""
    if k == 0:
        if t == 0:
            yield ()
        return
    lo = min(degs)
    for i, n in enumerate(names):
        rest = t - degs[i]
        if rest < lo * (k - 1) or rest > max(degs) * (k - 1):
            continue
        for w in _words(names, degs, k - 1, rest):
            yield (n,) + w


def _rotate(word: tuple) -> tuple:
    return (word[-1],) + word[:-1]


def permutation_module(B: GradedVectorSpace, t: int, p: int | None = None) -> PermutationModule:
    return _permutation_module(B, t, B.prime if p is None else p)


@lru_cache(maxsize=256)
def _permutation_module(B: GradedVectorSpace, t: int, p: int) -> PermutationModule:
    """V^{(x)p} in total degree t with sigma(a_1 (x) ... (x) a_p) = +/- a_p (x) a_1 (x) ... (x) a_{p-1}.

    The sign is the Koszul sign (-1)^{|a_p| (t - |a_p|)} for moving the last
    factor to the front.
    """
    names = B.names()
    deg = {n: B.degree(n) for n in names}
    words = [w for w in _words(tuple(names), tuple(deg[n] for n in names), p, t)]
    degrees = {w: t for w in words}
    cols = {}
    for w in words:
        last = deg[w[-1]]
        sign = -1 if (last * (t - last)) % 2 else 1
        cols[w] = {_rotate(w): sign % p}
    space = GradedVectorSpace(p, tuple(degrees.items()), (t, t))
    module = CpModule(space, GradedLinearMap(space, space, 0, cols), f"perm(t={t})")
    diagonal, free = [], []
    seen = set()
    for w in words:
        if w in seen:
            continue
        orbit = [w]
        for _ in range(p - 1):
            orbit.append(_rotate(orbit[-1]))
        seen.update(orbit)
        if len(set(orbit)) == 1:
            diagonal.append(w[0])
        else:
            free.append(w)
    return PermutationModule(module, tuple(diagonal), tuple(free))


def orbit_submodule(P: PermutationModule, rep: tuple) -> CpModule:
    """The cyclic submodule spanned by one orbit."""
    M = P.module
    orbit = [rep]
    for _ in range(M.prime - 1):
        orbit.append(_rotate(orbit[-1]))
    orbit = list(dict.fromkeys(orbit))
    degrees = {w: M.space.degree(w) for w in orbit}
    cols = {w: M.sigma.columns.get(w, {}) for w in orbit}
    return cp_module(M.prime, degrees, cols, f"orbit{rep}")


# --- the ring Lambda -------------------------------------------------------------

class LambdaElement:
    """Element of Lambda: P(u, 1/u) at p = 2, E(u) (x) P(t, 1/t) at odd p.

    Terms are keyed by (i, r) for u^i t^r at odd p and by (0, r) for u^r at
    p = 2.  deg(u) = -1 and deg(t) = -2.
    """

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms=None):
        check_prime(prime)
        self.prime = prime
        clean = {}
        for (i, r), c in (terms or {}).items():
            if prime != 2 and i not in (0, 1):
                raise ValueError("the exponent of u is 0 or 1 at odd p")
            if prime == 2 and i != 0:
                raise ValueError("at p = 2 use (0, r) for u^r")
            if c % prime:
                clean[(i, r)] = c % prime
        self.terms = clean

    @classmethod
    def u(cls, p: int, k: int = 1) -> "LambdaElement":
        if p == 2:
            return cls(p, {(0, k): 1})
        if k not in (0, 1):
            return cls(p, {})
        return cls(p, {(k, 0): 1})

    @classmethod
    def t(cls, p: int, k: int = 1) -> "LambdaElement":
        if p == 2:
            raise ValueError("Lambda has no generator t at p = 2")
        return cls(p, {(0, k): 1})

    @classmethod
    def one(cls, p: int) -> "LambdaElement":
        return cls(p, {(0, 0): 1})

    def degree_of(self, key) -> int:
        i, r = key
        return -r if self.prime == 2 else -i - 2 * r

    def __mul__(self, other: "LambdaElement") -> "LambdaElement":
        return lambda_multiply(self, other)

    def __add__(self, other: "LambdaElement") -> "LambdaElement":
        out = dict(self.terms)
        vec_add(out, other.terms, self.prime)
        return LambdaElement(self.prime, out)

    def __eq__(self, other):
        return isinstance(other, LambdaElement) and self.prime == other.prime and self.terms == other.terms

    def __hash__(self):
        return hash((self.prime, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, r), c in sorted(self.terms.items()):
            mono = f"u^{r}" if self.prime == 2 else f"{'u' if i else ''}t^{r}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def lambda_multiply(a: LambdaElement, b: LambdaElement) -> LambdaElement:
    """Product in Lambda.  t has even degree, so no Koszul signs arise."""
    if a.prime != b.prime:
        raise ValueError("primes differ")
    p = a.prime
    out: dict = {}
    for (i, r), c in a.terms.items():
        for (j, s), k in b.terms.items():
            if p != 2 and i + j > 1:
                continue
            vec_add(out, {(i + j, r + s): c * k}, p)
    return LambdaElement(p, out)


def periodicity_defects(M: CpModule, n_range) -> list[tuple]:
    """Degrees n where dim H^n differs from dim H^{n+2} (or H^{n+1} at p = 2)."""
    step = 1 if M.prime == 2 else 2
    bad = []
    for n in n_range:
        if tate_cohomology(M, n).dim() != tate_cohomology(M, n + step).dim():
            bad.append(n)
    return bad
