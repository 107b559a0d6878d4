"""Exact linear algebra over F_p on graded, finite-type vector spaces.

Matrices are dense numpy ``int64`` arrays holding residues ``0..p-1``; the
degrees at desk scale are small, so sparse storage buys nothing here.
Columns of a matrix are images of source basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .errors import WindowError

Vector = dict  # {basis name: residue}, zero entries never stored


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"{p!r} is not a prime")
    return int(p)


def inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


def _lucas(n: int, k: int, p: int) -> int:
    result = 1
    while n or k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        # digits are < p, so the small binomial is exact
        num = 1
        den = 1
        for i in range(kd):
            num *= nd - i
            den *= i + 1
        result = result * (num // den) % p
        n //= p
        k //= p
    return result


def binom_mod_p(n: int, k: int, p: int) -> int:
    """Residue of the binomial coefficient C(n, k) modulo ``p``.

    ``n`` may be any integer; C(n, k) is the polynomial n(n-1)...(n-k+1)/k!,
    which for negative ``n`` equals (-1)^k C(k-n-1, k).  Returns 0 for k < 0.
    """
    if k < 0:
        return 0
    if n < 0:
        value = _lucas(k - n - 1, k, p)
        return (-value) % p if k % 2 else value
    return _lucas(n, k, p)


# --- vectors -----------------------------------------------------------------

def vec_add(target: dict, other: Mapping, p: int, scale: int = 1) -> dict:
    """In-place ``target += scale * other`` over F_p."""
    if scale % p == 0:
        return target
    for key, c in other.items():
        v = (target.get(key, 0) + scale * c) % p
        if v:
            target[key] = v
        else:
            target.pop(key, None)
    return target


def vec_scale(v: Mapping, c: int, p: int) -> dict:
    c %= p
    if c == 0:
        return {}
    return {k: (x * c) % p for k, x in v.items()}


def vec_clean(v: Mapping, p: int) -> dict:
    return {k: c % p for k, c in v.items() if c % p}


# --- matrices ----------------------------------------------------------------

def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the list of pivot columns."""
    return _eliminate(mat, p, full=True)


def pivot_columns(mat: np.ndarray, p: int) -> list[int]:
    """Pivot columns of the echelon form (forward elimination only)."""
    return _eliminate(mat, p, full=False)[1]


def _eliminate(mat: np.ndarray, p: int, full: bool):
    if p == 2:
        a = (np.array(mat, dtype=np.int64) % 2).astype(np.uint8)
    else:
        a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        if p != 2:
            a[r] = (a[r] * inverse(int(a[r, c]), p)) % p
        col = a[:, c] if full else a[r:, c]
        hit = np.flatnonzero(col)
        if not full:
            hit = hit + r
        hit = hit[hit != r]
        if hit.size:
            if p == 2:
                a[hit] ^= a[r]
            else:
                a[hit] = (a[hit] - np.outer(a[hit, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a.astype(np.int64) if p == 2 else a, pivots


def rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(rref(mat, p)[1])


def kernel(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of the null space as rows, one per free column of the RREF."""
    rows, cols = mat.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref(mat, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = (-r[row, f]) % p
    return basis


def solve(mat: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of ``mat @ x = b`` (free variables zero), or None."""
    rows, cols = mat.shape
    b = np.asarray(b, dtype=np.int64).reshape(rows) % p
    if cols == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    aug = np.concatenate([np.asarray(mat, dtype=np.int64) % p, b[:, None]], axis=1)
    r, pivots = rref(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = r[row, cols]
    return x


class RowSpace:
    """Incrementally maintained row space in echelon form.

    Used to decide membership and extend spans vector by vector, which is the
    inner loop of the minimal-resolution algorithm.
    """

    def __init__(self, dim: int, p: int):
        self.dim = dim
        self.p = p
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                v = (v - v[pc] * row) % self.p
        return v

    def add(self, v: np.ndarray) -> bool:
        """Add ``v``; returns False if it was already in the span."""
        v = self.reduce(v)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        pc = int(nz[0])
        v = (v * inverse(int(v[pc]), self.p)) % self.p
        for i, row in enumerate(self.rows):
            if row[pc]:
                self.rows[i] = (row - row[pc] * v) % self.p
        self.rows.append(v)
        self.pivots.append(pc)
        return True

    def __len__(self) -> int:
        return len(self.rows)


# --- graded spaces and maps ----------------------------------------------------

@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite-type graded F_p vector space on named basis elements.

    The basis is kept sorted by ``(degree, name)``; names must be mutually
    comparable and unique.
    """

    prime: int
    basis: tuple  # of (name, degree)
    window: tuple[int, int]
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        check_prime(self.prime)
        lo, hi = self.window
        basis = tuple(sorted(((n, int(d)) for n, d in self.basis), key=lambda nd: (nd[1], nd[0])))
        names = [n for n, _ in basis]
        if len(set(names)) != len(names):
            raise ValueError("basis names must be unique")
        for n, d in basis:
            if not lo <= d <= hi:
                raise WindowError(f"basis element {n!r} of degree {d} outside window [{lo}, {hi}]")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_index", {n: d for n, d in basis})

    @classmethod
    def from_degrees(cls, prime: int, degrees: Mapping[Hashable, int], window=None):
        if window is None:
            ds = list(degrees.values()) or [0]
            window = (min(ds), max(ds))
        return cls(prime, tuple(degrees.items()), tuple(window))

    def degree(self, name) -> int:
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    def names(self, degree: int | None = None) -> list:
        if degree is None:
            return [n for n, _ in self.basis]
        return [n for n, d in self.basis if d == degree]

    def dim(self, degree: int | None = None) -> int:
        return len(self.names(degree))

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.basis})

    def in_window(self, degree: int) -> bool:
        return self.window[0] <= degree <= self.window[1]

    def dual(self) -> "GradedVectorSpace":
        """Dual space on the dual basis; degrees negated."""
        lo, hi = self.window
        return GradedVectorSpace(self.prime, tuple((n, -d) for n, d in self.basis), (-hi, -lo))

    def shift(self, k: int) -> "GradedVectorSpace":
        lo, hi = self.window
        return GradedVectorSpace(self.prime, tuple((n, d + k) for n, d in self.basis), (lo + k, hi + k))


@dataclass(frozen=True)
class GradedLinearMap:
    """Linear map raising degree by ``degree_shift``.

    ``columns`` maps a source basis name to its image vector; missing names
    map to zero.
    """

    source: GradedVectorSpace
    target: GradedVectorSpace
    degree_shift: int
    columns: Mapping

    def __post_init__(self):
        p = self.source.prime
        if self.target.prime != p:
            raise ValueError("source and target primes differ")
        cols = {}
        for name, image in self.columns.items():
            if name not in self.source:
                raise KeyError(f"{name!r} is not a source basis element")
            image = vec_clean(image, p)
            want = self.source.degree(name) + self.degree_shift
            for t in image:
                if self.target.degree(t) != want:
                    raise ValueError(f"image of {name!r} is not homogeneous of degree {want}")
            if image:
                cols[name] = image
        object.__setattr__(self, "columns", cols)

    def __call__(self, v: Mapping) -> dict:
        out: dict = {}
        for name, c in v.items():
            vec_add(out, self.columns.get(name, {}), self.source.prime, c)
        return out

    def matrix(self, degree: int) -> np.ndarray:
        src = self.source.names(degree)
        tgt = self.target.names(degree + self.degree_shift)
        index = {n: i for i, n in enumerate(tgt)}
        m = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for j, n in enumerate(src):
            for t, c in self.columns.get(n, {}).items():
                m[index[t], j] = c
        return m

    def compose(self, other: "GradedLinearMap") -> "GradedLinearMap":
        """``self ∘ other``."""
        cols = {n: self(other.columns.get(n, {})) for n in other.source.names()}
        return GradedLinearMap(other.source, self.target, self.degree_shift + other.degree_shift, cols)

    @classmethod
    def identity(cls, space: GradedVectorSpace) -> "GradedLinearMap":
        return cls(space, space, 0, {n: {n: 1} for n in space.names()})

    @classmethod
    def zero(cls, source: GradedVectorSpace, target: GradedVectorSpace, shift: int = 0):
        return cls(source, target, shift, {})


def _check_degree(f: GradedLinearMap, degree: int):
    if not f.source.in_window(degree) or not f.target.in_window(degree + f.degree_shift):
        raise WindowError(
            f"degree {degree} outside the windows {f.source.window} -> {f.target.window}"
        )


def rank_and_kernel(f: GradedLinearMap, degree: int) -> tuple[int, list[dict]]:
    """Rank of ``f`` in ``degree`` and a kernel basis (reduced echelon order)."""
    _check_degree(f, degree)
    m = f.matrix(degree)
    p = f.source.prime
    names = f.source.names(degree)
    r = rank(m, p)
    ker = kernel(m, p) if names else np.zeros((0, 0), dtype=np.int64)
    basis = [{names[j]: int(row[j]) for j in np.nonzero(row)[0]} for row in ker]
    return r, basis


def dualize(f: GradedLinearMap) -> GradedLinearMap:
    """Transpose of ``f`` with respect to dual bases; degrees negated.

    The dual map goes target* -> source* and keeps the same degree shift.
    """
    cols: dict = {}
    for n, image in f.columns.items():
        for t, c in image.items():
            cols.setdefault(t, {})[n] = c
    return GradedLinearMap(f.target.dual(), f.source.dual(), f.degree_shift, cols)


def vectors_to_matrix(vectors: Iterable[Mapping], names: list) -> np.ndarray:
    index = {n: i for i, n in enumerate(names)}
    vectors = list(vectors)
    m = np.zeros((len(names), len(vectors)), dtype=np.int64)
    for j, v in enumerate(vectors):
        for n, c in v.items():
            m[index[n], j] = c
    return m


def subquotient(cycles_of: np.ndarray, boundaries_from: np.ndarray, dim: int, p: int) -> np.ndarray:
    """Representatives (rows) for ker(cycles_of) / im(boundaries_from) in F_p^dim.

    ``cycles_of`` has ``dim`` columns and ``boundaries_from`` has ``dim``
    rows.  The representatives are kernel vectors whose pivots survive after
    the boundaries are placed in front of them.
    """
    ker = kernel(cycles_of, p) if cycles_of.shape[0] else np.eye(dim, dtype=np.int64)
    if dim == 0 or ker.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    bnd = np.asarray(boundaries_from, dtype=np.int64).reshape(dim, -1)
    cols = np.concatenate([bnd, ker.T], axis=1)
    piv = pivot_columns(cols, p)
    keep = [j - bnd.shape[1] for j in piv if j >= bnd.shape[1]]
    return ker[keep]
