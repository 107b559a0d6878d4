"""Cohomology of the extended-power tower and the isomorphism omega onto the Singer construction.

Stage n of the tower is Sigma^n D_{C_p}(Sigma^{-n} B).  Its cohomology has
diagonal classes Sigma^n w_j (x) (Sigma^{-n} a)^{(x)p}, j >= 0, and mixed
classes Sigma^n w_0 (x) Sigma^{-n} a_1 (x) ... (x) Sigma^{-n} a_p, one per
non-diagonal C_p-orbit.  ``delta_star`` goes from stage n to stage n + 1 and
omega sends the colimit onto Sigma^{-1} R_+(H^*(B)), whose basis elements are
written with the :class:`SingerBasis` tuples of :mod:`singerlab.singer`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from math import factorial

from .fp import GradedVectorSpace, check_prime, inverse
from .singer import SingerBasis
from .tate import group_homology, permutation_module


def _m(p: int) -> int:
    return (p - 1) // 2


def coeff_alpha(q: int, p: int) -> int:
    """alpha(q) = -(-1)^{mq} m! in F_p; 1 at p = 2."""
    check_prime(p)
    if p == 2:
        return 1
    m = _m(p)
    sign = -1 if (m * q) % 2 == 0 else 1
    return (sign * factorial(m)) % p


def coeff_nu(q: int, p: int) -> int:
    """nu(2j + e) = (-1)^j (m!)^e in F_p; 1 at p = 2."""
    check_prime(p)
    if p == 2:
        return 1
    j, e = divmod(q, 2)
    return ((-1) ** (j % 2) * factorial(_m(p)) ** e) % p


@dataclass(frozen=True)
class CoeffTable:
    prime: int

    @property
    def m(self) -> int:
        return _m(self.prime)

    def alpha(self, q: int) -> int:
        return coeff_alpha(q, self.prime)

    def nu(self, q: int) -> int:
        return coeff_nu(q, self.prime)

    def nu_inv(self, q: int) -> int:
        return inverse(self.nu(q), self.prime)


def verify_coeff_identities(p: int, q_range) -> list[tuple]:
    """(q, identity, lhs, rhs) for every failure of the two coefficient identities."""
    C = CoeffTable(p)
    bad = []
    for q in q_range:
        lhs = (C.alpha(q) * C.nu_inv(q - 1)) % p
        rhs = C.nu_inv(q)
        if lhs != rhs:
            bad.append((q, "alpha(q) nu(q-1)^-1 = nu(q)^-1", lhs, rhs))
        lhs, rhs = C.nu(q + 1), (-C.nu(q - 1)) % p
        if lhs != rhs:
            bad.append((q, "nu(q+1) = -nu(q-1)", lhs, rhs))
    return bad


# --- classes ----------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class ExtPowerClass:
    """A basis class of H^*(Sigma^n D_{C_p}(Sigma^{-n} B)).

    ``kind`` is "diagonal" (tags = (a,), index j) or "mixed" (tags = the
    orbit representative (a_1, ..., a_p), j = 0).
    """

    n: int
    kind: str
    j: int
    tags: tuple

    def degree(self, B: GradedVectorSpace) -> int:
        p = B.prime
        if self.kind == "diagonal":
            return self.n + self.j + p * (B.degree(self.tags[0]) - self.n)
        return self.n + sum(B.degree(a) - self.n for a in self.tags)

    def label(self) -> str:
        if self.kind == "diagonal":
            return f"S^{self.n}w{self.j}({self.tags[0]})^p"
        return f"S^{self.n}w0(" + ",".join(map(str, self.tags)) + ")"


def diagonal(n: int, j: int, a) -> ExtPowerClass:
    if j < 0:
        raise ValueError("w-index must be >= 0")
    return ExtPowerClass(n, "diagonal", j, (a,))


def stage_classes(B: GradedVectorSpace, n: int, degree: int) -> list[ExtPowerClass]:
    """All basis classes of stage n in one cohomological degree, sorted."""
    p = B.prime
    out = []
    for a in B.names():
        j = degree - n - p * (B.degree(a) - n)
        if j >= 0:
            out.append(diagonal(n, j, a))
    # mixed orbits in degree n + sum(|a_i| - n), i.e. tensor degree degree - n + p n
    t = degree - n + p * n
    P = permutation_module(B, t, p)
    for rep in P.free_orbits:
        out.append(ExtPowerClass(n, "mixed", 0, rep))
    return sorted(out)


def delta_star(c: ExtPowerClass, B: GradedVectorSpace) -> tuple[int, ExtPowerClass | None]:
    """(coefficient, image) of a stage-n class at stage n + 1; mixed classes go to zero."""
    p = B.prime
    if c.kind != "diagonal":
        return 0, None
    q = B.degree(c.tags[0])
    sign = -1 if (c.j + 1) % 2 else 1
    coeff = (sign * coeff_alpha(q - c.n, p)) % p if p != 2 else 1
    return coeff, diagonal(c.n + 1, c.j + p - 1, c.tags[0])


def omega(c: ExtPowerClass, B: GradedVectorSpace) -> tuple[int, SingerBasis]:
    """(coefficient, basis element of Sigma^{-1} R_+(H^*(B))) for a diagonal class.

    At odd p every w-index J has the form 2(r + mn) or 2(r + mn) - 1 for a
    unique integer r, so every diagonal class has an image.
    """
    if c.kind != "diagonal":
        raise ValueError("omega is defined on diagonal classes; mixed classes die in the colimit")
    p = B.prime
    a = c.tags[0]
    q = B.degree(a)
    n, J = c.n, c.j
    if J < 0:
        raise ValueError("w-index must be >= 0")
    if p == 2:
        return 1, SingerBasis(0, J - n + q, a)
    C = CoeffTable(p)
    m = C.m
    if J % 2 == 0:
        r = J // 2 - m * n
        sign = -1 if (q - n) % 2 else 1
        return (sign * C.nu_inv(q - n)) % p, SingerBasis(0, r + m * q, a)
    r = (J + 1) // 2 - m * n
    sign = -1 if q % 2 else 1
    return (sign * C.nu_inv(q - n)) % p, SingerBasis(1, r + m * q - 1, a)


def desuspended_degree(e: SingerBasis, B: GradedVectorSpace) -> int:
    """Degree of a basis element of Sigma^{-1} R_+(H^*(B))."""
    q = B.degree(e.a)
    return e.r + q if B.prime == 2 else e.i + 2 * e.r + q


def omega_compat_defects(B: GradedVectorSpace, n0: int, stages: int, degrees) -> list[tuple]:
    """Classes c with omega(delta_star(c)) != omega(c), over stages n0 .. n0 + stages - 1."""
    p = B.prime
    bad = []
    for n in range(n0, n0 + stages):
        for d in degrees:
            for c in stage_classes(B, n, d):
                if c.kind != "diagonal":
                    if delta_star(c, B)[0]:
                        bad.append((c, "mixed class survives"))
                    continue
                k, img = delta_star(c, B)
                c1, e1 = omega(c, B)
                c2, e2 = omega(img, B)
                if e1 != e2 or (k * c2) % p != c1:
                    bad.append((c, (c1, e1), (k * c2 % p, e2)))
                if img.degree(B) != c.degree(B) or desuspended_degree(e1, B) != c.degree(B):
                    bad.append((c, "degree"))
    return bad


def omega_bijection_defects(B: GradedVectorSpace, n: int, degree: int) -> list:
    """Compare omega on stage n with the Singer basis of Sigma^{-1} R_+ in one degree.

    Stage n reaches every Singer basis element of this degree once n is
    large; the returned list names missing and repeated targets.
    """
    p = B.prime
    images = [omega(c, B)[1] for c in stage_classes(B, n, degree) if c.kind == "diagonal"]
    want = []
    for a in B.names():
        q = B.degree(a)
        if p == 2:
            want.append(SingerBasis(0, degree - q, a))
        else:
            for i in (0, 1):
                if (degree - q - i) % 2 == 0:
                    want.append(SingerBasis(i, (degree - q - i) // 2, a))
    bad = [("missing", e) for e in want if e not in images]
    bad += [("repeated", e) for e in set(images) if images.count(e) > 1]
    bad += [("stray", e) for e in images if e not in want]
    return sorted(bad, key=repr)


def stage_reaches(B: GradedVectorSpace, degree: int) -> int:
    """Smallest n from which omega on stage n covers the given degree."""
    p = B.prime
    need = []
    for a in B.names():
        q = B.degree(a)
        # J = degree - n - p(q - n) = degree - pq + (p - 1) n must be >= 0
        need.append(-((degree - p * q) // (p - 1)))
    return max(need, default=0)


# --- homology side ------------------------------------------------------------

def homology_dim_by_orbits(B: GradedVectorSpace, t: int) -> int:
    """dim H_t(D_{C_p}(B)): one class e_0 per mixed orbit, one e_j per diagonal a^p with pq + j = t."""
    p = B.prime
    names = B.names()
    count = 0
    seen = set()
    for w in iproduct(names, repeat=p):
        if sum(B.degree(x) for x in w) != t or w in seen:
            continue
        orbit = {w[k:] + w[:k] for k in range(p)}
        seen |= orbit
        if len(orbit) > 1:
            count += 1
    for a in names:
        if t - p * B.degree(a) >= 0:
            count += 1
    return count


def homology_dim_by_group_homology(B: GradedVectorSpace, t: int) -> int:
    """Sum over d of dim H_{t-d}(C_p; (H_*(B)^{(x)p})_d), computed from the permutation modules."""
    p = B.prime
    degrees = B.degrees()
    if not degrees:
        return 0
    lo = p * degrees[0]
    total = 0
    for d in range(lo, t + 1):
        M = permutation_module(B, d, p).module
        if M.space.dim():
            total += group_homology(M, t - d)
    return total
