"""The mod p Steenrod algebra in the admissible basis.

A monomial is a tuple of generator tokens read left to right as a product.
For p = 2 the token ``i >= 1`` is Sq^i.  For odd p the token ``0`` is the
Bockstein and ``s >= 1`` is P^s, so ``(0, 3, 0, 1)`` is beta P^3 beta P^1.
The empty tuple is the unit.

Elements are plain dicts ``{monomial: residue}``; :class:`SteenrodElement`
wraps one together with its prime for interactive use.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Mapping

from .fp import binom_mod_p, check_prime, vec_add

BOCKSTEIN = 0


def generator_degree(token: int, p: int) -> int:
    if p == 2:
        return token
    return 1 if token == BOCKSTEIN else 2 * token * (p - 1)


def degree(word: tuple, p: int) -> int:
    return sum(generator_degree(t, p) for t in word)


def generator_name(token: int, p: int) -> str:
    if p == 2:
        return f"Sq^{token}"
    return "beta" if token == BOCKSTEIN else f"P^{token}"


def monomial_name(word: tuple, p: int) -> str:
    if not word:
        return "1"
    return " ".join(generator_name(t, p) for t in word)


_GEN_RE = re.compile(r"^\s*(?:(Sq|P)\^?\{?(\d+)\}?|(beta|b|β))\s*$")


def parse_generator(text: str, p: int) -> int:
    """Token for ``"Sq^k"``, ``"P^k"`` or ``"beta"``; rejects ops foreign to ``p``."""
    m = _GEN_RE.match(text)
    if not m:
        raise ValueError(f"unknown Steenrod operation {text!r}")
    if m.group(3):
        if p == 2:
            raise ValueError("beta is not a generator at p = 2; use Sq^1")
        return BOCKSTEIN
    kind, k = m.group(1), int(m.group(2))
    if k < 1:
        raise ValueError(f"{text!r}: generator index must be positive")
    if kind == "Sq" and p != 2:
        raise ValueError(f"Sq^k is only available at p = 2, not p = {p}")
    if kind == "P" and p == 2:
        raise ValueError("P^k is only available at odd primes")
    return k


def generators_up_to(max_degree: int, p: int) -> list[int]:
    """Algebra generators of degree in [1, max_degree], in increasing degree."""
    if p == 2:
        return list(range(1, max_degree + 1))
    gens = [BOCKSTEIN] if max_degree >= 1 else []
    s = 1
    while 2 * s * (p - 1) <= max_degree:
        gens.append(s)
        s += 1
    return gens


def epsilon_form(word: tuple, p: int) -> tuple:
    """``(e0, s1, e1, ..., sk, ek)`` form of an odd-primary word without beta^2."""
    if p == 2:
        raise ValueError("epsilon form is only defined for odd primes")
    out = [0]
    for t in word:
        if t == BOCKSTEIN:
            out[-1] += 1
        else:
            out.extend([t, 0])
    return tuple(out)


def from_epsilon_form(form: tuple) -> tuple:
    word = []
    for i, x in enumerate(form):
        if i % 2 == 0:
            word.extend([BOCKSTEIN] * x)
        else:
            word.append(x)
    return tuple(word)


def is_admissible(word: tuple, p: int) -> bool:
    if p == 2:
        return all(t >= 1 for t in word) and all(
            word[i] >= 2 * word[i + 1] for i in range(len(word) - 1)
        )
    return _first_violation(word, p) is None and all(t >= 0 for t in word)


def _first_violation(word: tuple, p: int):
    """Odd p: ``(i, j, eps)`` for the first non-admissible pair P^a (beta^eps) P^b."""
    prev = None
    for j, t in enumerate(word):
        if t == BOCKSTEIN:
            continue
        if prev is not None:
            eps = j - prev - 1
            if eps == 0 and word[prev] < p * t:
                return prev, j, 0
            if eps == 1 and word[prev] < p * t + 1:
                return prev, j, 1
        prev = j
    return None


@lru_cache(maxsize=None)
def _normalize(word: tuple, p: int) -> tuple:
    """Cached admissible expansion as a sorted tuple of (monomial, coeff)."""
    if p == 2:
        word = tuple(t for t in word if t != 0)
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if a < 2 * b:
                out: dict = {}
                prefix, suffix = word[:i], word[i + 2:]
                for c in range(a // 2 + 1):
                    coeff = binom_mod_p(b - c - 1, a - 2 * c, 2)
                    if coeff:
                        mid = (a + b - c, c) if c else (a + b - c,)
                        for w, k in _normalize(prefix + mid + suffix, p):
                            vec_add(out, {w: k}, p, coeff)
                return tuple(sorted(out.items()))
        return ((word, 1),)

    for i in range(len(word) - 1):
        if word[i] == BOCKSTEIN and word[i + 1] == BOCKSTEIN:
            return ()
    hit = _first_violation(word, p)
    if hit is None:
        return ((word, 1),)
    i, j, eps = hit
    a, b = word[i], word[j]
    prefix, suffix = word[:i], word[j + 1:]
    terms: list[tuple[tuple, int]] = []
    for t in range(a // p + 1):
        sign = -1 if (a + t) % 2 else 1
        if eps == 0:
            c = binom_mod_p((p - 1) * (b - t) - 1, a - p * t, p)
            if c:
                terms.append((_p(a + b - t) + _p(t), sign * c))
        else:
            c = binom_mod_p((p - 1) * (b - t), a - p * t, p)
            if c:
                terms.append(((BOCKSTEIN,) + _p(a + b - t) + _p(t), sign * c))
            c = binom_mod_p((p - 1) * (b - t) - 1, a - p * t - 1, p)
            if c:
                terms.append((_p(a + b - t) + (BOCKSTEIN,) + _p(t), -sign * c))
    out = {}
    for mid, coeff in terms:
        for w, k in _normalize(prefix + mid + suffix, p):
            vec_add(out, {w: k}, p, coeff)
    return tuple(sorted(out.items()))


def _p(s: int) -> tuple:
    """The word for P^s at odd p; P^0 is the unit."""
    return (s,) if s else ()


def adem_normalize(word: tuple, p: int) -> dict:
    """Expand an arbitrary word into admissible monomials."""
    check_prime(p)
    return dict(_normalize(tuple(word), p))


def product(a: Mapping, b: Mapping, p: int) -> dict:
    """Product of two elements (dicts of monomials) in the admissible basis."""
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            for w, c in _normalize(wa + wb, p):
                vec_add(out, {w: c}, p, ca * cb)
    return out


@lru_cache(maxsize=None)
def _admissible(d: int, p: int, cap: int | None) -> tuple:
    if d < 0:
        return ()
    if p == 2:
        out = [()] if d == 0 else []
        hi = d if cap is None else min(d, cap // 2)
        for i in range(hi, 0, -1):
            for rest in _admissible(d - i, p, i):
                out.append((i,) + rest)
        return tuple(out)
    # odd p: forms (eps, s, eps', s', ...), cap bounds p*s + eps for the leading s
    out = []
    for eps in (1, 0):
        if d == eps:
            out.append((eps,))
    for eps in (1, 0):
        s = 1
        while eps + 2 * s * (p - 1) <= d:
            if cap is None or p * s + eps <= cap:
                for rest in _admissible(d - eps - 2 * s * (p - 1), p, s):
                    out.append((eps, s) + rest)
            s += 1
    return tuple(out)


def admissible_basis(d: int, p: int) -> list[tuple]:
    """All admissible monomials of degree ``d`` in a fixed deterministic order."""
    check_prime(p)
    if d < 0:
        return []
    return list(_admissible_sorted(d, p))


@lru_cache(maxsize=None)
def _admissible_sorted(d: int, p: int) -> tuple:
    if p == 2:
        words = list(_admissible(d, 2, None))
    else:
        words = [from_epsilon_form(f) for f in _admissible(d, p, None)]
    return tuple(sorted(words, key=_order_key))


def _order_key(word: tuple):
    return tuple(-t for t in word)


def dimension(d: int, p: int) -> int:
    return len(admissible_basis(d, p))


def coproduct_window(theta: tuple, window: tuple[int, int], p: int) -> dict:
    """Coproduct of the dual basis element theta^* of A_*.

    Obtained by dualizing the product of A in each bidegree: the coefficient
    of theta_1^* (x) theta_2^* is the coefficient of ``theta`` in
    ``theta_1 * theta_2``.
    """
    d = degree(theta, p)
    lo, hi = window
    if not lo <= d <= hi:
        raise ValueError(f"degree {d} outside window {window}")
    if not is_admissible(theta, p):
        raise ValueError(f"{monomial_name(theta, p)} is not admissible")
    out = {}
    for d1 in range(d + 1):
        for t1 in admissible_basis(d1, p):
            for t2 in admissible_basis(d - d1, p):
                c = dict(_normalize(t1 + t2, p)).get(theta, 0)
                if c:
                    out[(t1, t2)] = c
    return out


def cartan_coproduct(theta: tuple, p: int) -> dict:
    """Cartan-formula coproduct of A itself (the diagonal, dual to A_* multiplication)."""

    def gen_coproduct(t):
        if p != 2 and t == BOCKSTEIN:
            return {((BOCKSTEIN,), ()): 1, ((), (BOCKSTEIN,)): 1}
        return {((i,) if i else (), (t - i,) if t - i else ()): 1 for i in range(t + 1)}

    acc = {((), ()): 1}
    for t in theta:
        nxt: dict = {}
        for (a1, a2), c in acc.items():
            for (b1, b2), k in gen_coproduct(t).items():
                sign = -1 if (degree(a2, p) * degree(b1, p)) % 2 else 1
                for w1, c1 in _normalize(a1 + b1, p):
                    for w2, c2 in _normalize(a2 + b2, p):
                        vec_add(nxt, {(w1, w2): 1}, p, sign * c * k * c1 * c2)
        acc = nxt
    return acc


class SteenrodElement:
    """Homogeneous or inhomogeneous element of A in the admissible basis."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: Mapping | None = None):
        self.prime = check_prime(prime)
        out: dict = {}
        for w, c in (terms or {}).items():
            vec_add(out, adem_normalize(tuple(w), prime), prime, c)
        self.terms = out

    @classmethod
    def unit(cls, p: int) -> "SteenrodElement":
        return cls(p, {(): 1})

    @classmethod
    def generator(cls, p: int, name: str) -> "SteenrodElement":
        return cls(p, {(parse_generator(name, p),): 1})

    def __mul__(self, other):
        if isinstance(other, int):
            return SteenrodElement(self.prime, {w: c * other for w, c in self.terms.items()})
        if other.prime != self.prime:
            raise ValueError("primes differ")
        out = SteenrodElement(self.prime)
        out.terms = product(self.terms, other.terms, self.prime)
        return out

    __rmul__ = __mul__

    def __add__(self, other):
        out = SteenrodElement(self.prime)
        out.terms = vec_add(dict(self.terms), other.terms, self.prime)
        return out

    def __eq__(self, other):
        return isinstance(other, SteenrodElement) and self.prime == other.prime and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {degree(w, self.prime) for w in self.terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda wc: _order_key(wc[0])):
            name = monomial_name(w, self.prime)
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts)
