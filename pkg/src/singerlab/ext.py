"""Minimal free resolutions over A and Ext charts.

A free module F_s is a list of generator degrees; its basis in degree t is
the pairs ``(g, theta)`` with theta admissible of degree t - deg(g).  The
resolution is built degree by degree, and within a degree stage by stage,
adding generators for the kernel classes that the existing image misses.
Generators are therefore chosen lowest internal degree first, in the
reduced-echelon order of the kernel basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import steenrod
from .amodule import AModule, AModuleMap
from .errors import InsufficientWindow, NotStable
from .fp import kernel, pivot_columns, solve, vec_add
from .parallel import pmap


def _act_free(theta: tuple, v: dict, p: int) -> dict:
    """theta * v for v in a free module."""
    out: dict = {}
    for (g, phi), c in v.items():
        for w, k in steenrod._normalize(theta + phi, p):
            key = (g, w)
            x = (out.get(key, 0) + c * k) % p
            if x:
                out[key] = x
            else:
                out.pop(key, None)
    return out


class MinimalResolution:
    """Minimal resolution of ``M`` through homological degree ``s_max``, internal degree ``t_max``."""

    def __init__(self, M: AModule, s_max: int, t_max: int):
        if s_max < 0:
            raise ValueError("s_max must be >= 0")
        self.module = M
        self.prime = M.prime
        self.s_max = s_max
        self.t_max = t_max
        if M.truncated and t_max > M.window[1]:
            raise InsufficientWindow(
                f"module is only known through degree {M.window[1]}, cannot resolve to t = {t_max}",
                horizon=M.window[1],
            )
        # gens[s] = list of generator degrees, diffs[s] = list of images (dicts)
        self.gens: list[list[int]] = [[] for _ in range(s_max + 1)]
        self.diffs: list[list[dict]] = [[] for _ in range(s_max + 1)]
        self._dcache: dict = {}
        self._build()

    # --- free module bookkeeping -------------------------------------------------

    def basis(self, s: int, t: int) -> list[tuple]:
        out = []
        for g, d in enumerate(self.gens[s]):
            if d <= t:
                for theta in steenrod.admissible_basis(t - d, self.prime):
                    out.append((g, theta))
        return out

    def dim_free(self, s: int, t: int) -> int:
        return len(self.basis(s, t))

    def d_basis(self, s: int, elt: tuple) -> dict:
        """d_s on a basis element (g, theta) = theta * d_s(g)."""
        key = (s, elt)
        if key not in self._dcache:
            g, theta = elt
            img = self.diffs[s][g]
            if s == 0:
                val = self.module.apply_word(theta, img) if theta else dict(img)
            else:
                val = _act_free(theta, img, self.prime)
            self._dcache[key] = val
        return self._dcache[key]

    def apply_d(self, s: int, v: dict) -> dict:
        out: dict = {}
        for elt, c in v.items():
            vec_add(out, self.d_basis(s, elt), self.prime, c)
        return out

    def target_basis(self, s: int, t: int) -> list:
        return self.module.names(t) if s == 0 else self.basis(s - 1, t)

    def d_matrix(self, s: int, t: int) -> tuple[np.ndarray, list, list]:
        src = self.basis(s, t)
        tgt = self.target_basis(s, t)
        index = {n: i for i, n in enumerate(tgt)}
        m = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for j, e in enumerate(src):
            for n, c in self.d_basis(s, e).items():
                m[index[n], j] = c
        return m, src, tgt

    # --- construction ------------------------------------------------------------------

    def _build(self):
        M = self.module
        p = self.prime
        if M.is_zero():
            return
        bottom = M.space.degrees()[0]
        for t in range(bottom, self.t_max + 1):
            for s in range(self.s_max + 1):
                # kernel of the previous map in degree t (all of M_t when s = 0)
                if s == 0:
                    names = M.names(t)
                    kvecs = [{n: 1} for n in names]
                    tgt = names
                else:
                    m, src, _ = self.d_matrix(s - 1, t)
                    tgt = src
                    if not src:
                        continue
                    ker = kernel(m, p) if m.shape[0] else np.eye(len(src), dtype=np.int64)
                    kvecs = [{src[j]: int(row[j]) for j in np.nonzero(row)[0]} for row in ker]
                if not kvecs:
                    continue
                index = {n: i for i, n in enumerate(tgt)}
                image = [self.d_basis(s, e) for e in self.basis(s, t)]
                # columns: current image, then kernel vectors; kernel pivots are new generators
                cols = image + kvecs
                mat = np.zeros((len(tgt), len(cols)), dtype=np.int64)
                for j, v in enumerate(cols):
                    for n, c in v.items():
                        mat[index[n], j] = c
                pivots = pivot_columns(mat, p)
                for j in pivots:
                    if j >= len(image):
                        v = kvecs[j - len(image)]
                        self.gens[s].append(t)
                        self.diffs[s].append(v)

    # --- read-off ----------------------------------------------------------------------

    def ext_dim(self, s: int, t: int) -> int:
        return sum(1 for d in self.gens[s] if d == t)

    def generators(self, s: int, t: int) -> list[int]:
        return [g for g, d in enumerate(self.gens[s]) if d == t]

    def chart(self) -> "ExtChart":
        dims = {}
        labels = {}
        for s in range(self.s_max + 1):
            for g, t in enumerate(self.gens[s]):
                dims[(s, t)] = dims.get((s, t), 0) + 1
                labels.setdefault((s, t), []).append(f"x{s}_{t}_{len(labels[(s, t)])}")
        return ExtChart(self.prime, self.s_max, self.t_max, dims, {k: tuple(v) for k, v in labels.items()})

    def d_squared_defects(self) -> list[tuple]:
        """(s, generator) pairs where d_{s-1} d_s != 0."""
        bad = []
        for s in range(1, self.s_max + 1):
            for g, img in enumerate(self.diffs[s]):
                if self.apply_d(s - 1, img):
                    bad.append((s, g))
        return bad

    def minimality_defects(self) -> list[tuple]:
        """Generators whose differential has a unit-coefficient (theta = 1) term."""
        bad = []
        for s in range(1, self.s_max + 1):
            for g, img in enumerate(self.diffs[s]):
                if any(theta == () for (_, theta) in img):
                    bad.append((s, g))
        return bad


def _dense(v: dict, index: dict, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    for k, c in v.items():
        out[index[k]] = c
    return out


def minimal_resolution(M: AModule, s_max: int, t_max: int) -> MinimalResolution:
    return MinimalResolution(M, s_max, t_max)


@dataclass(frozen=True)
class ExtChart:
    prime: int
    s_max: int
    t_max: int
    dims: dict  # {(s, t): dim}, zero entries omitted
    labels: dict = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def restrict(self, s_max: int, t_max: int, stem_max: int | None = None) -> "ExtChart":
        keep = {
            (s, t): d
            for (s, t), d in self.dims.items()
            if s <= s_max and t <= t_max and (stem_max is None or t - s <= stem_max)
        }
        labels = {k: v for k, v in self.labels.items() if k in keep}
        return ExtChart(self.prime, s_max, t_max, keep, labels)

    def rows(self) -> list[tuple]:
        return [(s, t, d, self.labels.get((s, t), ())) for (s, t), d in sorted(self.dims.items())]


def ext_chart(M: AModule, s_max: int, t_max: int) -> ExtChart:
    return MinimalResolution(M, s_max, t_max).chart()


# --- induced maps --------------------------------------------------------------------

@dataclass(frozen=True)
class InducedExtMap:
    """Ext(M) -> Ext(L) induced by f: L -> M, as matrices on generator bases.

    ``matrices[(s, t)]`` has one row per generator of the source resolution
    (of L) and one column per generator of the target resolution (of M).
    """

    source_chart: ExtChart  # chart of M (the domain of the induced map)
    target_chart: ExtChart  # chart of L
    matrices: dict

    def rank(self, s: int, t: int) -> int:
        from .fp import rank

        m = self.matrices.get((s, t))
        return 0 if m is None or m.size == 0 else rank(m, self.source_chart.prime)

    def is_iso(self, s: int, t: int) -> bool:
        a, b = self.source_chart.dim(s, t), self.target_chart.dim(s, t)
        return a == b and self.rank(s, t) == a

    def compose(self, other: "InducedExtMap") -> "InducedExtMap":
        """``self o other`` where other: Ext(N) -> Ext(M) and self: Ext(M) -> Ext(L)."""
        p = self.source_chart.prime
        mats = {}
        for key in set(self.matrices) | set(other.matrices):
            a = self.matrices.get(key)
            b = other.matrices.get(key)
            if a is None or b is None:
                continue
            mats[key] = (a @ b) % p
        return InducedExtMap(other.source_chart, self.target_chart, mats)


def lift_chain_map(f: AModuleMap, RL: MinimalResolution, RM: MinimalResolution) -> list[list[dict]]:
    """Chain map f_s: RL_s -> RM_s over f, given on generators."""
    if f.degree_shift != 0:
        raise ValueError("only degree-preserving maps are lifted")
    p = RL.prime
    s_max = min(RL.s_max, RM.s_max)
    t_max = min(RL.t_max, RM.t_max)
    lifts: list[list[dict]] = []
    for s in range(s_max + 1):
        row = []
        for g, t in enumerate(RL.gens[s]):
            if t > t_max:
                row.append({})
                continue
            if s == 0:
                want = f(RL.diffs[0][g])
            else:
                want = {}
                for (h, theta), c in RL.diffs[s][g].items():
                    vec_add(want, _act_free(theta, lifts[s - 1][h], p), p, c)
            m, src, tgt = RM.d_matrix(s, t)
            index = {n: i for i, n in enumerate(tgt)}
            b = np.zeros(len(tgt), dtype=np.int64)
            for n, c in want.items():
                b[index[n]] = c
            x = solve(m, b, p) if src else (np.zeros(0, dtype=np.int64) if not b.any() else None)
            if x is None:
                raise InsufficientWindow(f"cannot lift at (s={s}, t={t}); resolution range too small", t)
            row.append({src[j]: int(x[j]) for j in np.nonzero(x)[0]})
        lifts.append(row)
    return lifts


def induced_ext_map(f: AModuleMap, RL: MinimalResolution, RM: MinimalResolution) -> InducedExtMap:
    """Contravariant map Ext(M) -> Ext(L) for f: L -> M."""
    lifts = lift_chain_map(f, RL, RM)
    mats = {}
    for s, row in enumerate(lifts):
        for t in {d for d in RL.gens[s]} | {d for d in RM.gens[s]}:
            gl = RL.generators(s, t)
            gm = RM.generators(s, t)
            m = np.zeros((len(gl), len(gm)), dtype=np.int64)
            for i, g in enumerate(gl):
                for j, h in enumerate(gm):
                    m[i, j] = row[g].get((h, ()), 0)
            mats[(s, t)] = m
    return InducedExtMap(RM.chart(), RL.chart(), mats)


# --- towers -------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitEntry:
    dim: int  # dimension of the inverse limit
    stage: object  # reference stage label whose stable image realizes the limit
    images_from: object  # stage label from which images into the reference stage are constant
    since: object = None  # shallowest reference stage from which every confirmed stable image has this dimension


@dataclass(frozen=True)
class StabilizationReport:
    stages: tuple  # stage labels, in tower order
    charts: tuple  # ExtChart per stage
    entries: dict  # {(s, t): LimitEntry} for stabilized bidegrees
    unstable: tuple  # bidegrees that never stabilize within the given stages
    limit: ExtChart

    @property
    def stable_from(self) -> dict:
        return {k: e.stage for k, e in self.entries.items()}

    def lines(self) -> list[str]:
        out = []
        for (s, t), e in sorted(self.entries.items()):
            out.append(
                f"stable s={s} t={t} dim={e.dim} at stage {e.stage} images-from {e.images_from} since {e.since}"
            )
        for s, t in self.unstable:
            out.append(f"not-yet-stable s={s} t={t}")
        return out


def _composite_ranks(induced, dims, key, k, p):
    """Ranks of Ext(A^j) -> Ext(A^k) for j = k, k+1, ..., last, plus the final composite."""
    from .fp import rank

    m = np.eye(dims[k], dtype=np.int64)
    ranks = [dims[k]]
    for j in range(k, len(induced)):
        a = induced[j].matrices.get(key)
        if a is None:
            a = np.zeros((dims[j], dims[j + 1]), dtype=np.int64)
        m = (m @ a) % p
        ranks.append(rank(m, p) if m.size else 0)
    return ranks, m


def inverse_limit_ext(stages, maps, labels, s_max: int, t_max: int,
                      stems: tuple | None = None, confirm: int | None = None, strict: bool = False):
    """Inverse limit of Ext over a tower A^0 -> A^1 -> ... of modules.

    ``maps[k]`` is the module map ``stages[k] -> stages[k + 1]`` (for the
    Singer tower, the inclusion F^n -> F^{n-1}), and ``labels`` are numeric
    stage labels (the filtration n).  Ext is contravariant, so the limit is
    taken along Ext(A^{k+1}) -> Ext(A^k).

    Stage dimensions need not settle: classes born on the low cells of a
    stage survive for a while and then die.  Each bidegree is finite, so the
    tower is Mittag-Leffler and the limit is read off stable images:

    * the image of Ext(A^j) in Ext(A^k) is *confirmed* when its rank has
      stayed constant for all stages j down to at least ``confirm`` below
      the stage where it reached that rank (default 12 p);
    * the limit is the stable image at the deepest confirmed reference
      stage k, declared once the next shallower confirmed reference stage
      has a stable image of the same dimension (the map between stable
      images is onto, so equal dimension makes it an isomorphism).

    Returns (limit chart, report, resolutions, induced maps).  With
    ``strict=True`` an unstable bidegree raises :class:`NotStable`.
    """
    p = stages[0].prime
    if confirm is None:
        confirm = 12 * p
    resolutions = pmap(lambda A: MinimalResolution(A, s_max, t_max), stages)
    induced = pmap(
        lambda k: induced_ext_map(maps[k], resolutions[k], resolutions[k + 1]),
        range(len(maps)),
    )
    charts = [R.chart() for R in resolutions]
    lo_stem, hi_stem = stems if stems is not None else (None, None)
    keys = set()
    for s in range(s_max + 1):
        for t in range(s, t_max + 1):
            if lo_stem is None or lo_stem <= t - s <= hi_stem:
                keys.add((s, t))
    K = len(stages)
    entries = {}
    unstable = []
    for key in sorted(keys):
        dims = [R.ext_dim(*key) for R in resolutions]
        if K == 1:
            entries[key] = LimitEntry(dims[0], labels[0], labels[0], labels[0])
            continue
        confirmed = []
        for k in range(K):
            ranks, _ = _composite_ranks(induced, dims, key, k, p)
            j0 = len(ranks) - 1
            while j0 > 0 and ranks[j0 - 1] == ranks[-1]:
                j0 -= 1
            # ranks[i] is the image of stage k + i
            if abs(labels[K - 1] - labels[k + j0]) >= confirm:
                confirmed.append((k, ranks[-1], k + j0))
        found = None
        if len(confirmed) >= 2:
            (k1, r1, _), (k2, r2, j2) = confirmed[-2:]
            if r1 == r2 and k2 == k1 + 1:
                i = len(confirmed) - 1
                while i > 0 and confirmed[i - 1][1] == r2 and confirmed[i - 1][0] == confirmed[i][0] - 1:
                    i -= 1
                found = LimitEntry(r2, labels[k2], labels[j2], labels[confirmed[i][0]])
        if found is None:
            unstable.append(key)
        else:
            entries[key] = found
    if unstable and strict:
        raise NotStable(f"bidegrees {unstable} did not stabilize over stages {list(labels)}")
    limit_dims = {k: e.dim for k, e in entries.items() if e.dim}
    limit = ExtChart(p, s_max, t_max, limit_dims)
    report = StabilizationReport(tuple(labels), tuple(charts), entries, tuple(unstable), limit)
    return limit, report, resolutions, induced


def stable_image_basis(induced, resolutions, key, k, p) -> np.ndarray:
    """Columns spanning the image of the deepest stage's Ext in Ext(A^k) at ``key``."""
    dims = [R.ext_dim(*key) for R in resolutions]
    _, m = _composite_ranks(induced, dims, key, k, p)
    return m


def singer_tower(M: AModule, n_top: int, n_bottom: int, t_max: int, step: int = 1):
    """Stages F^n R_+(M), n = n_top, n_top - step, ..., down to n_bottom, with their inclusions."""
    from . import singer

    ns = list(range(n_top, n_bottom - 1, -step))
    if not ns:
        raise ValueError("empty tower")
    bottom = min(M.space.degrees() or [0])
    # F^n starts in degree n + p * bottom(M)
    truncs = [singer.rplus_truncation(M, n, (n + M.prime * bottom, t_max)) for n in ns]
    maps = [singer.inclusion(truncs[k], truncs[k + 1]) for k in range(len(ns) - 1)]
    return ns, truncs, maps


@dataclass(frozen=True)
class EpsilonCheck:
    dim: int  # dim Ext^{s,t}(M)
    limit: int  # dim of the inverse limit
    rank: int  # rank of epsilon^* into the reference stage
    in_stable_image: bool


def epsilon_comparison(M: AModule, ns, truncs, resolutions, induced, report, s_max: int, t_max: int) -> dict:
    """epsilon^*: Ext(M) -> Ext(F^n R_+(M)) at each bidegree's reference stage.

    The tower realizes Ext(M) when epsilon^* is injective onto the stable
    image, i.e. rank = dim Ext(M) = dim of the limit with the image inside
    the stable image.
    """
    from . import singer
    from .fp import rank

    p = M.prime
    RM = MinimalResolution(M, s_max, t_max)
    maps: dict = {}
    out = {}
    for key, e in sorted(report.entries.items()):
        k = list(ns).index(e.stage)
        if k not in maps:
            maps[k] = induced_ext_map(singer.epsilon_map(truncs[k]), resolutions[k], RM)
        d = RM.ext_dim(*key)
        mat = maps[k].matrices.get(key)
        if mat is None or mat.size == 0:
            out[key] = EpsilonCheck(d, e.dim, 0, True)
            continue
        r = rank(mat, p)
        stable = stable_image_basis(induced, resolutions, key, k, p)
        both = np.concatenate([stable, mat], axis=1) if stable.size else mat
        inside = rank(both, p) == (rank(stable, p) if stable.size else 0)
        out[key] = EpsilonCheck(d, e.dim, r, inside)
    return out
