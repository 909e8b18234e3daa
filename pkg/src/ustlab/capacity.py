"""Capacity, closeness, the rescaling constants, and their lattice limits.

Cap_r(S) is the chance that a stationary-start walk hits S strictly before
time r; Cl_r(U,V) the chance it hits both.  The constants gamma (mean local
loop-erasure density over a segment) and alpha (mean normalized capacity of
that erasure) fix the complete-graph size m and the rescaling constant
beta = gamma / sqrt(alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import GraphFamily
from .lerw import ScaleCollapseError, ScaleSet, locally_retained_times, _erase_loops

EXACT_CAP = 2**12


@dataclass(frozen=True)
class EstimateWithCI:
    """Monte Carlo scalar with a 95% normal confidence half-width."""

    value: float
    half_width: float
    n_samples: int
    estimator_id: str

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")


def _binomial_estimate(hits: int, n: int, estimator_id: str) -> EstimateWithCI:
    p = hits / n
    return EstimateWithCI(p, 1.96 * math.sqrt(p * (1 - p) / n), n, estimator_id)


def _mean_estimate(values: np.ndarray, estimator_id: str) -> EstimateWithCI:
    n = len(values)
    hw = 1.96 * float(np.std(values, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return EstimateWithCI(float(np.mean(values)), hw, n, estimator_id)


def _cap_exact(g: GraphFamily, S: set[int], r: int) -> float:
    size = g.num_vertices
    mask = np.zeros(size, dtype=bool)
    mask[list(S)] = True
    alive = np.full(size, 1.0 / size)
    captured = float(alive[mask].sum())
    alive[mask] = 0.0
    if g.kind == "complete":
        h = g.holding
        for _ in range(r - 1):
            total = alive.sum()
            alive = h * alive + (1.0 - h) * total / size
            captured += float(alive[mask].sum())
            alive[mask] = 0.0
        return captured
    table = g.neighbor_table()
    h = g.holding
    w = (1.0 - h) / g.branch_count
    for _ in range(r - 1):
        alive = h * alive + w * alive[table].sum(axis=1)
        captured += float(alive[mask].sum())
        alive[mask] = 0.0
    return captured


def _hit_before(
    g: GraphFamily, S: set[int], r: int, rng: np.random.Generator, n_samples: int
) -> np.ndarray:
    """Boolean per-probe indicator of hitting S before time r, start from pi."""
    mask = np.zeros(g.num_vertices, dtype=bool)
    mask[list(S)] = True
    pos = rng.integers(g.num_vertices, size=n_samples)
    hit = mask[pos].copy()
    for _ in range(r - 1):
        if hit.all():
            break
        pos = g.step_many(pos, rng)
        hit |= mask[pos]
    return hit


def cap_r(
    g: GraphFamily,
    S: set[int] | frozenset[int],
    r: int,
    rng: np.random.Generator | None = None,
    n_samples: int = 10**5,
    exact: bool | None = None,
) -> EstimateWithCI:
    """Cap_r(S) = P_pi[T_S < r]; exact transition powers on small graphs."""
    if r < 1:
        raise ValueError("horizon r must be >= 1")
    if not S:
        raise ValueError("S must be nonempty")
    if exact is None:
        exact = g.num_vertices <= EXACT_CAP
    if exact:
        return EstimateWithCI(_cap_exact(g, set(S), r), 0.0, 0, "exact")
    if rng is None:
        raise ValueError("Monte Carlo estimation needs an rng")
    hits = _hit_before(g, set(S), r, rng, n_samples)
    return _binomial_estimate(int(hits.sum()), n_samples, "mc")


def closeness(
    g: GraphFamily,
    U: set[int] | frozenset[int],
    V: set[int] | frozenset[int],
    r: int,
    rng: np.random.Generator | None = None,
    n_samples: int = 10**5,
    exact: bool | None = None,
) -> EstimateWithCI:
    """Cl_r(U,V) = P_pi[T_U < r, T_V < r]."""
    if r < 1:
        raise ValueError("horizon r must be >= 1")
    if not U or not V:
        raise ValueError("U and V must be nonempty")
    if exact is None:
        exact = g.num_vertices <= EXACT_CAP
    if exact:
        # inclusion-exclusion: {T_U<r} union {T_V<r} = {T_{UuV}<r}
        val = (
            _cap_exact(g, set(U), r)
            + _cap_exact(g, set(V), r)
            - _cap_exact(g, set(U) | set(V), r)
        )
        return EstimateWithCI(max(val, 0.0), 0.0, 0, "exact")
    if rng is None:
        raise ValueError("Monte Carlo estimation needs an rng")
    umask = np.zeros(g.num_vertices, dtype=bool)
    umask[list(U)] = True
    vmask = np.zeros(g.num_vertices, dtype=bool)
    vmask[list(V)] = True
    pos = rng.integers(g.num_vertices, size=n_samples)
    hit_u = umask[pos].copy()
    hit_v = vmask[pos].copy()
    for _ in range(r - 1):
        pos = g.step_many(pos, rng)
        hit_u |= umask[pos]
        hit_v |= vmask[pos]
    return _binomial_estimate(int((hit_u & hit_v).sum()), n_samples, "mc")


@dataclass(frozen=True)
class ConstantsReport:
    alpha: EstimateWithCI
    gamma: EstimateWithCI
    scales: ScaleSet
    vol: int
    bound_violations: int  # replicates with cap estimate above r|S|/|G| + CI

    @property
    def beta(self) -> EstimateWithCI:
        """gamma / sqrt(alpha), recomputed from the stored estimates."""
        b = self.gamma.value / math.sqrt(self.alpha.value)
        rel = math.sqrt(
            (self.gamma.half_width / self.gamma.value) ** 2
            + (self.alpha.half_width / (2 * self.alpha.value)) ** 2
        )
        return EstimateWithCI(b, b * rel, self.gamma.n_samples, "derived")

    @property
    def m(self) -> int:
        """Matching complete-graph size ceil(|G| / (alpha r^2))."""
        return math.ceil(self.vol / (self.alpha.value * self.scales.r**2))


def estimate_constants(
    g: GraphFamily,
    scales: ScaleSet,
    rng: np.random.Generator,
    n_samples: int = 1000,
    inner_probes: int = 512,
) -> ConstantsReport:
    """Estimate gamma = E|LE_s(A_1)|/r and alpha = E Cap_r[LE_s(A_1)] |G|/r^2.

    Each replicate runs a stationary-start walk of length r, takes the local
    loop-erasure over the first segment window A_1, and measures its length
    and its r-capacity (exact on small graphs, otherwise a nested Monte
    Carlo whose probe count keeps inner noise well below the outer spread).
    """
    lo, hi = scales.segment_window(1)
    if hi < lo or hi > scales.r:
        raise ScaleCollapseError(
            f"segment window A_1 = [{lo}, {hi}] is empty at these scales "
            f"(need r >= 3s + 1; s={scales.s}, r={scales.r})"
        )
    r = scales.r
    vol = g.num_vertices
    exact = vol <= EXACT_CAP

    # batch the replicate walks: column j is one walk of length r
    paths = np.empty((r + 1, n_samples), dtype=np.int64)
    paths[0] = rng.integers(vol, size=n_samples)
    for t in range(1, r + 1):
        paths[t] = g.step_many(paths[t - 1], rng)

    lengths = np.empty(n_samples)
    caps = np.empty(n_samples)
    violations = 0
    for j in range(n_samples):
        seq = paths[:, j].tolist()
        retained = [t for t in locally_retained_times(seq, scales.s) if lo <= t <= hi]
        verts = {seq[t] for t in retained}
        lengths[j] = len(retained)
        if not verts:
            caps[j] = 0.0
            continue
        est = cap_r(g, verts, r, rng, n_samples=inner_probes, exact=exact)
        caps[j] = est.value
        if est.value > r * len(verts) / vol + est.half_width:
            violations += 1

    gamma = _mean_estimate(lengths / r, "mc")
    alpha = _mean_estimate(caps * vol / r**2, "mc")
    return ConstantsReport(alpha, gamma, scales, vol, violations)


# Full-lattice limits (d >= 5).


def _lattice_paths(
    d: int, trunc: int, rng: np.random.Generator, n_walks: int = 1
) -> list[list[bytes]]:
    """Key-encoded simple random walk paths on Z^d, each of trunc steps.

    Every position is the 2d-byte row of its int16 coordinate vector, so
    set operations run on cheap fixed-length bytes objects.
    """
    steps = np.zeros((n_walks, trunc, d), dtype=np.int16)
    axes = rng.integers(d, size=(n_walks, trunc))
    signs = rng.integers(2, size=(n_walks, trunc)).astype(np.int16) * 2 - 1
    np.put_along_axis(steps, axes[:, :, None], signs[:, :, None], axis=2)
    coords = np.zeros((n_walks, trunc + 1, d), dtype=np.int16)
    np.cumsum(steps, axis=1, out=coords[:, 1:])
    w = 2 * d
    out = []
    for i in range(n_walks):
        raw = coords[i].tobytes()
        out.append([raw[t * w : (t + 1) * w] for t in range(trunc + 1)])
    return out


def _erased_set(path_keys: list[bytes]) -> set[bytes]:
    verts, _ = _erase_loops(path_keys)
    return set(verts)


@dataclass(frozen=True)
class LatticeLimits:
    gamma_inf: EstimateWithCI
    alpha_inf: EstimateWithCI
    trunc: int
    gamma_half: float  # same-sample estimates at trunc // 2
    alpha_half: float


def lattice_limit_constants(
    d: int, trunc: int, rng: np.random.Generator, n_samples: int = 2000
) -> LatticeLimits:
    """Estimate the full-lattice limits of gamma and alpha on Z^d.

    gamma_inf = P[LE<Y> misses {Z_u}_{u>=1}]; alpha_inf additionally asks
    that LE<Y> union LE<Z_1..> miss a third walk {W_v}_{v>=1}.  All walks
    start at the origin and are truncated at `trunc` steps; the same paths
    re-evaluated at trunc/2 quantify truncation error.
    """
    if d < 5:
        raise ValueError("lattice limits need d >= 5 (transient enough regime)")
    if trunc == 0:
        one = EstimateWithCI(1.0, 0.0, n_samples, "mc")
        return LatticeLimits(one, one, 0, 1.0, 1.0)
    half = trunc // 2
    g_full = g_half = a_full = a_half = 0
    for _ in range(n_samples):
        y, z, w = _lattice_paths(d, trunc, rng, n_walks=3)
        ley = _erased_set(y)
        zset = set(z[1:])
        gf = ley.isdisjoint(zset)
        g_full += gf
        lez = _erased_set(z[1:])
        wset = set(w[1:])
        af = gf and wset.isdisjoint(ley) and wset.isdisjoint(lez)
        a_full += af
        # cheap path: re-evaluating prefixes only changes the answer when
        # the full-length indicator involved a late intersection
        ley_h = _erased_set(y[: half + 1])
        zset_h = set(z[1 : half + 1])
        gh = ley_h.isdisjoint(zset_h)
        g_half += gh
        if af and gh:
            a_half += 1
        elif gh:
            lez_h = _erased_set(z[1 : half + 1])
            wset_h = set(w[1 : half + 1])
            a_half += wset_h.isdisjoint(ley_h) and wset_h.isdisjoint(lez_h)
    return LatticeLimits(
        _binomial_estimate(g_full, n_samples, "mc"),
        _binomial_estimate(a_full, n_samples, "mc"),
        trunc,
        g_half / n_samples,
        a_half / n_samples,
    )


def hypercube_intersection(
    n: int, q: int, rng: np.random.Generator, n_samples: int = 20000
) -> EstimateWithCI:
    """E |{X_t}_{t<=q} vs {Y_u}_{u<=q}| colliding time-pair count.

    Two independent lazy walks on the n-cube from distinct uniform starts;
    the statistic counts pairs (t, u) with X_t = Y_u.
    """
    if n < 1:
        raise ValueError("hypercube needs n >= 1")
    if q == 0:
        return EstimateWithCI(0.0, 0.0, n_samples, "mc")
    g = GraphFamily.hypercube(n)
    size = g.num_vertices
    x0 = rng.integers(size, size=n_samples)
    shift = 1 + rng.integers(size - 1, size=n_samples)
    y0 = (x0 + shift) % size  # uniform over the vertices distinct from x0
    xpaths = np.empty((q + 1, n_samples), dtype=np.int64)
    ypaths = np.empty((q + 1, n_samples), dtype=np.int64)
    xpaths[0], ypaths[0] = x0, y0
    for t in range(1, q + 1):
        xpaths[t] = g.step_many(xpaths[t - 1], rng)
        ypaths[t] = g.step_many(ypaths[t - 1], rng)
    counts = np.empty(n_samples)
    for j in range(n_samples):
        xv, xc = np.unique(xpaths[:, j], return_counts=True)
        yv, yc = np.unique(ypaths[:, j], return_counts=True)
        idx = np.searchsorted(xv, yv)
        idx[idx == xv.size] = 0
        match = xv[idx] == yv
        counts[j] = float(np.dot(xc[idx[match]], yc[match]))
    return _mean_estimate(counts, "mc")
