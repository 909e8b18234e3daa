"""Loop-erasure, local loop-erasure, segment decomposition, index sequences.

Chronological loop-erasure removes each loop when it closes; when that
happens the colliding vertex keeps the *new* time index.  The local variant
LE_s decides retention of a time u from a sliding window of radius s only:
u survives iff the loop-erasure of the backward window ending at u is
disjoint from the raw forward window.  Local retention is what makes
far-apart path segments independent, at the price of occasional short
loops or jumps in the output.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .graphs import GraphFamily, WalkPath


def _vertex_seq(path) -> list[int]:
    if isinstance(path, WalkPath):
        return path.vertices
    return list(path)


@dataclass(frozen=True)
class LoopErasedPath:
    vertices: list[int]
    retained_times: list[int]
    mode: str  # "chronological" or "local"
    window: int | None = None

    def __len__(self) -> int:
        return len(self.vertices)


def _erase_loops(seq: Sequence[int]) -> tuple[list[int], list[int]]:
    pos: dict[int, int] = {}
    verts: list[int] = []
    times: list[int] = []
    for t, v in enumerate(seq):
        j = pos.get(v)
        if j is not None:
            for w in verts[j + 1 :]:
                del pos[w]
            del verts[j + 1 :]
            del times[j + 1 :]
            times[j] = t  # new time retained when the loop closes
        else:
            pos[v] = len(verts)
            verts.append(v)
            times.append(t)
    return verts, times


def loop_erase(path) -> LoopErasedPath:
    """Chronological loop-erasure with surviving original time indices."""
    seq = _vertex_seq(path)
    if not seq:
        raise ValueError("cannot loop-erase an empty path")
    verts, times = _erase_loops(seq)
    return LoopErasedPath(verts, times, "chronological")


def locally_retained_times(seq: Sequence[int], s: int) -> list[int]:
    """Times u whose backward-window loop-erasure misses the forward window.

    Backward window: loop-erasure of <X_t> for t in [max(0,u-s), u], as a
    vertex set.  Forward window: raw vertices at times (u, min(T,u+s)].
    """
    if s < 1:
        raise ValueError("window s must be >= 1")
    seq = list(seq)
    T = len(seq) - 1
    forward: Counter = Counter(seq[1 : 1 + s])
    retained = []
    for u in range(T + 1):
        lo = max(0, u - s)
        back_verts, _ = _erase_loops(seq[lo : u + 1])
        if all(forward[v] == 0 for v in back_verts):
            retained.append(u)
        # slide the forward window to cover (u+1, u+1+s]
        if u + 1 <= T:
            forward[seq[u + 1]] -= 1
            if u + 1 + s <= T:
                forward[seq[u + 1 + s]] += 1
    return retained


def local_loop_erase(path, s: int) -> LoopErasedPath:
    """Local loop-erasure LE_s: the subsequence of locally retained times."""
    seq = _vertex_seq(path)
    if not seq:
        raise ValueError("cannot loop-erase an empty path")
    times = locally_retained_times(seq, s)
    return LoopErasedPath([seq[t] for t in times], times, "local", s)


def local_cutpoints(path, tau: int) -> set[int]:
    """Times whose tau-step past and future vertex sets are disjoint.

    Windows are truncated at the path ends; the endpoints themselves have
    one-sided (possibly empty) windows.
    """
    if tau < 1:
        raise ValueError("cutpoint window tau must be >= 1")
    seq = _vertex_seq(path)
    T = len(seq) - 1
    past: Counter = Counter()
    future: Counter = Counter(seq[1 : 1 + tau])
    out = set()
    for u in range(T + 1):
        small, big = (past, future) if len(past) <= len(future) else (future, past)
        if not any(big[v] > 0 for v in small):
            out.add(u)
        # advance both windows for u+1
        past[seq[u]] += 1
        if u - tau >= 0:
            past[seq[u - tau]] -= 1
            if past[seq[u - tau]] == 0:
                del past[seq[u - tau]]
        if u + 1 <= T:
            future[seq[u + 1]] -= 1
            if future[seq[u + 1]] == 0:
                del future[seq[u + 1]]
            if u + 1 + tau <= T:
                future[seq[u + 1 + tau]] += 1
    return out


class ScaleCollapseError(ValueError):
    """The scale hierarchy degenerated at this graph size."""


@dataclass(frozen=True)
class ScaleSet:
    """The scale hierarchy tau < s < q < r used by the segment machinery."""

    tau: int
    s: int
    q: int
    r: int

    def __post_init__(self):
        if min(self.tau, self.s, self.q, self.r) < 1:
            raise ValueError("all scales must be positive")
        if not self.s < self.q < self.r:
            raise ScaleCollapseError(
                f"scale collapse: need s < q < r, got s={self.s}, q={self.q}, r={self.r}"
            )

    @classmethod
    def from_graph(cls, g: GraphFamily, tau: int | None = None) -> "ScaleSet":
        """Standard schedule: s=floor(tau^3/4 |G|^1/8), q=floor(tau^1/2 |G|^1/4),
        r=floor(tau^1/4 |G|^3/8)."""
        if tau is None:
            tau = g.mixing_time().tau
        vol = g.num_vertices
        s = int(tau**0.75 * vol**0.125)
        q = int(tau**0.5 * vol**0.25)
        r = int(tau**0.25 * vol**0.375)
        return cls(tau, s, q, r)

    def segment_window(self, i: int) -> tuple[int, int]:
        """The closed time interval A_i = [(i-1)r + 2s + 1, i r - s]."""
        return (i - 1) * self.r + 2 * self.s + 1, i * self.r - self.s

    def segment_is_empty(self) -> bool:
        lo, hi = self.segment_window(1)
        return hi < lo


class SegmentLabel(Enum):
    GOOD = "good"
    SINGLE_INTERSECTION = "single_intersection"
    BAD = "bad"


@dataclass(frozen=True)
class Segment:
    index: int
    lo: int
    hi: int  # window clipped to [0, T]; lo > hi means empty
    label: SegmentLabel
    le_times: list[int]  # locally retained times falling in the window

    @property
    def empty(self) -> bool:
        return self.hi < self.lo


@dataclass(frozen=True)
class SegmentDecomposition:
    scales: ScaleSet
    T: int
    segments: list[Segment]
    retained_times: list[int]  # locally retained times of the whole path
    index_sequence: list[int]  # G_ell per the survival recursion

    def labels(self) -> dict[int, SegmentLabel]:
        return {seg.index: seg.label for seg in self.segments}


def _segment_ranges(scales: ScaleSet, T: int) -> list[tuple[int, int, int]]:
    """Nonempty clipped windows (i, lo, hi) for i = 1..ceil(T/r)."""
    ell = -(-T // scales.r) if T > 0 else 0
    out = []
    for i in range(1, ell + 1):
        lo, hi = scales.segment_window(i)
        lo, hi = max(lo, 0), min(hi, T)
        if lo <= hi:
            out.append((i, lo, hi))
    return out


def _indicator_map(
    seq: list[int], scales: ScaleSet, retained: list[int]
) -> dict[tuple[int, int], bool]:
    """I_ij = 1 iff LE_s(A_i) meets the raw vertices of block A_j, i < j."""
    ranges = _segment_ranges(scales, len(seq) - 1)
    ret_in = {}
    raw_in = {}
    for i, lo, hi in ranges:
        ret_in[i] = {seq[t] for t in retained if lo <= t <= hi}
        raw_in[i] = set(seq[lo : hi + 1])
    out = {}
    for i, _, _ in ranges:
        for j, _, _ in ranges:
            if i < j:
                out[(i, j)] = not ret_in[i].isdisjoint(raw_in[j])
    return out


def _survival_recursion(
    indicator, ell: int
) -> list[int]:
    """G_j = <k in G_{j-1}: I_ij = 0 for all i <= k, i in G_{j-1}> * <j>."""
    g = [0]
    for j in range(1, ell + 1):
        kept = []
        for k in g:
            if all(not indicator(i, j) for i in g if i <= k):
                kept.append(k)
        g = kept + [j]
    return g


def decompose(path, scales: ScaleSet) -> SegmentDecomposition:
    """Segment the path into the A_i windows and classify each index.

    An index i <= ceil(T/r) is good when the raw vertices of its window
    never reappear outside its own length-r block [(i-1)r, ir]; it is a
    single intersection when exactly the vertices of one other window
    account for every outside reappearance; otherwise it is bad.
    """
    seq = _vertex_seq(path)
    T = len(seq) - 1
    retained = locally_retained_times(seq, scales.s)
    ranges = _segment_ranges(scales, T)
    ell = -(-T // scales.r) if T > 0 else 0

    occurrences: dict[int, list[int]] = {}
    for t, v in enumerate(seq):
        occurrences.setdefault(v, []).append(t)

    r = scales.r
    segments = []
    for i, lo, hi in ranges:
        block_lo, block_hi = (i - 1) * r, i * r
        window_verts = set(seq[lo : hi + 1])
        outside_hits = [
            t
            for v in window_verts
            for t in occurrences[v]
            if not block_lo <= t <= block_hi
        ]
        if not outside_hits:
            label = SegmentLabel.GOOD
        else:
            label = SegmentLabel.BAD
            for j, wlo, whi in ranges:
                if j == i:
                    continue
                jlo, jhi = (j - 1) * r, j * r
                if any(wlo <= t <= whi for t in outside_hits) and all(
                    jlo <= t <= jhi for t in outside_hits
                ):
                    label = SegmentLabel.SINGLE_INTERSECTION
                    break
        le_times = [t for t in retained if lo <= t <= hi]
        segments.append(Segment(i, lo, hi, label, le_times))

    indicator_vals = _indicator_map(seq, scales, retained)
    g_seq = _survival_recursion(
        lambda i, j: indicator_vals.get((i, j), False), ell
    )
    return SegmentDecomposition(scales, T, segments, retained, g_seq)


def index_sequence_G(
    path, scales: ScaleSet, target: frozenset[int] | set[int] | None = None
) -> list[int]:
    """The survival index sequence G_ell of a killed walk stopped on target."""
    seq = _vertex_seq(path)
    if target is not None and seq[-1] not in target:
        raise ValueError("path does not end on the target set")
    return decompose(path, scales).index_sequence


def index_sequence_K(intersections: np.ndarray, T: int) -> list[int]:
    """K_T from the complete-graph collision indicators I~_ij = [Y_i = Y_j]."""
    ind = np.asarray(intersections)
    return _survival_recursion(lambda i, j: bool(ind[i, j]), T)


def sample_complete_collision_indicators(
    m: int, T: int, rng: np.random.Generator
) -> np.ndarray:
    """Collision matrix of a uniform sequence on the self-looped K_m."""
    y = rng.integers(m, size=T + 1)
    return y[:, None] == y[None, :]


@dataclass(frozen=True)
class DecomposabilityReport:
    ok: bool
    failed_condition: int | None  # 1..6, or None
    detail: str


def is_locally_decomposable(
    path,
    scales: ScaleSet,
    alpha: float,
    gamma: float,
    *,
    cap_fn: Callable[[set[int]], float] | None = None,
    vol: int | None = None,
) -> DecomposabilityReport:
    """Check the six regularity conditions enabling the segment coupling.

    1. no bad index;
    2. every |LE_s(A_i)| within 2r(s/r)^{1/6} of gamma*r;
    3. every Cap_r[LE_s(A_i)] within r^{9/4} vol^{-9/8} of alpha r^2 / vol
       (needs `cap_fn`, a capacity estimator for vertex sets, and `vol`;
       skipped when no estimator is supplied);
    4. no repeated vertex at time lag in [tau, r];
    5. no repeat at lag >= s with one endpoint outside every A_i;
    6. every length-s time interval contains a local cutpoint.

    The report names the first violated condition.
    """
    seq = _vertex_seq(path)
    T = len(seq) - 1
    dec = decompose(path, scales)

    for seg in dec.segments:
        if seg.label is SegmentLabel.BAD:
            return DecomposabilityReport(False, 1, f"index {seg.index} is bad")

    tol2 = 2.0 * scales.r * (scales.s / scales.r) ** (1.0 / 6.0)
    for seg in dec.segments:
        if abs(len(seg.le_times) - gamma * scales.r) > tol2:
            return DecomposabilityReport(
                False,
                2,
                f"|LE_s(A_{seg.index})| = {len(seg.le_times)} strays from "
                f"gamma*r = {gamma * scales.r:.1f} by more than {tol2:.1f}",
            )

    if cap_fn is not None:
        if vol is None:
            raise ValueError("condition 3 needs the vertex count `vol`")
        tol3 = scales.r**2.25 * vol**-1.125
        center = alpha * scales.r**2 / vol
        for seg in dec.segments:
            verts = {seq[t] for t in seg.le_times}
            if not verts:
                continue
            cap = cap_fn(verts)
            if abs(cap - center) > tol3:
                return DecomposabilityReport(
                    False,
                    3,
                    f"Cap_r[LE_s(A_{seg.index})] = {cap:.4f} strays from "
                    f"{center:.4f} by more than {tol3:.4f}",
                )

    occurrences: dict[int, list[int]] = {}
    for t, v in enumerate(seq):
        occurrences.setdefault(v, []).append(t)

    lo_lag, hi_lag = scales.tau, scales.r
    for ts in occurrences.values():
        if len(ts) < 2:
            continue
        b = 0
        for a in range(len(ts)):
            if b <= a:
                b = a + 1
            while b < len(ts) and ts[b] - ts[a] < lo_lag:
                b += 1
            if b < len(ts) and ts[b] - ts[a] <= hi_lag:
                return DecomposabilityReport(
                    False, 4, f"repeat at times {ts[a]}, {ts[b]} (lag in [tau, r])"
                )

    in_segment = np.zeros(T + 1, dtype=bool)
    for _, lo, hi in _segment_ranges(scales, T):
        in_segment[lo : hi + 1] = True
    for ts in occurrences.values():
        if len(ts) < 2:
            continue
        first, last = ts[0], ts[-1]
        for t in ts:
            if not in_segment[t] and max(last - t, t - first) >= scales.s:
                u = last if last - t >= scales.s else first
                return DecomposabilityReport(
                    False, 5, f"repeat at times {t} (gap time), {u} with lag >= s"
                )

    cuts = sorted(local_cutpoints(path, scales.tau))
    prev = -1
    no_cut_window = None
    for c in cuts:
        if c - prev > scales.s + 1:
            no_cut_window = prev + 1
            break
        prev = c
    else:
        if prev < T - scales.s:
            no_cut_window = prev + 1
    if no_cut_window is not None:
        return DecomposabilityReport(
            False,
            6,
            f"interval [{no_cut_window}, {no_cut_window + scales.s}] "
            "has no local cutpoint",
        )

    return DecomposabilityReport(True, None, "locally decomposable")


# Complete-graph distance law (closed form and fast samplers).


def complete_distance_pmf(m: int) -> np.ndarray:
    """P[d_T(x,y) = k] on the self-looped K_m: ((k+1)/m) prod_{i=1}^{k-1} (1-(i+1)/m).

    Entry k of the returned array is the probability of tree distance k;
    entry 0 is zero (x != y).
    """
    k = np.arange(m)
    factors = np.ones(m)
    factors[2:] = 1.0 - (k[2:]) / m  # factor for i = k-1 uses (i+1) = k
    survival = np.cumprod(factors)
    pmf = np.zeros(m)
    pmf[1:] = (k[1:] + 1) / m * survival[1:]
    return pmf


def sample_complete_distances(
    m: int, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized d_T(x,y) sampler on the self-looped K_m.

    Tracks only the current loop-erased length of the walk from x: a uniform
    step either hits y (stop), hits the j-th path vertex (truncate to j
    edges), or extends the path.  Exchangeability of unvisited vertices
    makes this equivalent to the full walk; the generic path sampler is
    cross-checked against it in the tests.
    """
    lengths = np.zeros(n_samples, dtype=np.int64)  # edges so far
    result = np.empty(n_samples, dtype=np.int64)
    active = np.arange(n_samples)
    while active.size:
        x = rng.integers(m, size=active.size)
        hit = x == 0
        result[active[hit]] = lengths[active[hit]] + 1
        keep = ~hit
        active = active[keep]
        x = x[keep]
        ln = lengths[active]
        collide = x <= ln + 1
        lengths[active] = np.where(collide, x - 1, ln + 1)
    return result


def lerw_length_to_target(
    g: GraphFamily, start: int, target: int, rng: np.random.Generator
) -> int:
    """Edge count of the loop-erased walk from start to target.

    Runs the non-lazy walk (holding does not change the loop-erased path)
    with a dict-indexed erasure loop; this is the workhorse for tree
    distance sampling via the Pemantle identity.
    """
    if start == target:
        return 0
    if g.kind == "complete":
        m = g.params["m"]
        pos = {start: 0}
        verts = [start]
        while True:
            v = int(rng.integers(m))
            if v == target:
                return len(verts)
            j = pos.get(v)
            if j is not None:
                for w in verts[j + 1 :]:
                    del pos[w]
                del verts[j + 1 :]
            else:
                pos[v] = len(verts)
                verts.append(v)
    nbrs = g.neighbor_lists()
    b = g.branch_count
    pos = {start: 0}
    verts = [start]
    cur = start
    block = rng.integers(b, size=8192)
    bi = 0
    while True:
        if bi == block.size:
            block = rng.integers(b, size=8192)
            bi = 0
        v = nbrs[cur][block[bi]]
        bi += 1
        if v == target:
            return len(verts)
        j = pos.get(v)
        if j is not None:
            for w in verts[j + 1 :]:
                del pos[w]
            del verts[j + 1 :]
        else:
            pos[v] = len(verts)
            verts.append(v)
        cur = v
