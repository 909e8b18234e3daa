"""Rooted extensions: the base graph plus a root vertex reached by killing.

The extension adds one vertex rho with an edge from every base vertex.  A
walk on it behaves exactly like the base walk until an independent geometric
clock (mean `kill_mean`) sends it to rho.  The jump probability per step is
1/kill_mean; edge weights are never materialized.

Vertex ids: base vertices keep their ids, rho = |G|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GraphFamily, StopReason, WalkPath


@dataclass(frozen=True)
class RootedExtension:
    base: GraphFamily
    kill_mean: float

    def __post_init__(self):
        if self.kill_mean <= 1.0:
            raise ValueError(f"kill_mean must exceed 1, got {self.kill_mean}")

    @property
    def root(self) -> int:
        return self.base.num_vertices


def extend(g: GraphFamily, kill_mean: float) -> RootedExtension:
    """Attach the root vertex with per-step jump probability 1/kill_mean."""
    return RootedExtension(g, kill_mean)


def kill_mean_for(g: GraphFamily, L: float) -> float:
    """The standard schedule: mean L * |G|^{1/2} steps before the jump."""
    return L * g.num_vertices**0.5


def killed_walk(
    e: RootedExtension,
    start: int,
    absorb: frozenset[int] | set[int],
    rng: np.random.Generator,
) -> WalkPath:
    """Walk on the extension from `start`, stopped at min(hit absorb, jump to rho).

    If the geometric clock fires first the final element is rho and
    stop_reason is Killed (unless rho is itself in `absorb`, in which case
    hitting it still ends the walk with the rho endpoint recorded).
    """
    g = e.base
    p = 1.0 / e.kill_mean
    verts = [start]
    v = start
    while v not in absorb:
        if rng.random() < p:
            verts.append(e.root)
            return WalkPath(verts, StopReason.KILLED)
        v = g.step(v, rng)
        verts.append(v)
    return WalkPath(verts, StopReason.HIT_SET)


def ltilde(L: float, r: int, base_size: int, m: int) -> float:
    """Matching kill scale for the size-m complete graph.

    L_tilde = m^{-1/2} * [1 - (1 - 1/(L |G|^{1/2}))^r]^{-1}; as the base
    graph grows with L and r on schedule, L_tilde / sqrt(alpha) -> L.
    """
    p = 1.0 - (1.0 - 1.0 / (L * base_size**0.5)) ** r
    return m**-0.5 / p


@dataclass(frozen=True)
class LtildeSchedule:
    L: float
    r: int
    base_size: int
    m: int

    @property
    def value(self) -> float:
        return ltilde(self.L, self.r, self.base_size, self.m)
