"""Poisson line-breaking construction of the CRT's k-point distance laws.

Arrival times of an inhomogeneous Poisson process with rate t are obtained
by the time change s_j = sqrt(2 (E_1 + ... + E_j)) with i.i.d. standard
exponentials E_j.  The tree starts as a segment of length s_1 between the
first two ends; each further end attaches a segment of length s_j - s_{j-1}
at a uniform point of the current tree.  F_2 is the Rayleigh law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RAYLEIGH_MEAN = math.sqrt(math.pi / 2.0)


def rayleigh_survival(x: float | np.ndarray) -> float | np.ndarray:
    return np.exp(-np.square(x) / 2.0)


def rayleigh_cdf(x: float | np.ndarray) -> float | np.ndarray:
    return -np.expm1(-np.square(x) / 2.0)


def poisson_arrivals(k: int, rng: np.random.Generator) -> np.ndarray:
    """Arrival times s_1 < ... < s_{k-1} of the rate-t Poisson process."""
    if k < 2:
        raise ValueError("need k >= 2")
    e = rng.exponential(size=k - 1)
    return np.sqrt(2.0 * np.cumsum(e))


@dataclass
class LineBreakTree:
    """Segment tree of the construction; nodes are ends and branch points."""

    # edges[i] = (node_a, node_b, length); ends[j] = node id of y_{j+1}
    edges: list[tuple[int, int, float]]
    ends: list[int]
    n_nodes: int
    total_length: float

    def distances_from(self, node: int) -> dict[int, float]:
        adj: dict[int, list[tuple[int, float]]] = {}
        for a, b, ln in self.edges:
            adj.setdefault(a, []).append((b, ln))
            adj.setdefault(b, []).append((a, ln))
        out = {node: 0.0}
        stack = [node]
        while stack:
            v = stack.pop()
            for w, ln in adj[v]:
                if w not in out:
                    out[w] = out[v] + ln
                    stack.append(w)
        return out


def _attach(tree: LineBreakTree, offset: float, new_len: float) -> None:
    """Split an edge at arc-length `offset` from the tree's edge list order
    and hang a new segment of length new_len there."""
    for idx, (a, b, ln) in enumerate(tree.edges):
        if offset <= ln or idx == len(tree.edges) - 1:
            offset = min(offset, ln)
            mid = tree.n_nodes
            leaf = tree.n_nodes + 1
            tree.n_nodes += 2
            tree.edges[idx] = (a, mid, offset)
            tree.edges.append((mid, b, ln - offset))
            tree.edges.append((mid, leaf, new_len))
            tree.ends.append(leaf)
            tree.total_length += new_len
            return
        offset -= ln


def sample_line_break_tree(k: int, rng: np.random.Generator) -> LineBreakTree:
    arrivals = poisson_arrivals(k, rng)
    tree = LineBreakTree(
        edges=[(0, 1, float(arrivals[0]))],
        ends=[0, 1],
        n_nodes=2,
        total_length=float(arrivals[0]),
    )
    for j in range(1, k - 1):
        offset = rng.random() * tree.total_length
        _attach(tree, offset, float(arrivals[j] - arrivals[j - 1]))
    return tree


def sample_Fk(k: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the k-point distance matrix F_k."""
    if k < 2:
        raise ValueError("need k >= 2")
    tree = sample_line_break_tree(k, rng)
    out = np.zeros((k, k))
    for i in range(k):
        dmap = tree.distances_from(tree.ends[i])
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = dmap[tree.ends[j]]
    return out
