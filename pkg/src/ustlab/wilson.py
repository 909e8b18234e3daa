"""Wilson's algorithm: spanning trees, partial trees, and induced forests.

A tree is grown from the root by attaching successive loop-erased walks.
Partial trees on a rooted extension stop after the k selected points are
attached; deleting the root afterwards yields a spanning forest of the
base graph, with the convention that distances across components are
infinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extension import RootedExtension
from .graphs import GraphFamily


@dataclass
class PartialTree:
    """Tree-so-far of Wilson's algorithm, rooted at `root`.

    `parent` maps every non-root tree vertex to its parent; `depth` gives
    hop counts to the root.  `selected` lists the distinguished points
    whose pairwise distances the experiments read off.
    """

    root: int
    parent: dict[int, int] = field(default_factory=dict)
    depth: dict[int, int] = field(default_factory=dict)
    selected: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.depth:
            self.depth = {self.root: 0}

    def __contains__(self, v: int) -> bool:
        return v in self.depth

    @property
    def edge_count(self) -> int:
        return len(self.parent)

    def attach(self, branch: list[int]) -> None:
        """Attach a loop-erased branch whose last vertex is already in the tree."""
        hit = branch[-1]
        d = self.depth[hit]
        for i in range(len(branch) - 2, -1, -1):
            v = branch[i]
            self.parent[v] = branch[i + 1]
            d += 1
            self.depth[v] = d

    def _lca(self, x: int, y: int) -> int:
        seen = {x}
        v = x
        while v != self.root:
            v = self.parent[v]
            seen.add(v)
        v = y
        while v not in seen:
            v = self.parent[v]
        return v

    def distance(self, x: int, y: int) -> int:
        """Hop distance between two tree vertices."""
        lca = self._lca(x, y)
        return self.depth[x] + self.depth[y] - 2 * self.depth[lca]

    def distance_matrix(self) -> np.ndarray:
        k = len(self.selected)
        out = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                out[i, j] = out[j, i] = self.distance(
                    self.selected[i], self.selected[j]
                )
        return out

    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (v, p) if v < p else (p, v) for v, p in self.parent.items()
        )


@dataclass(frozen=True)
class SpanningForest:
    """Partial tree restricted to the base graph after deleting the root."""

    selected: list[int]
    distances: np.ndarray  # np.inf across components
    component_of: dict[int, int]

    @property
    def n_components(self) -> int:
        return len(set(self.component_of.values()))


def _grow_branch(
    g: GraphFamily,
    start: int,
    tree: PartialTree,
    rng: np.random.Generator,
    kill_p: float = 0.0,
    rho: int | None = None,
    block: int | None = None,
) -> list[int]:
    """Loop-erased walk from `start` to the current tree (or killed to rho).

    One uniform draw per step covers kill / hold / move; holds change
    neither the loop-erasure nor the hit check, so they are skipped.
    """
    h = g.holding
    move_cut = kill_p + (1.0 - kill_p) * h  # u < kill_p: kill; u < move_cut: hold
    complete = g.kind == "complete"
    if complete:
        m = g.params["m"]
    else:
        nbrs = g.neighbor_lists()
        b = g.branch_count
    if block is None:
        # match the expected branch length so little randomness is wasted
        scale = 1.0 / kill_p if kill_p > 0 else g.num_vertices
        block = int(min(8192, max(64, 4 * scale)))
    pos = {start: 0}
    verts = [start]
    cur = start
    u_block = rng.random(block)
    i_block = rng.integers(m if complete else b, size=block)
    bi = 0
    while True:
        if bi == u_block.size:
            u_block = rng.random(block)
            i_block = rng.integers(m if complete else b, size=block)
            bi = 0
        u = u_block[bi]
        if u < kill_p:
            bi += 1
            verts.append(rho)
            return verts
        if u < move_cut:
            bi += 1
            continue
        v = int(i_block[bi]) if complete else nbrs[cur][i_block[bi]]
        bi += 1
        if v in tree:
            verts.append(v)
            return verts
        j = pos.get(v)
        if j is not None:
            for w in verts[j + 1 :]:
                del pos[w]
            del verts[j + 1 :]
        else:
            pos[v] = len(verts)
            verts.append(v)
        cur = v


def wilson_ust(
    g: GraphFamily,
    root: int,
    rng: np.random.Generator,
    order: list[int] | None = None,
    size_cap: int = 2**20,
) -> PartialTree:
    """Uniform spanning tree of g, rooted at `root`.

    The visit order of the remaining vertices is arbitrary (it does not
    change the law); pass `order` to fix one explicitly.
    """
    if g.num_vertices > size_cap:
        raise ValueError("graph too large for spanning sampling; raise size_cap")
    tree = PartialTree(root)
    vertices = order if order is not None else range(g.num_vertices)
    for v in vertices:
        if v in tree:
            continue
        tree.attach(_grow_branch(g, v, tree, rng))
    if tree.edge_count != g.num_vertices - 1:
        raise ValueError("order did not cover all vertices")
    return tree


def partial_tree(
    e: RootedExtension, points: list[int], rng: np.random.Generator
) -> PartialTree:
    """T_k: k successive loop-erased walks to the growing tree rooted at rho."""
    g = e.base
    if len(set(points)) != len(points):
        raise ValueError("selected points must be distinct")
    if any(not 0 <= x < g.num_vertices for x in points):
        raise ValueError("selected points must be base vertices")
    tree = PartialTree(e.root, selected=list(points))
    kill_p = 1.0 / e.kill_mean
    for x in points:
        if x in tree:
            continue
        tree.attach(_grow_branch(g, x, tree, rng, kill_p=kill_p, rho=e.root))
    return tree


def forest_distances(t: PartialTree) -> SpanningForest:
    """Delete the root: selected-point distances within components, else inf."""
    k = len(t.selected)
    dist = np.zeros((k, k))
    comp: dict[int, int] = {}
    for x in t.selected:
        v = x
        while t.parent.get(v, t.root) != t.root:
            v = t.parent[v]
        comp[x] = v  # child of the root heading x's component
    for i in range(k):
        for j in range(i + 1, k):
            x, y = t.selected[i], t.selected[j]
            if comp[x] != comp[y]:
                dist[i, j] = dist[j, i] = np.inf
            else:
                dist[i, j] = dist[j, i] = t.distance(x, y)
    return SpanningForest(list(t.selected), dist, comp)
