import itertools
import math
from collections import Counter, deque

import numpy as np
import pytest

from ustlab.extension import extend
from ustlab.graphs import GraphFamily
from ustlab.lerw import lerw_length_to_target
from ustlab.rng import substream
from ustlab.wilson import (
    PartialTree,
    forest_distances,
    partial_tree,
    wilson_ust,
)


def _bfs_distance(edges, x, y):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        if v == y:
            return seen[v]
        for w in adj[v]:
            if w not in seen:
                seen[w] = seen[v] + 1
                queue.append(w)
    raise AssertionError("disconnected tree")


def _k4_trees():
    """All spanning trees of K_4 by brute-force enumeration."""
    all_edges = list(itertools.combinations(range(4), 2))
    trees = []
    for triple in itertools.combinations(all_edges, 3):
        verts = {v for e in triple for v in e}
        if len(verts) == 4:
            try:
                _bfs_distance(triple, 0, 3)
            except KeyError:
                continue
            trees.append(frozenset(triple))
    return trees


def test_k4_has_sixteen_spanning_trees():
    assert len(_k4_trees()) == 16


def test_wilson_is_uniform_on_k4():
    g = GraphFamily.complete(4)
    rng = substream(5, 0)
    n = 20000
    counts = Counter(wilson_ust(g, 0, rng).edges() for _ in range(n))
    assert set(counts) == set(_k4_trees())
    for c in counts.values():
        assert abs(c / n - 1 / 16) < 0.01


def test_wilson_is_uniform_on_the_ring():
    g = GraphFamily.ring(4)
    rng = substream(5, 1)
    n = 20000
    counts = Counter(wilson_ust(g, 0, rng).edges() for _ in range(n))
    assert len(counts) == 4  # one tree per deleted ring edge
    for c in counts.values():
        assert abs(c / n - 1 / 4) < 0.015


def test_wilson_law_is_independent_of_visit_order():
    g = GraphFamily.complete(4)
    n = 20000
    rng_a, rng_b = substream(5, 2), substream(5, 3)
    a = Counter(wilson_ust(g, 0, rng_a).edges() for _ in range(n))
    b = Counter(
        wilson_ust(g, 0, rng_b, order=[3, 2, 1, 0]).edges() for _ in range(n)
    )
    tv = 0.5 * sum(abs(a[t] / n - b[t] / n) for t in set(a) | set(b))
    assert tv < 0.02


@pytest.mark.parametrize(
    "g",
    [GraphFamily.torus(2, 3), GraphFamily.hypercube(3), GraphFamily.ring(7)],
    ids=lambda g: g.spec_string(),
)
def test_wilson_output_is_a_spanning_tree(g):
    rng = substream(5, 4)
    for _ in range(20):
        tree = wilson_ust(g, 0, rng)
        assert tree.edge_count == g.num_vertices - 1
        assert all(v in tree for v in range(g.num_vertices))
        for v, p in tree.parent.items():
            assert p in g.neighbors(v)


def test_tree_distance_matches_bfs_on_the_edge_set():
    g = GraphFamily.torus(2, 3)
    rng = substream(5, 5)
    for _ in range(10):
        tree = wilson_ust(g, 0, rng)
        edges = tree.edges()
        for x in range(0, 9, 2):
            for y in range(1, 9, 3):
                assert tree.distance(x, y) == _bfs_distance(edges, x, y)


def test_k4_pair_distance_matches_enumeration():
    pmf = Counter(_bfs_distance(t, 0, 1) for t in _k4_trees())
    g = GraphFamily.complete(4)
    rng = substream(5, 6)
    n = 20000
    counts = Counter(wilson_ust(g, 0, rng).distance(0, 1) for _ in range(n))
    tv = 0.5 * sum(
        abs(counts[d] / n - pmf[d] / 16) for d in set(counts) | set(pmf)
    )
    assert tv < 0.02


def test_size_cap_is_enforced():
    g = GraphFamily.hypercube(6)
    with pytest.raises(ValueError):
        wilson_ust(g, 0, substream(5, 7), size_cap=32)


def test_partial_tree_validates_points():
    ext = extend(GraphFamily.ring(6), 5.0)
    with pytest.raises(ValueError):
        partial_tree(ext, [1, 1], substream(5, 8))
    with pytest.raises(ValueError):
        partial_tree(ext, [0, 6], substream(5, 8))


def test_partial_tree_with_weak_killing_matches_direct_lerw():
    # with a long kill clock the two-point distance follows the tree law
    g = GraphFamily.ring(5)
    ext = extend(g, 2000.0)
    rng = substream(5, 9)
    n = 3000
    forest_counts: Counter = Counter()
    for _ in range(n):
        forest = forest_distances(partial_tree(ext, [0, 2], rng))
        forest_counts[forest.distances[0, 1]] += 1
    assert forest_counts[math.inf] < 0.02 * n
    lerw_counts = Counter(
        float(lerw_length_to_target(g, 0, 2, rng)) for _ in range(n)
    )
    tv = 0.5 * sum(
        abs(forest_counts[d] / n - lerw_counts[d] / n)
        for d in set(forest_counts) | set(lerw_counts)
    )
    assert tv < 0.05


def test_heavy_killing_splits_the_forest():
    g = GraphFamily.torus(2, 8)
    ext = extend(g, 1.1)  # almost every branch dies immediately
    rng = substream(5, 10)
    n = 500
    inf_pairs = 0
    for _ in range(n):
        forest = forest_distances(partial_tree(ext, [0, 27], rng))
        finite = math.isfinite(forest.distances[0, 1])
        assert finite == (forest.n_components == 1)
        assert (forest.component_of[0] == forest.component_of[27]) == finite
        inf_pairs += not finite
    assert inf_pairs > 0.8 * n


def test_forest_distance_matrix_is_symmetric_with_zero_diagonal():
    ext = extend(GraphFamily.torus(2, 5), 5.0)
    rng = substream(5, 11)
    forest = forest_distances(partial_tree(ext, [0, 7, 13], rng))
    d = forest.distances
    assert d.shape == (3, 3)
    assert np.all(d.diagonal() == 0)
    assert np.array_equal(d, d.T)


def test_attach_builds_depths_incrementally():
    tree = PartialTree(root=9)
    tree.attach([4, 2, 9])
    tree.attach([7, 4])
    assert tree.depth == {9: 0, 2: 1, 4: 2, 7: 3}
    assert tree.parent == {2: 9, 4: 2, 7: 4}
    assert tree.distance(7, 2) == 2
    assert tree.distance(7, 9) == 3
