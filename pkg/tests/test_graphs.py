import itertools

import numpy as np
import pytest

from hrgm import (
    ColoredGraph,
    GraphError,
    RootedTree,
    is_valid_variogram,
    minimum_spanning_tree,
    separating_forests,
    spanning_trees,
    theta_from_q,
    tree_metric_complete,
)
from oracles import (
    all_trees,
    random_connected_graph,
    random_positive_q,
    separating_weight_brute,
    spanning_tree_weight_brute,
)

TRIANGLE = [(0, 1), (0, 2), (1, 2)]
FOUR_CYCLE = [(0, 1), (1, 2), (2, 3), (0, 3)]


def test_colored_graph_validation():
    with pytest.raises(GraphError):
        ColoredGraph(3, [(0, 0)], [0])
    with pytest.raises(GraphError):
        ColoredGraph(3, [(0, 1), (1, 0)], [0, 0])
    with pytest.raises(GraphError):
        ColoredGraph(3, [(0, 1)], [1])  # classes must start at 0
    with pytest.raises(GraphError):
        ColoredGraph(2, [(0, 1)], [0, 0])
    g = ColoredGraph.from_labels(4, [(2, 3), (0, 1)], ["b", "a"])
    assert g.edges == ((0, 1), (2, 3))
    # canonical edge order first, classes by first appearance
    assert g.colors == (0, 1)
    assert g.r == 2


def test_colored_graph_classes(fig5_coloring):
    assert fig5_coloring.r == 3
    classes = fig5_coloring.color_classes()
    assert [len(c) for c in classes] == [2, 2, 2]
    assert fig5_coloring.edges[classes[0][0]] == (0, 1)
    assert fig5_coloring.edges[classes[0][1]] == (3, 4)


def test_spanning_trees_triangle():
    trees = spanning_trees(3, TRIANGLE)
    assert len(trees) == 3
    assert all(len(t) == 2 for t in trees)


def test_spanning_trees_of_tree_is_itself():
    edges = [(0, 1), (1, 2), (1, 3)]
    trees = spanning_trees(4, edges)
    assert trees == [tuple(sorted(edges))]


def test_spanning_trees_four_cycle():
    trees = spanning_trees(4, FOUR_CYCLE)
    assert len(trees) == 4


def test_spanning_trees_disconnected_empty():
    assert spanning_trees(4, [(0, 1), (2, 3)]) == []


def test_spanning_trees_guards():
    with pytest.raises(GraphError):
        spanning_trees(11, [(0, 1)])
    with pytest.raises(GraphError):
        spanning_trees(4, [(u, v) for u in range(4) for v in range(u + 1, 4)], cap=2)


def test_spanning_tree_count_complete_graphs():
    # Cayley's formula d^(d-2)
    for d in (3, 4, 5):
        edges = [(u, v) for u in range(d) for v in range(u + 1, d)]
        assert len(spanning_trees(d, edges)) == d ** (d - 2)


def test_matrix_tree_cross_check(rng):
    for d in (3, 4, 5, 6):
        for _ in range(4):
            edges = random_connected_graph(rng, d)
            q = random_positive_q(rng, d, edges)
            theta = theta_from_q(q)
            brute = sum(
                np.prod([q[u, v] for u, v in t]) for t in spanning_trees(d, edges)
            )
            for k in range(d):
                keep = [x for x in range(d) if x != k]
                cof = np.linalg.det(theta[np.ix_(keep, keep)])
                assert abs(cof - brute) < 1e-9 * abs(brute)


def test_separating_forests_single_edge():
    forests = separating_forests(2, [(0, 1)], 0, 1)
    assert forests == [()]


def test_separating_forests_path3():
    forests = separating_forests(3, [(0, 1), (1, 2)], 0, 2)
    assert len(forests) == 2
    assert {f[0] for f in forests} == {(0, 1), (1, 2)}


def test_separating_forests_tree_adjacent():
    edges = [(0, 1), (1, 2), (1, 3), (3, 4)]
    forests = separating_forests(5, edges, 1, 3)
    assert len(forests) == 1
    assert set(forests[0]) == set(edges) - {(1, 3)}


def test_separating_forests_same_vertex_rejected():
    with pytest.raises(ValueError):
        separating_forests(3, TRIANGLE, 1, 1)


def test_all_minors_cross_check(rng):
    for d in (3, 4, 5):
        edges = random_connected_graph(rng, d)
        q = random_positive_q(rng, d, edges)
        theta = theta_from_q(q)
        for i in range(d):
            for j in range(i + 1, d):
                keep = [x for x in range(d) if x not in (i, j)]
                minor = np.linalg.det(theta[np.ix_(keep, keep)]) if keep else 1.0
                forests = separating_forests(d, edges, i, j)
                brute = sum(
                    (np.prod([q[u, v] for u, v in f]) if f else 1.0) for f in forests
                )
                assert abs(minor - brute) < 1e-9 * max(abs(brute), 1.0)


def test_tree_metric_claw():
    gamma = tree_metric_complete(4, [(0, 3), (1, 3), (2, 3)], [1.0, 2.0, 1.0])
    assert gamma[0, 1] == 3.0
    assert gamma[0, 2] == 2.0
    assert gamma[1, 2] == 3.0
    assert gamma[0, 3] == 1.0


def test_tree_metric_path_additivity():
    gamma = tree_metric_complete(3, [(0, 1), (1, 2)], [1.0, 1.0])
    assert gamma[0, 2] == 2.0


def test_tree_metric_is_valid_variogram(rng):
    for d in (3, 5, 8):
        for edges in (next(iter(all_trees(d))), prufer_last(d, rng)):
            values = rng.uniform(0.5, 2.0, size=d - 1)
            gamma = tree_metric_complete(d, edges, values)
            assert is_valid_variogram(gamma)


def prufer_last(d, rng):
    from oracles import prufer_decode

    return prufer_decode(rng.integers(0, d, size=d - 2), d)


def test_tree_metric_four_point_condition(rng):
    for d in (5, 6, 8):
        edges = prufer_last(d, rng)
        values = rng.uniform(0.5, 2.0, size=d - 1)
        gamma = tree_metric_complete(d, edges, values)
        for quad in itertools.combinations(range(d), 4):
            i, j, k, l = quad
            sums = sorted(
                [
                    gamma[i, j] + gamma[k, l],
                    gamma[i, k] + gamma[j, l],
                    gamma[i, l] + gamma[j, k],
                ]
            )
            assert abs(sums[2] - sums[1]) < 1e-10


def test_tree_metric_rejects_non_tree():
    with pytest.raises(GraphError):
        tree_metric_complete(3, TRIANGLE, [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        tree_metric_complete(3, [(0, 1), (1, 2)], [1.0, -1.0])


def test_mst_recovers_generating_tree(rng):
    for d in (4, 6, 8):
        edges = prufer_last(d, rng)
        values = rng.uniform(0.5, 2.0, size=d - 1)
        gamma = tree_metric_complete(d, edges, values)
        assert minimum_spanning_tree(gamma) == sorted(edges)


def test_mst_uniform_triangle_tie_break():
    w = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    assert minimum_spanning_tree(w) == [(0, 1), (0, 2)]


def test_mst_stable_under_small_perturbation(rng):
    edges = [(0, 1), (1, 2), (1, 3), (3, 4)]
    values = rng.uniform(0.8, 1.6, size=4)
    gamma = tree_metric_complete(5, edges, values)
    noise = rng.uniform(-1e-3, 1e-3, size=(5, 5))
    noise = 0.5 * (noise + noise.T)
    np.fill_diagonal(noise, 0.0)
    assert minimum_spanning_tree(gamma + noise) == sorted(edges)


def test_mst_rejects_nonpositive_weight():
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    w[0, 1] = w[1, 0] = 0.0
    with pytest.raises(ValueError):
        minimum_spanning_tree(w)


def test_rooted_tree_structure():
    tree = RootedTree.from_edges(4, [(0, 3), (1, 3), (2, 3)], root=3)
    assert tree.parent[3] == -1
    assert set(tree.directed_edges) == {(3, 0), (3, 1), (3, 2)}
    assert all(tree.parent[v] == 3 for v in (0, 1, 2))
    with pytest.raises(GraphError):
        RootedTree.from_edges(4, TRIANGLE, root=0)
