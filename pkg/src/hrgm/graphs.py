"""Graphs, edge colorings, tree metrics, and spanning-structure enumeration.

Vertices are 0-based integers; edges are canonical ``(u, v)`` pairs with
``u < v``, kept in lexicographic order.  The enumeration routines exist as
combinatorial oracles for tests and small models, never on the fitting
path, and refuse to produce more than ``ENUM_CAP`` structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphError

ENUM_CAP = 10**6
ENUM_MAX_VERTICES = 10


def canonical_edges(edges) -> tuple[tuple[int, int], ...]:
    """Normalize to sorted (min, max) pairs; reject loops and duplicates."""
    out = []
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise GraphError(f"loop edge ({u}, {v}) is not allowed")
        out.append((min(u, v), max(u, v)))
    if len(set(out)) != len(out):
        raise GraphError("duplicate edges are not allowed")
    return tuple(sorted(out))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[ry] = rx
        return True


def is_connected(d: int, edges) -> bool:
    uf = _UnionFind(d)
    n_comp = d
    for u, v in edges:
        if uf.union(u, v):
            n_comp -= 1
    return n_comp == 1


@dataclass(frozen=True)
class ColoredGraph:
    """Simple undirected graph on ``d`` vertices with a surjective edge coloring.

    ``colors[e]`` is the 0-based color class of ``edges[e]``; classes are
    numbered consecutively from 0.
    """

    d: int
    edges: tuple[tuple[int, int], ...]
    colors: tuple[int, ...]

    def __post_init__(self):
        edges = canonical_edges(self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if self.d < 2:
            raise GraphError(f"graph needs at least 2 vertices, got {self.d}")
        for u, v in edges:
            if not (0 <= u < self.d and 0 <= v < self.d):
                raise GraphError(f"edge ({u}, {v}) out of range for d={self.d}")
        if len(self.colors) != len(edges):
            raise GraphError(
                f"{len(self.colors)} colors given for {len(edges)} edges"
            )
        if edges:
            present = sorted(set(self.colors))
            if present != list(range(len(present))):
                raise GraphError(
                    f"color classes must be consecutive integers from 0, got {present}"
                )

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def r(self) -> int:
        """Number of color classes."""
        return len(set(self.colors)) if self.colors else 0

    def color_classes(self) -> list[list[int]]:
        """Edge indices grouped by class, in class order."""
        classes: list[list[int]] = [[] for _ in range(self.r)]
        for e, c in enumerate(self.colors):
            classes[c].append(e)
        return classes

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=int).reshape(-1, 2)

    @classmethod
    def trivial(cls, d: int, edges) -> "ColoredGraph":
        """Every edge its own class, in canonical edge order."""
        edges = canonical_edges(edges)
        return cls(d, edges, tuple(range(len(edges))))

    @classmethod
    def monochromatic(cls, d: int, edges) -> "ColoredGraph":
        edges = canonical_edges(edges)
        return cls(d, edges, (0,) * len(edges))

    @classmethod
    def from_labels(cls, d: int, edges, labels) -> "ColoredGraph":
        """Build from arbitrary hashable labels, relabeled by first appearance."""
        edges = canonical_edges(edges)
        order: dict = {}
        colors = []
        for lab in labels:
            if lab not in order:
                order[lab] = len(order)
            colors.append(order[lab])
        return cls(d, edges, tuple(colors))


@dataclass(frozen=True)
class RootedTree:
    """Tree with all edges directed away from the root.

    ``parent[v]`` is the predecessor of ``v`` (-1 at the root); the directed
    edges are listed in breadth-first order from the root.
    """

    d: int
    root: int
    parent: tuple[int, ...]
    directed_edges: tuple[tuple[int, int], ...] = field(default=())

    @classmethod
    def from_edges(cls, d: int, edges, root: int) -> "RootedTree":
        edges = canonical_edges(edges)
        if not 0 <= root < d:
            raise ValueError(f"root {root} out of range for d={d}")
        if len(edges) != d - 1 or not is_connected(d, edges):
            raise GraphError(f"edge set is not a tree on {d} vertices")
        adj: list[list[int]] = [[] for _ in range(d)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        parent = [-1] * d
        seen = [False] * d
        seen[root] = True
        queue = [root]
        directed = []
        while queue:
            u = queue.pop(0)
            for w in sorted(adj[u]):
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    directed.append((u, w))
                    queue.append(w)
        return cls(d=d, root=root, parent=tuple(parent), directed_edges=tuple(directed))


def spanning_trees(d: int, edges, cap: int = ENUM_CAP):
    """All spanning trees of the graph, by recursive contraction/deletion.

    Returns a list of edge tuples (canonical pairs); the empty list when the
    graph is disconnected.  Raises GraphError once more than ``cap`` trees
    have been produced or when ``d`` exceeds the oracle size guard.
    """
    edges = canonical_edges(edges)
    if d > ENUM_MAX_VERTICES:
        raise GraphError(
            f"spanning tree enumeration is limited to d <= {ENUM_MAX_VERTICES}, got {d}"
        )
    if not is_connected(d, edges):
        return []
    found: list[tuple[int, ...]] = []
    initial = [(u, v, i) for i, (u, v) in enumerate(edges)]

    def connected_on(vertices: frozenset, elist) -> bool:
        idx = {x: i for i, x in enumerate(vertices)}
        uf = _UnionFind(len(idx))
        n_comp = len(idx)
        for a, b, _ in elist:
            if uf.union(idx[a], idx[b]):
                n_comp -= 1
        return n_comp == 1

    def rec(vertices: frozenset, elist, chosen: tuple):
        if len(vertices) == 1:
            found.append(chosen)
            if len(found) > cap:
                raise GraphError(f"spanning tree enumeration exceeded cap of {cap}")
            return
        if len(elist) < len(vertices) - 1 or not connected_on(vertices, elist):
            return
        u, v, i0 = elist[0]
        rest = elist[1:]
        merged = []
        for a, b, i in rest:
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                merged.append((a2, b2, i))
        rec(vertices - {v}, merged, chosen + (i0,))
        rec(vertices, rest, chosen)

    rec(frozenset(range(d)), initial, ())
    return [tuple(edges[i] for i in sorted(ch)) for ch in found]


def separating_forests(d: int, edges, i: int, j: int, cap: int = ENUM_CAP):
    """All two-component spanning forests with ``i`` and ``j`` in different trees.

    A forest with d-2 edges on d vertices has exactly two components, so the
    enumeration filters acyclic (d-2)-subsets of the edge set.
    """
    edges = canonical_edges(edges)
    if i == j:
        raise ValueError(f"vertices must differ, got i=j={i}")
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"vertices ({i}, {j}) out of range for d={d}")
    if d > ENUM_MAX_VERTICES:
        raise GraphError(
            f"forest enumeration is limited to d <= {ENUM_MAX_VERTICES}, got {d}"
        )
    m = d - 2
    out = []
    for subset in itertools.combinations(range(len(edges)), m):
        uf = _UnionFind(d)
        acyclic = True
        for e in subset:
            u, v = edges[e]
            if not uf.union(u, v):
                acyclic = False
                break
        if acyclic and uf.find(i) != uf.find(j):
            out.append(tuple(edges[e] for e in subset))
            if len(out) > cap:
                raise GraphError(f"forest enumeration exceeded cap of {cap}")
    return out


def tree_metric_complete(d: int, edges, values) -> np.ndarray:
    """Complete a tree's edge values to the full matrix of path sums.

    ``values`` is aligned with the canonical edge order; all values must be
    positive.  The result restricted to tree edges equals ``values``.
    """
    edges = canonical_edges(edges)
    values = np.asarray(values, dtype=float)
    if len(edges) != d - 1 or not is_connected(d, edges):
        raise GraphError(f"edge set is not a tree on {d} vertices")
    if values.shape != (len(edges),):
        raise ValueError(
            f"expected {len(edges)} edge values, got shape {values.shape}"
        )
    if np.any(values <= 0):
        raise ValueError("tree edge values must be positive")
    adj: list[list[tuple[int, float]]] = [[] for _ in range(d)]
    for (u, v), w in zip(edges, values):
        adj[u].append((v, w))
        adj[v].append((u, w))
    gamma = np.zeros((d, d))
    for s in range(d):
        dist = np.full(d, -1.0)
        dist[s] = 0.0
        queue = [s]
        while queue:
            u = queue.pop(0)
            for w, val in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + val
                    queue.append(w)
        gamma[s] = dist
    return 0.5 * (gamma + gamma.T)


def minimum_spanning_tree(weights: np.ndarray):
    """Kruskal MST over the complete graph with the given symmetric weights.

    Ties are broken by lexicographic edge order so that structure-recovery
    results are reproducible.  Returns the canonical edge list.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise ValueError(f"weights must be square, got shape {weights.shape}")
    d = weights.shape[0]
    pairs = [(u, v) for u in range(d) for v in range(u + 1, d)]
    for u, v in pairs:
        if not weights[u, v] > 0:
            raise ValueError(f"weight of pair ({u}, {v}) must be positive")
    order = sorted(pairs, key=lambda e: (weights[e[0], e[1]], e[0], e[1]))
    uf = _UnionFind(d)
    tree = []
    for u, v in order:
        if uf.union(u, v):
            tree.append((u, v))
            if len(tree) == d - 1:
                break
    return sorted(tree)
