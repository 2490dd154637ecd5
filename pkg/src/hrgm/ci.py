"""Extremal conditional independence via Cayley-Menger minors.

For a Husler-Reiss model with variogram ``Gamma``, the statement that
components ``i`` and ``j`` are extremal conditionally independent given a
nonempty set ``C`` is equivalent to the vanishing of the minor of
``CM(Gamma)`` with rows ``{i} | C | {d}`` and columns ``{j} | C | {d}``
(0-based; the augmented index d is the Cayley-Menger border row).  The
test normalizes the minor by the two corresponding principal minors, which
turns it into a partial-correlation magnitude and makes the threshold
invariant to global rescaling of ``Gamma``.

The marginal case ``C = {}`` is rejected: no minor criterion is available
for it, and pairs conditioned on nothing are outside the model calculus.
"""

from __future__ import annotations

import numpy as np

from .errors import GraphError, ParameterError
from .graphs import canonical_edges, spanning_trees
from .params import cayley_menger, _check_square

DEFAULT_CI_TOL = 1e-8


def _checked_indices(d: int, i: int, j: int, cond) -> list[int]:
    cond = sorted(int(c) for c in cond)
    if len(cond) == 0:
        raise ValueError(
            "conditioning set must be nonempty: the marginal-pair case has no "
            "minor criterion and is not supported"
        )
    if len(set(cond)) != len(cond):
        raise ValueError(f"conditioning set has repeated indices: {cond}")
    if i == j:
        raise ValueError(f"vertices must differ, got i=j={i}")
    if i in cond or j in cond:
        raise ValueError(
            f"vertices i={i}, j={j} must not overlap the conditioning set {cond}"
        )
    for x in (i, j, *cond):
        if not 0 <= x < d:
            raise ValueError(f"index {x} out of range for dimension {d}")
    return cond


def ci_minor(gamma: np.ndarray, i: int, j: int, cond) -> float:
    """Cayley-Menger minor deciding ``i`` independent of ``j`` given ``cond``.

    Rows are ``sorted({i} | cond)`` followed by the augmented index, columns
    ``sorted({j} | cond)`` followed by the augmented index; the signed
    determinant of that (|cond|+2) x (|cond|+2) submatrix is returned.
    """
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    cond = _checked_indices(d, i, j, cond)
    cm = cayley_menger(gamma)
    rows = sorted([i, *cond]) + [d]
    cols = sorted([j, *cond]) + [d]
    return float(np.linalg.det(cm[np.ix_(rows, cols)]))


def ci_statistic(gamma: np.ndarray, i: int, j: int, cond) -> float:
    """Scale-free magnitude of the CI minor (a partial-correlation modulus)."""
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    cond = _checked_indices(d, i, j, cond)
    cm = cayley_menger(gamma)
    rows = sorted([i, *cond]) + [d]
    cols = sorted([j, *cond]) + [d]
    num = np.linalg.det(cm[np.ix_(rows, cols)])
    den_i = np.linalg.det(cm[np.ix_(rows, rows)])
    den_j = np.linalg.det(cm[np.ix_(cols, cols)])
    if not (den_i > 0 and den_j > 0):
        raise ParameterError(
            "principal Cayley-Menger minors are not positive "
            f"({den_i:.3e}, {den_j:.3e}); variogram is outside its domain"
        )
    return float(abs(num) / np.sqrt(den_i * den_j))


def ci_test(gamma: np.ndarray, i: int, j: int, cond, tol: float = DEFAULT_CI_TOL) -> bool:
    """True when the normalized CI minor is below ``tol``.

    ``cond`` may be any nonempty subset of the remaining vertices, including
    the full complement, in which case the verdict coincides with a zero
    entry ``Theta_ij`` of the precision matrix.
    """
    return ci_statistic(gamma, i, j, cond) < tol


def gamma_from_q_forests(q: np.ndarray, cap: int = 10**6) -> np.ndarray:
    """Variogram from the weighted adjacency by forest/tree ratios.

    ``Gamma_ij`` is the weight of all two-component spanning forests
    separating ``i`` from ``j`` divided by the weight of all spanning trees
    of the support graph.  Combinatorial oracle for small graphs; the dense
    pseudo-inverse route is the fitting-path implementation.
    """
    q = _check_square(q, "adjacency")
    d = q.shape[0]
    if d > 8:
        raise GraphError(f"forest-formula oracle is limited to d <= 8, got {d}")
    edges = canonical_edges(
        (u, v) for u in range(d) for v in range(u + 1, d) if q[u, v] != 0.0
    )
    trees = spanning_trees(d, edges, cap=cap)
    if not trees:
        raise GraphError("support graph of the adjacency is not connected")
    denom = sum(np.prod([q[u, v] for u, v in t]) for t in trees)

    # one pass over all acyclic (d-2)-subsets; each contributes to every
    # pair it separates
    import itertools

    from .graphs import _UnionFind

    num = np.zeros((d, d))
    count = 0
    for subset in itertools.combinations(range(len(edges)), d - 2):
        uf = _UnionFind(d)
        acyclic = True
        weight = 1.0
        for e in subset:
            u, v = edges[e]
            if not uf.union(u, v):
                acyclic = False
                break
            weight *= q[u, v]
        if not acyclic:
            continue
        count += 1
        if count > cap:
            raise GraphError(f"forest enumeration exceeded cap of {cap}")
        roots = [uf.find(x) for x in range(d)]
        for a in range(d):
            for b in range(a + 1, d):
                if roots[a] != roots[b]:
                    num[a, b] += weight
    gamma = (num + num.T) / denom
    return gamma
