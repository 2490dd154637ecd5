"""Synthetic data generation.

All samplers draw from a seedable counter-based generator (numpy's Philox
behind ``numpy.random.Generator``), so identical seeds reproduce identical
output on one platform.  Draw order is fixed per sampler and documented in
the docstrings; reimplementations in other languages can match moments but
bit-exact agreement across languages is not a goal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import ColoredGraph, RootedTree
from .params import farris, gamma_to_sigma, _check_square


def rng_from_seed(seed) -> np.random.Generator:
    """Counter-based generator shared by all samplers."""
    return np.random.Generator(np.random.Philox(seed))


def _psd_factor(sigma: np.ndarray, what: str) -> np.ndarray:
    """Cholesky factor of a positive definite covariance."""
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise ParameterError(f"{what} is not positive definite") from None


def sample_extremal_function(gamma: np.ndarray, k: int, n: int, seed) -> np.ndarray:
    """Draws of the multivariate Pareto vector conditioned on coordinate ``k``.

    Each row is ``E 1 + W`` where ``E`` is standard exponential and ``W`` is
    the k-th extremal function: column ``k`` is exactly zero in ``W`` and the
    remaining columns are Gaussian with mean ``-diag(Sigma_k)/2`` and
    covariance ``Sigma_k``, the Farris transform of ``gamma`` at ``k``.
    Draw order: the n x (d-1) Gaussian block first, then the exponentials.
    """
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    if not 0 <= k < d:
        raise ValueError(f"anchor index {k} out of range for dimension {d}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    sigma_k = farris(gamma, k)
    chol = _psd_factor(sigma_k, "anchored covariance")
    rng = rng_from_seed(seed)
    z = rng.standard_normal((n, d - 1)) @ chol.T - 0.5 * np.diag(sigma_k)
    e = rng.exponential(size=n)
    out = np.empty((n, d))
    idx = [i for i in range(d) if i != k]
    out[:, idx] = z
    out[:, k] = 0.0
    return out + e[:, None]


def sample_spectral(gamma: np.ndarray, n: int, seed) -> np.ndarray:
    """Draws of the spectral vector: the degenerate Gaussian on the zero-sum hyperplane.

    Mean is ``P(-Gamma/2)1`` and covariance ``P(-Gamma/2)P``; rows sum to
    zero up to rounding.  Draw order: one n x (d-1) standard normal block.
    """
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    sigma = gamma_to_sigma(gamma)
    g1 = (-0.5 * gamma) @ np.ones(d)
    mu = g1 - g1.mean()
    w, v = np.linalg.eigh(sigma)
    keep = w > 1e-12 * w[-1]
    factor = v[:, keep] * np.sqrt(w[keep])
    rng = rng_from_seed(seed)
    z = rng.standard_normal((n, int(keep.sum())))
    return mu + z @ factor.T


@dataclass(frozen=True)
class IncrementSpec:
    """Distribution of the independent edge increments of one color class.

    The mean is tied to ``-variance/2`` for every registered distribution,
    matching the spectral normalization of the Gaussian case.  Variance zero
    gives a deterministic stub.
    """

    dist: str = "gaussian"
    variance: float = 1.0

    def __post_init__(self):
        if self.dist not in SAMPLERS:
            raise ValueError(
                f"unknown increment distribution {self.dist!r}; "
                f"available: {sorted(SAMPLERS)}"
            )
        if self.variance < 0:
            raise ValueError(f"variance must be nonnegative, got {self.variance}")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return SAMPLERS[self.dist](rng, self.variance, n)


def _draw_gaussian(rng, var, n):
    return rng.normal(-0.5 * var, np.sqrt(var), size=n)


def _draw_laplace(rng, var, n):
    return rng.laplace(-0.5 * var, np.sqrt(0.5 * var), size=n)


def _draw_uniform(rng, var, n):
    half = np.sqrt(3.0 * var)
    return rng.uniform(-0.5 * var - half, -0.5 * var + half, size=n)


SAMPLERS = {
    "gaussian": _draw_gaussian,
    "laplace": _draw_laplace,
    "uniform": _draw_uniform,
}


def sample_colored_tree(
    tree: RootedTree,
    coloring: ColoredGraph,
    spec: dict[int, IncrementSpec],
    n: int,
    seed,
) -> np.ndarray:
    """Extremal-function draws of a colored tree model rooted at ``tree.root``.

    Each coordinate is the sum of independent increments along the path from
    the root; edges of the same color class share one increment distribution.
    Returns the n x d matrix of the extremal function (root column zero).
    Draw order: one length-n increment block per directed edge, in the
    tree's breadth-first edge order.
    """
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if coloring.d != tree.d:
        raise ValueError("tree and coloring dimensions differ")
    class_of = {e: c for e, c in zip(coloring.edges, coloring.colors)}
    for u, v in tree.directed_edges:
        key = (min(u, v), max(u, v))
        if key not in class_of:
            raise ValueError(f"tree edge {key} is missing from the coloring")
        if class_of[key] not in spec:
            raise ValueError(f"no increment spec for color class {class_of[key]}")
    rng = rng_from_seed(seed)
    w = np.zeros((n, tree.d))
    for u, v in tree.directed_edges:
        cls = class_of[(min(u, v), max(u, v))]
        w[:, v] = w[:, u] + spec[cls].draw(rng, n)
    return w


def sample_variogram(x: np.ndarray) -> np.ndarray:
    """Matrix of sample variances of coordinate differences.

    Centered estimator: entry (i, j) is the variance (denominator n) of
    ``x_i - x_j`` across rows.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError(f"need an n x d sample with n >= 2, got shape {x.shape}")
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / x.shape[0]
    v = np.diag(cov)
    gamma = v[:, None] + v[None, :] - 2.0 * cov
    np.fill_diagonal(gamma, 0.0)
    return 0.5 * (gamma + gamma.T)
