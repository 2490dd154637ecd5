"""Parameter calculus for Husler-Reiss models.

A d-variate model is parameterized interchangeably by

* a variogram matrix ``Gamma``: symmetric, zero diagonal, conditionally
  negative definite of maximal rank (entries are squared extremal
  increments, equivalently squared Euclidean distances of d points in
  general position in ``R^{d-1}``),
* the covariance ``Sigma = P (-Gamma/2) P`` of the spectral vector,
  supported on the hyperplane orthogonal to the all-ones vector,
* a signed Laplacian precision ``Theta = D - Q`` with weighted adjacency
  ``Q`` (zeros of ``Q`` encode the missing edges of the extremal graph),
* anchored covariances ``Sigma^(k)`` obtained by the Farris transform,
* the Cayley-Menger matrix ``CM(Gamma) = [[-Gamma/2, 1], [-1', 0]]``,
  whose inverse carries ``Theta`` as its leading block.

All conversions are pure functions of dense numpy arrays.  Validity of
the two parameter domains is exposed through explicit predicates with a
tolerance argument instead of being enforced at construction, because the
fitting code needs to probe slightly infeasible iterates.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ParameterError

# Relative eigenvalue cutoff for the structural zero of rank-(d-1) matrices.
# The rank deficiency is structural, so a second eigenvalue below the cutoff
# signals invalid input rather than noise.
RANK_TOL = 1e-9

# Default tolerance of the validity predicates.
DEFAULT_TOL = 1e-8


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _check_square(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise ValueError(f"{name} must have dimension at least 2, got {m.shape[0]}")
    return m


def projection_matrix(d: int) -> np.ndarray:
    """Orthogonal projection ``P = I - (1/d) 11'`` onto the zero-sum hyperplane."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return np.eye(d) - np.full((d, d), 1.0 / d)


def hyperplane_basis(d: int) -> np.ndarray:
    """Helmert-style orthonormal basis of the zero-sum hyperplane, shape (d, d-1)."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    u = np.zeros((d, d - 1))
    for k in range(1, d):
        u[:k, k - 1] = 1.0
        u[k, k - 1] = -float(k)
        u[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return u


def _pinv_rank_dm1(m: np.ndarray, what: str) -> np.ndarray:
    """Pseudo-inverse of a symmetric PSD matrix whose kernel is the ones vector.

    Works in an explicit basis of the zero-sum hyperplane, so the structural
    zero eigenvalue is deflated exactly and the result has exact zero row
    sums even for badly conditioned input.  Any further eigenvalue below
    ``RANK_TOL * lambda_max`` means the rank is deficient beyond the
    structural zero, which signals invalid input rather than noise.
    """
    d = m.shape[0]
    u = hyperplane_basis(d)
    w, v = np.linalg.eigh(_sym(u.T @ m @ u))
    lam_max = w[-1]
    if not lam_max > 0.0:
        raise ParameterError(f"{what}: largest eigenvalue {lam_max:.6e} is not positive")
    cutoff = RANK_TOL * lam_max
    n_small = int((w < cutoff).sum())
    if n_small != 0:
        raise ParameterError(
            f"{what}: expected exactly one eigenvalue below {cutoff:.3e}, "
            f"found {n_small + 1} (smallest hyperplane eigenvalues {w[: n_small + 1]})"
        )
    basis = u @ v
    return (basis / w) @ basis.T


def gamma_to_sigma(gamma: np.ndarray) -> np.ndarray:
    """Spectral covariance ``Sigma = P (-Gamma/2) P``.

    Raises ParameterError when ``Gamma`` is not strictly conditionally
    negative definite, naming the offending eigenvalue.
    """
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    p = projection_matrix(d)
    sigma = _sym(p @ (-0.5 * gamma) @ p)
    w = np.linalg.eigvalsh(sigma)
    lam_max = w[-1]
    cutoff = RANK_TOL * max(lam_max, 0.0)
    small = w[w < cutoff] if lam_max > 0 else w
    if lam_max <= 0.0 or small.size != 1:
        # the structural zero is the small eigenvalue closest to zero; any
        # other one below the cutoff belongs to the variogram itself
        offenders = sorted(small, key=abs)[1:] if small.size > 1 else list(w[:1])
        raise ParameterError(
            "variogram is not conditionally negative definite: "
            f"offending eigenvalue of P(-Gamma/2)P is {offenders[0]:.6e}"
        )
    return sigma


def sigma_to_theta(sigma: np.ndarray) -> np.ndarray:
    """Signed Laplacian precision as the pseudo-inverse of ``Sigma``."""
    sigma = _check_square(sigma, "covariance")
    scale = max(np.abs(sigma).max(), 1.0)
    rows = np.abs(sigma.sum(axis=1)).max()
    if rows > 1e-8 * scale:
        raise ParameterError(
            f"covariance rows must sum to zero (max abs row sum {rows:.3e})"
        )
    return _pinv_rank_dm1(sigma, "covariance pseudo-inverse")


def theta_to_sigma(theta: np.ndarray) -> np.ndarray:
    """Spectral covariance as the pseudo-inverse of ``Theta``."""
    theta = _check_square(theta, "precision")
    scale = max(np.abs(theta).max(), 1.0)
    rows = np.abs(theta.sum(axis=1)).max()
    if rows > 1e-8 * scale:
        raise ParameterError(
            f"precision rows must sum to zero (max abs row sum {rows:.3e})"
        )
    return _pinv_rank_dm1(theta, "precision pseudo-inverse")


def variogram_of_covariance(sigma: np.ndarray) -> np.ndarray:
    """Variogram ``d_S 1' + 1 d_S' - 2 Sigma`` of a covariance matrix."""
    s = np.diag(sigma)
    gamma = s[:, None] + s[None, :] - 2.0 * sigma
    np.fill_diagonal(gamma, 0.0)
    return _sym(gamma)


def theta_to_gamma(theta: np.ndarray) -> np.ndarray:
    """Variogram matrix of a signed Laplacian precision."""
    return variogram_of_covariance(theta_to_sigma(theta))


def gamma_to_theta(gamma: np.ndarray) -> np.ndarray:
    """Signed Laplacian precision of a variogram matrix."""
    return sigma_to_theta(gamma_to_sigma(gamma))


def q_from_theta(theta: np.ndarray) -> np.ndarray:
    """Weighted adjacency recovered from the off-diagonal of ``-Theta``."""
    q = -np.asarray(theta, dtype=float).copy()
    np.fill_diagonal(q, 0.0)
    return q


def theta_from_q(q: np.ndarray) -> np.ndarray:
    """Signed Laplacian ``D - Q`` with ``D_ii = sum_j Q_ij``."""
    q = _check_square(q, "adjacency")
    return np.diag(q.sum(axis=1)) - q


def farris(gamma: np.ndarray, k: int) -> np.ndarray:
    """Anchored covariance ``Sigma^(k)_ij = (Gamma_ik + Gamma_jk - Gamma_ij) / 2``.

    The result is the (d-1) x (d-1) covariance of the k-th extremal function,
    indexed by the vertices other than ``k`` in increasing order.
    """
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    if not 0 <= k < d:
        raise ValueError(f"anchor index {k} out of range for dimension {d}")
    idx = np.array([i for i in range(d) if i != k])
    return 0.5 * (
        gamma[idx, k][:, None] + gamma[k, idx][None, :] - gamma[np.ix_(idx, idx)]
    )


def farris_inverse(sigma_k: np.ndarray, k: int) -> np.ndarray:
    """Variogram recovered from an anchored covariance at anchor ``k``."""
    sigma_k = np.asarray(sigma_k, dtype=float)
    if sigma_k.ndim != 2 or sigma_k.shape[0] != sigma_k.shape[1]:
        raise ValueError(f"anchored covariance must be square, got {sigma_k.shape}")
    d = sigma_k.shape[0] + 1
    if not 0 <= k < d:
        raise ValueError(f"anchor index {k} out of range for dimension {d}")
    idx = np.array([i for i in range(d) if i != k])
    s = np.diag(sigma_k)
    gamma = np.zeros((d, d))
    gamma[np.ix_(idx, idx)] = s[:, None] + s[None, :] - 2.0 * sigma_k
    gamma[idx, k] = s
    gamma[k, idx] = s
    np.fill_diagonal(gamma, 0.0)
    return gamma


def cayley_menger(gamma: np.ndarray) -> np.ndarray:
    """Cayley-Menger matrix ``[[-Gamma/2, 1], [-1', 0]]`` of shape (d+1, d+1)."""
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    cm = np.zeros((d + 1, d + 1))
    cm[:d, :d] = -0.5 * gamma
    cm[:d, d] = 1.0
    cm[d, :d] = -1.0
    return cm


class CayleyMengerBlocks(NamedTuple):
    """Blocks of the inverse Cayley-Menger matrix: ``[[Theta, -r], [r', -R^2]]``."""

    theta: np.ndarray
    r: np.ndarray
    r_squared: float

    def assemble(self) -> np.ndarray:
        d = self.theta.shape[0]
        inv = np.zeros((d + 1, d + 1))
        inv[:d, :d] = self.theta
        inv[:d, d] = -self.r
        inv[d, :d] = self.r
        inv[d, d] = -self.r_squared
        return inv


def cm_inverse_blocks(gamma: np.ndarray) -> CayleyMengerBlocks:
    """Closed-form blocks of ``CM(Gamma)^{-1}``.

    ``Theta`` comes from the pseudo-inverse route and the border terms from
    ``r = Theta xi / 2 + 1/d`` and ``R^2 = xi' (r + 1/d) / 2`` with
    ``xi = diag(Sigma)``; the closed forms are better conditioned than a
    generic (d+1) x (d+1) inversion.
    """
    sigma = gamma_to_sigma(gamma)
    theta = _pinv_rank_dm1(sigma, "covariance pseudo-inverse")
    d = theta.shape[0]
    xi = np.diag(sigma)
    r = 0.5 * theta @ xi + 1.0 / d
    r_squared = 0.5 * float(xi @ (r + 1.0 / d))
    blocks = CayleyMengerBlocks(theta=theta, r=r, r_squared=r_squared)
    if __debug__:
        try:
            direct = np.linalg.inv(cayley_menger(gamma))
        except np.linalg.LinAlgError:
            direct = None
        if direct is not None:
            scale = max(np.abs(direct).max(), 1.0)
            assert np.abs(blocks.assemble() - direct).max() < 1e-6 * scale
    return blocks


def is_valid_variogram(gamma: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Membership test for the variogram domain (strict conditional negativity)."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] < 2:
        return False
    scale = max(np.abs(gamma).max(), 1.0)
    if np.abs(gamma - gamma.T).max() > tol * scale:
        return False
    if np.abs(np.diag(gamma)).max() > tol * scale:
        return False
    u = hyperplane_basis(gamma.shape[0])
    w = np.linalg.eigvalsh(_sym(u.T @ (-0.5 * gamma) @ u))
    return w[-1] > 0.0 and w[0] > tol * w[-1]


def is_valid_precision(theta: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Membership test for the natural domain (PSD signed Laplacian of rank d-1)."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1] or theta.shape[0] < 2:
        return False
    scale = max(np.abs(theta).max(), 1.0)
    if np.abs(theta - theta.T).max() > tol * scale:
        return False
    if np.abs(theta.sum(axis=1)).max() > tol * scale:
        return False
    w = np.linalg.eigvalsh(_sym(theta[:-1, :-1]))
    return w[-1] > 0.0 and w[0] > tol * w[-1]


def cofactor_cholesky(theta: np.ndarray):
    """Cholesky factor of the trailing cofactor block, or None when outside the domain."""
    try:
        return np.linalg.cholesky(theta[:-1, :-1])
    except np.linalg.LinAlgError:
        return None


def project_variogram(gamma: np.ndarray, clip: float = 1e-8) -> np.ndarray:
    """Nearest-variogram projection by eigenvalue clipping.

    Eigenvalues of ``P(-Gamma/2)P`` on the zero-sum hyperplane are raised to
    at least ``clip`` times the largest one.  Valid input passes through
    unchanged; empirical variograms from small samples may violate
    definiteness and need this before a precision matrix can be formed.
    """
    gamma = _check_square(gamma, "variogram")
    gamma = _sym(gamma)
    np.fill_diagonal(gamma, 0.0)
    u = hyperplane_basis(gamma.shape[0])
    w, v = np.linalg.eigh(_sym(u.T @ (-0.5 * gamma) @ u))
    if not w[-1] > 0.0:
        raise ParameterError(
            f"variogram projection failed: largest eigenvalue {w[-1]:.6e} is not positive"
        )
    w = np.maximum(w, clip * w[-1])
    basis = u @ v
    sigma = (basis * w) @ basis.T
    return variogram_of_covariance(sigma)
