"""Surrogate exponential-family objectives.

The spectral vector of a Husler-Reiss model is a degenerate Gaussian with
signed Laplacian precision; ignoring the likelihood contribution of its
mean gives an exponential family with natural parameter ``Q`` and mean
parameter ``-Gamma/2``.  This module evaluates

* the log-partition ``A(Q) = -log(sum of spanning tree weights) / 2``,
  computed as ``-log det(Theta with row/column d deleted) / 2``,
* the log-likelihood ``l(Q; G~) = -A(Q) - <G~, Q>/2``,
* its Fenchel conjugate ``A*(Gamma) = -(d-1)/2 - log det CM(Gamma) / 2``,
* the dual log-likelihood ``l_dual(Gamma; Q~) = log det CM(Gamma)/2 - <Gamma, Q~>/2``,
* the Kullback-Leibler divergence ``KL = <G1, Q2>/2 + A*(G1) + A(Q2)``.

``<A, B>`` is always the upper-triangle pairing ``sum_{i<j} A_ij B_ij``;
this factor discipline is the most bug-prone convention in the family and
is pinned by the d=2 closed forms in the tests.  The likelihoods drop the
same additive constants the closed forms drop; the KL divergence keeps the
full conjugate so that nonnegativity holds exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .params import _check_square, cayley_menger, cofactor_cholesky, theta_from_q


def pair_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Upper-triangle pairing ``sum_{i<j} a_ij b_ij``."""
    return float(np.sum(np.triu(np.asarray(a) * np.asarray(b), k=1)))


def log_partition(q: np.ndarray) -> float:
    """Log-partition ``A(Q)`` via the cofactor determinant of the Laplacian.

    The deleted index is fixed to the last one for determinism; by the
    matrix-tree theorem every choice gives the same value.
    """
    theta = theta_from_q(q)
    chol = cofactor_cholesky(theta)
    if chol is None:
        raise ParameterError(
            "adjacency is outside the natural parameter domain "
            "(Laplacian cofactor block is not positive definite)"
        )
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * logdet


def loglik(q: np.ndarray, gamma_tilde: np.ndarray) -> float:
    """Surrogate log-likelihood ``log(tree sum)/2 - <Gamma~, Q>/2``."""
    gamma_tilde = _check_square(gamma_tilde, "sample variogram")
    return -log_partition(q) - 0.5 * pair_inner(gamma_tilde, q)


def fenchel_dual(gamma: np.ndarray) -> float:
    """Fenchel conjugate ``A*(Gamma) = -(d-1)/2 - log det CM(Gamma)/2``."""
    gamma = _check_square(gamma, "variogram")
    d = gamma.shape[0]
    sign, logdet = np.linalg.slogdet(cayley_menger(gamma))
    if sign <= 0:
        raise ParameterError(
            f"Cayley-Menger determinant is not positive (sign {sign:g})"
        )
    return -0.5 * (d - 1) - 0.5 * logdet


def dual_loglik(gamma: np.ndarray, q_tilde: np.ndarray) -> float:
    """Dual log-likelihood ``log det CM(Gamma)/2 - <Gamma, Q~>/2``."""
    gamma = _check_square(gamma, "variogram")
    sign, logdet = np.linalg.slogdet(cayley_menger(gamma))
    if sign <= 0:
        raise ParameterError(
            f"Cayley-Menger determinant is not positive (sign {sign:g})"
        )
    return 0.5 * logdet - 0.5 * pair_inner(gamma, q_tilde)


def kl(gamma_1: np.ndarray, q_2: np.ndarray) -> float:
    """Kullback-Leibler divergence ``<G1, Q2>/2 + A*(G1) + A(Q2)``.

    Nonnegative, and zero exactly when ``q_2`` is the precision adjacency
    of ``gamma_1``.
    """
    return 0.5 * pair_inner(gamma_1, q_2) + fenchel_dual(gamma_1) + log_partition(q_2)
