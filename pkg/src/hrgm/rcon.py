"""Surrogate maximum likelihood for RCON models.

An RCON model ties the adjacency weights within each edge color class to a
single natural parameter, so the model is the linear exponential subfamily
``Q(omega)_uv = omega_i`` on edges of class ``i`` and zero off the edge
set.  The fit iterates the stabilized scoring step

    omega <- omega + (I(omega) + S S')^{-1} S(omega)

until the l1 norm of the scores drops below the threshold, where

    S_i(omega) = (1/2) sum_{uv in E_i} (Gamma_uv(omega) - Gamma~_uv)
    I(omega)_ij = (1/8) sum_{uv in E_i} sum_{st in E_j}
                  (Gamma_sv - Gamma_us - Gamma_tv + Gamma_ut)^2

with ``Gamma(omega)`` the variogram of the expanded precision.  The rank-one
term stabilizes the plain Newton/scoring direction; on top of it, each step
is halved (up to 30 times) whenever the iterate leaves the natural domain
or decreases the likelihood, which the plain algorithm does not guard
against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GraphError, ParameterError
from .graphs import ColoredGraph, is_connected
from .likelihood import pair_inner
from .params import (
    cofactor_cholesky,
    gamma_to_theta,
    project_variogram,
    q_from_theta,
    theta_from_q,
    theta_to_gamma,
)

MAX_HALVINGS = 30


@dataclass
class FitReport:
    """Outcome of a scoring fit.

    ``estimate`` holds the per-class parameter vector; ``loglik`` is the
    surrogate log-likelihood at the estimate.  ``dual`` is filled by the
    mixed dual estimator with the dual objective value, otherwise None.
    The fitted matrices ride along for convenience and are not serialized.
    """

    estimate: np.ndarray
    iterations: int
    final_score_norm: float
    loglik: float
    converged: bool
    message: str = ""
    dual: float | None = None
    gamma: np.ndarray | None = field(default=None, repr=False)
    q: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "estimate": [float(x) for x in np.asarray(self.estimate).ravel()],
            "iterations": int(self.iterations),
            "final_score_norm": float(self.final_score_norm),
            "loglik": float(self.loglik),
            "converged": bool(self.converged),
            "message": self.message,
        }
        if self.dual is not None:
            out["dual_loglik"] = float(self.dual)
        return out


def class_matrix(coloring: ColoredGraph) -> np.ndarray:
    """Edge-by-class indicator matrix, shape (#edges, r)."""
    c = np.zeros((coloring.n_edges, coloring.r))
    c[np.arange(coloring.n_edges), np.array(coloring.colors, dtype=int)] = 1.0
    return c


def expand_coloring(omega, coloring: ColoredGraph) -> np.ndarray:
    """Adjacency ``Q(omega)``: class weight on each edge, zero off the edge set."""
    omega = np.asarray(omega, dtype=float).ravel()
    if omega.shape != (coloring.r,):
        raise ValueError(
            f"expected {coloring.r} class weights, got {omega.shape[0]}"
        )
    q = np.zeros((coloring.d, coloring.d))
    for (u, v), c in zip(coloring.edges, coloring.colors):
        q[u, v] = q[v, u] = omega[c]
    return q


def edge_values(matrix: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Entries of a symmetric matrix along the canonical edge list."""
    e = coloring.edge_array()
    return np.asarray(matrix, dtype=float)[e[:, 0], e[:, 1]]


def sufficient_stat(gamma_tilde: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Colored sufficient statistic ``t_i = -(1/2) sum_{uv in E_i} Gamma~_uv``."""
    return -0.5 * class_matrix(coloring).T @ edge_values(gamma_tilde, coloring)


def _info_kernel(gamma: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Pairwise terms ``Gamma_sv - Gamma_us - Gamma_tv + Gamma_ut`` over edge pairs.

    Entry (e, f) pairs edge e = (u, v) with edge f = (s, t); the squared
    value does not depend on the orientation of either edge.
    """
    e = coloring.edge_array()
    u, v = e[:, 0], e[:, 1]
    g = np.asarray(gamma, dtype=float)
    s, t = u, v
    return g[np.ix_(v, s)] - g[np.ix_(u, s)] - g[np.ix_(v, t)] + g[np.ix_(u, t)]


class _Iterate:
    """Model state at a feasible parameter vector."""

    __slots__ = ("omega", "q", "gamma", "loglik")

    def __init__(self, omega, q, gamma, ll):
        self.omega = omega
        self.q = q
        self.gamma = gamma
        self.loglik = ll


def _evaluate(omega: np.ndarray, coloring: ColoredGraph, gamma_bar: np.ndarray) -> _Iterate:
    q = expand_coloring(omega, coloring)
    theta = theta_from_q(q)
    chol = cofactor_cholesky(theta)
    if chol is None:
        raise ParameterError("iterate left the natural parameter domain")
    gamma_model = theta_to_gamma(theta)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    ll = 0.5 * logdet - 0.5 * pair_inner(gamma_bar, q)
    return _Iterate(omega, q, gamma_model, ll)


def rcon_score(omega, gamma_tilde: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Score vector of the colored surrogate log-likelihood at ``omega``."""
    state = _evaluate(np.asarray(omega, dtype=float), coloring, np.asarray(gamma_tilde))
    diffs = edge_values(state.gamma, coloring) - edge_values(gamma_tilde, coloring)
    return 0.5 * class_matrix(coloring).T @ diffs


def rcon_information(omega, coloring: ColoredGraph) -> np.ndarray:
    """Information matrix (negative Hessian of the surrogate log-likelihood).

    Depends on ``omega`` only, not on data.
    """
    q = expand_coloring(np.asarray(omega, dtype=float), coloring)
    gamma_model = theta_to_gamma(theta_from_q(q))
    w = _info_kernel(gamma_model, coloring)
    c = class_matrix(coloring)
    return 0.125 * c.T @ (w * w) @ c


def default_start(gamma_bar: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Per-class averages of the empirical adjacency.

    The empirical precision comes from the projected variogram; when the
    projection fails or the averaged start is infeasible, falls back to
    per-class averages of ``1 / Gamma_uv``, which are feasible for every
    connected graph.
    """
    c = class_matrix(coloring)
    sizes = c.sum(axis=0)
    try:
        q_bar = q_from_theta(gamma_to_theta(project_variogram(gamma_bar)))
        omega0 = (c.T @ edge_values(q_bar, coloring)) / sizes
        if cofactor_cholesky(theta_from_q(expand_coloring(omega0, coloring))) is not None:
            return omega0
    except ParameterError:
        pass
    gb = edge_values(gamma_bar, coloring)
    if np.any(gb <= 0):
        raise ParameterError(
            "empirical variogram must be positive on the edge set to form a start value"
        )
    return (c.T @ (1.0 / gb)) / sizes


def _solve_step(m: np.ndarray, s: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(m, s)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(m, s, rcond=None)[0]


def fit_rcon(
    gamma_bar: np.ndarray,
    coloring: ColoredGraph,
    omega0=None,
    score_tol: float = 1e-6,
    max_iter: int = 200,
) -> FitReport:
    """Stabilized Newton scoring for the colored surrogate MLE.

    ``gamma_bar`` is an empirical variogram (only its edge entries enter the
    likelihood).  Convergence means the l1 norm of the scores fell below
    ``score_tol``; at that point the fitted variogram matches the data in
    every color class sum.  The accepted iterates never decrease the
    likelihood; if no acceptable step exists the report comes back with
    ``converged=False`` and a diagnostic message.
    """
    gamma_bar = np.asarray(gamma_bar, dtype=float)
    if gamma_bar.shape != (coloring.d, coloring.d):
        raise ValueError(
            f"variogram shape {gamma_bar.shape} does not match graph dimension {coloring.d}"
        )
    if not is_connected(coloring.d, coloring.edges):
        raise GraphError("coloring graph must be connected")
    c = class_matrix(coloring)
    gb_edges = edge_values(gamma_bar, coloring)

    omega = (
        np.asarray(omega0, dtype=float).ravel()
        if omega0 is not None
        else default_start(gamma_bar, coloring)
    )
    if omega.shape != (coloring.r,):
        raise ValueError(f"start value must have {coloring.r} entries, got {omega.shape}")
    try:
        state = _evaluate(omega, coloring, gamma_bar)
    except ParameterError as exc:
        return FitReport(
            estimate=omega, iterations=0, final_score_norm=np.inf,
            loglik=-np.inf, converged=False, message=f"infeasible start value: {exc}",
        )

    score = 0.5 * c.T @ (edge_values(state.gamma, coloring) - gb_edges)
    norm = float(np.abs(score).sum())
    for iteration in range(1, max_iter + 1):
        if norm < score_tol:
            return FitReport(
                estimate=state.omega, iterations=iteration - 1,
                final_score_norm=norm, loglik=state.loglik, converged=True,
                gamma=state.gamma, q=state.q,
            )
        w = _info_kernel(state.gamma, coloring)
        info = 0.125 * c.T @ (w * w) @ c
        direction = _solve_step(info + np.outer(score, score), score)
        slack = 1e-12 * (1.0 + abs(state.loglik))
        alpha = 1.0
        accepted = None
        for _ in range(MAX_HALVINGS + 1):
            try:
                cand = _evaluate(state.omega + alpha * direction, coloring, gamma_bar)
            except ParameterError:
                cand = None
            if cand is not None and cand.loglik >= state.loglik - slack:
                accepted = cand
                break
            alpha *= 0.5
        if accepted is None:
            return FitReport(
                estimate=state.omega, iterations=iteration,
                final_score_norm=norm, loglik=state.loglik, converged=False,
                message=f"diverged: no feasible ascent step after {MAX_HALVINGS} halvings",
                gamma=state.gamma, q=state.q,
            )
        state = accepted
        score = 0.5 * c.T @ (edge_values(state.gamma, coloring) - gb_edges)
        norm = float(np.abs(score).sum())

    converged = norm < score_tol
    return FitReport(
        estimate=state.omega, iterations=max_iter, final_score_norm=norm,
        loglik=state.loglik, converged=converged,
        message="" if converged else f"score norm {norm:.3e} above {score_tol:.1e} after {max_iter} iterations",
        gamma=state.gamma, q=state.q,
    )
