"""Surrogate mixed dual estimation for RVAR models.

An RVAR model ties the variogram entries within each edge color class to a
single mean parameter while keeping the graphical zeros ``Q_uv = 0`` off
the edge set.  The mixed parameterization (variogram on edges, adjacency
off edges) makes both restrictions affine, and estimation splits into

* step (S1): the graphical maximum likelihood fit, i.e. the completion
  whose variogram matches the data on every edge and whose adjacency
  vanishes off the edge set, and
* step (S2): reciprocal scoring for the class values ``nu`` against the
  colored summary of the step-(S1) adjacency,

      nu <- nu + (I_dual(nu) + S_dual S_dual')^{-1} S_dual(nu)
      S_dual_i(nu) = (1/2) sum_{uv in E_i} (Q_uv(nu) - Q^_uv)
      I_dual(nu)_ij = (1/4) sum_{uv in E_i} sum_{st in E_j}
                      (Theta_ut Theta_vs + Theta_us Theta_vt)

  where ``Q(nu)`` comes from re-completing the edge values ``nu`` at every
  iterate, so all iterates keep the off-edge adjacency at zero exactly.

``I_dual`` is used with the positive sign above: the d=2 closed form and
finite differences both confirm it is the negative Hessian of the dual
log-likelihood along the colored edge directions (off-edge variogram
entries held fixed).  Differentiating through the re-completion instead
adds a positive semidefinite correction, but both readings share the same
score and therefore the same fixed points; the tests pin this down.
"""

from __future__ import annotations

import numpy as np

from .errors import GraphError, ParameterError
from .graphs import ColoredGraph
from .likelihood import dual_loglik, loglik, pair_inner
from .params import is_valid_variogram, theta_from_q
from .rcon import (
    FitReport,
    MAX_HALVINGS,
    _solve_step,
    class_matrix,
    edge_values,
    expand_coloring,
    fit_rcon,
)

# Step (S1) score threshold: an l1 norm below this pins every completed edge
# entry to the data within 1e-8.
S1_SCORE_TOL = 5e-9


def fit_graphical_mle(
    gamma_bar: np.ndarray,
    graph: ColoredGraph,
    omega0=None,
    score_tol: float = S1_SCORE_TOL,
    max_iter: int = 200,
) -> tuple[np.ndarray, np.ndarray, FitReport]:
    """Variogram completion for the graphical model: step (S1) of the MDE.

    Fits the model with every edge its own class, so the optimum reproduces
    ``gamma_bar`` exactly on the edge set while the adjacency vanishes off
    it.  Returns ``(gamma_hat, q_hat, report)`` and raises ParameterError
    when no feasible completion is reached.
    """
    trivial = ColoredGraph.trivial(graph.d, graph.edges)
    report = fit_rcon(
        gamma_bar, trivial, omega0=omega0, score_tol=score_tol, max_iter=max_iter
    )
    if not report.converged:
        raise ParameterError(
            f"no feasible completion for the given edge data: {report.message}"
        )
    if not is_valid_variogram(report.gamma):
        # matching edge sums is not enough: data on or beyond the boundary of
        # the mean domain drives the weights to infinity
        raise ParameterError(
            "no feasible completion: edge data lies outside the variogram domain"
        )
    return report.gamma, report.q, report


def _complete(nu: np.ndarray, coloring: ColoredGraph, warm_q=None):
    """Completion of the class values ``nu``: full variogram and adjacency."""
    nu = np.asarray(nu, dtype=float).ravel()
    if nu.shape != (coloring.r,):
        raise ValueError(f"expected {coloring.r} class values, got {nu.shape}")
    if np.any(nu <= 0):
        raise ParameterError("class variogram values must be positive")
    gamma_edges = expand_coloring(nu, coloring)
    if warm_q is not None:
        omega0 = edge_values(warm_q, coloring)
    else:
        omega0 = 1.0 / edge_values(gamma_edges, coloring)
    gamma_full, q_full, _ = fit_graphical_mle(gamma_edges, coloring, omega0=omega0)
    return gamma_full, q_full


def dual_score(nu, q_hat: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    """Dual score: colored differences between the completed and target adjacency."""
    _, q_nu = _complete(np.asarray(nu, dtype=float), coloring)
    diffs = edge_values(q_nu, coloring) - edge_values(q_hat, coloring)
    return 0.5 * class_matrix(coloring).T @ diffs


def _dual_info_kernel(theta: np.ndarray, coloring: ColoredGraph) -> np.ndarray:
    e = coloring.edge_array()
    u, v = e[:, 0], e[:, 1]
    s, t = u, v
    return theta[np.ix_(u, t)] * theta[np.ix_(v, s)] + theta[np.ix_(u, s)] * theta[
        np.ix_(v, t)
    ]


def dual_information(nu, coloring: ColoredGraph) -> np.ndarray:
    """Negative Hessian of the dual log-likelihood in the class values.

    Evaluated at the completed model; depends on ``nu`` only, not on data.
    """
    _, q_full = _complete(np.asarray(nu, dtype=float), coloring)
    theta = theta_from_q(q_full)
    c = class_matrix(coloring)
    return 0.25 * c.T @ _dual_info_kernel(theta, coloring) @ c


def fit_rvar(
    gamma_bar: np.ndarray,
    graph: ColoredGraph,
    coloring: ColoredGraph | None = None,
    nu0=None,
    score_tol: float = 1e-6,
    max_iter: int = 200,
) -> FitReport:
    """Two-step surrogate mixed dual estimate for an RVAR model.

    ``graph`` provides the edge set for step (S1); ``coloring`` the classes
    for step (S2) and defaults to ``graph`` itself.  At convergence the
    completed adjacency matches the step-(S1) adjacency in every color class
    sum, and every iterate's off-edge adjacency is exactly zero by
    construction.  The report's ``estimate`` holds the class variogram
    values, ``loglik`` the primal surrogate value at the completed model and
    ``dual`` the dual objective.
    """
    if coloring is None:
        coloring = graph
    if coloring.edges != graph.edges or coloring.d != graph.d:
        raise GraphError("coloring must be over the same edge set as the graph")
    gamma_bar = np.asarray(gamma_bar, dtype=float)
    if gamma_bar.shape != (graph.d, graph.d):
        raise ValueError(
            f"variogram shape {gamma_bar.shape} does not match graph dimension {graph.d}"
        )

    gamma_hat, q_hat, _ = fit_graphical_mle(gamma_bar, graph)
    c = class_matrix(coloring)
    sizes = c.sum(axis=0)
    q_hat_classes = c.T @ edge_values(q_hat, coloring)

    nu = (
        np.asarray(nu0, dtype=float).ravel()
        if nu0 is not None
        else (c.T @ edge_values(gamma_bar, coloring)) / sizes
    )
    if nu.shape != (coloring.r,):
        raise ValueError(f"start value must have {coloring.r} entries, got {nu.shape}")

    def evaluate(nu_try, warm):
        gamma_full, q_full = _complete(nu_try, coloring, warm_q=warm)
        if not is_valid_variogram(gamma_full):
            raise ParameterError("completed variogram left the mean parameter domain")
        value = dual_loglik(gamma_full, q_hat)
        return gamma_full, q_full, value

    try:
        gamma_nu, q_nu, dual_value = evaluate(nu, None)
    except ParameterError as exc:
        return FitReport(
            estimate=nu, iterations=0, final_score_norm=np.inf,
            loglik=-np.inf, converged=False, message=f"infeasible start value: {exc}",
        )

    score = 0.5 * (c.T @ edge_values(q_nu, coloring) - q_hat_classes)
    norm = float(np.abs(score).sum())
    for iteration in range(1, max_iter + 1):
        if norm < score_tol:
            return FitReport(
                estimate=nu, iterations=iteration - 1, final_score_norm=norm,
                loglik=loglik(q_nu, gamma_bar), converged=True, dual=dual_value,
                gamma=gamma_nu, q=q_nu,
            )
        theta = theta_from_q(q_nu)
        info = 0.25 * c.T @ _dual_info_kernel(theta, coloring) @ c
        direction = _solve_step(info + np.outer(score, score), score)
        slack = 1e-12 * (1.0 + abs(dual_value))
        alpha = 1.0
        accepted = None
        for _ in range(MAX_HALVINGS + 1):
            try:
                cand = evaluate(nu + alpha * direction, q_nu)
            except ParameterError:
                cand = None
            if cand is not None and cand[2] >= dual_value - slack:
                accepted = (nu + alpha * direction, *cand)
                break
            alpha *= 0.5
        if accepted is None:
            return FitReport(
                estimate=nu, iterations=iteration, final_score_norm=norm,
                loglik=loglik(q_nu, gamma_bar), converged=False, dual=dual_value,
                message=f"diverged: no feasible ascent step after {MAX_HALVINGS} halvings",
                gamma=gamma_nu, q=q_nu,
            )
        nu, gamma_nu, q_nu, dual_value = accepted
        score = 0.5 * (c.T @ edge_values(q_nu, coloring) - q_hat_classes)
        norm = float(np.abs(score).sum())

    converged = norm < score_tol
    return FitReport(
        estimate=nu, iterations=max_iter, final_score_norm=norm,
        loglik=loglik(q_nu, gamma_bar), converged=converged, dual=dual_value,
        message="" if converged else f"score norm {norm:.3e} above {score_tol:.1e} after {max_iter} iterations",
        gamma=gamma_nu, q=q_nu,
    )
