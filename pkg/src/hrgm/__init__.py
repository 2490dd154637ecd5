"""Colored Husler-Reiss extremal graphical models.

Parameter calculus between variogram and signed Laplacian precision,
extremal conditional independence via Cayley-Menger minors, surrogate
likelihood objectives, Newton-scoring fits for RCON and RVAR symmetry
models, synthetic samplers and the threshold-exceedance data pipeline.
"""

from .ci import ci_minor, ci_statistic, ci_test, gamma_from_q_forests
from .errors import DataError, GraphError, HrgmError, ParameterError
from .graphs import (
    ColoredGraph,
    RootedTree,
    minimum_spanning_tree,
    separating_forests,
    spanning_trees,
    tree_metric_complete,
)
from .likelihood import dual_loglik, fenchel_dual, kl, log_partition, loglik, pair_inner
from .params import (
    CayleyMengerBlocks,
    cayley_menger,
    cm_inverse_blocks,
    farris,
    farris_inverse,
    gamma_to_sigma,
    gamma_to_theta,
    is_valid_precision,
    is_valid_variogram,
    project_variogram,
    projection_matrix,
    q_from_theta,
    sigma_to_theta,
    theta_from_q,
    theta_to_gamma,
    theta_to_sigma,
)
from .pipeline import (
    ExceedanceSample,
    empirical_precision,
    empirical_variogram,
    pam_edges,
    split_sample,
    sweep_colorings,
    threshold_exceedances,
    to_exponential_margins,
    validation_loglik,
)
from .rcon import (
    FitReport,
    expand_coloring,
    fit_rcon,
    rcon_information,
    rcon_score,
    sufficient_stat,
)
from .rvar import dual_information, dual_score, fit_graphical_mle, fit_rvar
from .simulate import (
    IncrementSpec,
    sample_colored_tree,
    sample_extremal_function,
    sample_spectral,
    sample_variogram,
)

__version__ = "0.1.0"
