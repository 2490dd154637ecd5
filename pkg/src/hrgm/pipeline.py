"""Data pipeline: margins, exceedances, empirical variogram, edge coloring.

The estimation chain mirrors the threshold-exceedance workflow: raw data is
put on standard exponential margins by a rank transform, rows whose maximum
exceeds the threshold ``u = -log(1-p)`` are kept and shifted, and the
empirical variogram averages per-anchor variograms over the exceedance
index sets.  Synthetic data generated one anchor at a time can carry an
explicit anchor label per row, in which case each anchor's variogram is
estimated from exactly its own conditioned sample.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .graphs import ColoredGraph
from .likelihood import loglik
from .params import gamma_to_theta, project_variogram, q_from_theta
from .rcon import FitReport, edge_values, fit_rcon
from .rvar import fit_rvar
from .simulate import rng_from_seed


@dataclass
class ExceedanceSample:
    """Observations on the shifted exponential scale (positive entry = exceedance).

    ``anchors`` optionally labels each row with the coordinate it was
    conditioned on (0-based); ``p`` records the threshold probability when
    the sample came out of ``threshold_exceedances``.
    """

    y: np.ndarray
    p: float | None = None
    anchors: np.ndarray | None = None
    names: list[str] | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.ndim != 2:
            raise DataError(f"exceedance data must be 2-d, got shape {self.y.shape}")
        if self.anchors is not None:
            self.anchors = np.asarray(self.anchors, dtype=int)
            if self.anchors.shape != (self.y.shape[0],):
                raise DataError("anchor labels must align with the rows")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.y.shape[1]

    def index_set(self, k: int) -> np.ndarray:
        """Rows contributing to anchor ``k``: labeled rows, or rows with y_k > 0."""
        if self.anchors is not None:
            return np.flatnonzero(self.anchors == k)
        return np.flatnonzero(self.y[:, k] > 0)


def to_exponential_margins(raw: np.ndarray) -> np.ndarray:
    """Columnwise rank transform onto standard exponential margins.

    Maps rank ``r`` (average ranks on ties) to ``-log(1 - r/(n+1))``.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] < 2:
        raise DataError(f"need an n x d matrix with n >= 2, got shape {raw.shape}")
    n, d = raw.shape
    out = np.empty_like(raw)
    for j in range(d):
        col = raw[:, j]
        if np.all(col == col[0]):
            raise DataError(f"column {j} is constant; margins are degenerate")
        out[:, j] = -np.log1p(-rankdata(col, method="average") / (n + 1.0))
    return out


def threshold_exceedances(exp_data: np.ndarray, p: float) -> ExceedanceSample:
    """Keep rows whose maximum exceeds ``u = -log(1-p)`` and shift by ``u``."""
    exp_data = np.asarray(exp_data, dtype=float)
    if not 0.0 < p < 1.0:
        raise ValueError(f"threshold probability must be in (0, 1), got {p}")
    u = -np.log1p(-p)
    shifted = exp_data - u
    keep = shifted.max(axis=1) > 0
    if not keep.any():
        raise DataError(f"no rows exceed the threshold u={u:.4f} (p={p})")
    return ExceedanceSample(y=shifted[keep], p=p)


def anchored_variogram(y: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Variogram of the centered rows; zero matrix when fewer than two rows."""
    y = np.asarray(y, dtype=float)
    d = y.shape[1]
    if rows.size < 2:
        return np.zeros((d, d))
    z = y[rows] - y[rows].mean(axis=0)
    cov = z.T @ z / rows.size
    v = np.diag(cov)
    gamma = v[:, None] + v[None, :] - 2.0 * cov
    np.fill_diagonal(gamma, 0.0)
    return 0.5 * (gamma + gamma.T)


def empirical_variogram(sample: ExceedanceSample) -> np.ndarray:
    """Average of the per-anchor variograms, divided by the dimension.

    Anchors with fewer than two contributing rows contribute a zero matrix;
    at least one anchor must have two, otherwise the estimator is undefined.
    """
    d = sample.d
    total = np.zeros((d, d))
    valid = 0
    for k in range(d):
        rows = sample.index_set(k)
        if rows.size >= 2:
            valid += 1
            total += anchored_variogram(sample.y, rows)
    if valid == 0:
        raise DataError(
            "empirical variogram undefined: every exceedance index set has fewer than 2 rows"
        )
    return total / d


def empirical_precision(gamma_bar: np.ndarray, clip: float = 1e-8) -> np.ndarray:
    """Precision matrix of the empirical variogram after eigenvalue clipping."""
    return gamma_to_theta(project_variogram(gamma_bar, clip=clip))


def pam_medoids(stats, k: int) -> list[int]:
    """Medoid indices of PAM k-medoids on scalar statistics.

    Classic build phase plus best-improvement swap phase under absolute
    difference dissimilarity; at return, no single medoid swap improves the
    objective.  All ties break lexicographically.
    """
    stats = np.asarray(stats, dtype=float).ravel()
    n = stats.size
    if not 1 <= k <= n:
        raise ValueError(f"class count {k} must be between 1 and {n}")
    dist = np.abs(stats[:, None] - stats[None, :])

    # build: greedily add the medoid with the largest cost reduction
    first = int(np.argmin(dist.sum(axis=1)))
    medoids = [first]
    nearest = dist[first].copy()
    while len(medoids) < k:
        gains = np.maximum(nearest[None, :] - dist, 0.0).sum(axis=1)
        gains[medoids] = -1.0
        cand = int(np.argmax(gains))
        medoids.append(cand)
        nearest = np.minimum(nearest, dist[cand])

    def objective(meds):
        return dist[np.array(meds)].min(axis=0).sum()

    current = objective(medoids)
    improved = True
    while improved:
        improved = False
        best = (0.0, None)
        med_set = set(medoids)
        for mi, _ in enumerate(medoids):
            for c in range(n):
                if c in med_set:
                    continue
                trial = medoids[:mi] + [c] + medoids[mi + 1 :]
                val = objective(trial)
                if current - val > best[0] + 1e-12:
                    best = (current - val, (mi, c))
        if best[1] is not None:
            mi, c = best[1]
            medoids[mi] = c
            current = objective(medoids)
            improved = True
    return sorted(medoids)


def pam_edges(stats, k: int, seed=None) -> np.ndarray:
    """Partition scalar edge statistics into ``k`` classes by PAM k-medoids.

    Each point joins its nearest medoid (ties to the earlier medoid), so
    every class is nonempty.  Deterministic; ``seed`` is accepted for
    interface stability only.  Returns 0-based class labels in order of
    first appearance.
    """
    stats = np.asarray(stats, dtype=float).ravel()
    med = np.array(pam_medoids(stats, k))
    dist = np.abs(stats[None, :] - stats[med][:, None])
    labels_raw = np.argmin(dist, axis=0)
    order: dict[int, int] = {}
    labels = np.empty(stats.size, dtype=int)
    for e, lab in enumerate(labels_raw):
        if lab not in order:
            order[int(lab)] = len(order)
        labels[e] = order[int(lab)]
    return labels


def color_by_stats(graph: ColoredGraph, stats, k: int, seed=None) -> ColoredGraph:
    """Recolor a graph by PAM clustering of per-edge statistics."""
    labels = pam_edges(stats, k, seed=seed)
    return ColoredGraph.from_labels(graph.d, graph.edges, labels)


def validation_loglik(q_hat: np.ndarray, sample: ExceedanceSample) -> tuple[float, float]:
    """Surrogate log-likelihood of a fitted adjacency on validation exceedances.

    Returns ``(per_exceedance, total)``: the first is the likelihood at the
    validation empirical variogram, the second scales it by the number of
    validation rows.  Higher is better.
    """
    gamma_val = empirical_variogram(sample)
    per = loglik(q_hat, gamma_val)
    return per, per * sample.n


def split_sample(
    sample: ExceedanceSample, train_frac: float, seed
) -> tuple[ExceedanceSample, ExceedanceSample]:
    """Random row split into training and validation parts."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {train_frac}")
    n = sample.n
    n_train = int(round(n * train_frac))
    if n_train < 1 or n_train >= n:
        raise DataError(f"split of {n} rows at fraction {train_frac} leaves an empty part")
    perm = rng_from_seed(seed).permutation(n)
    tr, va = perm[:n_train], perm[n_train:]

    def take(rows):
        return replace(
            sample,
            y=sample.y[rows],
            anchors=None if sample.anchors is None else sample.anchors[rows],
        )

    return take(tr), take(va)


@dataclass
class SweepRow:
    """One line of the coloring sweep summary."""

    k: int
    report: FitReport
    train_loglik: float
    val_loglik: float
    val_loglik_total: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    graph: ColoredGraph
    gamma_train: np.ndarray
    gamma_val: np.ndarray
    model: str

    def best_k(self) -> int:
        usable = [r for r in self.rows if np.isfinite(r.val_loglik)]
        if not usable:
            raise DataError("sweep produced no usable fits")
        return max(usable, key=lambda r: r.val_loglik).k


def sweep_colorings(
    sample: ExceedanceSample,
    graph: ColoredGraph | None,
    kmax: int,
    model: str = "rcon",
    train_frac: float = 0.5,
    seed=0,
    score_tol: float = 1e-6,
    max_iter: int = 200,
) -> SweepResult:
    """Train/validation sweep over edge colorings with k = 1..kmax classes.

    Colors the graph by PAM on the empirical precision entries (RCON) or on
    the empirical variogram entries (RVAR), fits each coloring on the
    training variogram and scores it on the validation variogram.  Without a
    graph, the minimum spanning tree of the training variogram is used.
    """
    if model not in ("rcon", "rvar"):
        raise ValueError(f"model must be 'rcon' or 'rvar', got {model!r}")
    train, val = split_sample(sample, train_frac, seed)
    gamma_train = empirical_variogram(train)
    gamma_val = empirical_variogram(val)
    if graph is None:
        from .graphs import minimum_spanning_tree

        graph = ColoredGraph.trivial(sample.d, minimum_spanning_tree(gamma_train))
    if model == "rcon":
        stats = edge_values(empirical_precision(gamma_train), graph)
    else:
        stats = edge_values(gamma_train, graph)
    kmax = min(kmax, graph.n_edges)

    rows = []
    for k in range(1, kmax + 1):
        coloring = color_by_stats(graph, stats, k, seed=seed)
        if model == "rcon":
            report = fit_rcon(gamma_train, coloring, score_tol=score_tol, max_iter=max_iter)
        else:
            report = fit_rvar(
                gamma_train, graph, coloring, score_tol=score_tol, max_iter=max_iter
            )
        if report.q is not None and report.converged:
            per, total = validation_loglik(report.q, val)
        else:
            per, total = -np.inf, -np.inf
        rows.append(
            SweepRow(
                k=k,
                report=report,
                train_loglik=report.loglik,
                val_loglik=per,
                val_loglik_total=total,
            )
        )
    return SweepResult(
        rows=rows, graph=graph, gamma_train=gamma_train, gamma_val=gamma_val, model=model
    )
