"""K-means with a pluggable distance metric, silhouette scoring, and
(k, metric) grid search for model selection.

Centroid updates are arithmetic means in the native space for every metric;
assignment uses the configured metric. Fits are deterministic for a fixed
seed, and initialization draws over a canonically sorted view of the rows so
that permuting the input only renumbers the labels.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import EmptyGrid, ParisError, SingleCluster, TooFewPoints
from .metrics import EPSILON, MetricId, metric_order, pairwise_distances

# Mass split uniformly over zero-distance clusters; otherwise inverse-distance.
MEMBERSHIP_EPSILON = 1e-9


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    metric: MetricId = MetricId.L2
    n_restarts: int = 10
    max_iters: int = 300
    rel_tol: float = 1e-4
    seed: int = 0
    empty_cluster_policy: str = "reseed_farthest"
    dtw_band: int | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "metric": self.metric.value,
            "n_restarts": self.n_restarts,
            "max_iters": self.max_iters,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
            "empty_cluster_policy": self.empty_cluster_policy,
            "dtw_band": self.dtw_band,
        }


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,)
    inertia: float
    iterations_run: int
    converged: bool
    inertia_history: tuple[float, ...] = ()  # per accepted iteration, diagnostic

    @property
    def k(self) -> int:
        return len(self.centroids)


def _distances(metric: MetricId, xs, ys, dtw_band: int | None) -> np.ndarray:
    return pairwise_distances(metric, xs, ys, dtw_band=dtw_band, epsilon=EPSILON)


def _canonical_row_order(data: np.ndarray) -> np.ndarray:
    """Row indices sorted lexicographically by value, so initialization does
    not depend on input row order."""
    return np.lexsort(tuple(data.T[::-1]))


def _kmeans_pp_init(
    data: np.ndarray,
    k: int,
    metric: MetricId,
    rng: np.random.Generator,
    canon: np.ndarray,
    dtw_band: int | None,
) -> np.ndarray:
    """k-means++ seeding: squared-distance-weighted draws over sorted rows."""
    ordered = data[canon]
    n = len(ordered)
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        dists = _distances(metric, ordered, ordered[chosen], dtw_band)
        weights = np.min(dists, axis=1) ** 2
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            cdf = np.cumsum(weights / total)
            pick = int(np.searchsorted(cdf, rng.random(), side="right"))
            pick = min(pick, n - 1)
        else:
            # All remaining rows coincide with a chosen center.
            remaining = [i for i in range(n) if i not in chosen]
            pick = remaining[int(rng.integers(len(remaining)))]
        chosen.append(pick)
    return ordered[chosen].copy()


def _assign(
    data: np.ndarray,
    centroids: np.ndarray,
    metric: MetricId,
    canon_rank: np.ndarray,
    dtw_band: int | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Assign rows to nearest centroids and repair empty clusters by stealing
    the farthest point from a cluster that can spare one."""
    dists = _distances(metric, data, centroids, dtw_band)
    labels = np.argmin(dists, axis=1)
    assigned = dists[np.arange(len(data)), labels]
    centroids = centroids.copy()
    for j in range(len(centroids)):
        if np.any(labels == j):
            continue
        sizes = np.bincount(labels, minlength=len(centroids))
        eligible = np.flatnonzero(sizes[labels] >= 2)
        far = eligible[assigned[eligible] == assigned[eligible].max()]
        idx = far[np.argmin(canon_rank[far])]
        labels[idx] = j
        assigned[idx] = 0.0
        centroids[j] = data[idx]
    return labels, assigned, centroids


def _single_run(
    data: np.ndarray,
    cfg: KMeansConfig,
    rng: np.random.Generator,
    canon: np.ndarray,
    canon_rank: np.ndarray,
) -> ClusterModel:
    centroids = _kmeans_pp_init(data, cfg.k, cfg.metric, rng, canon, cfg.dtw_band)
    labels, assigned, centroids = _assign(
        data, centroids, cfg.metric, canon_rank, cfg.dtw_band
    )
    inertia = float(assigned.sum())
    history = [inertia]
    iterations = 0
    converged = False
    for it in range(1, cfg.max_iters + 1):
        new_centroids = centroids.copy()
        for j in range(cfg.k):
            members = labels == j
            if np.any(members):
                new_centroids[j] = data[members].mean(axis=0)
        shift_num = np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))
        shift_den = np.sqrt(np.sum(centroids**2, axis=1)) + 1e-12
        shift = float(np.max(shift_num / shift_den))
        new_labels, new_assigned, new_centroids = _assign(
            data, new_centroids, cfg.metric, canon_rank, cfg.dtw_band
        )
        new_inertia = float(new_assigned.sum())
        iterations = it
        if new_inertia > inertia * (1 + 1e-12) + 1e-12:
            # Mean centroids are a surrogate under non-L2 metrics; stop rather
            # than accept a worse model, keeping inertia non-increasing.
            converged = True
            break
        centroids, labels, inertia = new_centroids, new_labels, new_inertia
        history.append(inertia)
        if shift < cfg.rel_tol:
            converged = True
            break
    return ClusterModel(
        centroids=centroids,
        labels=labels,
        inertia=inertia,
        iterations_run=iterations,
        converged=converged,
        inertia_history=tuple(history),
    )


def _canonicalize(model: ClusterModel) -> ClusterModel:
    """Renumber clusters by total centroid mass descending (ties by
    components) so indices are stable across runs."""
    order = sorted(
        range(model.k),
        key=lambda j: (-float(model.centroids[j].sum()), tuple(-model.centroids[j])),
    )
    remap = np.empty(model.k, dtype=int)
    for new, old in enumerate(order):
        remap[old] = new
    return replace(
        model,
        centroids=model.centroids[order],
        labels=remap[model.labels],
    )


def kmeans_fit(data, cfg: KMeansConfig) -> ClusterModel:
    """Best-of-n_restarts k-means under cfg.metric; deterministic given seed."""
    xs = np.asarray(data, dtype=float)
    if xs.ndim != 2:
        xs = xs.reshape(len(xs), -1)
    if len(xs) < cfg.k:
        raise TooFewPoints(f"{len(xs)} points for k={cfg.k}")
    canon = _canonical_row_order(xs)
    canon_rank = np.empty(len(xs), dtype=int)
    canon_rank[canon] = np.arange(len(xs))
    best: ClusterModel | None = None
    for restart in range(cfg.n_restarts):
        rng = np.random.default_rng((cfg.seed, restart))
        model = _single_run(xs, cfg, rng, canon, canon_rank)
        if best is None or model.inertia < best.inertia:
            best = model
    assert best is not None
    return _canonicalize(best)


def assign(model: ClusterModel, x, metric: MetricId, *, dtw_band: int | None = None) -> tuple[int, float]:
    """Nearest centroid under the metric; ties go to the lowest index."""
    dists = _distances(metric, np.asarray(x, dtype=float)[None, :], model.centroids, dtw_band)[0]
    mode = int(np.argmin(dists))
    return mode, float(dists[mode])


def silhouette(
    data,
    labels,
    metric: MetricId,
    *,
    dtw_band: int | None = None,
) -> float:
    """Mean silhouette score with exact O(N^2) pairwise distances.

    Per point: (b - a) / max(a, b), where a is the mean distance to the rest
    of its own cluster and b the smallest mean distance to another cluster.
    Singleton-cluster points score 0.
    """
    xs = np.asarray(data, dtype=float)
    ys = np.asarray(labels, dtype=int)
    clusters = np.unique(ys)
    if len(clusters) < 2:
        raise SingleCluster("silhouette needs at least 2 clusters")
    dmat = _distances(metric, xs, xs, dtw_band)
    members = {c: np.flatnonzero(ys == c) for c in clusters}
    scores = np.zeros(len(xs))
    for i in range(len(xs)):
        own = members[ys[i]]
        if len(own) == 1:
            continue
        a = (dmat[i, own].sum() - dmat[i, i]) / (len(own) - 1)
        b = min(float(dmat[i, members[c]].mean()) for c in clusters if c != ys[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def membership_from_distances(dists) -> np.ndarray:
    """Inverse-distance membership weights; exact zeros split mass uniformly."""
    d = np.asarray(dists, dtype=float)
    zeros = d == 0
    if np.any(zeros):
        out = np.zeros_like(d)
        out[zeros] = 1.0 / zeros.sum()
        return out
    inv = 1.0 / (d + MEMBERSHIP_EPSILON)
    return inv / inv.sum()


def membership_probabilities(
    model: ClusterModel, x, metric: MetricId, *, dtw_band: int | None = None
) -> np.ndarray:
    """Probability of x belonging to each cluster, by inverse distance."""
    dists = _distances(metric, np.asarray(x, dtype=float)[None, :], model.centroids, dtw_band)[0]
    return membership_from_distances(dists)


# Default model-selection grid: 5 k values x 4 metrics = 20 scenarios.
DEFAULT_GRID_K = (2, 3, 4, 5, 6)
DEFAULT_GRID_METRICS = (
    MetricId.L1,
    MetricId.L2,
    MetricId.CORRELATION,
    MetricId.JS,
)


@dataclass(frozen=True)
class GridScenario:
    k: int
    metric: MetricId
    silhouette: float
    inertia: float
    seconds: float


@dataclass(frozen=True)
class GridSearchResult:
    best: ClusterModel
    best_k: int
    best_metric: MetricId
    best_silhouette: float
    scenarios: tuple[GridScenario, ...]
    skipped: tuple[tuple[int, MetricId, str], ...] = field(default=())

    def report_rows(self) -> list[dict]:
        return [
            {
                "k": s.k,
                "metric": s.metric.value,
                "silhouette": s.silhouette,
                "inertia": s.inertia,
                "seconds": s.seconds,
            }
            for s in self.scenarios
        ]


def grid_report_csv(result: GridSearchResult) -> str:
    """Per-scenario report in the documented CSV shape."""
    lines = ["k,metric,silhouette,inertia,seconds"]
    for s in result.scenarios:
        lines.append(f"{s.k},{s.metric.value},{s.silhouette!r},{s.inertia!r},{s.seconds!r}")
    return "\n".join(lines) + "\n"


def grid_search(
    data,
    k_range: Iterable[int] = DEFAULT_GRID_K,
    metrics: Iterable[MetricId] = DEFAULT_GRID_METRICS,
    cfg: KMeansConfig | None = None,
) -> GridSearchResult:
    """Fit every (k, metric) scenario and keep the max-silhouette model.

    Ties break toward smaller k, then canonical metric order. Scenarios that
    fail (k > N, k below 2 for silhouette, ...) are recorded as skipped; if
    nothing succeeds the first underlying error is raised.
    """
    cfg = cfg if cfg is not None else KMeansConfig(k=2)
    xs = np.asarray(data, dtype=float)
    ks = sorted(set(int(k) for k in k_range))
    ms = sorted(set(metrics), key=metric_order)
    if not ks or not ms:
        raise EmptyGrid("no (k, metric) scenarios to run")
    scenarios: list[GridScenario] = []
    skipped: list[tuple[int, MetricId, str]] = []
    first_error: ParisError | None = None
    best_entry: tuple[float, int, int, ClusterModel] | None = None
    for k in ks:
        for metric in ms:
            started = time.perf_counter()
            try:
                model = kmeans_fit(xs, replace(cfg, k=k, metric=metric))
                score = silhouette(xs, model.labels, metric, dtw_band=cfg.dtw_band)
            except ParisError as exc:
                skipped.append((k, metric, f"{type(exc).__name__}: {exc}"))
                if first_error is None:
                    first_error = exc
                continue
            scenarios.append(
                GridScenario(
                    k=k,
                    metric=metric,
                    silhouette=score,
                    inertia=model.inertia,
                    seconds=time.perf_counter() - started,
                )
            )
            key = (-score, k, metric_order(metric))
            if best_entry is None or key < (-best_entry[0], best_entry[1], best_entry[2]):
                best_entry = (score, k, metric_order(metric), model)
    if best_entry is None:
        if first_error is not None:
            raise first_error
        raise EmptyGrid("every scenario was infeasible for this data")
    score, k, morder, model = best_entry
    return GridSearchResult(
        best=model,
        best_k=k,
        best_metric=list(MetricId)[morder],
        best_silhouette=score,
        scenarios=tuple(scenarios),
        skipped=tuple(skipped),
    )
