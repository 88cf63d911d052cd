"""Per-subject behavior-mode detection over daily activity series, in the
time domain (1440-minute vectors) or frequency domain (FFT features), plus
day-of-week purity reporting and partial-day mode assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cluster import GridSearchResult, KMeansConfig, grid_search
from .core import WEEKEND_DAYS, ActigraphyDay, BehaviorModeModel, SeriesDomain
from .errors import (
    BadWindow,
    FrequencyDomainUnsupported,
    LengthMismatch,
    MissingAssignments,
)
from .metrics import MetricId, fft_features, pairwise_distances

DEFAULT_K_RANGE = (2, 3, 4, 5, 6)
DEFAULT_METRICS = (MetricId.L2, MetricId.JS)
DEFAULT_FFT_COMPONENTS = 25


def fit_behavior_modes(
    days: Sequence[ActigraphyDay],
    domain: SeriesDomain = SeriesDomain.TIME,
    k_range: Iterable[int] = DEFAULT_K_RANGE,
    metrics: Iterable[MetricId] = DEFAULT_METRICS,
    cfg: KMeansConfig | None = None,
    fft_components: int = DEFAULT_FFT_COMPONENTS,
) -> BehaviorModeModel:
    """Cluster one subject's days into behavior modes.

    Model selection runs the (k, metric) grid and keeps the max-silhouette
    scenario. Time domain clusters the raw minute counts; frequency domain
    clusters FFT features of the same series.
    """
    if not days:
        raise MissingAssignments("no days to fit")
    subject_id = days[0].subject_id
    cfg = cfg or KMeansConfig(k=2)
    if domain is SeriesDomain.TIME:
        data = np.array([day.counts for day in days], dtype=float)
    else:
        data = np.array(
            [fft_features(day.counts, fft_components) for day in days], dtype=float
        )
    result: GridSearchResult = grid_search(data, k_range, metrics, cfg)
    assignments = {
        day.day_index: int(label) for day, label in zip(days, result.best.labels)
    }
    fit_config = {
        "domain": domain.value,
        "k_range": sorted(set(int(k) for k in k_range)),
        "metrics": [m.value for m in metrics],
        "n_restarts": cfg.n_restarts,
        "max_iters": cfg.max_iters,
        "rel_tol": cfg.rel_tol,
        "seed": cfg.seed,
        "dtw_band": cfg.dtw_band,
        "fft_components": fft_components if domain is SeriesDomain.FREQUENCY else None,
    }
    return BehaviorModeModel(
        subject_id=subject_id,
        domain=domain,
        metric=result.best_metric.value,
        k=result.best_k,
        centroids=tuple(tuple(float(v) for v in c) for c in result.best.centroids),
        day_assignments=assignments,
        silhouette=result.best_silhouette,
        fit_config=fit_config,
    )


def fit_cohort_modes(
    days_by_subject: Mapping[str, Sequence[ActigraphyDay]],
    domain: SeriesDomain = SeriesDomain.TIME,
    k_range: Iterable[int] = DEFAULT_K_RANGE,
    metrics: Iterable[MetricId] = DEFAULT_METRICS,
    cfg: KMeansConfig | None = None,
    fft_components: int = DEFAULT_FFT_COMPONENTS,
) -> dict[str, BehaviorModeModel]:
    """Cohort-scope alternative to the per-subject fit: one clustering over
    every subject's days, so all subjects share centroids and mode indices."""
    ordered = sorted(days_by_subject)
    stacked = [day for sid in ordered for day in days_by_subject[sid]]
    if not stacked:
        raise MissingAssignments("no days to fit")
    cfg = cfg or KMeansConfig(k=2)
    if domain is SeriesDomain.TIME:
        data = np.array([day.counts for day in stacked], dtype=float)
    else:
        data = np.array(
            [fft_features(day.counts, fft_components) for day in stacked], dtype=float
        )
    result = grid_search(data, k_range, metrics, cfg)
    centroids = tuple(tuple(float(v) for v in c) for c in result.best.centroids)
    fit_config = {
        "scope": "cohort",
        "domain": domain.value,
        "k_range": sorted(set(int(k) for k in k_range)),
        "metrics": [m.value for m in metrics],
        "n_restarts": cfg.n_restarts,
        "max_iters": cfg.max_iters,
        "rel_tol": cfg.rel_tol,
        "seed": cfg.seed,
        "dtw_band": cfg.dtw_band,
        "fft_components": fft_components if domain is SeriesDomain.FREQUENCY else None,
    }
    models: dict[str, BehaviorModeModel] = {}
    position = 0
    for sid in ordered:
        assignments = {}
        for day in days_by_subject[sid]:
            assignments[day.day_index] = int(result.best.labels[position])
            position += 1
        models[sid] = BehaviorModeModel(
            subject_id=sid,
            domain=domain,
            metric=result.best_metric.value,
            k=result.best_k,
            centroids=centroids,
            day_assignments=assignments,
            silhouette=result.best_silhouette,
            fit_config=fit_config,
        )
    return models


@dataclass(frozen=True)
class ModePurity:
    mode: int
    day_counts: tuple[int, int, int, int, int, int, int]  # Monday..Sunday
    weekday_fraction: float
    majority_day_type: str  # "Weekday" or "Weekend"
    purity: float


@dataclass(frozen=True)
class PurityReport:
    modes: tuple[ModePurity, ...]

    def weighted_purity(self) -> float:
        """Cohesion over the whole subject: purity weighted by mode size."""
        total = sum(sum(m.day_counts) for m in self.modes)
        if total == 0:
            return 0.0
        return sum(sum(m.day_counts) * m.purity for m in self.modes) / total


def day_of_week_purity(
    model: BehaviorModeModel, day_of_week: Mapping[int, int]
) -> PurityReport:
    """Day-type composition per mode. Weekend is Saturday/Sunday."""
    if not model.day_assignments:
        raise MissingAssignments("model has no day assignments")
    missing = [d for d in model.day_assignments if d not in day_of_week]
    if missing:
        raise MissingAssignments(f"no day_of_week for days {missing}")
    reports = []
    for mode in range(model.k):
        counts = [0] * 7
        for day_index, assigned in model.day_assignments.items():
            if assigned == mode:
                counts[day_of_week[day_index]] += 1
        total = sum(counts)
        weekday = sum(c for dow, c in enumerate(counts) if dow not in WEEKEND_DAYS)
        weekday_fraction = weekday / total if total else 0.0
        purity = max(weekday_fraction, 1.0 - weekday_fraction) if total else 1.0
        reports.append(
            ModePurity(
                mode=mode,
                day_counts=tuple(counts),  # type: ignore[arg-type]
                weekday_fraction=weekday_fraction,
                majority_day_type="Weekday" if weekday_fraction >= 0.5 else "Weekend",
                purity=purity,
            )
        )
    return PurityReport(modes=tuple(reports))


def assign_mode_partial(
    model: BehaviorModeModel, x_partial, t_m: int
) -> tuple[int, float]:
    """Assign a partial day to a mode by cropping each centroid to the first
    t_m minutes and comparing under the model's fitted metric.

    Only defined for time-domain models; frequency centroids cannot be
    cropped to a time prefix.
    """
    if model.domain is not SeriesDomain.TIME:
        raise FrequencyDomainUnsupported("partial assignment needs a time-domain model")
    if not 1 <= t_m <= len(model.centroids[0]):
        raise BadWindow(f"t_m {t_m} outside 1..{len(model.centroids[0])}")
    x = np.asarray(x_partial, dtype=float).ravel()
    if len(x) != t_m:
        raise LengthMismatch(f"partial series has {len(x)} values, expected {t_m}")
    metric = MetricId(model.metric)
    cropped = np.array([c[:t_m] for c in model.centroids], dtype=float)
    band = model.fit_config.get("dtw_band") if model.fit_config else None
    dists = pairwise_distances(metric, x[None, :], cropped, dtw_band=band)[0]
    mode = int(np.argmin(dists))
    return mode, float(dists[mode])
