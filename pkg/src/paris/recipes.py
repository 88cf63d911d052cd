"""Good-sleep activity recipes: sub-cluster each behavior mode's daily
[Light, Moderate, Vigorous] summaries, keep the sub-clusters whose member
nights were predominantly Good Sleep, and take their centers as recipes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import KMeansConfig, grid_search
from .core import GOOD_SLEEP_EFFICIENCY, LevelSummary, Recipe, SleepQuality, SleepRecord
from .errors import EmptyGrid, SingleCluster, TooFewDays, TooFewPoints
from .metrics import MetricId


@dataclass(frozen=True)
class RecipeConfig:
    """Thresholds for recipe extraction.

    good_ratio_threshold is inclusive (a good:poor ratio of exactly 2 passes).
    min_cluster_days guards against single-day noise clusters; 1 disables the
    guard.
    """

    good_efficiency_threshold: float = GOOD_SLEEP_EFFICIENCY
    good_ratio_threshold: float = 2.0
    min_cluster_days: int = 3
    subcluster_k_range: tuple[int, ...] = (2, 3, 4, 5)

    def __post_init__(self) -> None:
        if not 0 < self.good_efficiency_threshold < 1:
            raise ValueError("good_efficiency_threshold must be in (0, 1)")
        if self.good_ratio_threshold <= 0:
            raise ValueError("good_ratio_threshold must be positive")
        if self.min_cluster_days < 1:
            raise ValueError("min_cluster_days must be at least 1")

    def to_dict(self) -> dict:
        return {
            "good_efficiency_threshold": self.good_efficiency_threshold,
            "good_ratio_threshold": self.good_ratio_threshold,
            "min_cluster_days": self.min_cluster_days,
            "subcluster_k_range": list(self.subcluster_k_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecipeConfig":
        return cls(
            good_efficiency_threshold=float(
                d.get("good_efficiency_threshold", GOOD_SLEEP_EFFICIENCY)
            ),
            good_ratio_threshold=float(d.get("good_ratio_threshold", 2.0)),
            min_cluster_days=int(d.get("min_cluster_days", 3)),
            subcluster_k_range=tuple(d.get("subcluster_k_range", (2, 3, 4, 5))),
        )


def tag_sleep_quality(record: SleepRecord, cfg: RecipeConfig) -> SleepQuality:
    """Good iff efficiency is strictly above the threshold."""
    if record.efficiency > cfg.good_efficiency_threshold:
        return SleepQuality.GOOD
    return SleepQuality.POOR


def good_cluster_test(good_count: int, poor_count: int, cfg: RecipeConfig) -> bool:
    """Does a sub-cluster qualify as a Good Sleep cluster?

    Requires at least min_cluster_days members, then good:poor >= the ratio
    threshold. A cluster with zero poor nights passes whenever it has at
    least one good night (the ratio is unbounded).
    """
    if good_count < 0 or poor_count < 0:
        raise ValueError("counts must be nonnegative")
    if good_count + poor_count < cfg.min_cluster_days:
        return False
    if poor_count == 0:
        return good_count >= 1
    return good_count / poor_count >= cfg.good_ratio_threshold


def extract_recipes(
    summaries: Sequence[LevelSummary],
    sleep_tags: Sequence[SleepQuality],
    cfg: RecipeConfig,
    seed: int = 0,
) -> list[Recipe]:
    """Sub-cluster one mode's daily summaries (k-means, L2) and return a
    Recipe for every sub-cluster passing the good-cluster test.

    k is chosen from cfg.subcluster_k_range by max silhouette; when no k in
    the range is feasible for the number of days, all days form one cluster.
    """
    if len(summaries) < 2:
        raise TooFewDays(f"need at least 2 days, got {len(summaries)}")
    if len(summaries) != len(sleep_tags):
        raise ValueError("summaries and sleep_tags must align")
    points = np.array([s.minutes for s in summaries], dtype=float)
    base = KMeansConfig(k=2, metric=MetricId.L2, seed=seed)
    try:
        result = grid_search(points, cfg.subcluster_k_range, [MetricId.L2], base)
        labels = result.best.labels
        k = result.best_k
    except (EmptyGrid, TooFewPoints, SingleCluster):
        # No k in range is feasible for this few days: one cluster of all.
        labels = np.zeros(len(points), dtype=int)
        k = 1
    recipes: list[Recipe] = []
    for cluster in range(k):
        members = np.flatnonzero(labels == cluster)
        if len(members) == 0:
            continue
        good = sum(1 for i in members if sleep_tags[i] is SleepQuality.GOOD)
        poor = len(members) - good
        if not good_cluster_test(good, poor, cfg):
            continue
        center = points[members].mean(axis=0)
        recipes.append(
            Recipe(
                center=tuple(float(v) for v in center),  # type: ignore[arg-type]
                good_count=good,
                poor_count=poor,
                member_days=tuple(sorted(summaries[i].day_index for i in members)),
            )
        )
    return recipes
