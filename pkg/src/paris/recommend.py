"""Continuous activity recommendation: assign the current (partial) day to a
behavior mode, rank that mode's recipes by membership probability of the
activity achieved so far, attach per-level deficits, and reorder under the
subject's lifestyle constraint rules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

import numpy as np

from .cluster import membership_from_distances
from .core import (
    ActivityLevel,
    BehaviorModeModel,
    Recommendation,
    RecommendationItem,
    Recipe,
    RecipeBook,
    SleepQuality,
    SubjectMetadata,
)
from .errors import BadWindow, EmptyCohort, LengthMismatch, NoRecipesForMode, UnknownMetadataField
from .metrics import MetricId, pairwise_distances
from .modes import assign_mode_partial

# Vigorous is the last component of every canonical 3-vector.
_VIGOROUS = 2

ACTION_DEMOTE = "demote_if_vigorous_deficit_above"
ACTION_CAP = "cap_vigorous_deficit"
ACTION_EXCLUDE = "exclude"

_COMPARATORS = {
    "<": lambda v, t: v < t,
    "<=": lambda v, t: v <= t,
    ">": lambda v, t: v > t,
    ">=": lambda v, t: v >= t,
    "=": lambda v, t: v == t,
}


@dataclass(frozen=True)
class ConstraintRule:
    """One metadata-gated adjustment of the recommendation list.

    When the subject's `field` satisfies `comparator threshold`, the action
    applies to items by their vigorous deficit: demote moves items with
    vigorous deficit above `minutes` behind the rest, cap clamps the vigorous
    deficit to `minutes`, exclude drops such items entirely.
    """

    id: str
    field: str
    comparator: str
    threshold: float
    action: str
    minutes: float = 0.0

    def __post_init__(self) -> None:
        if self.comparator not in _COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if self.action not in (ACTION_DEMOTE, ACTION_CAP, ACTION_EXCLUDE):
            raise ValueError(f"unknown action {self.action!r}")
        if self.minutes < 0:
            raise ValueError("minutes must be nonnegative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "field": self.field,
            "comparator": self.comparator,
            "threshold": self.threshold,
            "action": {"type": self.action, "minutes": self.minutes},
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ConstraintRule":
        action = d["action"]
        return cls(
            id=d["id"],
            field=d["field"],
            comparator=d["comparator"],
            threshold=float(d["threshold"]),
            action=action["type"],
            minutes=float(action.get("minutes", 0.0)),
        )


def default_rules() -> list[ConstraintRule]:
    """Shipped defaults encoding common-sense vigorous-activity caution for
    elevated resting heart rate, older age, and high BMI. All configurable."""
    return [
        ConstraintRule(
            id="resting_hr_demote_vigorous",
            field="resting_hr",
            comparator=">=",
            threshold=85,
            action=ACTION_DEMOTE,
            minutes=15,
        ),
        ConstraintRule(
            id="age_cap_vigorous",
            field="age",
            comparator=">=",
            threshold=65,
            action=ACTION_CAP,
            minutes=10,
        ),
        ConstraintRule(
            id="bmi_demote_vigorous",
            field="bmi",
            comparator=">=",
            threshold=35,
            action=ACTION_DEMOTE,
            minutes=20,
        ),
    ]


def compute_deficit(recipe_center: Sequence[float], achieved: Sequence[float]) -> tuple[float, float, float]:
    """Minutes still needed per level to reach the recipe, clamped at zero."""
    return tuple(max(0.0, float(r) - float(a)) for r, a in zip(recipe_center, achieved))  # type: ignore[return-value]


def _rule_triggers(rule: ConstraintRule, meta: SubjectMetadata) -> bool:
    try:
        value = meta.get_field(rule.field)
    except KeyError:
        raise UnknownMetadataField(rule.field) from None
    if value is None:
        return False
    try:
        numeric = float(value)
    except (TypeError, ValueError):
        return False
    return _COMPARATORS[rule.comparator](numeric, rule.threshold)


def apply_constraints(
    items: Sequence[RecommendationItem],
    meta: SubjectMetadata,
    rules: Sequence[ConstraintRule],
) -> list[RecommendationItem]:
    """Apply rules in order; each is a stable permutation plus flag/cap edits.

    Returns the triggered rule ids on the items they touched. Only the
    exclude action ever removes an item.
    """
    out = list(items)
    for rule in rules:
        if not _rule_triggers(rule, meta):
            continue
        if rule.action == ACTION_EXCLUDE:
            out = [it for it in out if it.deficit[_VIGOROUS] <= rule.minutes]
        elif rule.action == ACTION_DEMOTE:
            keep = [it for it in out if it.deficit[_VIGOROUS] <= rule.minutes]
            moved = [
                replace(it, constraint_flags=it.constraint_flags + (rule.id,))
                for it in out
                if it.deficit[_VIGOROUS] > rule.minutes
            ]
            out = keep + moved
        elif rule.action == ACTION_CAP:
            capped = []
            for it in out:
                if it.deficit[_VIGOROUS] > rule.minutes:
                    deficit = it.deficit[:_VIGOROUS] + (float(rule.minutes),)
                    capped.append(
                        replace(
                            it,
                            deficit=deficit,
                            constraint_flags=it.constraint_flags + (rule.id,),
                        )
                    )
                else:
                    capped.append(it)
            out = capped
    return out


def achieved_levels(
    labels_partial: Sequence[ActivityLevel], wake_onset: int, t_m: int
) -> tuple[float, float, float]:
    """Minutes of Light/Moderate/Vigorous activity in [wake_onset, t_m)."""
    totals = {ActivityLevel.LIGHT: 0.0, ActivityLevel.MODERATE: 0.0, ActivityLevel.VIGOROUS: 0.0}
    for m in range(wake_onset, t_m):
        level = labels_partial[m]
        if level in totals:
            totals[level] += 1.0
    return (
        totals[ActivityLevel.LIGHT],
        totals[ActivityLevel.MODERATE],
        totals[ActivityLevel.VIGOROUS],
    )


def recommend_with_explain(
    mode_model: BehaviorModeModel,
    book: RecipeBook,
    x_partial,
    labels_partial: Sequence[ActivityLevel],
    t_m: int,
    meta: SubjectMetadata,
    rules: Sequence[ConstraintRule],
    wake_onset: int = 0,
) -> tuple[Recommendation, dict[str, Any]]:
    """Full recommendation plus an explain block (distances, probabilities,
    triggered rules) for the CLI and the HTTP service."""
    if not 1 <= t_m <= 1440:
        raise BadWindow(f"t_m {t_m} outside 1..1440")
    if not 0 <= wake_onset < t_m:
        raise BadWindow(f"wake_onset {wake_onset} outside 0..{t_m - 1}")
    if len(labels_partial) != t_m:
        raise LengthMismatch(f"{len(labels_partial)} labels for t_m {t_m}")
    mode, mode_distance = assign_mode_partial(mode_model, x_partial, t_m)
    if mode >= len(book.modes) or not book.modes[mode]:
        raise NoRecipesForMode(f"mode {mode} has no recipes")
    recipes = book.modes[mode]
    achieved = achieved_levels(labels_partial, wake_onset, t_m)
    centers = np.array([r.center for r in recipes], dtype=float)
    dists = pairwise_distances(MetricId.L2, np.asarray(achieved, dtype=float)[None, :], centers)[0]
    probs = membership_from_distances(dists)
    order = sorted(range(len(recipes)), key=lambda i: (-probs[i], i))
    items = [
        RecommendationItem(
            recipe_ref=i,
            membership_probability=float(probs[i]),
            deficit=compute_deficit(recipes[i].center, achieved),
        )
        for i in order
    ]
    final_items = apply_constraints(items, meta, rules)
    triggered = sorted(
        {flag for item in final_items for flag in item.constraint_flags}
    )
    recommendation = Recommendation(mode=mode, ordered_items=tuple(final_items))
    explain = {
        "t_m": t_m,
        "wake_onset": wake_onset,
        "mode_distance": mode_distance,
        "achieved": list(achieved),
        "recipe_distances": [float(d) for d in dists],
        "membership_probabilities": [float(p) for p in probs],
        "triggered_rules": triggered,
    }
    return recommendation, explain


def recommend(
    mode_model: BehaviorModeModel,
    book: RecipeBook,
    x_partial,
    labels_partial: Sequence[ActivityLevel],
    t_m: int,
    meta: SubjectMetadata,
    rules: Sequence[ConstraintRule],
    wake_onset: int = 0,
) -> Recommendation:
    rec, _ = recommend_with_explain(
        mode_model, book, x_partial, labels_partial, t_m, meta, rules, wake_onset
    )
    return rec


def recommendation_document(
    rec: Recommendation, explain: dict[str, Any] | None = None
) -> dict[str, Any]:
    """The wire document for a recommendation; the CLI and the HTTP service
    both serialize exactly this, so their outputs are byte-identical."""
    doc = rec.to_dict()
    if explain is not None:
        doc["explain"] = explain
    return doc


@dataclass(frozen=True)
class CohortDay:
    """One historical day: full-day level summary plus that night's tag."""

    subject_id: str
    day_index: int
    minutes: tuple[float, float, float]
    quality: SleepQuality


@dataclass(frozen=True)
class RetrospectiveResult:
    success_rate: float
    neighbors: tuple[CohortDay, ...]
    truncated: bool  # true when n_neighbors exceeded the cohort size


def retrospective_evaluate(
    cohort: Sequence[CohortDay], target_plan: Sequence[float], n_neighbors: int
) -> RetrospectiveResult:
    """Judge a plan by the sleep outcomes of the closest historical days.

    Finds the n_neighbors cohort days with level summaries closest (L2) to
    the plan; the success rate is the fraction tagged Good.
    """
    if not cohort:
        raise EmptyCohort("no historical days")
    if n_neighbors < 1:
        raise ValueError("n_neighbors must be at least 1")
    truncated = n_neighbors > len(cohort)
    n = min(n_neighbors, len(cohort))
    plan = np.asarray(target_plan, dtype=float)
    points = np.array([day.minutes for day in cohort], dtype=float)
    dists = pairwise_distances(MetricId.L2, plan[None, :], points)[0]
    ranked = sorted(
        range(len(cohort)),
        key=lambda i: (dists[i], cohort[i].subject_id, cohort[i].day_index),
    )
    chosen = [cohort[i] for i in ranked[:n]]
    good = sum(1 for day in chosen if day.quality is SleepQuality.GOOD)
    return RetrospectiveResult(
        success_rate=good / n, neighbors=tuple(chosen), truncated=truncated
    )
