"""Core domain types: actigraphy days, level summaries, sleep records,
behavior-mode models, recipe books, and recommendations.

All types are immutable after construction and carry explicit JSON codecs
(`to_dict` / `from_dict`) so that model files and the HTTP service share one
wire format. Round-trip is exact: `from_dict(to_dict(x)) == x` on all fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

MINUTES_PER_DAY = 1440
EPOCHS_PER_DAY = 2880
EPOCH_MINUTES = 0.5

# A night counts as Good Sleep only when efficiency is strictly above this.
GOOD_SLEEP_EFFICIENCY = 0.90

# day_of_week encoding: 0=Monday .. 6=Sunday
WEEKEND_DAYS = frozenset({5, 6})


class ActivityLevel(str, Enum):
    """Movement intensity of one minute. Recipe math uses only the last three,
    always in the canonical order [Light, Moderate, Vigorous]."""

    SEDENTARY = "Sedentary"
    LIGHT = "Light"
    MODERATE = "Moderate"
    VIGOROUS = "Vigorous"


# Canonical order of every recipe / deficit / summary 3-vector.
RECIPE_LEVELS = (ActivityLevel.LIGHT, ActivityLevel.MODERATE, ActivityLevel.VIGOROUS)


class IntervalType(str, Enum):
    """Per-epoch annotation from the device software."""

    ACTIVE = "ACTIVE"
    REST = "REST"
    REST_S = "REST-S"
    EXCLUDED = "EXCLUDED"


class SleepQuality(str, Enum):
    GOOD = "Good"
    POOR = "Poor"


class SeriesDomain(str, Enum):
    """Space in which a behavior-mode model was fitted."""

    TIME = "Time"
    FREQUENCY = "Frequency"


@dataclass(frozen=True, slots=True)
class EpochRecord:
    """One 30-second device epoch."""

    subject_id: str
    timestamp: float  # minutes since cohort epoch, 0.5-minute resolution
    activity_count: int
    interval_type: IntervalType
    wake: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "timestamp": self.timestamp,
            "activity_count": self.activity_count,
            "interval_type": self.interval_type.value,
            "wake": self.wake,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "EpochRecord":
        return cls(
            subject_id=d["subject_id"],
            timestamp=float(d["timestamp"]),
            activity_count=int(d["activity_count"]),
            interval_type=IntervalType(d["interval_type"]),
            wake=int(d["wake"]),
        )


@dataclass(frozen=True)
class ActigraphyDay:
    """One subject-day of minute-level counts plus interval/wake annotations."""

    subject_id: str
    day_index: int
    day_of_week: int  # 0=Monday .. 6=Sunday
    counts: tuple[float, ...]
    interval: tuple[IntervalType, ...]
    wake: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "day_index": self.day_index,
            "day_of_week": self.day_of_week,
            "counts": list(self.counts),
            "interval": [iv.value for iv in self.interval],
            "wake": list(self.wake),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ActigraphyDay":
        return cls(
            subject_id=d["subject_id"],
            day_index=int(d["day_index"]),
            day_of_week=int(d["day_of_week"]),
            counts=tuple(float(v) for v in d["counts"]),
            interval=tuple(IntervalType(v) for v in d["interval"]),
            wake=tuple(int(v) for v in d["wake"]),
        )


@dataclass(frozen=True)
class LevelSummary:
    """Aggregated minutes per activity level over a window, in canonical
    [Light, Moderate, Vigorous] order. Sedentary is excluded."""

    subject_id: str
    day_index: int
    window_start: int  # minute of day, 0..1439
    window_end: int  # minute of day, 1..1440
    minutes: tuple[float, float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "day_index": self.day_index,
            "window_start": self.window_start,
            "window_end": self.window_end,
            "minutes": list(self.minutes),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "LevelSummary":
        minutes = tuple(float(v) for v in d["minutes"])
        if len(minutes) != 3:
            raise ValueError("minutes must be a 3-vector")
        return cls(
            subject_id=d["subject_id"],
            day_index=int(d["day_index"]),
            window_start=int(d["window_start"]),
            window_end=int(d["window_end"]),
            minutes=minutes,  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class SleepRecord:
    """Per-night sleep accounting and the Good/Poor tag."""

    subject_id: str
    day_index: int
    minutes_in_bed: float
    minutes_asleep: float
    minutes_awake_in_bed: float
    efficiency: float
    quality: SleepQuality

    @classmethod
    def from_bed_minutes(
        cls,
        subject_id: str,
        day_index: int,
        minutes_in_bed: float,
        minutes_awake_in_bed: float,
    ) -> "SleepRecord":
        """Build a record from in-bed and awake-in-bed totals.

        asleep = in_bed - awake_in_bed; efficiency = asleep / in_bed.
        A degenerate night (0 minutes in bed) has efficiency 0 and is Poor.
        """
        asleep = minutes_in_bed - minutes_awake_in_bed
        if minutes_in_bed > 0:
            efficiency = asleep / minutes_in_bed
        else:
            efficiency = 0.0
        quality = (
            SleepQuality.GOOD
            if efficiency > GOOD_SLEEP_EFFICIENCY
            else SleepQuality.POOR
        )
        return cls(
            subject_id=subject_id,
            day_index=day_index,
            minutes_in_bed=minutes_in_bed,
            minutes_asleep=asleep,
            minutes_awake_in_bed=minutes_awake_in_bed,
            efficiency=efficiency,
            quality=quality,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "day_index": self.day_index,
            "minutes_in_bed": self.minutes_in_bed,
            "minutes_asleep": self.minutes_asleep,
            "minutes_awake_in_bed": self.minutes_awake_in_bed,
            "efficiency": self.efficiency,
            "quality": self.quality.value,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SleepRecord":
        return cls(
            subject_id=d["subject_id"],
            day_index=int(d["day_index"]),
            minutes_in_bed=float(d["minutes_in_bed"]),
            minutes_asleep=float(d["minutes_asleep"]),
            minutes_awake_in_bed=float(d["minutes_awake_in_bed"]),
            efficiency=float(d["efficiency"]),
            quality=SleepQuality(d["quality"]),
        )


@dataclass(frozen=True)
class SubjectMetadata:
    """Health and lifestyle profile. Missing fields are None; extensions hold
    extra named numeric fields in insertion order."""

    subject_id: str
    age: float | None = None
    gender: str | None = None
    bmi: float | None = None
    resting_hr: float | None = None
    extensions: tuple[tuple[str, float], ...] = ()

    def get_field(self, name: str) -> float | str | None:
        """Look up a metadata field by name (core field or extension).

        Raises KeyError if the name is not a known field at all.
        """
        if name in ("age", "gender", "bmi", "resting_hr"):
            return getattr(self, name)
        for key, value in self.extensions:
            if key == name:
                return value
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "age": self.age,
            "gender": self.gender,
            "bmi": self.bmi,
            "resting_hr": self.resting_hr,
            "extensions": [[k, v] for k, v in self.extensions],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SubjectMetadata":
        return cls(
            subject_id=d["subject_id"],
            age=None if d.get("age") is None else float(d["age"]),
            gender=d.get("gender"),
            bmi=None if d.get("bmi") is None else float(d["bmi"]),
            resting_hr=None if d.get("resting_hr") is None else float(d["resting_hr"]),
            extensions=tuple((k, float(v)) for k, v in d.get("extensions", [])),
        )


@dataclass(frozen=True)
class BehaviorModeModel:
    """Fitted per-subject behavior modes: centroids over daily series in the
    time or frequency domain, plus the day-to-mode assignment."""

    subject_id: str
    domain: SeriesDomain
    metric: str  # MetricId wire name, e.g. "l2"
    k: int
    centroids: tuple[tuple[float, ...], ...]
    day_assignments: Mapping[int, int]  # day_index -> mode index
    silhouette: float
    fit_config: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "domain": self.domain.value,
            "metric": self.metric,
            "k": self.k,
            "centroids": [list(c) for c in self.centroids],
            "day_assignments": {str(d): m for d, m in sorted(self.day_assignments.items())},
            "silhouette": self.silhouette,
            "fit_config": dict(self.fit_config),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "BehaviorModeModel":
        return cls(
            subject_id=d["subject_id"],
            domain=SeriesDomain(d["domain"]),
            metric=d["metric"],
            k=int(d["k"]),
            centroids=tuple(tuple(float(v) for v in c) for c in d["centroids"]),
            day_assignments={int(k): int(v) for k, v in d["day_assignments"].items()},
            silhouette=float(d["silhouette"]),
            fit_config=dict(d.get("fit_config", {})),
        )


@dataclass(frozen=True)
class Recipe:
    """One good-sleep activity recipe: a [Light, Moderate, Vigorous] minutes
    center plus the provenance of the sub-cluster it came from."""

    center: tuple[float, float, float]
    good_count: int
    poor_count: int
    member_days: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": list(self.center),
            "good": self.good_count,
            "poor": self.poor_count,
            "days": list(self.member_days),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Recipe":
        center = tuple(float(v) for v in d["center"])
        return cls(
            center=center,  # type: ignore[arg-type]
            good_count=int(d["good"]),
            poor_count=int(d["poor"]),
            member_days=tuple(int(v) for v in d["days"]),
        )


@dataclass(frozen=True)
class RecipeBook:
    """Per behavior mode, the recipes that historically led to good sleep."""

    subject_id: str
    modes: tuple[tuple[Recipe, ...], ...]  # indexed by mode

    def recipes_for_mode(self, mode: int) -> tuple[Recipe, ...]:
        return self.modes[mode]

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "modes": [[r.to_dict() for r in mode] for mode in self.modes],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RecipeBook":
        return cls(
            subject_id=d["subject_id"],
            modes=tuple(
                tuple(Recipe.from_dict(r) for r in mode) for mode in d["modes"]
            ),
        )


@dataclass(frozen=True)
class RecommendationItem:
    recipe_ref: int  # index into the mode's recipe list
    membership_probability: float
    deficit: tuple[float, float, float]
    constraint_flags: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "recipe_ref": self.recipe_ref,
            "membership_probability": self.membership_probability,
            "deficit": list(self.deficit),
            "constraint_flags": list(self.constraint_flags),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RecommendationItem":
        deficit = tuple(float(v) for v in d["deficit"])
        return cls(
            recipe_ref=int(d["recipe_ref"]),
            membership_probability=float(d["membership_probability"]),
            deficit=deficit,  # type: ignore[arg-type]
            constraint_flags=tuple(d.get("constraint_flags", [])),
        )


@dataclass(frozen=True)
class Recommendation:
    mode: int
    ordered_items: tuple[RecommendationItem, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "ordered_items": [item.to_dict() for item in self.ordered_items],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Recommendation":
        return cls(
            mode=int(d["mode"]),
            ordered_items=tuple(
                RecommendationItem.from_dict(i) for i in d["ordered_items"]
            ),
        )


def validate_day(day: ActigraphyDay) -> list[str]:
    """Check ActigraphyDay invariants; return one message per violation.

    Reports, never raises: an empty list means the day is well-formed.
    """
    violations: list[str] = []
    if day.day_index < 0:
        violations.append(f"day_index {day.day_index} < 0")
    if not 0 <= day.day_of_week <= 6:
        violations.append(f"day_of_week {day.day_of_week} outside 0..6")
    for name, vec in (("counts", day.counts), ("interval", day.interval), ("wake", day.wake)):
        if len(vec) != MINUTES_PER_DAY:
            violations.append(f"{name}.length: expected {MINUTES_PER_DAY}, got {len(vec)}")
    for i, value in enumerate(day.counts):
        if not value >= 0:
            violations.append(f"counts[{i}] < 0")
    for i, value in enumerate(day.wake):
        if value not in (0, 1):
            violations.append(f"wake[{i}] not in {{0,1}}")
    return violations


def canonical_json(obj: Any) -> str:
    """Serialize with a fixed key order and separators so identical inputs
    produce byte-identical documents."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)
