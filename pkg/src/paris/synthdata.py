"""Deterministic synthetic-cohort generator with planted ground truth.

Each subject's week is drawn from per-mode day templates (e.g. a weekday
"commute" shape and a weekend "late rise" shape). A day follows one of the
mode's planted recipes, or an off-recipe plan, by scattering activity
minutes at cut-point band midpoints across the mode's activity window; the
night is a REST/REST-S block engineered to reproduce the planted sleep
efficiency to within one epoch.

Output is the exact epoch/metadata CSV format the ingest module reads, plus
a ground-truth document with per-day mode labels, plans, and sleep quality.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import core
from .core import SleepQuality
from .errors import SpecInvalid
from .ingest import DEFAULT_CUT_POINTS, CutPoints

OFF_PLAN = -1  # plan index meaning "follow no recipe"

# Salt for per-subject metadata RNG streams (distinct from day streams).
_META_STREAM = 97


@dataclass(frozen=True)
class ModeTemplate:
    """Day template for one behavior mode.

    base_curve is the sub-light background (1440 counts/minute values);
    activity_window is the half-open minute range where planted activity
    minutes are scattered; weekday_set holds the day-of-week values
    (0=Monday .. 6=Sunday) generated from this template.
    """

    name: str
    base_curve: tuple[float, ...]
    weekday_set: frozenset[int]
    activity_window: tuple[int, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "base_curve": list(self.base_curve),
            "weekday_set": sorted(self.weekday_set),
            "activity_window": list(self.activity_window),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModeTemplate":
        return cls(
            name=d["name"],
            base_curve=tuple(float(v) for v in d["base_curve"]),
            weekday_set=frozenset(int(v) for v in d["weekday_set"]),
            activity_window=(int(d["activity_window"][0]), int(d["activity_window"][1])),
        )


@dataclass(frozen=True)
class GoodSleepRule:
    """Planted link between daily activity and sleep quality: a day whose
    realized level totals land within L-infinity `tolerance` of any planted
    recipe gets an efficiency from the good range, otherwise the poor one."""

    tolerance: float = 25.0
    good_efficiency: tuple[float, float] = (0.92, 0.99)
    poor_efficiency: tuple[float, float] = (0.70, 0.89)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tolerance": self.tolerance,
            "good_efficiency": list(self.good_efficiency),
            "poor_efficiency": list(self.poor_efficiency),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoodSleepRule":
        return cls(
            tolerance=float(d.get("tolerance", 25.0)),
            good_efficiency=tuple(d.get("good_efficiency", (0.92, 0.99))),  # type: ignore[arg-type]
            poor_efficiency=tuple(d.get("poor_efficiency", (0.70, 0.89))),  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class CohortSpec:
    n_subjects: int
    days_per_subject: int = 7
    mode_templates: tuple[ModeTemplate, ...] = ()
    recipe_targets: tuple[tuple[tuple[float, float, float], ...], ...] = ()
    plan_pattern: tuple[tuple[int, ...], ...] = ()
    off_plan: tuple[float, float, float] = (60.0, 0.0, 0.0)
    noise_sd: float = 6.0
    good_sleep_rule: GoodSleepRule = field(default_factory=GoodSleepRule)
    seed: int = 0
    cut_points: CutPoints = field(default_factory=lambda: DEFAULT_CUT_POINTS)
    bed_window: tuple[int, int] = (960, 1440)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_subjects": self.n_subjects,
            "days_per_subject": self.days_per_subject,
            "mode_templates": [t.to_dict() for t in self.mode_templates],
            "recipe_targets": [[list(r) for r in mode] for mode in self.recipe_targets],
            "plan_pattern": [list(p) for p in self.plan_pattern],
            "off_plan": list(self.off_plan),
            "noise_sd": self.noise_sd,
            "good_sleep_rule": self.good_sleep_rule.to_dict(),
            "seed": self.seed,
            "cut_points": self.cut_points.to_dict(),
            "bed_window": list(self.bed_window),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CohortSpec":
        if "preset" in d:
            preset = dict(d)
            name = preset.pop("preset")
            if name != "default":
                raise SpecInvalid(f"unknown preset {name!r}")
            base = default_cohort_spec(
                n_subjects=int(preset.pop("n_subjects", 30)),
                seed=int(preset.pop("seed", 0)),
                noise_sd=float(preset.pop("noise_sd", 6.0)),
            )
            if preset:
                raise SpecInvalid(f"unknown preset overrides: {sorted(preset)}")
            return base
        return cls(
            n_subjects=int(d["n_subjects"]),
            days_per_subject=int(d.get("days_per_subject", 7)),
            mode_templates=tuple(ModeTemplate.from_dict(t) for t in d["mode_templates"]),
            recipe_targets=tuple(
                tuple(tuple(float(v) for v in r) for r in mode)  # type: ignore[misc]
                for mode in d["recipe_targets"]
            ),
            plan_pattern=tuple(tuple(int(v) for v in p) for p in d["plan_pattern"]),
            off_plan=tuple(float(v) for v in d.get("off_plan", (60.0, 0.0, 0.0))),  # type: ignore[arg-type]
            noise_sd=float(d.get("noise_sd", 6.0)),
            good_sleep_rule=GoodSleepRule.from_dict(d.get("good_sleep_rule", {})),
            seed=int(d.get("seed", 0)),
            cut_points=CutPoints.from_dict(d["cut_points"]) if "cut_points" in d else DEFAULT_CUT_POINTS,
            bed_window=tuple(d.get("bed_window", (960, 1440))),  # type: ignore[arg-type]
        )


def _plateau_curve(segments: list[tuple[int, int, float]], floor: float, until: int) -> tuple[float, ...]:
    curve = np.zeros(core.MINUTES_PER_DAY)
    curve[:until] = floor
    for start, end, value in segments:
        curve[start:end] = value
    return tuple(float(v) for v in curve)


def default_cohort_spec(n_subjects: int = 30, seed: int = 0, noise_sd: float = 6.0) -> CohortSpec:
    """Two-mode cohort: a commute-shaped weekday template with morning and
    late-afternoon bumps, and a late-rise weekend template with one broad
    midday bump. Both modes plant the same two recipes; one weekday per week
    goes off-recipe so poor-sleep days exist."""
    bed = (960, 1440)
    commute = ModeTemplate(
        name="commute",
        base_curve=_plateau_curve([(150, 210, 60.0), (450, 510, 60.0)], floor=10.0, until=bed[0]),
        weekday_set=frozenset({0, 1, 2, 3, 4}),
        activity_window=(120, 520),
    )
    late_rise = ModeTemplate(
        name="late_rise",
        base_curve=_plateau_curve([(660, 840, 60.0)], floor=10.0, until=bed[0]),
        weekday_set=frozenset({5, 6}),
        activity_window=(560, 940),
    )
    targets = ((300.0, 30.0, 10.0), (150.0, 10.0, 0.0))
    return CohortSpec(
        n_subjects=n_subjects,
        days_per_subject=7,
        mode_templates=(commute, late_rise),
        recipe_targets=(targets, targets),
        plan_pattern=((0, 1, 0, 1, OFF_PLAN), (0, 1)),
        off_plan=(60.0, 0.0, 0.0),
        noise_sd=noise_sd,
        good_sleep_rule=GoodSleepRule(),
        seed=seed,
        cut_points=DEFAULT_CUT_POINTS,
        bed_window=bed,
    )


def validate_spec(spec: CohortSpec) -> None:
    """Raise SpecInvalid when the spec cannot generate a well-formed cohort."""
    if spec.n_subjects < 1:
        raise SpecInvalid("n_subjects must be at least 1")
    if spec.days_per_subject < 1:
        raise SpecInvalid("days_per_subject must be at least 1")
    if not spec.mode_templates:
        raise SpecInvalid("at least one mode template required")
    if not (
        len(spec.recipe_targets) == len(spec.mode_templates) == len(spec.plan_pattern)
    ):
        raise SpecInvalid("recipe_targets and plan_pattern must align with mode_templates")
    if spec.noise_sd < 0:
        raise SpecInvalid("noise_sd must be nonnegative")
    if spec.good_sleep_rule.tolerance <= 0:
        raise SpecInvalid("good-sleep tolerance must be positive")
    for lo, hi in (spec.good_sleep_rule.good_efficiency, spec.good_sleep_rule.poor_efficiency):
        if not 0 < lo <= hi < 1:
            raise SpecInvalid("efficiency ranges must be within (0, 1)")
    bed_lo, bed_hi = spec.bed_window
    if not (core.MINUTES_PER_DAY / 2 <= bed_lo < bed_hi <= core.MINUTES_PER_DAY):
        raise SpecInvalid("bed window must lie in the day's second half")
    if (bed_hi - bed_lo) * 2 < 960:
        raise SpecInvalid("bed window must cover at least 960 epochs (480 minutes)")
    seen_days: set[int] = set()
    for mode, template in enumerate(spec.mode_templates):
        if len(template.base_curve) != core.MINUTES_PER_DAY:
            raise SpecInvalid(f"template {template.name}: base_curve must have 1440 values")
        if any(v < 0 for v in template.base_curve):
            raise SpecInvalid(f"template {template.name}: base_curve must be nonnegative")
        if seen_days & template.weekday_set:
            raise SpecInvalid("weekday_sets must be disjoint")
        seen_days |= template.weekday_set
        win_lo, win_hi = template.activity_window
        if not 0 <= win_lo < win_hi <= core.MINUTES_PER_DAY:
            raise SpecInvalid(f"template {template.name}: bad activity window")
        if win_hi > bed_lo:
            raise SpecInvalid(f"template {template.name}: activity window overlaps bed window")
        plans = list(spec.recipe_targets[mode]) + [spec.off_plan]
        for plan in plans:
            if any(v < 0 for v in plan):
                raise SpecInvalid("plan totals must be nonnegative")
            if any(v != int(v) for v in plan):
                raise SpecInvalid("plan totals must be whole minutes")
            if sum(plan) > win_hi - win_lo:
                raise SpecInvalid(
                    f"template {template.name}: plan {plan} exceeds activity window"
                )
        for idx in spec.plan_pattern[mode]:
            if idx != OFF_PLAN and not 0 <= idx < len(spec.recipe_targets[mode]):
                raise SpecInvalid(f"plan index {idx} out of range for mode {mode}")
    if seen_days != set(range(7)) and spec.days_per_subject >= 7:
        raise SpecInvalid("weekday_sets must cover all 7 days of the week")


@dataclass
class CohortData:
    epoch_csv: bytes
    metadata_csv: bytes
    ground_truth: dict[str, Any]


def _band_midpoints(cp: CutPoints) -> tuple[float, float, float]:
    """Counts/minute values planted for Light, Moderate, Vigorous minutes."""
    return (
        (cp.light_min + cp.moderate_min) / 2.0,
        (cp.moderate_min + cp.vigorous_min) / 2.0,
        cp.vigorous_min * 1.25,
    )


def _mode_for_dow(spec: CohortSpec, dow: int) -> int | None:
    for mode, template in enumerate(spec.mode_templates):
        if dow in template.weekday_set:
            return mode
    return None


def _realized_totals(counts: np.ndarray, cp: CutPoints, bed: tuple[int, int]) -> tuple[float, float, float]:
    day = np.concatenate([counts[: bed[0]], counts[bed[1]:]])
    light = float(np.sum((day >= cp.light_min) & (day < cp.moderate_min)))
    moderate = float(np.sum((day >= cp.moderate_min) & (day < cp.vigorous_min)))
    vigorous = float(np.sum(day >= cp.vigorous_min))
    return (light, moderate, vigorous)


def generate_cohort(spec: CohortSpec, include_curves: bool = False) -> CohortData:
    """Generate epoch CSV, metadata CSV, and ground truth for the spec.

    Deterministic for a fixed seed: every (subject, day) has its own derived
    RNG stream, so generation order never matters. include_curves adds the
    planted minute curves to the ground truth (large; for verification).
    """
    validate_spec(spec)
    cp = spec.cut_points
    bed_lo, bed_hi = spec.bed_window
    bed_epochs = (bed_hi - bed_lo) * 2
    mids = _band_midpoints(cp)
    rule = spec.good_sleep_rule

    epoch_buf = io.StringIO()
    writer = csv.writer(epoch_buf, lineterminator="\n")
    writer.writerow(["subject_id", "day_index", "epoch_index", "activity_count", "interval_type", "wake"])

    truth_days: list[dict[str, Any]] = []
    subject_rows: list[dict[str, Any]] = []

    for s in range(spec.n_subjects):
        subject_id = f"S{s:03d}"
        meta_rng = np.random.default_rng((spec.seed, _META_STREAM, s))
        subject_rows.append(
            {
                "subject_id": subject_id,
                "age": int(meta_rng.integers(25, 71)),
                "gender": "F" if s % 2 == 0 else "M",
                "bmi": round(float(meta_rng.uniform(19, 34)), 1),
                "resting_hr": int(meta_rng.integers(55, 81)),
            }
        )
        for day in range(spec.days_per_subject):
            dow = day % 7
            mode = _mode_for_dow(spec, dow)
            if mode is None:
                raise SpecInvalid(f"no template covers day-of-week {dow}")
            template = spec.mode_templates[mode]
            rng = np.random.default_rng((spec.seed, s, day))

            counts = np.asarray(template.base_curve, dtype=float) + rng.normal(
                0.0, spec.noise_sd, core.MINUTES_PER_DAY
            )
            counts = np.maximum(0.0, np.rint(counts))
            counts[bed_lo:bed_hi] = 0.0

            pos_in_week = sorted(template.weekday_set).index(dow)
            pattern = spec.plan_pattern[mode]
            plan_idx = pattern[pos_in_week % len(pattern)] if pattern else OFF_PLAN
            plan = (
                spec.recipe_targets[mode][plan_idx] if plan_idx != OFF_PLAN else spec.off_plan
            )
            n_light, n_moderate, n_vigorous = (int(v) for v in plan)
            total = n_light + n_moderate + n_vigorous
            win_lo, win_hi = template.activity_window
            positions = rng.choice(np.arange(win_lo, win_hi), size=total, replace=False)
            values = np.concatenate(
                [
                    np.full(n_light, mids[0]),
                    np.full(n_moderate, mids[1]),
                    np.full(n_vigorous, mids[2]),
                ]
            )
            values = values + rng.normal(0.0, spec.noise_sd, total)
            counts[positions] = np.maximum(0.0, np.rint(values))

            realized = _realized_totals(counts, cp, spec.bed_window)
            good = any(
                max(abs(r - t) for r, t in zip(realized, target)) <= rule.tolerance
                for target in spec.recipe_targets[mode]
            )
            lo, hi = rule.good_efficiency if good else rule.poor_efficiency
            planted_eff = float(rng.uniform(lo, hi))
            rest_epochs = int(round((1.0 - planted_eff) * bed_epochs))
            realized_eff = 1.0 - rest_epochs / bed_epochs

            int_counts = counts.astype(int)
            epoch_counts = np.empty(core.EPOCHS_PER_DAY, dtype=int)
            epoch_counts[0::2] = int_counts - int_counts // 2
            epoch_counts[1::2] = int_counts // 2
            interval = np.full(core.EPOCHS_PER_DAY, "ACTIVE", dtype=object)
            wake = np.ones(core.EPOCHS_PER_DAY, dtype=int)
            bed_slice = slice(2 * bed_lo, 2 * bed_lo + bed_epochs)
            interval[bed_slice] = "REST-S"
            wake[bed_slice] = 0
            # Awake-in-bed time realized as leading REST epochs before onset.
            rest_slice = slice(2 * bed_lo, 2 * bed_lo + rest_epochs)
            interval[rest_slice] = "REST"
            wake[rest_slice] = 1

            writer.writerows(
                (subject_id, day, e, int(epoch_counts[e]), interval[e], int(wake[e]))
                for e in range(core.EPOCHS_PER_DAY)
            )
            day_truth = {
                "subject_id": subject_id,
                "day_index": day,
                "day_of_week": dow,
                "mode": mode,
                "mode_name": template.name,
                "plan_index": plan_idx,
                "planted_totals": [float(v) for v in plan],
                "realized_totals": list(realized),
                "planted_efficiency": planted_eff,
                "realized_efficiency": realized_eff,
                "quality": (SleepQuality.GOOD if good else SleepQuality.POOR).value,
            }
            if include_curves:
                day_truth["minute_curve"] = [float(v) for v in counts]
            truth_days.append(day_truth)

    meta_buf = io.StringIO()
    meta_writer = csv.writer(meta_buf, lineterminator="\n")
    meta_writer.writerow(["subject_id", "age", "gender", "bmi", "resting_hr"])
    for row in subject_rows:
        meta_writer.writerow(
            [row["subject_id"], row["age"], row["gender"], row["bmi"], row["resting_hr"]]
        )

    ground_truth = {
        "seed": spec.seed,
        "n_subjects": spec.n_subjects,
        "days_per_subject": spec.days_per_subject,
        "cut_points": cp.to_dict(),
        "noise_sd": spec.noise_sd,
        "good_sleep_rule": rule.to_dict(),
        "modes": [
            {
                "mode": i,
                "name": t.name,
                "weekday_set": sorted(t.weekday_set),
                "activity_window": list(t.activity_window),
                "recipes": [list(r) for r in spec.recipe_targets[i]],
            }
            for i, t in enumerate(spec.mode_templates)
        ],
        "subjects": subject_rows,
        "days": truth_days,
    }
    return CohortData(
        epoch_csv=epoch_buf.getvalue().encode("utf-8"),
        metadata_csv=meta_buf.getvalue().encode("utf-8"),
        ground_truth=ground_truth,
    )
