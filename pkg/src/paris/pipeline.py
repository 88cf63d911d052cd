"""Batch pipeline: ingest epoch data, fit per-subject behavior modes,
extract good-sleep recipes, and assemble everything into a ModelBundle.

Per-subject failures are isolated: a subject that cannot be fitted is
skipped and reported, never aborting the cohort. Re-running on identical
inputs and config yields a byte-identical bundle.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping

from . import core
from .cluster import KMeansConfig
from .core import (
    ActigraphyDay,
    BehaviorModeModel,
    RecipeBook,
    SeriesDomain,
    canonical_json,
)
from .errors import ParisError, UnknownSubject
from .ingest import (
    DEFAULT_CUT_POINTS,
    CutPoints,
    REQUIRED_DAYS,
    RowIssue,
    epochs_to_days,
    filter_subjects,
    label_minutes,
    parse_epochs,
    parse_metadata,
    sleep_records_for_subject,
    summarize_levels,
)
from .metrics import MetricId
from .modes import PurityReport, day_of_week_purity, fit_behavior_modes, fit_cohort_modes
from .recipes import RecipeConfig, extract_recipes, tag_sleep_quality
from .recommend import CohortDay

logger = logging.getLogger(__name__)

BUNDLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a fit run needs; snapshotted into the bundle."""

    cut_points: CutPoints = field(default_factory=lambda: DEFAULT_CUT_POINTS)
    domain: SeriesDomain = SeriesDomain.TIME
    k_range: tuple[int, ...] = (2, 3, 4, 5, 6)
    metrics: tuple[MetricId, ...] = (MetricId.L2, MetricId.JS)
    n_restarts: int = 10
    max_iters: int = 300
    rel_tol: float = 1e-4
    seed: int = 0
    dtw_band: int | None = None
    fft_components: int = 25
    recipe: RecipeConfig = field(default_factory=RecipeConfig)
    required_days: int = REQUIRED_DAYS
    day_of_week_anchor: int = 0
    mode_scope: str = "subject"  # "subject" or "cohort"
    threads: int = 1

    def kmeans_config(self) -> KMeansConfig:
        return KMeansConfig(
            k=2,
            n_restarts=self.n_restarts,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            seed=self.seed,
            dtw_band=self.dtw_band,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "cut_points": self.cut_points.to_dict(),
            "domain": self.domain.value,
            "k_range": list(self.k_range),
            "metrics": [m.value for m in self.metrics],
            "n_restarts": self.n_restarts,
            "max_iters": self.max_iters,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
            "dtw_band": self.dtw_band,
            "fft_components": self.fft_components,
            "recipe": self.recipe.to_dict(),
            "required_days": self.required_days,
            "day_of_week_anchor": self.day_of_week_anchor,
            "mode_scope": self.mode_scope,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PipelineConfig":
        return cls(
            cut_points=CutPoints.from_dict(d["cut_points"]) if "cut_points" in d else DEFAULT_CUT_POINTS,
            domain=SeriesDomain(d.get("domain", "Time")),
            k_range=tuple(d.get("k_range", (2, 3, 4, 5, 6))),
            metrics=tuple(MetricId(m) for m in d.get("metrics", ("l2", "js"))),
            n_restarts=int(d.get("n_restarts", 10)),
            max_iters=int(d.get("max_iters", 300)),
            rel_tol=float(d.get("rel_tol", 1e-4)),
            seed=int(d.get("seed", 0)),
            dtw_band=None if d.get("dtw_band") is None else int(d["dtw_band"]),
            fft_components=int(d.get("fft_components", 25)),
            recipe=RecipeConfig.from_dict(d.get("recipe", {})),
            required_days=int(d.get("required_days", REQUIRED_DAYS)),
            day_of_week_anchor=int(d.get("day_of_week_anchor", 0)),
            mode_scope=str(d.get("mode_scope", "subject")),
            threads=int(d.get("threads", 1)),
        )


@dataclass(frozen=True)
class SubjectModels:
    modes: BehaviorModeModel
    recipes: RecipeBook


@dataclass(frozen=True)
class ModelBundle:
    subjects: Mapping[str, SubjectModels]
    cut_points: CutPoints
    config: Mapping[str, Any]
    format_version: int = BUNDLE_FORMAT_VERSION

    @property
    def subject_ids(self) -> list[str]:
        return sorted(self.subjects)

    def subject(self, subject_id: str) -> SubjectModels:
        try:
            return self.subjects[subject_id]
        except KeyError:
            raise UnknownSubject(subject_id) from None

    def to_dict(self) -> dict[str, Any]:
        return {
            "format_version": self.format_version,
            "cut_points": self.cut_points.to_dict(),
            "config": dict(self.config),
            "subjects": {
                sid: {
                    "modes": models.modes.to_dict(),
                    "recipes": models.recipes.to_dict(),
                }
                for sid, models in sorted(self.subjects.items())
            },
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ModelBundle":
        return cls(
            subjects={
                sid: SubjectModels(
                    modes=BehaviorModeModel.from_dict(entry["modes"]),
                    recipes=RecipeBook.from_dict(entry["recipes"]),
                )
                for sid, entry in d["subjects"].items()
            },
            cut_points=CutPoints.from_dict(d["cut_points"]),
            config=dict(d["config"]),
            format_version=int(d["format_version"]),
        )

    def to_bytes(self) -> bytes:
        return (canonical_json(self.to_dict()) + "\n").encode("utf-8")

    @classmethod
    def from_bytes(cls, data: bytes) -> "ModelBundle":
        return cls.from_dict(json.loads(data.decode("utf-8")))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "ModelBundle":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


@dataclass(frozen=True)
class SubjectReport:
    subject_id: str
    n_days: int
    k: int
    metric: str
    silhouette: float
    recipe_counts: tuple[int, ...]  # per mode
    purity: float


@dataclass
class RunReport:
    subjects: list[SubjectReport] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (subject, reason)
    dropped_days: list[str] = field(default_factory=list)
    parse_errors: list[RowIssue] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"config: {canonical_json(self.config)}"] if self.config else []
        lines.append("subjects fitted: %d, skipped: %d" % (len(self.subjects), len(self.skipped)))
        if self.parse_errors:
            lines.append(f"parse errors: {len(self.parse_errors)}")
        for issue in self.parse_errors[:10]:
            lines.append(f"  line {issue.line}: {issue.message}")
        for message in self.dropped_days:
            lines.append(f"dropped day: {message}")
        for row in self.subjects:
            lines.append(
                "subject %s: days=%d k=%d metric=%s silhouette=%.4f recipes=%s purity=%.3f"
                % (
                    row.subject_id,
                    row.n_days,
                    row.k,
                    row.metric,
                    row.silhouette,
                    "/".join(str(c) for c in row.recipe_counts),
                    row.purity,
                )
            )
        for subject_id, reason in self.skipped:
            lines.append(f"skipped {subject_id}: {reason}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["subject_id,n_days,k,metric,silhouette,recipes,purity"]
        for row in self.subjects:
            rows.append(
                "%s,%d,%d,%s,%.6f,%s,%.6f"
                % (
                    row.subject_id,
                    row.n_days,
                    row.k,
                    row.metric,
                    row.silhouette,
                    "/".join(str(c) for c in row.recipe_counts),
                    row.purity,
                )
            )
        return "\n".join(rows) + "\n"


@dataclass
class PipelineResult:
    bundle: ModelBundle
    report: RunReport
    cohort_days: list[CohortDay] = field(default_factory=list)


@dataclass
class IngestedCohort:
    """Parsed and filtered cohort, shared by fit and evaluate paths."""

    days_by_subject: dict[str, list[ActigraphyDay]]
    epochs_by_subject: dict[str, list]
    parse_errors: list[RowIssue]
    dropped_days: list[str]
    removed_subjects: list[str]  # failed the minimum-days rule


def ingest_cohort(
    epoch_csv: bytes, config: PipelineConfig, keep_all_days: bool = False
) -> IngestedCohort:
    """Parse and filter a cohort. With keep_all_days, every complete day is
    kept for every subject (evaluation history); otherwise the fitting rule
    applies (drop short subjects, truncate to required_days)."""
    parsed = parse_epochs(epoch_csv)
    build = epochs_to_days(parsed.records, day_of_week_anchor=config.day_of_week_anchor)
    if keep_all_days:
        kept = filter_subjects(build.days, required_days=1, truncate=False)
    else:
        kept = filter_subjects(build.days, required_days=config.required_days)
    days_by_subject: dict[str, list[ActigraphyDay]] = {}
    for day in kept:
        days_by_subject.setdefault(day.subject_id, []).append(day)
    epochs_by_subject: dict[str, list] = {}
    for rec in parsed.records:
        epochs_by_subject.setdefault(rec.subject_id, []).append(rec)
    all_subjects = {d.subject_id for d in build.days}
    return IngestedCohort(
        days_by_subject=days_by_subject,
        epochs_by_subject=epochs_by_subject,
        parse_errors=parsed.errors,
        dropped_days=[f"{d.subject_id} day {d.day_index}: {d.reason}" for d in build.dropped],
        removed_subjects=sorted(all_subjects - set(days_by_subject)),
    )


def summarize_subject_days(
    subject_id: str,
    days: list[ActigraphyDay],
    subject_epochs,
    config: PipelineConfig,
) -> tuple[dict, dict, list[CohortDay]]:
    """Full-day level summaries, sleep tags, and cohort days for one subject.

    Days whose night cannot be located get a summary but no tag.
    """
    sleep_records = sleep_records_for_subject(subject_epochs)
    summaries = {}
    tags = {}
    cohort_days: list[CohortDay] = []
    for day in days:
        labels = label_minutes(day, config.cut_points)
        summary = summarize_levels(day, labels, 0, core.MINUTES_PER_DAY, active_only=True)
        summaries[day.day_index] = summary
        record = sleep_records.get(day.day_index)
        if record is not None:
            tag = tag_sleep_quality(record, config.recipe)
            tags[day.day_index] = tag
            cohort_days.append(
                CohortDay(
                    subject_id=subject_id,
                    day_index=day.day_index,
                    minutes=summary.minutes,
                    quality=tag,
                )
            )
    return summaries, tags, cohort_days


def _fit_subject(
    subject_id: str,
    days: list[ActigraphyDay],
    subject_epochs,
    config: PipelineConfig,
    prefit: BehaviorModeModel | None = None,
) -> tuple[SubjectModels, SubjectReport, list[CohortDay]]:
    model = prefit or fit_behavior_modes(
        days,
        domain=config.domain,
        k_range=config.k_range,
        metrics=config.metrics,
        cfg=config.kmeans_config(),
        fft_components=config.fft_components,
    )
    summaries, tags, cohort_days = summarize_subject_days(
        subject_id, days, subject_epochs, config
    )
    mode_recipes = []
    for mode in range(model.k):
        day_indices = sorted(
            d for d, m in model.day_assignments.items() if m == mode and d in tags
        )
        mode_summaries = [summaries[d] for d in day_indices]
        mode_tags = [tags[d] for d in day_indices]
        if len(mode_summaries) < 2:
            mode_recipes.append(())
            continue
        recipes = extract_recipes(mode_summaries, mode_tags, config.recipe, seed=config.seed)
        mode_recipes.append(tuple(recipes))
    book = RecipeBook(subject_id=subject_id, modes=tuple(mode_recipes))
    purity: PurityReport = day_of_week_purity(
        model, {day.day_index: day.day_of_week for day in days}
    )
    report = SubjectReport(
        subject_id=subject_id,
        n_days=len(days),
        k=model.k,
        metric=model.metric,
        silhouette=model.silhouette,
        recipe_counts=tuple(len(m) for m in book.modes),
        purity=purity.weighted_purity(),
    )
    return SubjectModels(modes=model, recipes=book), report, cohort_days


def run_pipeline(epoch_csv: bytes, metadata_csv: bytes | None, config: PipelineConfig) -> PipelineResult:
    """Execute ingest -> behavior modes -> recipes for a whole cohort.

    metadata_csv is validated when given; metadata itself is only consumed at
    recommendation time, not during fitting.
    """
    if metadata_csv is not None:
        parse_metadata(metadata_csv)
    cohort = ingest_cohort(epoch_csv, config)

    report = RunReport(config=config.to_dict())
    report.parse_errors = cohort.parse_errors
    report.dropped_days = cohort.dropped_days
    for subject_id in cohort.removed_subjects:
        report.skipped.append((subject_id, f"fewer than {config.required_days} complete days"))

    prefit: dict[str, BehaviorModeModel] = {}
    if config.mode_scope == "cohort" and cohort.days_by_subject:
        prefit = fit_cohort_modes(
            cohort.days_by_subject,
            domain=config.domain,
            k_range=config.k_range,
            metrics=config.metrics,
            cfg=config.kmeans_config(),
            fft_components=config.fft_components,
        )

    def fit_one(subject_id: str):
        try:
            return subject_id, _fit_subject(
                subject_id,
                cohort.days_by_subject[subject_id],
                cohort.epochs_by_subject.get(subject_id, []),
                config,
                prefit.get(subject_id),
            ), None
        except ParisError as exc:
            return subject_id, None, f"{type(exc).__name__}: {exc}"

    ordered_ids = sorted(cohort.days_by_subject)
    if config.threads > 1 and len(ordered_ids) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(fit_one, ordered_ids))
    else:
        outcomes = [fit_one(sid) for sid in ordered_ids]

    subjects: dict[str, SubjectModels] = {}
    cohort_days: list[CohortDay] = []
    for subject_id, fitted, failure in outcomes:
        if failure is not None:
            logger.warning("skipping subject %s: %s", subject_id, failure)
            report.skipped.append((subject_id, failure))
            continue
        models, subject_report, subject_cohort = fitted
        subjects[subject_id] = models
        report.subjects.append(subject_report)
        cohort_days.extend(subject_cohort)
    report.subjects.sort(key=lambda r: r.subject_id)
    report.skipped.sort()
    cohort_days.sort(key=lambda d: (d.subject_id, d.day_index))

    bundle = ModelBundle(
        subjects=subjects,
        cut_points=config.cut_points,
        config=config.to_dict(),
    )
    return PipelineResult(bundle=bundle, report=report, cohort_days=cohort_days)
