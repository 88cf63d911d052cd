"""Command-line interface: synth, fit, recommend, evaluate, serve.

Exit codes: 0 ok, 1 empty result, 2 input error, 3 unknown entity,
4 domain error. Log level comes from the PARIS_LOG environment variable.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import click

from .core import canonical_json
from .errors import (
    BadWindow,
    EmptyCohort,
    LengthMismatch,
    MalformedHeader,
    NoRecipesForMode,
    ParisError,
    SpecInvalid,
    UnknownSubject,
)
from .ingest import label_counts, parse_metadata, wake_onset_for_day
from .pipeline import (
    IngestedCohort,
    ModelBundle,
    PipelineConfig,
    ingest_cohort,
    run_pipeline,
    summarize_subject_days,
)
from .recommend import (
    CohortDay,
    ConstraintRule,
    SubjectMetadata,
    default_rules,
    recommend_with_explain,
    recommendation_document,
    retrospective_evaluate,
)
from .synthdata import CohortSpec, default_cohort_spec, generate_cohort

EXIT_OK = 0
EXIT_EMPTY = 1
EXIT_INPUT = 2
EXIT_UNKNOWN_ENTITY = 3
EXIT_DOMAIN = 4

logger = logging.getLogger(__name__)


def _setup_logging() -> None:
    level = os.environ.get("PARIS_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(config_path: str | None, **overrides) -> PipelineConfig:
    data = {}
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            _fail(EXIT_INPUT, f"cannot read config {config_path}: {exc}")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    try:
        return PipelineConfig.from_dict(data)
    except (ValueError, KeyError) as exc:
        _fail(EXIT_INPUT, f"bad config: {exc}")


def _load_rules(rules_path: str | None) -> list[ConstraintRule]:
    if rules_path is None:
        return default_rules()
    try:
        raw = json.loads(Path(rules_path).read_text("utf-8"))
        return [ConstraintRule.from_dict(entry) for entry in raw]
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail(EXIT_INPUT, f"cannot read rules {rules_path}: {exc}")


@click.group()
def main() -> None:
    """Personalized activity recommendations for better sleep."""
    _setup_logging()


@main.command("synth")
@click.option("--spec", "spec_path", type=str, default=None, help="Cohort spec JSON (omit for the default cohort).")
@click.option("--out", "out_dir", type=str, required=True, help="Output directory.")
@click.option("--subjects", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-sd", type=float, default=6.0, show_default=True)
def cmd_synth(spec_path, out_dir, subjects, seed, noise_sd) -> None:
    """Generate a synthetic cohort (epoch CSV, metadata CSV, ground truth)."""
    if spec_path is not None:
        try:
            raw = json.loads(Path(spec_path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            _fail(EXIT_INPUT, f"cannot read spec {spec_path}: {exc}")
        try:
            spec = CohortSpec.from_dict(raw)
        except (SpecInvalid, KeyError, ValueError, TypeError) as exc:
            _fail(EXIT_INPUT, f"invalid spec: {exc}")
    else:
        spec = default_cohort_spec(n_subjects=subjects, seed=seed, noise_sd=noise_sd)
    try:
        data = generate_cohort(spec)
    except SpecInvalid as exc:
        _fail(EXIT_INPUT, f"invalid spec: {exc}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "epochs.csv").write_bytes(data.epoch_csv)
    (out / "metadata.csv").write_bytes(data.metadata_csv)
    (out / "ground_truth.json").write_text(
        canonical_json(data.ground_truth) + "\n", "utf-8"
    )
    click.echo(
        f"wrote {spec.n_subjects} subjects x {spec.days_per_subject} days "
        f"(seed {spec.seed}) to {out}"
    )


def _read_bytes(path: str, what: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot read {what} {path}: {exc}")


@main.command("fit")
@click.option("--epochs", "epochs_path", type=str, required=True)
@click.option("--metadata", "metadata_path", type=str, default=None)
@click.option("--out", "bundle_path", type=str, required=True, help="Bundle JSON output path.")
@click.option("--report", "report_path", type=str, default=None, help="Run report text output path.")
@click.option("--report-csv", "report_csv_path", type=str, default=None)
@click.option("--config", "config_path", type=str, default=None, help="Pipeline config JSON.")
@click.option("--seed", type=int, default=None)
@click.option("--k-range", type=str, default=None, help="Comma-separated, e.g. 2,3,4,5,6.")
@click.option("--metrics", type=str, default=None, help="Comma-separated, e.g. l2,js.")
@click.option("--domain", type=click.Choice(["time", "frequency"]), default=None)
@click.option("--cut-points", type=str, default=None, help="light,moderate,vigorous counts/min.")
@click.option("--min-cluster-days", type=int, default=None)
@click.option("--threads", type=int, default=None)
def cmd_fit(
    epochs_path,
    metadata_path,
    bundle_path,
    report_path,
    report_csv_path,
    config_path,
    seed,
    k_range,
    metrics,
    domain,
    cut_points,
    min_cluster_days,
    threads,
) -> None:
    """Fit behavior modes and recipes for a cohort; write the model bundle."""
    overrides: dict = {}
    if seed is not None:
        overrides["seed"] = seed
    if k_range is not None:
        overrides["k_range"] = [int(v) for v in k_range.split(",") if v]
    if metrics is not None:
        overrides["metrics"] = [v.strip() for v in metrics.split(",") if v.strip()]
    if domain is not None:
        overrides["domain"] = domain.capitalize()
    if cut_points is not None:
        try:
            light, moderate, vigorous = (float(v) for v in cut_points.split(","))
        except ValueError:
            _fail(EXIT_INPUT, "cut-points must be three comma-separated numbers")
        overrides["cut_points"] = {
            "light_min": light,
            "moderate_min": moderate,
            "vigorous_min": vigorous,
        }
    if threads is not None:
        overrides["threads"] = threads
    config = _load_config(config_path, **overrides)
    if min_cluster_days is not None:
        recipe = config.recipe.to_dict()
        recipe["min_cluster_days"] = min_cluster_days
        config = PipelineConfig.from_dict({**config.to_dict(), "recipe": recipe, "threads": config.threads})

    epoch_bytes = _read_bytes(epochs_path, "epoch CSV")
    metadata_bytes = _read_bytes(metadata_path, "metadata CSV") if metadata_path else None
    try:
        result = run_pipeline(epoch_bytes, metadata_bytes, config)
    except MalformedHeader as exc:
        _fail(EXIT_INPUT, f"bad CSV: {exc}")
    result.bundle.save(bundle_path)
    report_text = result.report.to_text()
    if report_path:
        Path(report_path).write_text(report_text, "utf-8")
    if report_csv_path:
        Path(report_csv_path).write_text(result.report.to_csv(), "utf-8")
    click.echo(report_text, nl=False)
    if not result.bundle.subjects:
        sys.exit(EXIT_EMPTY)


def _read_partial_csv(path: str, t_m: int) -> list[float]:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot read partial-day CSV {path}: {exc}")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        _fail(EXIT_INPUT, "partial-day CSV is empty")
    if [h.strip() for h in header] != ["minute", "activity_count"]:
        _fail(EXIT_INPUT, "partial-day CSV header must be minute,activity_count")
    counts: list[float] = []
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        minute, value = int(row[0]), float(row[1])
        if minute != len(counts):
            _fail(EXIT_INPUT, f"partial-day CSV minutes must run 0..{t_m - 1} in order")
        counts.append(value)
    if len(counts) != t_m:
        _fail(EXIT_INPUT, f"partial-day CSV has {len(counts)} minutes, expected {t_m}")
    return counts


@main.command("recommend")
@click.option("--bundle", "bundle_path", type=str, required=True)
@click.option("--subject", "subject_id", type=str, required=True)
@click.option("--partial", "partial_path", type=str, required=True, help="CSV minute,activity_count for minutes 0..t_m-1.")
@click.option("--tm", "t_m", type=int, required=True, help="Current minute of day (1..1440).")
@click.option("--rules", "rules_path", type=str, default=None)
@click.option("--metadata", "metadata_path", type=str, default=None)
@click.option("--wake-onset", type=int, default=0, show_default=True)
@click.option("--explain", is_flag=True, default=False)
def cmd_recommend(
    bundle_path, subject_id, partial_path, t_m, rules_path, metadata_path, wake_onset, explain
) -> None:
    """Print the recommendation JSON for a subject's partial day."""
    if not 1 <= t_m <= 1440:
        _fail(EXIT_DOMAIN, f"t_m {t_m} outside 1..1440 (window empty)")
    try:
        bundle = ModelBundle.load(bundle_path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_INPUT, f"cannot load bundle {bundle_path}: {exc}")
    try:
        models = bundle.subject(subject_id)
    except UnknownSubject:
        _fail(EXIT_UNKNOWN_ENTITY, f"unknown subject {subject_id}")
    rules = _load_rules(rules_path)
    meta = SubjectMetadata(subject_id=subject_id)
    if metadata_path:
        table = parse_metadata(_read_bytes(metadata_path, "metadata CSV"))
        meta = table.get(subject_id, meta)
    counts = _read_partial_csv(partial_path, t_m)
    labels = label_counts(counts, bundle.cut_points)
    try:
        rec, explain_block = recommend_with_explain(
            models.modes, models.recipes, counts, labels, t_m, meta, rules, wake_onset
        )
    except NoRecipesForMode as exc:
        _fail(EXIT_DOMAIN, str(exc))
    except (BadWindow, LengthMismatch) as exc:
        _fail(EXIT_DOMAIN, str(exc))
    doc = recommendation_document(rec, explain_block if explain else None)
    click.echo(canonical_json(doc))


@main.command("evaluate")
@click.option("--bundle", "bundle_path", type=str, required=True)
@click.option("--epochs", "epochs_path", type=str, required=True)
@click.option("--tm", "t_m_values", type=int, multiple=True, default=(720,), show_default=True)
@click.option("--neighbors", "n_neighbors", type=int, default=10, show_default=True)
@click.option("--out", "out_path", type=str, default=None, help="Evaluation CSV output (default stdout).")
def cmd_evaluate(bundle_path, epochs_path, t_m_values, n_neighbors, out_path) -> None:
    """Retrospective evaluation of top recommendations over historical days."""
    try:
        bundle = ModelBundle.load(bundle_path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_INPUT, f"cannot load bundle {bundle_path}: {exc}")
    if not bundle.subjects:
        _fail(EXIT_INPUT, "bundle has no subjects")
    config = PipelineConfig.from_dict(dict(bundle.config))
    try:
        # Any complete day is usable history: the training-time minimum-days
        # rule and truncation are not applied to the evaluation data.
        cohort: IngestedCohort = ingest_cohort(
            _read_bytes(epochs_path, "epoch CSV"), config, keep_all_days=True
        )
    except MalformedHeader as exc:
        _fail(EXIT_INPUT, f"bad CSV: {exc}")
    shared = sorted(set(bundle.subjects) & set(cohort.days_by_subject))
    if not shared:
        _fail(EXIT_INPUT, "bundle and data share no subjects")

    history: list[CohortDay] = []
    per_subject = {}
    for subject_id in shared:
        days = cohort.days_by_subject[subject_id]
        summaries, tags, cohort_days = summarize_subject_days(
            subject_id, days, cohort.epochs_by_subject.get(subject_id, []), config
        )
        per_subject[subject_id] = (days, summaries, tags)
        history.extend(cohort_days)
    if not history:
        _fail(EXIT_INPUT, "no days with sleep records to evaluate against")

    rows = ["subject_id,day_index,t_m,mode,top_recipe,success_rate"]
    rates = []
    for subject_id in shared:
        models = bundle.subject(subject_id)
        days, summaries, tags = per_subject[subject_id]
        subject_epochs = cohort.epochs_by_subject.get(subject_id, [])
        for day in days:
            for t_m in t_m_values:
                counts = list(day.counts[:t_m])
                labels = label_counts(counts, bundle.cut_points)
                wake_onset = min(wake_onset_for_day(subject_epochs, day.day_index), t_m - 1)
                try:
                    rec, explain_block = recommend_with_explain(
                        models.modes,
                        models.recipes,
                        counts,
                        labels,
                        t_m,
                        SubjectMetadata(subject_id=subject_id),
                        [],
                        wake_onset,
                    )
                except ParisError:
                    continue
                top = rec.ordered_items[0]
                achieved = explain_block["achieved"]
                plan = tuple(a + d for a, d in zip(achieved, top.deficit))
                try:
                    outcome = retrospective_evaluate(history, plan, n_neighbors)
                except EmptyCohort:
                    continue
                rates.append(outcome.success_rate)
                rows.append(
                    f"{subject_id},{day.day_index},{t_m},{rec.mode},{top.recipe_ref},"
                    f"{outcome.success_rate:.6f}"
                )
    if not rates:
        _fail(EXIT_EMPTY, "no recommendations could be evaluated")
    mean_rate = sum(rates) / len(rates)
    rows.append(f"cohort,,,,mean,{mean_rate:.6f}")
    text = "\n".join(rows) + "\n"
    if out_path:
        Path(out_path).write_text(text, "utf-8")
        click.echo(f"cohort mean success_rate: {mean_rate:.4f} over {len(rates)} recommendations")
    else:
        click.echo(text, nl=False)


@main.command("serve")
@click.option("--bundle", "bundle_path", type=str, required=True)
@click.option("--rules", "rules_path", type=str, default=None)
@click.option("--ui-dir", "ui_dir", type=str, default=None)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--cors-origin", "cors_origins", type=str, multiple=True)
@click.option("--admin-token", type=str, default=None, help="Token for POST /api/v1/admin/reload.")
def cmd_serve(bundle_path, rules_path, ui_dir, host, port, cors_origins, admin_token) -> None:
    """Serve the recommendation API (and optionally the UI) over HTTP."""
    import uvicorn

    from .service import create_app

    try:
        bundle = ModelBundle.load(bundle_path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        _fail(EXIT_INPUT, f"cannot load bundle {bundle_path}: {exc}")
    rules = _load_rules(rules_path)
    app = create_app(
        bundle,
        rules=rules,
        bundle_path=bundle_path,
        ui_dir=ui_dir,
        cors_origins=list(cors_origins) or None,
        admin_token=admin_token,
    )
    uvicorn.run(app, host=host, port=port, log_level=os.environ.get("PARIS_LOG", "warning").lower())


if __name__ == "__main__":
    main()
