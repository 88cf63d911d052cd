import json

import pytest

from paris.pipeline import ModelBundle, PipelineConfig, run_pipeline
from paris.recipes import RecipeConfig

HEADER = b"subject_id,day_index,epoch_index,activity_count,interval_type,wake\n"


def test_pipeline_fits_all_subjects_k2(small_result):
    assert len(small_result.bundle.subjects) == 4
    for models in small_result.bundle.subjects.values():
        assert models.modes.k == 2
    assert [r.k for r in small_result.report.subjects] == [2, 2, 2, 2]
    assert all(r.purity == 1.0 for r in small_result.report.subjects)


def test_pipeline_skips_subject_with_six_days(small_cohort):
    # drop every day-6 row of subject S000 so it has only 6 complete days
    lines = small_cohort.epoch_csv.decode().split("\n")
    kept = [l for l in lines if not l.startswith("S000,6,")]
    result = run_pipeline("\n".join(kept).encode(), None, PipelineConfig())
    assert len(result.bundle.subjects) == 3
    assert ("S000", "fewer than 7 complete days") in result.report.skipped


def test_pipeline_empty_input():
    result = run_pipeline(HEADER, None, PipelineConfig())
    assert result.bundle.subjects == {}
    assert result.report.subjects == []
    assert "subjects fitted: 0" in result.report.to_text()


def test_pipeline_deterministic_bundles(small_cohort):
    cfg = PipelineConfig()
    first = run_pipeline(small_cohort.epoch_csv, small_cohort.metadata_csv, cfg)
    second = run_pipeline(small_cohort.epoch_csv, small_cohort.metadata_csv, cfg)
    assert first.bundle.to_bytes() == second.bundle.to_bytes()


def test_pipeline_threads_do_not_change_results(small_cohort):
    serial = run_pipeline(small_cohort.epoch_csv, None, PipelineConfig())
    threaded = run_pipeline(small_cohort.epoch_csv, None, PipelineConfig(threads=4))
    assert serial.bundle.to_bytes() == threaded.bundle.to_bytes()


def test_bundle_save_load_round_trip(tmp_path, small_result):
    path = tmp_path / "bundle.json"
    small_result.bundle.save(path)
    loaded = ModelBundle.load(path)
    assert loaded == small_result.bundle
    assert loaded.to_bytes() == small_result.bundle.to_bytes()


def test_bundle_unknown_subject(small_result):
    from paris.errors import UnknownSubject

    with pytest.raises(UnknownSubject):
        small_result.bundle.subject("nobody")


def test_config_round_trip():
    cfg = PipelineConfig(
        seed=7,
        k_range=(2, 3),
        recipe=RecipeConfig(min_cluster_days=2),
        required_days=14,
    )
    again = PipelineConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


def test_report_csv_shape(small_result):
    lines = small_result.report.to_csv().strip().split("\n")
    assert lines[0] == "subject_id,n_days,k,metric,silhouette,recipes,purity"
    assert len(lines) == 5


def test_rich_pipeline_recovers_both_recipes_per_mode(rich_result):
    for models in rich_result.bundle.subjects.values():
        assert models.modes.k == 2
        for recipes in models.recipes.modes:
            centers = sorted(tuple(r.center) for r in recipes)
            assert len(centers) == 2
            assert max(abs(a - b) for a, b in zip(centers[0], (150.0, 10.0, 0.0))) <= 10
            assert max(abs(a - b) for a, b in zip(centers[1], (300.0, 30.0, 10.0))) <= 10


def test_cohort_days_cover_all_fitted_days(rich_result):
    days = rich_result.cohort_days
    assert len(days) == 4 * 14
    assert all(day.quality.value in ("Good", "Poor") for day in days)


def test_report_text_echoes_config(small_result):
    text = small_result.report.to_text()
    assert text.startswith("config: {")
    assert '"seed":0' in text


def test_cohort_scope_shares_centroids(small_cohort):
    result = run_pipeline(
        small_cohort.epoch_csv, None, PipelineConfig(mode_scope="cohort")
    )
    models = [m.modes for m in result.bundle.subjects.values()]
    assert len(models) == 4
    first = models[0]
    assert first.k == 2
    for model in models[1:]:
        assert model.centroids == first.centroids
        assert model.silhouette == first.silhouette
    # planted weekday/weekend split still recovered per subject
    for model in models:
        weekend = {model.day_assignments[5], model.day_assignments[6]}
        weekday = {model.day_assignments[d] for d in range(5)}
        assert len(weekend) == 1 and len(weekday) == 1 and weekend != weekday
    assert all(m.modes.fit_config.get("scope") == "cohort" for m in result.bundle.subjects.values())
