"""Record UI test fixtures by fitting the planted cohort and capturing real
API responses. Run from the repository root:

    python3 frontend/scripts/make_fixtures.py
"""

import dataclasses
import json
from pathlib import Path

from fastapi.testclient import TestClient

from paris.pipeline import PipelineConfig, run_pipeline
from paris.recipes import RecipeConfig
from paris.recommend import ConstraintRule
from paris.service import create_app
from paris.synthdata import default_cohort_spec, generate_cohort

OUT = Path(__file__).resolve().parent.parent / "fixtures"

# Demo rules served alongside the bundle; the planted recipes top out at 10
# vigorous minutes, so the demo demotion threshold sits below that.
RULES = [
    {
        "id": "hr_demote",
        "field": "resting_hr",
        "comparator": ">=",
        "threshold": 85,
        "action": {"type": "demote_if_vigorous_deficit_above", "minutes": 5},
    }
]

# Five 30-minute light blocks painted from midnight, the rest sedentary,
# slider at noon. Counts are cut-point band midpoints (see state.ts).
LIGHT_MID = (100 + 1535) / 2
SEDENTARY_MID = 100 / 2
MIDDAY_COUNTS = [LIGHT_MID] * 150 + [SEDENTARY_MID] * 570
MIDDAY_BODY = {"subject_id": "S000", "t_m": 720, "partial_counts": MIDDAY_COUNTS}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    spec = dataclasses.replace(default_cohort_spec(n_subjects=4, seed=2), days_per_subject=14)
    data = generate_cohort(spec)
    cfg = PipelineConfig(required_days=14, recipe=RecipeConfig(min_cluster_days=2))
    result = run_pipeline(data.epoch_csv, data.metadata_csv, cfg)
    rules = [ConstraintRule.from_dict(r) for r in RULES]
    client = TestClient(create_app(result.bundle, rules=rules))

    def write(name: str, payload) -> None:
        (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")

    write("rules.json", RULES)
    write("subjects.json", client.get("/api/v1/subjects").json())
    write("modes_S000.json", client.get("/api/v1/subjects/S000/modes?downsample=10").json())
    write("recipes_S000.json", client.get("/api/v1/subjects/S000/recipes").json())

    midday = client.post("/api/v1/recommend", json=MIDDAY_BODY)
    assert midday.status_code == 200, midday.text
    write("recommend_midday.json", midday.json())

    demoted_body = {**MIDDAY_BODY, "metadata": {"resting_hr": 90}}
    demoted = client.post("/api/v1/recommend", json=demoted_body)
    assert demoted.status_code == 200, demoted.text
    doc = demoted.json()
    assert doc["explain"]["triggered_rules"] == ["hr_demote"], doc["explain"]
    write("recommend_demoted.json", doc)
    write(
        "whatif_request.json",
        {
            "subject_id": "S000",
            "t_m": 720,
            "blocks_light": 5,
            "midday_body": MIDDAY_BODY,
            "demoted_body": demoted_body,
        },
    )

    errors = {}
    errors["unknown_subject"] = client.get("/api/v1/subjects/ZZZ/modes").json()
    bad_len = client.post(
        "/api/v1/recommend",
        json={"subject_id": "S000", "t_m": 10, "partial_counts": [0.0] * 9},
    )
    assert bad_len.status_code == 422
    errors["length_mismatch"] = bad_len.json()
    bad_window = client.post(
        "/api/v1/recommend", json={"subject_id": "S000", "t_m": 0, "partial_counts": []}
    )
    assert bad_window.status_code == 422
    errors["bad_window"] = bad_window.json()
    missing = client.post("/api/v1/recommend", json={"subject_id": "S000"})
    assert missing.status_code == 422
    errors["validation_error"] = missing.json()
    unloaded = TestClient(create_app(None)).get("/api/v1/subjects")
    assert unloaded.status_code == 503
    errors["bundle_not_loaded"] = unloaded.json()

    # a 7-day default cohort leaves the 2-day weekend mode without recipes
    small = generate_cohort(default_cohort_spec(n_subjects=1, seed=1))
    small_result = run_pipeline(small.epoch_csv, None, PipelineConfig())
    small_bundle = small_result.bundle
    subject = small_bundle.subject_ids[0]
    empty_mode = next(
        m for m, r in enumerate(small_bundle.subjects[subject].recipes.modes) if not r
    )
    centroid = small_bundle.subjects[subject].modes.centroids[empty_mode]
    resp = TestClient(create_app(small_bundle)).post(
        "/api/v1/recommend",
        json={"subject_id": subject, "t_m": 720, "partial_counts": list(centroid[:720])},
    )
    assert resp.status_code == 409, resp.text
    errors["no_recipes_for_mode"] = resp.json()
    write("errors.json", errors)

    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
