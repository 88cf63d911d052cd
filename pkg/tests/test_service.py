import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from paris.cli import main
from paris.pipeline import ModelBundle
from paris.recommend import default_rules
from paris.service import create_app


@pytest.fixture(scope="module")
def client(rich_result):
    app = create_app(rich_result.bundle, rules=default_rules())
    return TestClient(app)


def test_list_subjects(client, rich_result):
    resp = client.get("/api/v1/subjects")
    assert resp.status_code == 200
    body = resp.json()
    assert [s["subject_id"] for s in body] == rich_result.bundle.subject_ids
    for entry in body:
        assert entry["k"] == 2
        assert len(entry["recipe_counts"]) == 2


def test_empty_bundle_lists_empty():
    from paris.ingest import DEFAULT_CUT_POINTS

    app = create_app(ModelBundle(subjects={}, cut_points=DEFAULT_CUT_POINTS, config={}))
    resp = TestClient(app).get("/api/v1/subjects")
    assert resp.status_code == 200 and resp.json() == []


def test_unloaded_bundle_returns_503():
    app = create_app(None)
    resp = TestClient(app).get("/api/v1/subjects")
    assert resp.status_code == 503
    assert resp.json()["code"] == "bundle_not_loaded"


def test_get_modes(client):
    resp = client.get("/api/v1/subjects/S000/modes")
    assert resp.status_code == 200
    body = resp.json()
    assert body["k"] == 2
    assert len(body["centroids"][0]) == 1440


def test_get_modes_unknown_subject(client):
    resp = client.get("/api/v1/subjects/ZZZ/modes")
    assert resp.status_code == 404
    assert resp.json()["code"] == "unknown_subject"


def test_downsample_block_means(client, rich_result):
    resp = client.get("/api/v1/subjects/S000/modes?downsample=10")
    assert resp.status_code == 200
    body = resp.json()
    model = rich_result.bundle.subjects["S000"].modes
    for served, full in zip(body["centroids"], model.centroids):
        assert len(served) == 144
        for block in range(144):
            expected = sum(full[block * 10 : block * 10 + 10]) / 10
            assert served[block] == pytest.approx(expected, abs=1e-12)


def test_downsample_must_divide(client):
    resp = client.get("/api/v1/subjects/S000/modes?downsample=7")
    assert resp.status_code == 422
    assert resp.json()["code"] == "bad_request"


def test_get_recipes(client, rich_result):
    resp = client.get("/api/v1/subjects/S000/recipes")
    assert resp.status_code == 200
    assert resp.json() == rich_result.bundle.subjects["S000"].recipes.to_dict()


def _recommend_body(t_m=720, counts=None):
    counts = counts if counts is not None else [500.0] * 150 + [0.0] * (t_m - 150)
    return {"subject_id": "S000", "t_m": t_m, "partial_counts": counts}


def test_recommend_happy_path(client):
    resp = client.post("/api/v1/recommend", json=_recommend_body())
    assert resp.status_code == 200
    doc = resp.json()
    assert set(doc) == {"mode", "ordered_items", "explain"}
    probs = [i["membership_probability"] for i in doc["ordered_items"]]
    assert probs == sorted(probs, reverse=True)


def test_recommend_length_mismatch_422(client):
    body = _recommend_body()
    body["partial_counts"] = body["partial_counts"][:-5]
    resp = client.post("/api/v1/recommend", json=body)
    assert resp.status_code == 422
    assert resp.json()["code"] == "length_mismatch"


def test_recommend_unknown_subject_404(client):
    body = _recommend_body()
    body["subject_id"] = "ZZZ"
    resp = client.post("/api/v1/recommend", json=body)
    assert resp.status_code == 404


def test_recommend_bad_window_422(client):
    resp = client.post(
        "/api/v1/recommend",
        json={"subject_id": "S000", "t_m": 0, "partial_counts": []},
    )
    assert resp.status_code == 422
    assert resp.json()["code"] == "bad_window"


def test_recommend_empty_recipes_409(small_result):
    bundle = small_result.bundle
    subject = bundle.subject_ids[0]
    empty_modes = [
        m for m, recipes in enumerate(bundle.subjects[subject].recipes.modes) if not recipes
    ]
    assert empty_modes
    centroid = bundle.subjects[subject].modes.centroids[empty_modes[0]]
    app = create_app(bundle)
    resp = TestClient(app).post(
        "/api/v1/recommend",
        json={"subject_id": subject, "t_m": 720, "partial_counts": list(centroid[:720])},
    )
    assert resp.status_code == 409
    assert resp.json()["code"] == "no_recipes_for_mode"


def test_recommend_metadata_override_triggers_rule(client):
    body = _recommend_body()
    body["metadata"] = {"resting_hr": 90}
    body["rules"] = [
        {
            "id": "hr_demote",
            "field": "resting_hr",
            "comparator": ">=",
            "threshold": 85,
            "action": {"type": "demote_if_vigorous_deficit_above", "minutes": 5},
        }
    ]
    resp = client.post("/api/v1/recommend", json=body)
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["explain"]["triggered_rules"] == ["hr_demote"]
    assert doc["ordered_items"][-1]["constraint_flags"] == ["hr_demote"]


def test_validation_error_shape(client):
    resp = client.post("/api/v1/recommend", json={"subject_id": "S000"})
    assert resp.status_code == 422
    body = resp.json()
    assert set(body) == {"code", "message"}
    assert body["code"] == "validation_error"


def test_identical_requests_identical_responses(client):
    a = client.post("/api/v1/recommend", json=_recommend_body())
    b = client.post("/api/v1/recommend", json=_recommend_body())
    assert a.content == b.content


def test_cli_and_service_bytes_identical(tmp_path, rich_result):
    bundle_path = tmp_path / "bundle.json"
    rich_result.bundle.save(bundle_path)
    counts = [500.0] * 150 + [0.0] * 570
    partial = tmp_path / "partial.csv"
    partial.write_text(
        "minute,activity_count\n" + "\n".join(f"{i},{c}" for i, c in enumerate(counts)) + "\n",
        "utf-8",
    )
    cli = CliRunner().invoke(
        main,
        [
            "recommend",
            "--bundle", str(bundle_path),
            "--subject", "S000",
            "--partial", str(partial),
            "--tm", "720",
            "--explain",
        ],
    )
    assert cli.exit_code == 0
    app = create_app(rich_result.bundle, rules=default_rules())
    resp = TestClient(app).post(
        "/api/v1/recommend",
        json={"subject_id": "S000", "t_m": 720, "partial_counts": counts},
    )
    assert resp.status_code == 200
    assert cli.stdout_bytes == resp.content + b"\n"


def test_admin_reload_swaps_bundle(tmp_path, rich_result, small_result):
    path = tmp_path / "bundle.json"
    rich_result.bundle.save(path)
    app = create_app(rich_result.bundle, bundle_path=str(path), admin_token="sesame")
    client = TestClient(app)
    # without or with a wrong token the reload is refused
    assert client.post("/api/v1/admin/reload").status_code == 403
    assert client.post("/api/v1/admin/reload", headers={"X-Admin-Token": "nope"}).status_code == 403
    small_result.bundle.save(path)
    resp = client.post("/api/v1/admin/reload", headers={"X-Admin-Token": "sesame"})
    assert resp.status_code == 200
    assert resp.json()["subjects"] == len(small_result.bundle.subjects)
    listed = client.get("/api/v1/subjects").json()
    assert [s["subject_id"] for s in listed] == small_result.bundle.subject_ids


def test_static_ui_mount(tmp_path, rich_result):
    (tmp_path / "index.html").write_text("<html><body>what-if</body></html>", "utf-8")
    app = create_app(rich_result.bundle, ui_dir=str(tmp_path))
    client = TestClient(app)
    resp = client.get("/")
    assert resp.status_code == 200
    assert "what-if" in resp.text
    # API routes still take precedence over the static mount
    assert client.get("/api/v1/subjects").status_code == 200
