"""HTTP API over a loaded model bundle.

Read-only endpoints under /api/v1 serve subject summaries, mode models,
recipe books, and recommendations; an admin endpoint swaps the bundle
atomically. Error bodies are always {code, message} with code from a closed
set: bundle_not_loaded, unknown_subject, bad_window, length_mismatch,
no_recipes_for_mode, validation_error, bad_request, forbidden.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .core import SubjectMetadata, canonical_json
from .errors import (
    BadWindow,
    BundleNotLoaded,
    LengthMismatch,
    NoRecipesForMode,
    UnknownSubject,
)
from .ingest import label_counts
from .pipeline import ModelBundle
from .recommend import ConstraintRule, recommend_with_explain, recommendation_document

_META_FIELDS = ("age", "gender", "bmi", "resting_hr")


class RecommendRequest(BaseModel):
    subject_id: str
    t_m: int
    partial_counts: list[float]
    wake_onset: int = 0
    metadata: dict[str, Any] | None = None
    rules: list[dict[str, Any]] | None = None


def _metadata_from_overrides(subject_id: str, overrides: dict[str, Any] | None) -> SubjectMetadata:
    if not overrides:
        return SubjectMetadata(subject_id=subject_id)
    known = {k: overrides[k] for k in _META_FIELDS if k in overrides}
    extensions = tuple(
        (k, float(v)) for k, v in overrides.items() if k not in _META_FIELDS
    )
    return SubjectMetadata(
        subject_id=subject_id,
        age=None if known.get("age") is None else float(known["age"]),
        gender=known.get("gender"),
        bmi=None if known.get("bmi") is None else float(known["bmi"]),
        resting_hr=None if known.get("resting_hr") is None else float(known["resting_hr"]),
        extensions=extensions,
    )


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _downsample(values: tuple[float, ...], block: int) -> list[float]:
    return [
        sum(values[i : i + block]) / block for i in range(0, len(values), block)
    ]


def create_app(
    bundle: ModelBundle | None,
    rules: list[ConstraintRule] | None = None,
    bundle_path: str | None = None,
    ui_dir: str | None = None,
    cors_origins: list[str] | None = None,
    admin_token: str | None = None,
) -> FastAPI:
    app = FastAPI(title="paris", docs_url=None, redoc_url=None)
    app.state.bundle = bundle
    app.state.rules = list(rules) if rules is not None else []
    app.state.bundle_path = bundle_path
    app.state.admin_token = admin_token

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc.errors()[:3]))

    def current_bundle() -> ModelBundle:
        loaded = app.state.bundle
        if loaded is None:
            raise BundleNotLoaded("no bundle loaded")
        return loaded

    @app.exception_handler(BundleNotLoaded)
    async def on_not_loaded(request: Request, exc: BundleNotLoaded):
        return _error(503, "bundle_not_loaded", str(exc))

    @app.exception_handler(UnknownSubject)
    async def on_unknown_subject(request: Request, exc: UnknownSubject):
        return _error(404, "unknown_subject", f"unknown subject {exc}")

    @app.get("/api/v1/subjects")
    def list_subjects():
        loaded = current_bundle()
        return [
            {
                "subject_id": sid,
                "k": loaded.subjects[sid].modes.k,
                "silhouette": loaded.subjects[sid].modes.silhouette,
                "recipe_counts": [len(m) for m in loaded.subjects[sid].recipes.modes],
            }
            for sid in loaded.subject_ids
        ]

    @app.get("/api/v1/subjects/{subject_id}/modes")
    def get_modes(subject_id: str, downsample: int | None = Query(default=None)):
        loaded = current_bundle()
        model = loaded.subject(subject_id).modes
        doc = model.to_dict()
        if downsample is not None:
            width = len(model.centroids[0])
            if downsample < 1 or width % downsample != 0:
                return _error(
                    422, "bad_request", f"downsample must divide {width}"
                )
            doc["centroids"] = [_downsample(c, downsample) for c in model.centroids]
        return doc

    @app.get("/api/v1/subjects/{subject_id}/recipes")
    def get_recipes(subject_id: str):
        loaded = current_bundle()
        return loaded.subject(subject_id).recipes.to_dict()

    @app.post("/api/v1/recommend")
    def post_recommend(body: RecommendRequest):
        loaded = current_bundle()
        models = loaded.subject(body.subject_id)
        if len(body.partial_counts) != body.t_m:
            return _error(
                422,
                "length_mismatch",
                f"partial_counts has {len(body.partial_counts)} values, expected t_m={body.t_m}",
            )
        rules = app.state.rules
        if body.rules is not None:
            try:
                rules = [ConstraintRule.from_dict(r) for r in body.rules]
            except (KeyError, ValueError) as exc:
                return _error(422, "validation_error", f"bad rules override: {exc}")
        meta = _metadata_from_overrides(body.subject_id, body.metadata)
        labels = label_counts(body.partial_counts, loaded.cut_points)
        try:
            rec, explain = recommend_with_explain(
                models.modes,
                models.recipes,
                body.partial_counts,
                labels,
                body.t_m,
                meta,
                rules,
                body.wake_onset,
            )
        except NoRecipesForMode as exc:
            return _error(409, "no_recipes_for_mode", str(exc))
        except BadWindow as exc:
            return _error(422, "bad_window", str(exc))
        except LengthMismatch as exc:
            return _error(422, "length_mismatch", str(exc))
        doc = recommendation_document(rec, explain)
        return Response(content=canonical_json(doc), media_type="application/json")

    @app.post("/api/v1/admin/reload")
    def admin_reload(x_admin_token: str | None = Header(default=None)):
        if app.state.admin_token is None or x_admin_token != app.state.admin_token:
            return _error(403, "forbidden", "bad or missing admin token")
        if not app.state.bundle_path:
            return _error(503, "bundle_not_loaded", "no bundle path configured")
        app.state.bundle = ModelBundle.load(app.state.bundle_path)
        return {"reloaded": True, "subjects": len(app.state.bundle.subjects)}

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
