"""FastAPI service wrapping the comparison engine.

Stateless contract: every response is a function of the persisted data
directory and the request sequence.  Comparison handles are a per-process
cache keyed by (patient, motion, config fingerprint); truncation, muting
and threshold changes mutate handle state under a per-handle lock so
concurrent recomputes coalesce.

Errors always carry a machine-readable code and a human message:
``{"error": {"code": ..., "message": ...}}``.
"""
from __future__ import annotations

import hashlib
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from ..decimate import minmax_indices
from ..ingest import Catalog, IngestError, NotFoundError, load_data_dir
from ..model import AFFECTED, SIDES, UNAFFECTED, Assessment, DomainError
from ..render import assign_colors, presentation_svg
from ..significance import (
    BundleComparison,
    CompareConfig,
    apply_threshold,
    compare_bundles,
    mute_muscle,
    set_state,
    unmute_muscle,
    visibility_report,
)
from ..signals import proportion_summary, truncate
from ..store import (
    Brush,
    ComparisonState,
    DocumentStore,
    GridCell,
    PresentationDoc,
    Session,
    StoreError,
    Truncation,
    check_presentation_refs,
    load_presentation,
    load_session,
    save_presentation,
    save_session,
)
from . import schemas

MAX_SERIES_POINTS = 2000
PAGE_SIZE = 100


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class ComparisonHandle:
    """Cached comparison plus its current steering state."""

    def __init__(self, handle_id: str, affected: Assessment, unaffected: Assessment,
                 config: CompareConfig):
        self.id = handle_id
        self.affected = affected
        self.unaffected = unaffected
        self.config = config
        self.lock = threading.Lock()
        self.comparison: BundleComparison = compare_bundles(affected, unaffected, config)


def _to_engine_config(model: schemas.ConfigModel) -> CompareConfig:
    try:
        return CompareConfig(
            window_s=model.window_s,
            hop_s=model.hop_s,
            k_min=model.k_min,
            k_max=model.k_max,
            tau=model.tau,
            motion_metric=model.motion_metric,
            muted=frozenset(model.muted),
        )
    except DomainError as e:
        raise ApiError(400, "invalid_config", str(e)) from e


def _config_model(config: CompareConfig, comparison: BundleComparison) -> schemas.ConfigModel:
    return schemas.ConfigModel(
        window_s=config.window_s,
        hop_s=config.hop_s,
        k_min=config.k_min,
        k_max=config.k_max,
        tau=comparison.threshold,
        motion_metric=config.motion_metric,
        muted=sorted(comparison.muted),
    )


def _series(times: np.ndarray, values: np.ndarray) -> schemas.SeriesModel:
    idx = minmax_indices(values, MAX_SERIES_POINTS)
    return schemas.SeriesModel(
        times=[float(t) for t in times[idx]], values=[float(v) for v in values[idx]]
    )


def visibility_model(comparison: BundleComparison) -> schemas.VisibilityModel:
    report = visibility_report(comparison)
    return schemas.VisibilityModel(
        tau=report.tau,
        h_max=report.h_max,
        charts=[
            schemas.ChartVisibility(muscle=name, side=side, visible=vis)
            for (name, side), vis in report.chart_visible.items()
        ],
        collapsed=list(report.collapsed),
        surviving=list(report.surviving),
    )


def comparison_payload(handle: ComparisonHandle) -> schemas.ComparisonPayload:
    c = handle.comparison
    colors = assign_colors(c.muscles)
    charts = []
    for m in c.muscles:
        for side in (AFFECTED, UNAFFECTED):
            ch = c.charts[(m.name, side)]
            idx = minmax_indices(ch.base.values, MAX_SERIES_POINTS)
            charts.append(
                schemas.ChartModel(
                    muscle=m.name,
                    side=side,
                    times=[float(t) for t in ch.base.times[idx]],
                    base=[float(v) for v in ch.base.values[idx]],
                    highlighted=[float(v) for v in ch.highlighted[idx]],
                    visible=ch.visible,
                )
            )
    scores = [
        schemas.ScoreModel(
            muscle=name,
            side=side,
            divergence=s.divergence,
            skewness=s.skewness,
            skew_weight=s.skew_weight,
            score=s.score,
            normalized_score=s.normalized_score,
        )
        for (name, side), s in sorted(c.scores.items())
    ]
    motion = None
    if c.motion:
        motion = schemas.MotionModel(
            metric=c.config.motion_metric,
            affected=_series(*c.motion[AFFECTED]) if AFFECTED in c.motion else None,
            unaffected=_series(*c.motion[UNAFFECTED]) if UNAFFECTED in c.motion else None,
        )
    return schemas.ComparisonPayload(
        handle_id=handle.id,
        patient_id=c.patient_id,
        motion_type=c.motion_type,
        config=_config_model(handle.config, c),
        muscles=[
            schemas.MuscleMeta(name=m.name, group=m.group, color=colors[m.name])
            for m in c.muscles
        ],
        charts=charts,
        scores=scores,
        visibility=visibility_model(c),
        motion=motion,
        threshold=c.threshold,
        muted=sorted(c.muted),
        unpaired=list(c.unpaired),
    )


def create_app(
    data_dir: str | Path,
    defaults: schemas.ConfigModel | None = None,
    catalog: Catalog | None = None,
) -> FastAPI:
    app = FastAPI(title="emgdiff", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.catalog = catalog if catalog is not None else load_data_dir(data_dir)
    app.state.store = DocumentStore(Path(data_dir) / "store")
    app.state.defaults = defaults or schemas.ConfigModel()
    app.state.handles: dict[str, ComparisonHandle] = {}
    app.state.handles_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def api_error_handler(_: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(DomainError)
    async def domain_error_handler(_: Request, exc: DomainError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_request", "message": str(exc)}},
        )

    @app.exception_handler(StoreError)
    async def store_error_handler(_: Request, exc: StoreError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_document", "message": str(exc)}},
        )

    @app.exception_handler(IngestError)
    async def ingest_error_handler(_: Request, exc: IngestError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "ingest_failed", "message": str(exc)}},
        )

    @app.exception_handler(NotFoundError)
    async def notfound_handler(_: Request, exc: NotFoundError):
        return JSONResponse(
            status_code=404,
            content={"error": {"code": "not_found", "message": str(exc).strip("'\"")}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(p) for p in first.get("loc", ()))
        return JSONResponse(
            status_code=400,
            content={
                "error": {
                    "code": "validation_error",
                    "message": f"{loc}: {first.get('msg', 'invalid request')}",
                }
            },
        )

    def get_handle(handle_id: str) -> ComparisonHandle:
        try:
            return app.state.handles[handle_id]
        except KeyError:
            raise NotFoundError(f"no comparison handle '{handle_id}'") from None

    # ------------------------------------------------------------------ catalog

    @app.get("/catalog", response_model=schemas.CatalogResponse)
    def get_catalog(
        patient: str | None = None,
        motion: str | None = None,
        side: str | None = None,
        offset: int = 0,
        limit: int = PAGE_SIZE,
    ):
        if side is not None and side not in SIDES:
            raise ApiError(400, "invalid_facet", f"side must be one of {SIDES}")
        if offset < 0:
            raise ApiError(400, "invalid_page", "offset must be >= 0")
        limit = max(1, min(limit, PAGE_SIZE))
        result = app.state.catalog.query(patient=patient, motion=motion, side=side)
        page = result.items[offset : offset + limit]
        items = []
        for a in page:
            lo, hi = a.recording_bounds()
            first = next(iter(a.channels.values()))
            items.append(
                schemas.CatalogItem(
                    patient_id=a.patient_id,
                    motion_type=a.motion_type,
                    side=a.side,
                    sample_rate_hz=first.sample_rate,
                    duration_s=hi - lo,
                    muscle_count=len(a.channels),
                    has_motion=a.motion is not None,
                    has_video=a.video is not None,
                )
            )
        return schemas.CatalogResponse(
            items=items,
            facets=result.facets,
            total=len(result.items),
            offset=offset,
            limit=limit,
        )

    # -------------------------------------------------------------- comparisons

    def _merge_config(req_config: schemas.ConfigModel | None) -> schemas.ConfigModel:
        base: schemas.ConfigModel = app.state.defaults
        if req_config is None:
            return base
        overrides = {
            k: v
            for k, v in req_config.model_dump().items()
            if k in req_config.model_fields_set
        }
        return base.model_copy(update=overrides)

    @app.post("/comparisons", response_model=schemas.ComparisonPayload)
    def create_comparison(req: schemas.CreateComparisonRequest):
        config = _to_engine_config(_merge_config(req.config))
        try:
            affected, unaffected = app.state.catalog.pair(req.patient_id, req.motion_type)
        except NotFoundError as e:
            raise ApiError(409, "missing_side", str(e).strip("'\"")) from e
        digest = hashlib.sha1(
            f"{req.patient_id}|{req.motion_type}|{config.fingerprint()}".encode()
        ).hexdigest()[:16]
        with app.state.handles_lock:
            handle = app.state.handles.get(digest)
            if handle is None:
                handle = ComparisonHandle(digest, affected, unaffected, config)
                app.state.handles[digest] = handle
        with handle.lock:
            # (re)apply requested interactive state; identical requests no-op
            muscle_names = {m.name for m in handle.comparison.muscles}
            target = frozenset(config.muted) & muscle_names
            if handle.comparison.muted != target or handle.comparison.threshold != config.tau:
                handle.comparison = set_state(handle.comparison, config.tau, target)
            return comparison_payload(handle)

    @app.get("/comparisons/{handle_id}", response_model=schemas.ComparisonPayload)
    def get_comparison(handle_id: str):
        handle = get_handle(handle_id)
        with handle.lock:
            return comparison_payload(handle)

    @app.post("/comparisons/{handle_id}/threshold", response_model=schemas.VisibilityModel)
    def set_threshold(handle_id: str, req: schemas.ThresholdRequest):
        handle = get_handle(handle_id)
        with handle.lock:
            if handle.comparison.threshold != req.tau:
                handle.comparison = apply_threshold(handle.comparison, req.tau)
            return visibility_model(handle.comparison)

    @app.post("/comparisons/{handle_id}/mute", response_model=schemas.ComparisonPayload)
    def mute(handle_id: str, req: schemas.MuteRequest):
        handle = get_handle(handle_id)
        with handle.lock:
            if req.muscle not in handle.comparison.muted:
                handle.comparison = mute_muscle(handle.comparison, req.muscle)
            return comparison_payload(handle)

    @app.post("/comparisons/{handle_id}/unmute", response_model=schemas.ComparisonPayload)
    def unmute(handle_id: str, req: schemas.MuteRequest):
        handle = get_handle(handle_id)
        with handle.lock:
            if req.muscle in handle.comparison.muted:
                handle.comparison = unmute_muscle(handle.comparison, req.muscle)
            return comparison_payload(handle)

    @app.post("/comparisons/{handle_id}/truncate", response_model=schemas.ComparisonPayload)
    def truncate_handle(handle_id: str, req: schemas.TruncateRequest):
        if req.side not in (*SIDES, "both"):
            raise ApiError(400, "invalid_side", f"side must be one of {SIDES} or 'both'")
        handle = get_handle(handle_id)
        with handle.lock:
            affected, unaffected = handle.affected, handle.unaffected
            if req.side in (AFFECTED, "both"):
                affected = truncate(affected, req.t0, req.t1)
            if req.side in (UNAFFECTED, "both"):
                unaffected = truncate(unaffected, req.t0, req.t1)
            changed = (
                affected.retained_interval != handle.affected.retained_interval
                or unaffected.retained_interval != handle.unaffected.retained_interval
            )
            if changed:
                # envelopes depend on the interval: full recompute
                config = handle.config
                state = CompareConfig(
                    window_s=config.window_s,
                    hop_s=config.hop_s,
                    k_min=config.k_min,
                    k_max=config.k_max,
                    tau=handle.comparison.threshold,
                    motion_metric=config.motion_metric,
                    muted=handle.comparison.muted,
                )
                handle.affected = affected
                handle.unaffected = unaffected
                handle.comparison = compare_bundles(affected, unaffected, state)
            return comparison_payload(handle)

    @app.post("/comparisons/{handle_id}/brush", response_model=schemas.BrushResponse)
    def brush(handle_id: str, req: schemas.BrushRequest):
        if req.side not in SIDES:
            raise ApiError(400, "invalid_side", f"side must be one of {SIDES}")
        handle = get_handle(handle_id)
        with handle.lock:
            assessment = handle.affected if req.side == AFFECTED else handle.unaffected
            lo, hi = assessment.retained_interval
            if not (lo - 1e-12 <= req.t0 < req.t1 <= hi + 1e-12):
                raise ApiError(
                    400,
                    "brush_out_of_bounds",
                    f"brush [{req.t0}, {req.t1}] outside retained interval [{lo}, {hi}]",
                )
            envelopes = handle.comparison.base_envelopes(req.side)
            summary = proportion_summary(
                envelopes, (req.t0, req.t1), muted=handle.comparison.muted, side=req.side
            )
            video = None
            if assessment.video is not None:
                video = schemas.VideoLocator(
                    path=assessment.video.path,
                    start_s=req.t0 + assessment.video.offset_s,
                    end_s=req.t1 + assessment.video.offset_s,
                )
            return schemas.BrushResponse(
                summary=schemas.ProportionModel(
                    side=summary.side, interval=summary.interval, shares=summary.shares
                ),
                video=video,
            )

    # ----------------------------------------------------------------- sessions

    def _session_from_model(model: schemas.SessionModel, session_id: str) -> Session:
        session = Session(
            id=session_id,
            owner=model.owner,
            truncations=tuple(Truncation(**t.model_dump()) for t in model.truncations),
            comparisons=tuple(
                ComparisonState(
                    patient_id=c.patient_id,
                    motion_type=c.motion_type,
                    tau=c.tau,
                    muted=tuple(c.muted),
                )
                for c in model.comparisons
            ),
            brushes=tuple(Brush(**b.model_dump()) for b in model.brushes),
            created=model.created,
            modified=model.modified,
        )
        _validate_session(session)
        return session

    def _validate_session(session: Session) -> None:
        catalog: Catalog = app.state.catalog
        retained: dict[tuple[str, str, str], tuple[float, float]] = {}
        for t in session.truncations:
            assessment = catalog.get(t.patient_id, t.motion_type, t.side)
            truncate(assessment, t.t0, t.t1)  # bounds check
            retained[(t.patient_id, t.motion_type, t.side)] = (t.t0, t.t1)
        for b in session.brushes:
            assessment = catalog.get(b.patient_id, b.motion_type, b.side)
            lo, hi = retained.get(
                (b.patient_id, b.motion_type, b.side), assessment.retained_interval
            )
            if not (lo - 1e-12 <= b.t0 < b.t1 <= hi + 1e-12):
                raise ApiError(
                    400,
                    "brush_out_of_bounds",
                    f"brush '{b.id}' [{b.t0}, {b.t1}] outside retained interval [{lo}, {hi}]",
                )

    def _session_model(session: Session) -> schemas.SessionModel:
        return schemas.SessionModel(
            id=session.id,
            owner=session.owner,
            truncations=[schemas.TruncationModel(**vars(t)) for t in session.truncations],
            comparisons=[
                schemas.ComparisonStateModel(
                    patient_id=c.patient_id,
                    motion_type=c.motion_type,
                    tau=c.tau,
                    muted=list(c.muted),
                )
                for c in session.comparisons
            ],
            brushes=[schemas.BrushModel(**vars(b)) for b in session.brushes],
            created=session.created,
            modified=session.modified,
        )

    @app.get("/sessions", response_model=schemas.IdListResponse)
    def list_sessions():
        return schemas.IdListResponse(ids=app.state.store.list_ids("sessions"))

    @app.post("/sessions", response_model=schemas.IdResponse, status_code=201)
    def create_session(model: schemas.SessionModel):
        session_id = model.id or f"session-{len(app.state.store.list_ids('sessions')) + 1:04d}"
        session = _session_from_model(model, session_id)
        save_session(app.state.store, session)
        return schemas.IdResponse(id=session_id)

    @app.put("/sessions/{session_id}", response_model=schemas.IdResponse)
    def put_session(session_id: str, model: schemas.SessionModel):
        session = _session_from_model(model, session_id)
        save_session(app.state.store, session)
        return schemas.IdResponse(id=session_id)

    @app.get("/sessions/{session_id}", response_model=schemas.SessionModel)
    def get_session(session_id: str):
        return _session_model(load_session(app.state.store, session_id))

    # ------------------------------------------------------------ presentations

    def _doc_from_model(model: schemas.PresentationModel, doc_id: str) -> PresentationDoc:
        return PresentationDoc(
            id=doc_id,
            title=model.title,
            subtitle=model.subtitle,
            cells=tuple(
                GridCell(
                    row=c.row,
                    column=c.column,
                    session_id=c.session_id,
                    brush_id=c.brush_id,
                    side=c.side,
                    interval=tuple(c.interval),
                    shares=dict(c.shares),
                    annotation=c.annotation,
                )
                for c in model.cells
            ),
        )

    def _doc_model(doc: PresentationDoc) -> schemas.PresentationModel:
        return schemas.PresentationModel(
            id=doc.id,
            title=doc.title,
            subtitle=doc.subtitle,
            cells=[
                schemas.GridCellModel(
                    row=c.row,
                    column=c.column,
                    session_id=c.session_id,
                    brush_id=c.brush_id,
                    side=c.side,
                    interval=c.interval,
                    shares=c.shares,
                    annotation=c.annotation,
                )
                for c in doc.cells
            ],
        )

    @app.get("/presentations", response_model=schemas.IdListResponse)
    def list_presentations():
        return schemas.IdListResponse(ids=app.state.store.list_ids("presentations"))

    @app.post("/presentations", response_model=schemas.IdResponse, status_code=201)
    def create_presentation(model: schemas.PresentationModel):
        doc_id = model.id or f"doc-{len(app.state.store.list_ids('presentations')) + 1:04d}"
        save_presentation(app.state.store, _doc_from_model(model, doc_id))
        return schemas.IdResponse(id=doc_id)

    @app.put("/presentations/{doc_id}", response_model=schemas.IdResponse)
    def put_presentation(doc_id: str, model: schemas.PresentationModel):
        save_presentation(app.state.store, _doc_from_model(model, doc_id))
        return schemas.IdResponse(id=doc_id)

    @app.get("/presentations/{doc_id}", response_model=schemas.PresentationModel)
    def get_presentation(doc_id: str):
        return _doc_model(load_presentation(app.state.store, doc_id))

    @app.get("/presentations/{doc_id}/export")
    def export_presentation(doc_id: str, format: str = "document"):
        doc = load_presentation(app.state.store, doc_id)
        problems = check_presentation_refs(app.state.store, doc)
        if problems:
            raise ApiError(409, "dangling_reference", "; ".join(problems))
        if format == "document":
            import json as _json
            from dataclasses import asdict

            body = _json.dumps(asdict(doc), sort_keys=True, indent=1)
            return Response(content=body, media_type="application/json")
        if format == "static-render":
            return Response(content=presentation_svg(doc), media_type="image/svg+xml")
        raise ApiError(400, "invalid_format", "format must be 'document' or 'static-render'")

    return app
