"""Pydantic request/response models for the HTTP API.

The payload schemas are documented in docs/api.md; the UI renders
numbers from these payloads only, never computing scores locally.
"""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class ConfigModel(BaseModel):
    window_s: float = Field(default=0.100, gt=0)
    hop_s: float = Field(default=0.010, gt=0)
    k_min: int = Field(default=2, ge=2)
    k_max: int = Field(default=8, ge=2)
    tau: float = Field(default=0.0, ge=0.0, le=1.0)
    motion_metric: str = "displacement"
    muted: list[str] = Field(default_factory=list)


class CreateComparisonRequest(BaseModel):
    patient_id: str
    motion_type: str
    # omitted fields fall back to the service's configured defaults
    config: Optional[ConfigModel] = None


class ThresholdRequest(BaseModel):
    tau: float = Field(ge=0.0, le=1.0)


class MuteRequest(BaseModel):
    muscle: str


class TruncateRequest(BaseModel):
    t0: float
    t1: float
    side: str = "both"  # affected | unaffected | both


class BrushRequest(BaseModel):
    side: str
    t0: float
    t1: float


class CatalogItem(BaseModel):
    patient_id: str
    motion_type: str
    side: str
    sample_rate_hz: float
    duration_s: float
    muscle_count: int
    has_motion: bool
    has_video: bool


class CatalogResponse(BaseModel):
    items: list[CatalogItem]
    facets: dict[str, list[str]]
    total: int
    offset: int
    limit: int


class MuscleMeta(BaseModel):
    name: str
    group: str
    color: str


class SeriesModel(BaseModel):
    times: list[float]
    values: list[float]


class ChartModel(BaseModel):
    muscle: str
    side: str
    times: list[float]
    base: list[float]
    highlighted: list[float]
    visible: bool


class ScoreModel(BaseModel):
    muscle: str
    side: str
    divergence: float
    skewness: float
    skew_weight: float
    score: float
    normalized_score: float


class ChartVisibility(BaseModel):
    muscle: str
    side: str
    visible: bool


class VisibilityModel(BaseModel):
    tau: float
    h_max: float
    charts: list[ChartVisibility]
    collapsed: list[str]
    surviving: list[str]


class MotionModel(BaseModel):
    metric: str
    affected: Optional[SeriesModel] = None
    unaffected: Optional[SeriesModel] = None


class ComparisonPayload(BaseModel):
    handle_id: str
    patient_id: str
    motion_type: str
    config: ConfigModel
    muscles: list[MuscleMeta]
    charts: list[ChartModel]
    scores: list[ScoreModel]
    visibility: VisibilityModel
    motion: Optional[MotionModel] = None
    threshold: float
    muted: list[str]
    unpaired: list[str]


class ProportionModel(BaseModel):
    side: str
    interval: tuple[float, float]
    shares: dict[str, float]


class VideoLocator(BaseModel):
    path: str
    start_s: float
    end_s: float


class BrushResponse(BaseModel):
    summary: ProportionModel
    video: Optional[VideoLocator] = None


class TruncationModel(BaseModel):
    patient_id: str
    motion_type: str
    side: str
    t0: float
    t1: float


class ComparisonStateModel(BaseModel):
    patient_id: str
    motion_type: str
    tau: float = Field(default=0.0, ge=0.0, le=1.0)
    muted: list[str] = Field(default_factory=list)


class BrushModel(BaseModel):
    id: str
    patient_id: str
    motion_type: str
    side: str
    t0: float
    t1: float
    note: str = ""


class SessionModel(BaseModel):
    id: str = ""
    owner: str = ""
    truncations: list[TruncationModel] = Field(default_factory=list)
    comparisons: list[ComparisonStateModel] = Field(default_factory=list)
    brushes: list[BrushModel] = Field(default_factory=list)
    created: str = ""
    modified: str = ""


class GridCellModel(BaseModel):
    row: str
    column: str
    session_id: str
    brush_id: str
    side: str
    interval: tuple[float, float]
    shares: dict[str, float] = Field(default_factory=dict)
    annotation: str = ""


class PresentationModel(BaseModel):
    id: str = ""
    title: str = ""
    subtitle: str = ""
    cells: list[GridCellModel] = Field(default_factory=list)


class IdResponse(BaseModel):
    id: str


class IdListResponse(BaseModel):
    ids: list[str]
