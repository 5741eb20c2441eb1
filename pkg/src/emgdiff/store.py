"""Persistence of analyst state: sessions and presentation documents.

An embedded document store holds one JSON file per document under the
data directory.  Writes go through a temp file and an atomic rename and
are serialized per document id, so concurrent readers never observe a
partial document.
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ingest import NotFoundError


class StoreError(ValueError):
    """Invalid document content."""


@dataclass(frozen=True)
class Truncation:
    patient_id: str
    motion_type: str
    side: str
    t0: float
    t1: float


@dataclass(frozen=True)
class ComparisonState:
    patient_id: str
    motion_type: str
    tau: float = 0.0
    muted: tuple[str, ...] = ()

    def __post_init__(self):
        if not (0.0 <= self.tau <= 1.0):
            raise StoreError("tau must lie in [0, 1]")
        object.__setattr__(self, "muted", tuple(self.muted))


@dataclass(frozen=True)
class Brush:
    id: str
    patient_id: str
    motion_type: str
    side: str
    t0: float
    t1: float
    note: str = ""


@dataclass(frozen=True)
class Session:
    """One analyst's saved steering state."""

    id: str
    owner: str = ""
    truncations: tuple[Truncation, ...] = ()
    comparisons: tuple[ComparisonState, ...] = ()
    brushes: tuple[Brush, ...] = ()
    created: str = ""
    modified: str = ""

    def __post_init__(self):
        object.__setattr__(self, "truncations", tuple(self.truncations))
        object.__setattr__(self, "comparisons", tuple(self.comparisons))
        object.__setattr__(self, "brushes", tuple(self.brushes))

    def brush(self, brush_id: str) -> Brush:
        for b in self.brushes:
            if b.id == brush_id:
                return b
        raise NotFoundError(f"session {self.id}: no brush '{brush_id}'")


@dataclass(frozen=True)
class GridCell:
    """One presentation cell: a frozen proportion snapshot plus annotation."""

    row: str  # patient label
    column: str  # finding-group label
    session_id: str
    brush_id: str
    side: str
    interval: tuple[float, float]
    shares: dict[str, float] = field(default_factory=dict)
    annotation: str = ""

    def __post_init__(self):
        object.__setattr__(self, "interval", tuple(self.interval))


@dataclass(frozen=True)
class PresentationDoc:
    id: str
    title: str = ""
    subtitle: str = ""
    cells: tuple[GridCell, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))


class DocumentStore:
    """Embedded JSON document store keyed by (kind, id)."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._locks: dict[tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, kind: str, doc_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault((kind, doc_id), threading.Lock())

    def _path(self, kind: str, doc_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in doc_id)
        return self.root / kind / f"{safe}.json"

    def save(self, kind: str, doc_id: str, doc: dict) -> None:
        path = self._path(kind, doc_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(doc, sort_keys=True, indent=1)
        with self._lock(kind, doc_id):
            tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
            tmp.write_text(payload)
            os.replace(tmp, path)

    def load(self, kind: str, doc_id: str) -> dict:
        path = self._path(kind, doc_id)
        if not path.is_file():
            raise NotFoundError(f"no {kind} document '{doc_id}'")
        with self._lock(kind, doc_id):
            return json.loads(path.read_text())

    def exists(self, kind: str, doc_id: str) -> bool:
        return self._path(kind, doc_id).is_file()

    def list_ids(self, kind: str) -> list[str]:
        d = self.root / kind
        if not d.is_dir():
            return []
        return sorted(p.stem for p in d.glob("*.json"))

    def delete(self, kind: str, doc_id: str) -> None:
        path = self._path(kind, doc_id)
        with self._lock(kind, doc_id):
            if not path.is_file():
                raise NotFoundError(f"no {kind} document '{doc_id}'")
            path.unlink()


SESSIONS = "sessions"
PRESENTATIONS = "presentations"


def save_session(store: DocumentStore, session: Session) -> str:
    store.save(SESSIONS, session.id, asdict(session))
    return session.id


def load_session(store: DocumentStore, session_id: str) -> Session:
    doc = store.load(SESSIONS, session_id)
    return Session(
        id=doc["id"],
        owner=doc.get("owner", ""),
        truncations=tuple(Truncation(**t) for t in doc.get("truncations", ())),
        comparisons=tuple(ComparisonState(**c) for c in doc.get("comparisons", ())),
        brushes=tuple(Brush(**b) for b in doc.get("brushes", ())),
        created=doc.get("created", ""),
        modified=doc.get("modified", ""),
    )


def save_presentation(store: DocumentStore, doc: PresentationDoc) -> str:
    store.save(PRESENTATIONS, doc.id, asdict(doc))
    return doc.id


def load_presentation(store: DocumentStore, doc_id: str) -> PresentationDoc:
    raw = store.load(PRESENTATIONS, doc_id)
    return PresentationDoc(
        id=raw["id"],
        title=raw.get("title", ""),
        subtitle=raw.get("subtitle", ""),
        cells=tuple(
            GridCell(
                row=c["row"],
                column=c["column"],
                session_id=c["session_id"],
                brush_id=c["brush_id"],
                side=c["side"],
                interval=tuple(c["interval"]),
                shares=dict(c.get("shares", {})),
                annotation=c.get("annotation", ""),
            )
            for c in raw.get("cells", ())
        ),
    )


def check_presentation_refs(store: DocumentStore, doc: PresentationDoc) -> list[str]:
    """Cells whose brush reference no longer resolves; empty when exportable."""
    problems = []
    for i, cell in enumerate(doc.cells):
        label = f"cell {i} (row='{cell.row}', column='{cell.column}')"
        try:
            session = load_session(store, cell.session_id)
        except NotFoundError:
            problems.append(f"{label}: session '{cell.session_id}' not found")
            continue
        try:
            session.brush(cell.brush_id)
        except NotFoundError:
            problems.append(f"{label}: brush '{cell.brush_id}' not found")
    return problems
