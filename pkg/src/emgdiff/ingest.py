"""Dataset ingestion: manifests, CSV parsing/validation, and the catalog.

File formats (all plain text, inspectable):

* EMG: comma-separated, header ``t,<col>...``, time in seconds, values
  in millivolts.  A muscle maps to one column, or to a bipolar pair of
  columns combined downstream.
* Motion: ``t,x,y,z`` in seconds and meters.
* Manifest: one JSON document per assessment describing paths, the
  sample rate, and the muscle-to-column mapping.  Paths are relative to
  the manifest's directory.  Video is stored by reference only.

Every validation failure names the file and, where it applies, the
column and 1-based data row.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .model import (
    Assessment,
    MUSCLE_GROUPS,
    MotionTrack,
    MuscleId,
    RawEmgChannel,
    SIDES,
    VideoRef,
)


class IngestError(ValueError):
    """A manifest or data file failed validation."""


class NotFoundError(KeyError):
    """The requested document or assessment does not exist."""


@dataclass(frozen=True)
class MuscleMapping:
    name: str
    group: str
    columns: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        if len(self.columns) not in (1, 2):
            raise IngestError(
                f"muscle {self.name}: expected 1 column or a bipolar pair, "
                f"got {len(self.columns)}"
            )
        if self.group not in MUSCLE_GROUPS:
            raise IngestError(f"muscle {self.name}: unknown group '{self.group}'")


@dataclass(frozen=True)
class Manifest:
    patient_id: str
    motion_type: str
    side: str
    sample_rate_hz: float
    emg_path: str
    muscles: tuple[MuscleMapping, ...]
    motion_path: Optional[str] = None
    video_path: Optional[str] = None
    video_offset_s: float = 0.0
    base_dir: Path = field(default_factory=Path)

    def resolve(self, rel: str) -> Path:
        return (self.base_dir / rel).resolve()


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise IngestError(f"manifest not parseable: {path}: {e}") from e
    for key in ("patient_id", "motion_type", "side", "sample_rate_hz", "emg_path", "muscles"):
        if key not in raw:
            raise IngestError(f"manifest {path}: missing key '{key}'")
    if raw["side"] not in SIDES:
        raise IngestError(f"manifest {path}: side must be one of {SIDES}")
    rate = float(raw["sample_rate_hz"])
    if rate <= 0:
        raise IngestError(f"manifest {path}: sample_rate_hz must be positive")
    muscles = tuple(
        MuscleMapping(m["name"], m["group"], tuple(m["columns"])) for m in raw["muscles"]
    )
    if not muscles:
        raise IngestError(f"manifest {path}: muscle catalog is empty")
    names = [m.name for m in muscles]
    if len(set(names)) != len(names):
        raise IngestError(f"manifest {path}: duplicate muscle names")
    return Manifest(
        patient_id=str(raw["patient_id"]),
        motion_type=str(raw["motion_type"]),
        side=raw["side"],
        sample_rate_hz=rate,
        emg_path=raw["emg_path"],
        muscles=muscles,
        motion_path=raw.get("motion_path"),
        video_path=raw.get("video_path"),
        video_offset_s=float(raw.get("video_offset_s", 0.0)),
        base_dir=path.parent,
    )


def _read_table(path: Path) -> tuple[list[str], np.ndarray]:
    """Parse a CSV of floats; reject gaps and non-finite cells."""
    if not path.is_file():
        raise IngestError(f"file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"empty file: {path.name}") from None
        header = [h.strip() for h in header]
        rows = []
        for r, line in enumerate(reader, start=1):
            if not line:
                continue
            if len(line) != len(header):
                raise IngestError(
                    f"invalid value: {path.name} row {r}: expected "
                    f"{len(header)} cells, got {len(line)}"
                )
            try:
                vals = [float(c) for c in line]
            except ValueError:
                bad = next(c for c in line if not _is_float(c))
                col = header[line.index(bad)]
                raise IngestError(
                    f"invalid value: {path.name} column {col} row {r}"
                ) from None
            for c, v in zip(header, vals):
                if not math.isfinite(v):
                    raise IngestError(f"invalid value: {path.name} column {c} row {r}")
            rows.append(vals)
    if not rows:
        raise IngestError(f"no data rows: {path.name}")
    return header, np.asarray(rows, dtype=float)


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _check_times(path: Path, times: np.ndarray, rate: Optional[float]) -> None:
    dt = np.diff(times)
    bad = np.nonzero(dt <= 0)[0]
    if len(bad):
        # 1-based data row of the first offending (later) sample
        raise IngestError(f"irregular sampling: {path.name} row {bad[0] + 2}")
    if rate is not None and len(dt):
        off = np.nonzero(np.abs(dt - 1.0 / rate) > 1e-6)[0]
        if len(off):
            raise IngestError(
                f"sample rate mismatch: {path.name} row {off[0] + 2}: spacing "
                f"{dt[off[0]]:.6g} s vs declared {rate:g} Hz"
            )


def _column(path: Path, header: list[str], table: np.ndarray, name: str) -> np.ndarray:
    if name not in header:
        raise IngestError(f"missing column '{name}' in {path.name}")
    return table[:, header.index(name)]


def read_emg(manifest: Manifest) -> dict[str, RawEmgChannel]:
    path = manifest.resolve(manifest.emg_path)
    header, table = _read_table(path)
    times = _column(path, header, table, "t")
    _check_times(path, times, manifest.sample_rate_hz)
    channels: dict[str, RawEmgChannel] = {}
    for mapping in manifest.muscles:
        cols = [_column(path, header, table, c) for c in mapping.columns]
        channels[mapping.name] = RawEmgChannel(
            muscle=MuscleId(mapping.name, mapping.group),
            times=times,
            values=cols[0],
            sample_rate=manifest.sample_rate_hz,
            values_b=cols[1] if len(cols) == 2 else None,
        )
    return channels


def read_motion(manifest: Manifest) -> Optional[MotionTrack]:
    if manifest.motion_path is None:
        return None
    path = manifest.resolve(manifest.motion_path)
    header, table = _read_table(path)
    times = _column(path, header, table, "t")
    _check_times(path, times, None)
    xyz = np.column_stack([_column(path, header, table, c) for c in ("x", "y", "z")])
    return MotionTrack(times=times, positions=xyz)


def ingest(manifest: Manifest) -> Assessment:
    """Build a validated Assessment from a manifest's files."""
    channels = read_emg(manifest)
    motion = read_motion(manifest)
    video = None
    if manifest.video_path is not None:
        vpath = manifest.resolve(manifest.video_path)
        if not vpath.is_file():
            raise IngestError(f"file not found: {vpath}")
        video = VideoRef(path=str(vpath), offset_s=manifest.video_offset_s)
    first = next(iter(channels.values()))
    return Assessment(
        patient_id=manifest.patient_id,
        motion_type=manifest.motion_type,
        side=manifest.side,
        channels=channels,
        retained_interval=(float(first.times[0]), float(first.times[-1])),
        motion=motion,
        video=video,
    )


@dataclass(frozen=True)
class Finding:
    path: str
    ok: bool
    message: str


def validate_manifest(path: str | Path) -> list[Finding]:
    """Per-file validation report; used by the CLI validate command."""
    findings: list[Finding] = []
    try:
        manifest = load_manifest(path)
    except IngestError as e:
        return [Finding(str(path), False, str(e))]
    findings.append(Finding(str(path), True, "manifest ok"))

    try:
        read_emg(manifest)
        findings.append(Finding(manifest.emg_path, True, "emg ok"))
    except IngestError as e:
        findings.append(Finding(manifest.emg_path, False, str(e)))
    if manifest.motion_path is not None:
        try:
            read_motion(manifest)
            findings.append(Finding(manifest.motion_path, True, "motion ok"))
        except IngestError as e:
            findings.append(Finding(manifest.motion_path, False, str(e)))
    if manifest.video_path is not None:
        if manifest.resolve(manifest.video_path).is_file():
            findings.append(Finding(manifest.video_path, True, "video present"))
        else:
            findings.append(Finding(manifest.video_path, False, "file not found"))
    return findings


@dataclass(frozen=True)
class QueryResult:
    items: list[Assessment]
    facets: dict[str, list[str]]


class Catalog:
    """In-memory assessment catalog keyed by (patient, motion, side).

    Re-ingesting a key replaces the stored assessment, so ingestion is
    idempotent.
    """

    def __init__(self):
        self._items: dict[tuple[str, str, str], Assessment] = {}

    def __len__(self) -> int:
        return len(self._items)

    def add(self, assessment: Assessment) -> tuple[str, str, str]:
        key = (assessment.patient_id, assessment.motion_type, assessment.side)
        self._items[key] = assessment
        return key

    def get(self, patient_id: str, motion_type: str, side: str) -> Assessment:
        try:
            return self._items[(patient_id, motion_type, side)]
        except KeyError:
            raise NotFoundError(
                f"no assessment for patient={patient_id} motion={motion_type} side={side}"
            ) from None

    def pair(self, patient_id: str, motion_type: str) -> tuple[Assessment, Assessment]:
        """The (affected, unaffected) pair; raises naming the absent side."""
        sides = {
            s: self._items.get((patient_id, motion_type, s))
            for s in ("affected", "unaffected")
        }
        missing = [s for s, a in sides.items() if a is None]
        if missing:
            raise NotFoundError(
                f"patient={patient_id} motion={motion_type}: missing side "
                + " and ".join(missing)
            )
        return sides["affected"], sides["unaffected"]

    def query(
        self,
        patient: Optional[str] = None,
        motion: Optional[str] = None,
        side: Optional[str] = None,
    ) -> QueryResult:
        """Matches plus the remaining facet options per drop-down.

        Each facet lists the distinct values available under the *other*
        facets' selections, so drop-downs stay mutually exclusive.
        """
        def match(a: Assessment, skip: Optional[str] = None) -> bool:
            checks = {
                "patient": patient is None or a.patient_id == patient,
                "motion": motion is None or a.motion_type == motion,
                "side": side is None or a.side == side,
            }
            return all(ok for f, ok in checks.items() if f != skip)

        items = sorted(
            (a for a in self._items.values() if match(a)),
            key=lambda a: (a.patient_id, a.motion_type, a.side),
        )
        facets = {}
        for facet, attr in (
            ("patient", "patient_id"),
            ("motion", "motion_type"),
            ("side", "side"),
        ):
            facets[facet] = sorted(
                {getattr(a, attr) for a in self._items.values() if match(a, skip=facet)}
            )
        return QueryResult(items=items, facets=facets)


def load_data_dir(root: str | Path) -> Catalog:
    """Ingest every manifest.json under a data directory."""
    catalog = Catalog()
    root = Path(root)
    if not root.is_dir():
        raise IngestError(f"data directory not found: {root}")
    for mpath in sorted(root.rglob("manifest.json")):
        catalog.add(ingest(load_manifest(mpath)))
    return catalog
