"""Domain model for motion assessments.

All values are immutable once constructed: numpy arrays are frozen
(``writeable = False``) so instances can be shared freely between
threads and cached without defensive copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

AFFECTED = "affected"
UNAFFECTED = "unaffected"
SIDES = (AFFECTED, UNAFFECTED)

MUSCLE_GROUPS = ("pushing", "forearm", "back", "finger")

# Uniform-sampling slack: timestamps may deviate from 1/rate by at most this.
TIME_TOLERANCE_S = 1e-6


class DomainError(ValueError):
    """Invalid domain value or operation precondition."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.asarray(a, dtype=dtype)
    if arr.flags.writeable and arr.flags.owndata:
        arr.flags.writeable = False
    elif arr.flags.writeable:
        arr = arr.copy()
        arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MuscleId:
    """A muscle in the catalog, colored and grouped by function."""

    name: str
    group: str

    def __post_init__(self):
        if self.group not in MUSCLE_GROUPS:
            raise DomainError(
                f"unknown muscle group '{self.group}' (expected one of {MUSCLE_GROUPS})"
            )
        if not self.name:
            raise DomainError("muscle name must be non-empty")


def default_catalog() -> tuple[MuscleId, ...]:
    """The standard 8-muscle layout: two muscles per functional group."""
    return (
        MuscleId("BIC", "pushing"),
        MuscleId("TRI", "pushing"),
        MuscleId("PT", "forearm"),
        MuscleId("PQ", "forearm"),
        MuscleId("UT", "back"),
        MuscleId("LT", "back"),
        MuscleId("FDS", "finger"),
        MuscleId("EDC", "finger"),
    )


def check_uniform_times(times: np.ndarray, sample_rate: float) -> None:
    """Raise if timestamps are not strictly increasing and uniform at 1/rate."""
    if len(times) >= 2:
        dt = np.diff(times)
        if np.any(dt <= 0):
            raise DomainError("irregular sampling")
        if np.any(np.abs(dt - 1.0 / sample_rate) > TIME_TOLERANCE_S):
            raise DomainError("irregular sampling")


@dataclass(frozen=True)
class RawEmgChannel:
    """One muscle's raw EMG recording.

    Raw EMG oscillates about zero, so values may be negative.  A bipolar
    sensor pair contributes a second trace in ``values_b``; the pair is
    combined downstream by averaging per-window RMS values.
    """

    muscle: MuscleId
    times: np.ndarray
    values: np.ndarray
    sample_rate: float
    values_b: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values_b is not None:
            object.__setattr__(self, "values_b", _frozen(self.values_b))
            if len(self.values_b) != len(self.times):
                raise DomainError("trace length mismatch")
        if len(self.times) != len(self.values):
            raise DomainError("trace length mismatch")
        if self.sample_rate <= 0:
            raise DomainError("sample rate must be positive")
        check_uniform_times(self.times, self.sample_rate)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class Envelope:
    """Windowed-RMS muscle activity series; values are always >= 0."""

    muscle: MuscleId
    times: np.ndarray
    values: np.ndarray
    window_s: float
    hop_s: float

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "values", _frozen(self.values))
        if len(self.times) != len(self.values):
            raise DomainError("envelope length mismatch")
        if len(self.values) and float(np.min(self.values)) < 0:
            raise DomainError("envelope values must be non-negative")
        if len(self.times) >= 2 and np.any(np.diff(self.times) <= 0):
            raise DomainError("envelope timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class MotionTrack:
    """3-D limb position samples (meters) at strictly increasing times."""

    times: np.ndarray
    positions: np.ndarray  # shape (n, 3): x, y, z

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise DomainError("positions must have shape (n, 3)")
        object.__setattr__(self, "positions", _frozen(pos))
        if len(self.times) != len(pos):
            raise DomainError("track length mismatch")
        if len(self.times) >= 2 and np.any(np.diff(self.times) <= 0):
            raise DomainError("track timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class VideoRef:
    """Reference to an externally stored video: path plus time offset.

    Video is never decoded here; chart time t maps to video time
    t + offset_s for the client player.
    """

    path: str
    offset_s: float = 0.0


@dataclass(frozen=True)
class Assessment:
    """One recorded motion trial of one limb.

    ``channels`` is keyed by muscle name; every channel shares one sample
    rate and time base.  ``retained_interval`` marks the analyst-chosen
    portion of the recording; the raw data underneath is never discarded.
    """

    patient_id: str
    motion_type: str
    side: str
    channels: dict[str, RawEmgChannel]
    retained_interval: tuple[float, float]
    motion: Optional[MotionTrack] = None
    video: Optional[VideoRef] = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {SIDES}, got '{self.side}'")
        if not self.channels:
            raise DomainError("assessment needs at least one channel")
        rates = {c.sample_rate for c in self.channels.values()}
        if len(rates) != 1:
            raise DomainError("all channels must share one sample rate")
        first = next(iter(self.channels.values()))
        for c in self.channels.values():
            if len(c) != len(first) or c.times[0] != first.times[0]:
                raise DomainError("all channels must share one time base")
        t0, t1 = self.retained_interval
        lo, hi = self.recording_bounds()
        if not (t0 < t1):
            raise DomainError("retained interval must satisfy t0 < t1")
        if t0 < lo - TIME_TOLERANCE_S or t1 > hi + TIME_TOLERANCE_S:
            raise DomainError(
                f"retained interval must lie within recording bounds [{lo}, {hi}]"
            )

    def recording_bounds(self) -> tuple[float, float]:
        first = next(iter(self.channels.values()))
        return float(first.times[0]), float(first.times[-1])

    def catalog(self) -> tuple[MuscleId, ...]:
        return tuple(c.muscle for c in self.channels.values())

    def with_retained(self, t0: float, t1: float) -> "Assessment":
        return replace(self, retained_interval=(t0, t1))


@dataclass(frozen=True)
class ProportionSummary:
    """Per-muscle share of total activity inside a brushed interval."""

    side: str
    interval: tuple[float, float]
    shares: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {SIDES}, got '{self.side}'")
        for name, share in self.shares.items():
            if share < 0:
                raise DomainError(f"share for {name} must be >= 0")
        if self.shares:
            total = sum(self.shares.values())
            if abs(total - 1.0) > 1e-9:
                raise DomainError(f"shares must sum to 1, got {total}")
