"""Synthetic assessment generation.

Builds deterministic, realistically shaped recordings for demos and
tests: amplitude-modulated zero-mean oscillation per muscle, a smooth
limb trajectory, and optional bipolar channel pairs.  Per-muscle noise
is drawn once and shared between sides so cross-side relationships
(identical, or scaled by a planted factor) hold exactly, sample for
sample.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (
    AFFECTED,
    UNAFFECTED,
    Assessment,
    MotionTrack,
    RawEmgChannel,
    VideoRef,
    default_catalog,
)

DEFAULT_RATE = 1000.0


def _activation(t: np.ndarray, bumps) -> np.ndarray:
    """Sum of Gaussian activation bursts (center_s, width_s, amplitude)."""
    a = np.zeros_like(t)
    for center, width, amp in bumps:
        a += amp * np.exp(-0.5 * ((t - center) / width) ** 2)
    return a


def _default_bumps(duration: float, lane: int):
    # Staggered bursts so muscles do not all peak together.
    c1 = duration * (0.25 + 0.06 * (lane % 4))
    c2 = duration * (0.62 + 0.05 * (lane % 3))
    return [(c1, duration * 0.08, 0.9), (c2, duration * 0.10, 0.7)]


def synth_raw_traces(
    rng: np.random.Generator, t: np.ndarray, profile: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Two bipolar traces of oscillating EMG under one activation profile."""
    carrier_a = rng.normal(0.0, 1.0, len(t))
    carrier_b = rng.normal(0.0, 1.0, len(t))
    base = 0.02  # resting tone, keeps envelopes strictly positive
    return (profile + base) * carrier_a, (profile + base) * carrier_b


def make_motion_track(
    t: np.ndarray, reach: float = 0.4, lift: float = 0.3
) -> MotionTrack:
    """Smooth out-and-back limb trajectory (a flexion-like arc)."""
    phase = np.clip(t / t[-1] if len(t) > 1 and t[-1] > 0 else t, 0.0, 1.0)
    s = 0.5 - 0.5 * np.cos(2 * np.pi * phase)  # 0 -> 1 -> 0
    x = reach * s
    y = lift * s * (1.0 - 0.3 * s)
    z = 0.05 * np.sin(2 * np.pi * phase)
    return MotionTrack(times=t, positions=np.column_stack([x, y, z]))


def make_pair(
    patient_id: str,
    motion_type: str,
    side_scales: dict[str, tuple[float, float]] | None = None,
    duration_s: float = 4.0,
    rate: float = DEFAULT_RATE,
    seed: int = 20240601,
    bipolar: bool = True,
    with_motion: bool = True,
    video: dict[str, VideoRef] | None = None,
) -> tuple[Assessment, Assessment]:
    """A matched (affected, unaffected) assessment pair.

    ``side_scales`` maps muscle name to (affected_scale, unaffected_scale)
    applied to one shared noise realization; unmapped muscles default to
    (1, 1), i.e. identical on both sides.
    """
    side_scales = side_scales or {}
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    t = np.arange(n) / rate
    catalog = default_catalog()

    sides = {}
    traces = {}
    for lane, muscle in enumerate(catalog):
        profile = _activation(t, _default_bumps(duration_s, lane))
        traces[muscle.name] = synth_raw_traces(rng, t, profile)
    motion = make_motion_track(t) if with_motion else None
    for side in (AFFECTED, UNAFFECTED):
        channels = {}
        for muscle in catalog:
            raw_a, raw_b = traces[muscle.name]
            scale = side_scales.get(muscle.name, (1.0, 1.0))
            factor = scale[0] if side == AFFECTED else scale[1]
            channels[muscle.name] = RawEmgChannel(
                muscle=muscle,
                times=t,
                values=factor * raw_a,
                sample_rate=rate,
                values_b=factor * raw_b if bipolar else None,
            )
        sides[side] = Assessment(
            patient_id=patient_id,
            motion_type=motion_type,
            side=side,
            channels=channels,
            retained_interval=(float(t[0]), float(t[-1])),
            motion=motion,
            video=(video or {}).get(side),
        )
    return sides[AFFECTED], sides[UNAFFECTED]


def write_assessment(root: str | Path, assessment: Assessment, video_stub: bool = True) -> Path:
    """Write one assessment as CSV files plus manifest; returns manifest path."""
    root = Path(root)
    d = root / assessment.patient_id / assessment.motion_type / assessment.side
    d.mkdir(parents=True, exist_ok=True)

    first = next(iter(assessment.channels.values()))
    bipolar = first.values_b is not None
    header = ["t"]
    columns = [first.times]
    mapping = []
    for name, ch in assessment.channels.items():
        if bipolar:
            header += [f"{name}_a", f"{name}_b"]
            columns += [ch.values, ch.values_b]
            mapping.append(
                {"name": name, "group": ch.muscle.group, "columns": [f"{name}_a", f"{name}_b"]}
            )
        else:
            header.append(name)
            columns.append(ch.values)
            mapping.append({"name": name, "group": ch.muscle.group, "columns": [name]})
    _write_csv(d / "emg.csv", header, columns)

    manifest = {
        "patient_id": assessment.patient_id,
        "motion_type": assessment.motion_type,
        "side": assessment.side,
        "sample_rate_hz": first.sample_rate,
        "emg_path": "emg.csv",
        "muscles": mapping,
    }
    if assessment.motion is not None:
        m = assessment.motion
        _write_csv(
            d / "motion.csv",
            ["t", "x", "y", "z"],
            [m.times, m.positions[:, 0], m.positions[:, 1], m.positions[:, 2]],
        )
        manifest["motion_path"] = "motion.csv"
    if assessment.video is not None:
        vname = Path(assessment.video.path).name
        if video_stub:
            (d / vname).write_bytes(b"synthetic video placeholder\n")
        manifest["video_path"] = vname
        manifest["video_offset_s"] = assessment.video.offset_s
    mpath = d / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return mpath


def _write_csv(path: Path, header: list[str], columns) -> None:
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_demo_dataset(root: str | Path, seed: int = 20240601) -> list[Path]:
    """Three demo patients covering the interesting comparison shapes.

    * P01 shoulder_flexion: pushing muscles elevated on the affected side.
    * P02 elbow_extension: both sides identical (a null comparison).
    * P03 wrist_rotation: one muscle planted at 3x on the affected side.
    """
    root = Path(root)
    manifests = []
    scenarios = [
        ("P01", "shoulder_flexion", {"BIC": (2.6, 1.0), "TRI": (2.2, 1.0)}, seed),
        ("P02", "elbow_extension", {}, seed + 1),
        ("P03", "wrist_rotation", {"UT": (3.0, 1.0)}, seed + 2),
    ]
    for patient, motion, scales, s in scenarios:
        video = {
            AFFECTED: VideoRef(path="video.mp4", offset_s=0.8),
            UNAFFECTED: VideoRef(path="video.mp4", offset_s=0.5),
        }
        affected, unaffected = make_pair(
            patient, motion, scales, duration_s=4.0, rate=500.0, seed=s, video=video
        )
        manifests.append(write_assessment(root, affected))
        manifests.append(write_assessment(root, unaffected))
    return manifests
