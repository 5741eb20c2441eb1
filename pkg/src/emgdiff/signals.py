"""Per-channel signal transforms.

RMS envelopes of raw EMG, motion derivatives (speed, acceleration,
displacement), non-destructive truncation, grid resampling, and brushed
interval proportion summaries.  Everything here is a pure function.
"""
from __future__ import annotations

import numpy as np

from .model import (
    Assessment,
    DomainError,
    Envelope,
    MotionTrack,
    ProportionSummary,
    RawEmgChannel,
    check_uniform_times,
)


def _windowed_rms(values: np.ndarray, starts: np.ndarray, size: int) -> np.ndarray:
    sq = np.concatenate(([0.0], np.cumsum(values * values)))
    sums = sq[starts + size] - sq[starts]
    return np.sqrt(np.maximum(sums / size, 0.0))


def rms_envelope(channel: RawEmgChannel, window_s: float, hop_s: float) -> Envelope:
    """Windowed root-mean-square envelope of a raw EMG channel.

    Each output sample is sqrt(mean(f^2)) over a window of
    S = round(window_s * rate) consecutive raw samples, stamped at the
    window center and advanced by round(hop_s * rate) samples.  For a
    bipolar channel pair the two traces' RMS values are averaged.
    """
    if window_s <= 0:
        raise DomainError("window_s must be positive")
    if hop_s <= 0:
        raise DomainError("hop_s must be positive")
    check_uniform_times(channel.times, channel.sample_rate)
    size = int(round(window_s * channel.sample_rate))
    if size < 1:
        raise DomainError("window shorter than one sample")
    n = len(channel)
    if size > n:
        raise DomainError("window exceeds recording")
    hop = max(1, int(round(hop_s * channel.sample_rate)))
    starts = np.arange(0, n - size + 1, hop)
    rms = _windowed_rms(channel.values, starts, size)
    if channel.values_b is not None:
        rms = 0.5 * (rms + _windowed_rms(channel.values_b, starts, size))
    centers = 0.5 * (channel.times[starts] + channel.times[starts + size - 1])
    return Envelope(
        muscle=channel.muscle,
        times=centers,
        values=rms,
        window_s=window_s,
        hop_s=hop / channel.sample_rate,
    )


def _first_derivative(times: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Central differences on the interior, one-sided at the ends."""
    n = len(times)
    out = np.empty_like(coords)
    dt = (times[2:] - times[:-2])[:, None]
    out[1:-1] = (coords[2:] - coords[:-2]) / dt
    out[0] = (coords[1] - coords[0]) / (times[1] - times[0])
    out[-1] = (coords[-1] - coords[-2]) / (times[-1] - times[-2])
    return out


def _second_derivative_at(times, coords, i0, i1, i2):
    # Three-point formula, exact for quadratics at any spacing.  Written
    # in terms of differences from the center point so constant input
    # yields exact zeros.
    t0, t1, t2 = times[i0], times[i1], times[i2]
    f0, f1, f2 = coords[i0], coords[i1], coords[i2]
    w0 = np.expand_dims((t1 - t0) * (t2 - t0), -1)
    w2 = np.expand_dims((t2 - t0) * (t2 - t1), -1)
    return 2.0 * ((f0 - f1) / w0 + (f2 - f1) / w2)


def derive_speed(track: MotionTrack) -> tuple[np.ndarray, np.ndarray]:
    """Speed magnitude (m/s) of the limb from its position track.

    Returns (times, values); values are norms of the central-difference
    velocity, so they are invariant to constant position offsets.
    """
    if len(track) < 2:
        raise DomainError("track too short")
    vel = _first_derivative(track.times, track.positions)
    return track.times.copy(), np.linalg.norm(vel, axis=1)


def derive_acceleration(track: MotionTrack) -> tuple[np.ndarray, np.ndarray]:
    """Acceleration magnitude (m/s^2) via three-point second differences."""
    if len(track) < 3:
        raise DomainError("track too short")
    t, p = track.times, track.positions
    n = len(t)
    acc = np.empty_like(p)
    idx = np.arange(1, n - 1)
    acc[1:-1] = _second_derivative_at(t, p, idx - 1, idx, idx + 1)
    acc[0] = _second_derivative_at(t, p, 0, 1, 2)
    acc[-1] = _second_derivative_at(t, p, n - 3, n - 2, n - 1)
    return t.copy(), np.linalg.norm(acc, axis=1)


def derive_displacement(track: MotionTrack) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean distance of each position from the track's first sample."""
    if len(track) == 0:
        raise DomainError("empty track")
    delta = track.positions - track.positions[0]
    return track.times.copy(), np.linalg.norm(delta, axis=1)


MOTION_METRICS = {
    "speed": derive_speed,
    "acceleration": derive_acceleration,
    "displacement": derive_displacement,
}


def restrict_track(track: MotionTrack, t0: float, t1: float) -> MotionTrack:
    mask = (track.times >= t0) & (track.times <= t1)
    return MotionTrack(times=track.times[mask], positions=track.positions[mask])


def restrict_channel(channel: RawEmgChannel, t0: float, t1: float) -> RawEmgChannel:
    mask = (channel.times >= t0) & (channel.times <= t1)
    vb = channel.values_b[mask] if channel.values_b is not None else None
    return RawEmgChannel(
        muscle=channel.muscle,
        times=channel.times[mask],
        values=channel.values[mask],
        sample_rate=channel.sample_rate,
        values_b=vb,
    )


def truncate(assessment: Assessment, t0: float, t1: float) -> Assessment:
    """Set the retained interval; never discards raw data.

    Widening back out is always allowed as long as the interval stays
    within the recording bounds, because truncation is pure metadata.
    """
    lo, hi = assessment.recording_bounds()
    if not (t0 < t1) or t0 < lo - 1e-12 or t1 > hi + 1e-12:
        raise DomainError(
            f"invalid interval ({t0}, {t1}): must satisfy t0 < t1 within "
            f"recording bounds [{lo}, {hi}]"
        )
    return assessment.with_retained(t0, t1)


def resample_to_grid(envelope: Envelope, rate: float) -> Envelope:
    """Linearly interpolate an envelope onto a uniform grid at ``rate``."""
    if rate <= 0:
        raise DomainError("rate must be positive")
    if len(envelope) == 0:
        raise DomainError("cannot resample an empty envelope")
    t0, t1 = float(envelope.times[0]), float(envelope.times[-1])
    count = int(np.floor((t1 - t0) * rate + 1e-9)) + 1
    grid = t0 + np.arange(count) / rate
    values = np.maximum(np.interp(grid, envelope.times, envelope.values), 0.0)
    return Envelope(
        muscle=envelope.muscle,
        times=grid,
        values=values,
        window_s=envelope.window_s,
        hop_s=1.0 / rate,
    )


def _trapezoid_integral(times: np.ndarray, values: np.ndarray, t0: float, t1: float) -> float:
    """Exact integral of the piecewise-linear series over [t0, t1] ∩ domain."""
    lo = max(t0, float(times[0]))
    hi = min(t1, float(times[-1]))
    if hi <= lo:
        return 0.0
    inside = (times > lo) & (times < hi)
    ts = np.concatenate(([lo], times[inside], [hi]))
    vs = np.concatenate(
        ([np.interp(lo, times, values)], values[inside], [np.interp(hi, times, values)])
    )
    return float(np.trapezoid(vs, ts))


def proportion_summary(
    envelopes: dict[str, Envelope],
    interval: tuple[float, float],
    muted: frozenset[str] | set[str] = frozenset(),
    side: str = "affected",
) -> ProportionSummary:
    """Share of each non-muted muscle's integrated activity in an interval."""
    t0, t1 = interval
    if not (t0 < t1):
        raise DomainError("interval must satisfy t0 < t1")
    active = {m: e for m, e in envelopes.items() if m not in muted}
    if not active:
        raise DomainError("all muscles are muted")
    integrals = {
        m: _trapezoid_integral(e.times, e.values, t0, t1) for m, e in active.items()
    }
    total = sum(integrals.values())
    if total <= 0.0:
        raise DomainError("no activity in interval")
    shares = {m: v / total for m, v in integrals.items()}
    return ProportionSummary(side=side, interval=(t0, t1), shares=shares)
