import numpy as np
import pytest

from emgdiff.model import DomainError, Envelope, MotionTrack, MuscleId
from emgdiff.signals import (
    derive_acceleration,
    derive_displacement,
    derive_speed,
    proportion_summary,
    resample_to_grid,
    rms_envelope,
    truncate,
)

from conftest import build_assessment, build_channel

BIC = MuscleId("BIC", "pushing")


def make_envelope(values, times=None, hop=0.01):
    values = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float) if times is not None else np.arange(len(values)) * hop
    return Envelope(muscle=BIC, times=t, values=values, window_s=0.1, hop_s=hop)


class TestRmsEnvelope:
    def test_two_sample_window_hand_value(self):
        # sqrt((3^2 + 4^2) / 2)
        ch = build_channel("BIC", [3.0, 4.0], rate=1000.0)
        env = rms_envelope(ch, window_s=0.002, hop_s=0.001)
        assert env.values == pytest.approx([np.sqrt(12.5)], abs=1e-9)
        assert env.values[0] == pytest.approx(3.535534, abs=1e-6)

    def test_constant_signal_gives_abs_value(self):
        for c in (2.5, -2.5):
            ch = build_channel("BIC", np.full(500, c))
            env = rms_envelope(ch, window_s=0.05, hop_s=0.01)
            assert env.values == pytest.approx(np.full(len(env), abs(c)), abs=1e-12)

    def test_zero_signal_gives_zero_envelope(self):
        ch = build_channel("BIC", np.zeros(300))
        env = rms_envelope(ch, window_s=0.05, hop_s=0.005)
        assert np.all(env.values == 0.0)

    def test_scale_equivariance(self, rng):
        for _ in range(100):
            vals = rng.normal(0, 1, 400)
            alpha = rng.uniform(-5, 5)
            ch = build_channel("BIC", vals)
            ch2 = build_channel("BIC", alpha * vals)
            e1 = rms_envelope(ch, 0.02, 0.01).values
            e2 = rms_envelope(ch2, 0.02, 0.01).values
            assert e2 == pytest.approx(abs(alpha) * e1, rel=1e-9)

    def test_non_negative_and_centered_timestamps(self, rng):
        ch = build_channel("BIC", rng.normal(0, 1, 1000))
        env = rms_envelope(ch, 0.1, 0.01)
        assert np.all(env.values >= 0)
        # first window covers samples 0..99 -> center (t0 + t99) / 2
        assert env.times[0] == pytest.approx((ch.times[0] + ch.times[99]) / 2)
        assert np.diff(env.times) == pytest.approx(np.full(len(env) - 1, 0.01), abs=1e-9)

    def test_bipolar_pair_averages_per_window_rms(self, rng):
        a = rng.normal(0, 1, 400)
        b = rng.normal(0, 2, 400)
        pair = build_channel("BIC", a, values_b=b)
        only_a = build_channel("BIC", a)
        only_b = build_channel("BIC", b)
        e_pair = rms_envelope(pair, 0.02, 0.01).values
        e_a = rms_envelope(only_a, 0.02, 0.01).values
        e_b = rms_envelope(only_b, 0.02, 0.01).values
        assert e_pair == pytest.approx(0.5 * (e_a + e_b), rel=1e-12)

    def test_window_longer_than_signal_rejected(self):
        ch = build_channel("BIC", np.ones(50))
        with pytest.raises(DomainError, match="window exceeds recording"):
            rms_envelope(ch, window_s=0.1, hop_s=0.01)

    def test_bad_window_params_rejected(self):
        ch = build_channel("BIC", np.ones(50))
        with pytest.raises(DomainError):
            rms_envelope(ch, window_s=0.0, hop_s=0.01)
        with pytest.raises(DomainError):
            rms_envelope(ch, window_s=0.01, hop_s=-1.0)


class TestMotionDerivatives:
    def test_stationary_track_zero_speed_and_acceleration(self):
        t = np.arange(50) * 0.01
        track = MotionTrack(times=t, positions=np.tile([1.0, 2.0, 3.0], (50, 1)))
        _, speed = derive_speed(track)
        _, acc = derive_acceleration(track)
        assert np.all(speed == 0.0)
        assert np.all(acc == 0.0)

    def test_linear_motion_constant_speed(self):
        t = np.arange(100) * 0.01
        direction = np.array([0.6, 0.8, 0.0])  # unit vector
        pos = 0.5 * t[:, None] * direction
        _, speed = derive_speed(MotionTrack(times=t, positions=pos))
        assert speed == pytest.approx(np.full(100, 0.5), abs=1e-9)

    def test_circular_motion_speed_near_r_omega(self):
        r, omega, dt = 0.5, 2.0, 0.001
        t = np.arange(0, 2.0, dt)
        pos = np.column_stack([r * np.cos(omega * t), r * np.sin(omega * t), 0 * t])
        _, speed = derive_speed(MotionTrack(times=t, positions=pos))
        # central differences are second-order accurate in the interior
        assert speed[1:-1] == pytest.approx(np.full(len(t) - 2, r * omega), rel=1e-5)

    def test_speed_shift_invariance(self, rng):
        t = np.sort(rng.uniform(0, 1, 40))
        pos = rng.normal(0, 1, (40, 3))
        offset = np.array([10.0, -3.0, 7.0])
        _, s1 = derive_speed(MotionTrack(times=t, positions=pos))
        _, s2 = derive_speed(MotionTrack(times=t, positions=pos + offset))
        assert s2 == pytest.approx(s1, abs=1e-12)

    def test_constant_velocity_zero_acceleration(self):
        t = np.arange(100) * 0.01
        pos = np.column_stack([0.3 * t, -0.1 * t, 0.2 * t])
        _, acc = derive_acceleration(MotionTrack(times=t, positions=pos))
        assert acc == pytest.approx(np.zeros(100), abs=1e-9)

    def test_uniform_acceleration_recovered_exactly(self):
        a = 1.7
        t = np.arange(100) * 0.01
        pos = np.column_stack([0.5 * a * t**2, 0 * t, 0 * t])
        _, acc = derive_acceleration(MotionTrack(times=t, positions=pos))
        assert acc == pytest.approx(np.full(100, a), abs=1e-9)

    def test_short_tracks_rejected(self):
        one = MotionTrack(times=np.array([0.0]), positions=np.zeros((1, 3)))
        with pytest.raises(DomainError, match="track too short"):
            derive_speed(one)
        two = MotionTrack(times=np.array([0.0, 0.1]), positions=np.zeros((2, 3)))
        with pytest.raises(DomainError, match="track too short"):
            derive_acceleration(two)

    def test_displacement_stationary_and_line(self):
        t = np.arange(10) * 0.1
        still = MotionTrack(times=t, positions=np.tile([5.0, 5.0, 5.0], (10, 1)))
        _, d = derive_displacement(still)
        assert np.all(d == 0.0)
        line = MotionTrack(times=t, positions=np.column_stack([t * 2.0, 0 * t, 0 * t]))
        _, d = derive_displacement(line)
        assert d[-1] == pytest.approx(2.0 * t[-1])

    def test_displacement_return_to_start(self):
        t = np.linspace(0, 1, 101)
        x = np.sin(np.pi * t)  # back at 0 when t = 1
        track = MotionTrack(times=t, positions=np.column_stack([x, 0 * t, 0 * t]))
        _, d = derive_displacement(track)
        assert d[-1] == pytest.approx(0.0, abs=1e-12)


class TestTruncate:
    def _assessment(self, seconds=20.0, rate=100.0):
        n = int(seconds * rate)
        vals = np.sin(np.arange(n) * 0.37)
        return build_assessment("P", "m", "affected", {"BIC": vals, "TRI": vals}, rate=rate)

    def test_full_bounds_identity(self):
        a = self._assessment()
        lo, hi = a.recording_bounds()
        assert truncate(a, lo, hi).retained_interval == (lo, hi)

    def test_downstream_envelopes_respect_interval(self):
        a = truncate(self._assessment(), 2.0, 16.0)
        from emgdiff.signals import restrict_channel

        ch = restrict_channel(a.channels["BIC"], *a.retained_interval)
        env = rms_envelope(ch, 0.1, 0.01)
        assert env.times[0] >= 2.0
        assert env.times[-1] <= 16.0

    def test_widening_allowed_because_raw_data_is_kept(self):
        a = self._assessment()
        narrowed = truncate(a, 5.0, 10.0)
        widened = truncate(narrowed, 1.0, 18.0)
        assert widened.retained_interval == (1.0, 18.0)

    def test_invalid_interval_reports_bounds(self):
        a = self._assessment()
        with pytest.raises(DomainError, match=r"recording bounds \[0.0, 19.99\]"):
            truncate(a, -1.0, 5.0)
        with pytest.raises(DomainError):
            truncate(a, 6.0, 6.0)

    def test_truncation_monotonicity(self):
        a = self._assessment()
        from emgdiff.signals import restrict_channel

        counts = []
        for interval in [(0.0, 19.0), (2.0, 16.0), (4.0, 10.0)]:
            tr = truncate(a, *interval)
            ch = restrict_channel(tr.channels["BIC"], *tr.retained_interval)
            counts.append(len(rms_envelope(ch, 0.1, 0.01)))
        assert counts[0] >= counts[1] >= counts[2]


class TestResample:
    def test_native_rate_identity(self, rng):
        env = make_envelope(np.abs(rng.normal(1, 0.3, 50)), hop=0.01)
        out = resample_to_grid(env, rate=100.0)
        assert out.values == pytest.approx(env.values, abs=1e-12)
        assert out.times == pytest.approx(env.times, abs=1e-12)

    def test_constant_envelope_stays_constant(self):
        env = make_envelope(np.full(40, 3.3), hop=0.02)
        out = resample_to_grid(env, rate=37.0)
        assert out.values == pytest.approx(np.full(len(out), 3.3), abs=1e-12)

    def test_triangular_downsample_matches_analytic_interpolation(self):
        # unit triangle on [0, 1] sampled every 0.1 s
        t = np.arange(11) * 0.1

        def tri(x):
            return np.where(x <= 0.5, 2.0 * x, 2.0 * (1.0 - x))

        env = make_envelope(tri(t), times=t)
        out = resample_to_grid(env, rate=3.0)  # grid points off the original knots
        assert out.values == pytest.approx(tri(out.times), abs=1e-12)
        assert out.values.max() <= env.values.max() + 1e-12


class TestProportionSummary:
    def test_identical_envelopes_split_evenly(self, rng):
        vals = np.abs(rng.normal(1, 0.2, 30))
        envs = {"BIC": make_envelope(vals), "TRI": make_envelope(vals)}
        s = proportion_summary(envs, (0.0, 0.29))
        assert s.shares["BIC"] == pytest.approx(0.5, abs=1e-12)
        assert s.shares["TRI"] == pytest.approx(0.5, abs=1e-12)

    def test_muting_renormalizes(self, rng):
        vals = np.abs(rng.normal(1, 0.2, 30))
        envs = {n: make_envelope(vals) for n in ("BIC", "TRI", "UT")}
        s = proportion_summary(envs, (0.0, 0.29), muted={"UT"})
        assert set(s.shares) == {"BIC", "TRI"}
        assert s.shares["BIC"] == pytest.approx(0.5, abs=1e-12)

    def test_three_to_one_integrals(self):
        # constant envelopes: integrals are 3*(t1-t0) and 1*(t1-t0)
        envs = {
            "BIC": make_envelope(np.full(11, 3.0)),
            "TRI": make_envelope(np.full(11, 1.0)),
        }
        s = proportion_summary(envs, (0.0, 0.1))
        assert s.shares["BIC"] == pytest.approx(0.75, abs=1e-9)
        assert s.shares["TRI"] == pytest.approx(0.25, abs=1e-9)

    def test_shares_sum_to_one_and_permutation_equivariant(self, rng):
        names = ["BIC", "TRI", "UT", "LT"]
        envs = {n: make_envelope(np.abs(rng.normal(1, 0.5, 25))) for n in names}
        s1 = proportion_summary(envs, (0.02, 0.2))
        assert sum(s1.shares.values()) == pytest.approx(1.0, abs=1e-9)
        reordered = {n: envs[n] for n in reversed(names)}
        s2 = proportion_summary(reordered, (0.02, 0.2))
        for n in names:
            assert s2.shares[n] == s1.shares[n]

    def test_all_zero_activity_rejected(self):
        envs = {"BIC": make_envelope(np.zeros(20))}
        with pytest.raises(DomainError, match="no activity in interval"):
            proportion_summary(envs, (0.0, 0.19))
