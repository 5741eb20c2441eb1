import numpy as np
import pytest

from emgdiff.model import Assessment, MuscleId, RawEmgChannel, default_catalog

GROUP_OF = {m.name: m.group for m in default_catalog()}


def build_channel(name, values, rate=1000.0, t0=0.0, group=None, values_b=None):
    values = np.asarray(values, dtype=float)
    t = t0 + np.arange(len(values)) / rate
    return RawEmgChannel(
        muscle=MuscleId(name, group or GROUP_OF.get(name, "pushing")),
        times=t,
        values=values,
        sample_rate=rate,
        values_b=values_b,
    )


def build_assessment(patient, motion, side, channel_values, rate=1000.0, track=None):
    """Assessment from plain per-muscle value arrays on a shared clock."""
    channels = {
        name: build_channel(name, vals, rate=rate) for name, vals in channel_values.items()
    }
    first = next(iter(channels.values()))
    return Assessment(
        patient_id=patient,
        motion_type=motion,
        side=side,
        channels=channels,
        retained_interval=(float(first.times[0]), float(first.times[-1])),
        motion=track,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
