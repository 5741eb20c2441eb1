import numpy as np
import pytest

from emgdiff.decimate import minmax_indices


class TestMinmaxDecimation:
    def test_short_series_identity(self):
        v = np.arange(10.0)
        assert list(minmax_indices(v, 100)) == list(range(10))

    def test_respects_budget(self, rng):
        v = rng.normal(0, 1, 50_000)
        idx = minmax_indices(v, 2000)
        assert len(idx) <= 2000

    def test_global_extremes_survive_exactly(self, rng):
        for _ in range(20):
            v = rng.normal(0, 1, int(rng.integers(3000, 20_000)))
            idx = minmax_indices(v, 2000)
            kept = v[idx]
            assert kept.max() == v.max()
            assert kept.min() == v.min()

    def test_indices_strictly_increasing(self, rng):
        idx = minmax_indices(rng.normal(0, 1, 5000), 500)
        assert np.all(np.diff(idx) > 0)

    def test_spike_survives(self, rng):
        v = rng.normal(0, 0.1, 10_000)
        v[7777] = 99.0
        idx = minmax_indices(v, 200)
        assert 7777 in set(idx.tolist())

    def test_budget_below_two_rejected(self):
        with pytest.raises(ValueError):
            minmax_indices(np.ones(10), 1)
