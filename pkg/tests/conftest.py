import numpy as np
import pytest

from quiver.sim import Building
from quiver.sim.config import building_config_from_dict


def make_building(n_zones=4, seed=1, **overrides):
    doc = {"zones": n_zones, "seed": seed}
    doc.update(overrides)
    return Building(building_config_from_dict(doc))


@pytest.fixture
def small_building():
    return make_building(n_zones=4, seed=1)


def dtw_oracle(a, b):
    """Memo-free recursive DTW reference (exponential; tiny inputs only)."""

    def rec(i, j):
        c = abs(a[i] - b[j])
        if i == 0 and j == 0:
            return c
        best = np.inf
        if i > 0:
            best = min(best, rec(i - 1, j))
        if j > 0:
            best = min(best, rec(i, j - 1))
        if i > 0 and j > 0:
            best = min(best, rec(i - 1, j - 1))
        return c + best

    return rec(len(a) - 1, len(b) - 1)


def dft_oracle(x):
    """O(n^2) discrete Fourier transform."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    k = np.arange(n)
    return np.array([np.sum(x * np.exp(-2j * np.pi * kk * k / n)) for kk in range(n)])
