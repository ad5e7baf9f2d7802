import numpy as np
import pytest

from potex.sphharm import SphericalSpectrum


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spectrum(rng, k_max):
    n = (k_max + 1) ** 2
    return SphericalSpectrum(k_max, rng.standard_normal(n) + 1j * rng.standard_normal(n))
