import sys
from pathlib import Path

import numpy as np
import pytest

from tailex import kernels

sys.path.insert(0, str(Path(__file__).parent))

BACKENDS = kernels.available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Runs a test once per kernel backend by swapping the selected implementation."""
    impl = BACKENDS[request.param]
    for name in ("correction_factors", "estimate_batch", "scan", "kml_weight_sum"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    monkeypatch.setattr(kernels, "BACKEND", impl.BACKEND)
    from tailex import estimators

    estimators.correction_factors.cache_clear()
    yield request.param
    estimators.correction_factors.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240425)


def pareto_draws(rng, n, k=1.0, s_min=50.0):
    return s_min * (1.0 - rng.uniform(size=n)) ** (-1.0 / k)
