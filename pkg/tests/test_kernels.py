import numpy as np
import pytest

from conftest import BACKENDS, pareto_draws
from tailex import kernels
from tailex.estimators import Estimator, estimate_many, order_sample

ALL_CODES = np.array([e.value for e in Estimator], dtype=np.int64)

needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def test_selected_backend_is_known():
    assert kernels.BACKEND in BACKENDS


@needs_both
@pytest.mark.parametrize("n", [2, 3, 10, 1000, 100_000, 1_000_000])
def test_corrections_agree_across_backends(n):
    c = BACKENDS["cython"].correction_factors(n)
    p = BACKENDS["python"].correction_factors(n)
    np.testing.assert_allclose(c, p, rtol=1e-11)


@needs_both
def test_batch_agrees_across_backends(rng):
    logs = np.log(np.stack([np.sort(pareto_draws(rng, 57))[::-1] for _ in range(40)]))
    logs = np.ascontiguousarray(logs)
    g, h = 0.97, 0.95
    c = BACKENDS["cython"].estimate_batch(logs, ALL_CODES, g, h)
    p = BACKENDS["python"].estimate_batch(logs, ALL_CODES, g, h)
    np.testing.assert_allclose(c, p, rtol=1e-12)


@needs_both
def test_scan_agrees_across_backends(rng):
    logs = np.log(np.sort(pareto_draws(rng, 300))[::-1]).copy()
    c = BACKENDS["cython"].scan(logs, 3, 300, ALL_CODES)
    p = BACKENDS["python"].scan(logs, 3, 300, ALL_CODES)
    np.testing.assert_allclose(c, p, rtol=1e-11)


@needs_both
def test_kml_weights_agree_across_backends(rng):
    logs = np.ascontiguousarray(np.log(np.stack([np.sort(pareto_draws(rng, 30))[::-1] for _ in range(10)])))
    c, bc = BACKENDS["cython"].kml_weight_sum(logs)
    p, bp = BACKENDS["python"].kml_weight_sum(logs)
    assert bc == bp == -1
    np.testing.assert_allclose(c, p, rtol=1e-12)


def test_scan_last_row_bit_exact(backend, rng):
    s = order_sample(pareto_draws(rng, 200))
    row = kernels.scan(s.logs, 3, 200, ALL_CODES)[-1]
    direct = estimate_many(s, list(Estimator))
    assert [direct[e].value for e in Estimator] == row.tolist()


def test_scan_rows_equal_prefix_estimates(backend, rng):
    s = order_sample(pareto_draws(rng, 60))
    table = kernels.scan(s.logs, 5, 60, ALL_CODES)
    for m in (5, 17, 41):
        direct = estimate_many(s.head(m), list(Estimator))
        assert [direct[e].value for e in Estimator] == table[m - 5].tolist()


def test_batch_rows_independent(backend, rng):
    logs = np.ascontiguousarray(np.log(np.stack([np.sort(pareto_draws(rng, 20))[::-1] for _ in range(8)])))
    whole = kernels.estimate_batch(logs, ALL_CODES, 0.9, 0.8)
    for i in range(8):
        one = kernels.estimate_batch(np.ascontiguousarray(logs[i : i + 1]), ALL_CODES, 0.9, 0.8)
        np.testing.assert_array_equal(one[0], whole[i])
