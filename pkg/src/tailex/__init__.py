"""Tail-exponent estimation: OLS, ML and WLS estimators of d = 1/k and k with exact
small-sample corrections, samplers for Pareto-like laws, a Monte Carlo harness and
support scans for empirical data."""

__version__ = "0.1.0"

from .errors import DegenerateSampleError, HarnessError, InputError, TailexError  # noqa: E402
from .estimators import (  # noqa: E402
    Estimator,
    OrderedSample,
    Target,
    TailEstimate,
    correction_factors,
    estimate,
    estimate_many,
    order_sample,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "DegenerateSampleError",
    "Estimator",
    "HarnessError",
    "InputError",
    "OrderedSample",
    "TailEstimate",
    "TailexError",
    "Target",
    "correction_factors",
    "estimate",
    "estimate_many",
    "order_sample",
]
