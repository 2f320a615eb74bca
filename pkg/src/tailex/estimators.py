"""Closed-form estimators of the inverse tail exponent d = 1/k and of k.

All estimators work on the reversed order statistics S_(1) >= ... >= S_(n) and
regress log-ratios ln(S_(n)/S_(i)) against log empirical survival ln(i/n).

>>> s = order_sample([1, 8, 2, 4])
>>> round(hill_shifted(s).value, 6)
1.386294
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DegenerateSampleError, InputError

__all__ = [
    "CorrectionFactors",
    "Estimator",
    "OrderedSample",
    "Target",
    "TailEstimate",
    "WeightProfile",
    "correction_f",
    "correction_factors",
    "correction_g",
    "correction_h",
    "d_weight_profile",
    "estimate",
    "estimate_many",
    "hill_shifted",
    "k_ml",
    "k_ml_weight_profile",
    "k_ols",
    "k_wls",
    "ols_d",
    "ols_gi_d",
    "ols_intercept_d",
    "order_sample",
    "shifted_ols_d",
    "shifted_ols_intercept_d",
    "tail_mass",
    "wls_d",
]


class Target(enum.Enum):
    D = "D"
    K = "K"


class Estimator(enum.Enum):
    # value = kernel code
    HILL_SHIFTED = 0
    OLS = 1
    OLS_SHIFTED = 2
    OLS_GI = 3
    OLS_INTERCEPT = 4
    OLS_INTERCEPT_SHIFTED = 5
    WLS_D = 6
    K_ML = 7
    K_OLS = 8
    K_WLS = 9

    @property
    def target(self) -> Target:
        return Target.K if self.name.startswith("K_") else Target.D

    @classmethod
    def parse(cls, name: str) -> "Estimator":
        try:
            return cls[name.strip().upper().replace("-", "_")]
        except KeyError:
            raise InputError("UNKNOWN_ESTIMATOR", f"unknown estimator {name!r}") from None


D_ESTIMATORS = tuple(e for e in Estimator if e.target is Target.D)
K_ESTIMATORS = tuple(e for e in Estimator if e.target is Target.K)
# the four estimators compared in the simulation and empirical exercises
COMPARISON_SET = (Estimator.HILL_SHIFTED, Estimator.OLS, Estimator.OLS_SHIFTED, Estimator.OLS_GI)


@dataclass(frozen=True, eq=False)
class OrderedSample:
    """Strictly positive observations sorted in descending order."""

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @functools.cached_property
    def logs(self) -> np.ndarray:
        out = np.log(self.values)
        out.setflags(write=False)
        return out

    def head(self, m: int) -> "OrderedSample":
        """The m largest observations as a sample of their own."""
        return OrderedSample(self.values[:m].copy())

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, OrderedSample):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class TailEstimate:
    estimator: Estimator
    target: Target
    value: float
    n: int


@dataclass(frozen=True)
class CorrectionFactors:
    n: int
    f: float
    g: float
    h: float


@dataclass(frozen=True)
class WeightProfile:
    estimator: str  # "ML" or "OLS"
    target: Target
    n: int
    weights: np.ndarray  # over ranks i = 1..n-1


def order_sample(raw: Iterable[float]) -> OrderedSample:
    arr = np.array(raw, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InputError("EMPTY_INPUT", "no observations")
    bad = np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))
    if bad.size:
        i = int(bad[0])
        raise InputError("NONPOSITIVE_VALUE", f"value {arr[i]!r} at index {i}", index=i)
    return OrderedSample(np.sort(arr, kind="stable")[::-1].copy())


def _as_sample(s) -> OrderedSample:
    return s if isinstance(s, OrderedSample) else order_sample(s)


def _check_n(n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise InputError("SAMPLE_TOO_SMALL", f"need n >= {minimum}, got {n}", n=n)


# -- correction factors -----------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def correction_factors(n: int) -> CorrectionFactors:
    """Exact small-sample factors f(n) (ML), g(n) (OLS) and h(n) (OLS with intercept).

    Evaluated in O(n) with compensated prefix sums.
    """
    _check_n(int(n))
    f, g, h = kernels.correction_factors(int(n))
    return CorrectionFactors(int(n), f, g, h)


def correction_f(n: int) -> float:
    return correction_factors(n).f


def correction_g(n: int) -> float:
    return correction_factors(n).g


def correction_h(n: int) -> float:
    return correction_factors(n).h


# -- estimators -------------------------------------------------------------------

def _undefined(est: Estimator, s: OrderedSample) -> DegenerateSampleError:
    v = s.values
    if est is Estimator.K_WLS and v[0] != v[-1]:
        return DegenerateSampleError(
            "TIED_MINIMUM", f"{est.name}: an observation above rank n ties the minimum"
        )
    code = "TIED_MINIMUM" if est is Estimator.K_WLS else "DEGENERATE_SAMPLE"
    return DegenerateSampleError(code, f"{est.name}: all observations are equal")


def estimate_many(s, estimators: Sequence[Estimator]) -> dict:
    """Evaluate several estimators on one sample in a single kernel pass.

    Returns a mapping estimator -> TailEstimate, or -> DegenerateSampleError when the
    estimator is undefined on this sample.
    """
    s = _as_sample(s)
    _check_n(s.n)
    cf = correction_factors(s.n)
    codes = np.array([e.value for e in estimators], dtype=np.int64)
    row = kernels.estimate_batch(s.logs.reshape(1, -1), codes, cf.g, cf.h)[0]
    out = {}
    for est, val in zip(estimators, row):
        if math.isfinite(val):
            out[est] = TailEstimate(est, est.target, float(val), s.n)
        else:
            out[est] = _undefined(est, s)
    return out


def estimate(s, estimator: Estimator) -> TailEstimate:
    res = estimate_many(s, [estimator])[estimator]
    if isinstance(res, Exception):
        raise res
    return res


def hill_shifted(s) -> TailEstimate:
    """Hill MLE of d with the n-1 divisor (unbiased under a strict Pareto)."""
    return estimate(s, Estimator.HILL_SHIFTED)


def ols_d(s) -> TailEstimate:
    """Rank-size regression slope with the intercept constrained to ln(S_(n) n^d)."""
    return estimate(s, Estimator.OLS)


def shifted_ols_d(s) -> TailEstimate:
    return estimate(s, Estimator.OLS_SHIFTED)


def ols_gi_d(s) -> TailEstimate:
    """Constrained-intercept regression on the half-shifted ranks i - 1/2, over i = 1..n."""
    return estimate(s, Estimator.OLS_GI)


def ols_intercept_d(s) -> TailEstimate:
    return estimate(s, Estimator.OLS_INTERCEPT)


def shifted_ols_intercept_d(s) -> TailEstimate:
    return estimate(s, Estimator.OLS_INTERCEPT_SHIFTED)


def wls_d(s) -> TailEstimate:
    """WLS slope with weights 1/ln(n/i); equals hill_shifted / f(n)."""
    return estimate(s, Estimator.WLS_D)


def k_ml(s) -> TailEstimate:
    return estimate(s, Estimator.K_ML)


def k_ols(s) -> TailEstimate:
    return estimate(s, Estimator.K_OLS)


def k_wls(s) -> TailEstimate:
    """WLS slope of ln(i/n) on the log-ratios with weights 1/ln(S_(i)/S_(n))."""
    return estimate(s, Estimator.K_WLS)


# -- observation weights ----------------------------------------------------------

def d_weight_profile(estimator: str, n: int) -> WeightProfile:
    estimator = estimator.upper()
    _check_n(n, 3)
    if estimator == "ML":
        w = 1.0 / np.log(n / np.arange(1, n, dtype=np.float64))
        w /= w.sum()
    elif estimator == "OLS":
        w = np.full(n - 1, 1.0 / (n - 1))
    else:
        raise InputError("UNKNOWN_ESTIMATOR", f"weights exist for ML and OLS, not {estimator!r}")
    return WeightProfile(estimator, Target.D, n, w)


def k_ml_weight_profile(samples: Sequence) -> WeightProfile:
    """Average over samples of the normalized ML weights 1/ln(S_(i)/S_(n)) for k."""
    samples = [_as_sample(s) for s in samples]
    if not samples:
        raise InputError("EMPTY_INPUT", "no samples")
    n = samples[0].n
    if any(s.n != n for s in samples):
        raise InputError("MIXED_SIZES", "all samples must have the same size")
    _check_n(n)
    logs = np.ascontiguousarray(np.stack([s.logs for s in samples]))
    total, bad = kernels.kml_weight_sum(logs)
    if bad >= 0:
        raise DegenerateSampleError("TIED_MINIMUM", f"sample {bad} ties its minimum", index=bad)
    return WeightProfile("ML", Target.K, n, total / len(samples))


def tail_mass(profile: WeightProfile, fraction: float = 0.2) -> float:
    """Total weight carried by the smallest ``fraction`` of the observations (ranks i > (1-fraction) n)."""
    cut = (1.0 - fraction) * profile.n
    ranks = np.arange(1, profile.n)
    return float(profile.weights[ranks > cut].sum())
