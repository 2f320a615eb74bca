"""Monte Carlo harness for bias, variance and MSE of the d estimators.

Every replication draws its uniforms from its own stream addressed by
(seed, exercise, config point, n, replication, attempt), and replications are
processed in fixed-size chunks reduced in replication order, so results are
bit-identical for any number of worker threads.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .distributions import BurrSpec, ExpParetoMixSpec, ParetoSpec, burr_sample, mix_sample_truncated, pareto_sample
from .errors import HarnessError, InputError
from .estimators import COMPARISON_SET, Estimator, correction_factors
from .streams import open_uniforms, stream

log = logging.getLogger(__name__)

DEFAULT_SAMPLE_SIZES = (3, 5, 10, 20, 30, 50, 70, 100)
DEFAULT_RHO_MAGNITUDES = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)
CHUNK = 256
MAX_ATTEMPTS = 64

EXERCISE_MIXTURE = 1
EXERCISE_BURR = 2
EXERCISE_PARETO = 3


@dataclass(frozen=True)
class Mc1Config:
    k: float = 1.0
    s_min: float = 50.0
    supports: tuple = (50.0, 5.0)
    sample_sizes: tuple = DEFAULT_SAMPLE_SIZES
    replications: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "supports", tuple(float(s) for s in self.supports))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.replications < 1:
            raise InputError("INVALID_CONFIG", "replications must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 3:
            raise InputError("INVALID_CONFIG", "every sample size must be >= 3")
        if not self.supports or min(self.supports) < 0:
            raise InputError("INVALID_CONFIG", "supports must be nonnegative")
        ExpParetoMixSpec(self.k, self.s_min)


@dataclass(frozen=True)
class Mc2Config:
    k: float = 1.0
    rho_magnitudes: tuple = DEFAULT_RHO_MAGNITUDES
    sample_sizes: tuple = (10, 100)
    replications: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rho_magnitudes", tuple(abs(float(r)) for r in self.rho_magnitudes))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.replications < 1:
            raise InputError("INVALID_CONFIG", "replications must be >= 1")
        if not self.rho_magnitudes or min(self.rho_magnitudes) <= 0:
            raise InputError("INVALID_CONFIG", "every |rho| must be > 0")
        if not self.sample_sizes or min(self.sample_sizes) < 2:
            raise InputError("INVALID_CONFIG", "every sample size must be >= 2")
        if self.k <= 0:
            raise InputError("INVALID_CONFIG", "k must be > 0")


@dataclass(frozen=True)
class McRow:
    exercise: int
    k: float
    point: float  # support lower bound (exercise 1) or rho (exercise 2)
    n: int
    estimator: Estimator
    bias: float
    variance: float
    mse: float
    replications: int
    seed: int


@dataclass(frozen=True)
class McSummary:
    exercise: int
    point_name: str
    rows: tuple
    redraws: dict = field(default_factory=dict)  # (point, n) -> count

    def get(self, point: float, n: int, estimator: Estimator) -> McRow:
        for row in self.rows:
            if row.point == point and row.n == n and row.estimator is estimator:
                return row
        raise KeyError((point, n, estimator))


def summarize(estimates, true_d: float) -> tuple[float, float, float]:
    """Bias, population variance and MSE of a vector of estimates."""
    e = np.asarray(estimates, dtype=np.float64)
    if e.size == 0:
        raise InputError("EMPTY_INPUT", "no estimates to summarize")
    r = e.size
    mean = math.fsum(e) / r
    bias = mean - true_d
    variance = math.fsum((e - mean) ** 2) / r
    mse = math.fsum((e - true_d) ** 2) / r
    return bias, variance, mse


def simulate(
    draw: Callable[[np.ndarray], np.ndarray],
    n: int,
    estimators: Sequence[Estimator],
    replications: int,
    seed: int,
    key: tuple,
    threads: int = 1,
) -> tuple[np.ndarray, int]:
    """Estimate on ``replications`` independent samples of size n.

    ``draw`` maps an (rows, n) array of open uniforms to samples. Returns the
    (replications, len(estimators)) estimate matrix and the number of redraws.
    """
    if n < 2:
        raise InputError("SAMPLE_TOO_SMALL", f"need n >= 2, got {n}")
    cf = correction_factors(n)
    codes = np.array([e.value for e in estimators], dtype=np.int64)

    def one(rep: int, attempt: int) -> np.ndarray:
        return open_uniforms(stream(seed, *key, rep, attempt), n)

    def logs_of(u: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(draw(u))
        lg.sort(axis=1)
        return np.ascontiguousarray(lg[:, ::-1])

    def run_chunk(start: int) -> tuple[np.ndarray, int]:
        stop = min(start + CHUNK, replications)
        u = np.stack([one(r, 0) for r in range(start, stop)])
        lg = logs_of(u)
        est = kernels.estimate_batch(lg, codes, cf.g, cf.h)
        redraws = 0
        bad = ~(np.isfinite(lg).all(axis=1) & np.isfinite(est).all(axis=1))
        for i in np.flatnonzero(bad):
            for attempt in range(1, MAX_ATTEMPTS):
                redraws += 1
                lg_i = logs_of(one(start + i, attempt)[None, :])
                est_i = kernels.estimate_batch(lg_i, codes, cf.g, cf.h)
                if np.isfinite(lg_i).all() and np.isfinite(est_i).all():
                    est[i] = est_i[0]
                    break
            else:
                raise HarnessError("REDRAW_LIMIT", f"replication {start + i} failed {MAX_ATTEMPTS} times")
        return est, redraws

    starts = range(0, replications, CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    return np.concatenate([p[0] for p in parts]), sum(p[1] for p in parts)


def _run(exercise, point_name, points, cfg, make_draw, threads) -> McSummary:
    rows, redraws = [], {}
    estimators = COMPARISON_SET
    true_d = 1.0 / cfg.k
    for idx, point in enumerate(points):
        draw = make_draw(point)
        for n in cfg.sample_sizes:
            log.debug("exercise %d %s=%g n=%d", exercise, point_name, point, n)
            est, nredraw = simulate(draw, n, estimators, cfg.replications, cfg.seed, (exercise, idx, n), threads)
            redraws[(point, n)] = nredraw
            for j, e in enumerate(estimators):
                bias, var, mse = summarize(est[:, j], true_d)
                rows.append(McRow(exercise, cfg.k, point, n, e, bias, var, mse, cfg.replications, cfg.seed))
    return McSummary(exercise, point_name, tuple(rows), redraws)


def run_mc1(cfg: Mc1Config, threads: int = 1) -> McSummary:
    """Exponential-below-Pareto mixture, sampled above each support lower bound."""
    spec = ExpParetoMixSpec(cfg.k, cfg.s_min)

    def make_draw(lower):
        return lambda u: mix_sample_truncated(spec, lower, u)

    return _run(EXERCISE_MIXTURE, "support", cfg.supports, cfg, make_draw, threads)


def run_mc2(cfg: Mc2Config, threads: int = 1) -> McSummary:
    """Burr samples over the full nonnegative support, one config point per rho."""

    def make_draw(rho):
        spec = BurrSpec(cfg.k, rho)
        return lambda u: burr_sample(spec, u)

    rhos = tuple(-r for r in cfg.rho_magnitudes)
    return _run(EXERCISE_BURR, "rho", rhos, cfg, make_draw, threads)


def pareto_draw(spec: ParetoSpec) -> Callable[[np.ndarray], np.ndarray]:
    return lambda u: pareto_sample(spec, u)


def pareto_samples(spec: ParetoSpec, n: int, count: int, seed: int, start: int = 0) -> np.ndarray:
    """``count`` strict-Pareto samples of size n as rows of log values, sorted descending."""
    u = np.stack([open_uniforms(stream(seed, EXERCISE_PARETO, 0, n, r, 0), n) for r in range(start, start + count)])
    lg = np.log(pareto_sample(spec, u))
    lg.sort(axis=1)
    return np.ascontiguousarray(lg[:, ::-1])


def k_ml_weights_simulated(spec: ParetoSpec, n: int, replications: int, seed: int, threads: int = 1) -> np.ndarray:
    """Average normalized ML weights for k over simulated strict-Pareto samples."""
    if n < 2:
        raise InputError("SAMPLE_TOO_SMALL", f"need n >= 2, got {n}")
    chunk = max(1, min(CHUNK, 2_000_000 // n))

    def run_chunk(start):
        lg = pareto_samples(spec, n, min(chunk, replications - start), seed, start)
        total, bad = kernels.kml_weight_sum(lg)
        if bad >= 0:
            raise HarnessError("TIED_MINIMUM", f"sample {start + bad} ties its minimum")
        return total

    starts = range(0, replications, chunk)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    return np.sum(parts, axis=0) / replications
