"""Pareto, exponential-below-Pareto mixture and Burr laws.

Each law exposes its survival function P(S >= s) and an inverse-transform sampler
driven by caller-supplied uniforms on the open interval (0, 1). All functions
accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "BurrSpec",
    "ExpParetoMixSpec",
    "ParetoSpec",
    "burr_sample",
    "burr_survival",
    "mix_sample_truncated",
    "mix_survival",
    "pareto_sample",
    "pareto_survival",
    "truncated_burr_survival",
]


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _check_u(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise InputError("U_OUT_OF_RANGE", "uniform variates must lie strictly inside (0, 1)")
    return u


@dataclass(frozen=True)
class ParetoSpec:
    k: float
    s_min: float

    def __post_init__(self):
        if not (self.k > 0 and self.s_min > 0):
            raise InputError("INVALID_PARAMETER", f"need k > 0 and s_min > 0, got {self}")


@dataclass(frozen=True)
class ExpParetoMixSpec:
    """Density C e^{(k+1)(1 - s/s_min)} below s_min and C (s_min/s)^{k+1} above."""

    k: float
    s_min: float
    c: float = field(init=False)

    def __post_init__(self):
        if not (self.k > 0 and self.s_min > 0):
            raise InputError("INVALID_PARAMETER", f"need k > 0 and s_min > 0, got k={self.k}, s_min={self.s_min}")
        k = self.k
        object.__setattr__(self, "c", k * (k + 1) / (self.s_min * (1 + k * math.exp(k + 1))))

    @property
    def pareto_mass(self) -> float:
        """P(S >= s_min)."""
        return self.c * self.s_min / self.k


@dataclass(frozen=True)
class BurrSpec:
    k: float
    rho: float

    def __post_init__(self):
        if not (self.k > 0 and self.rho < 0):
            raise InputError("INVALID_PARAMETER", f"need k > 0 and rho < 0, got {self}")


# -- Pareto -------------------------------------------------------------------------

def pareto_survival(spec: ParetoSpec, s):
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < spec.s_min):
        raise InputError("BELOW_SUPPORT", f"survival defined for s >= {spec.s_min}")
    return _scalar_or_array((spec.s_min / s) ** spec.k)


def pareto_sample(spec: ParetoSpec, u):
    u = _check_u(u)
    return _scalar_or_array(spec.s_min * u ** (-1.0 / spec.k))


# -- exponential below, Pareto above ---------------------------------------------------

def mix_survival(spec: ExpParetoMixSpec, s):
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 0):
        raise InputError("NEGATIVE_INPUT", "survival defined for s >= 0")
    k, sm, c = spec.k, spec.s_min, spec.c
    below = s < sm
    with np.errstate(divide="ignore"):
        pareto = (c * sm / k) * (sm / np.where(below, sm, s)) ** k
    # 1 - P(S < s) on the exponential branch
    expo = 1.0 - (c * sm / (k + 1)) * (math.exp(k + 1) - np.exp((k + 1) * (1.0 - np.where(below, s, sm) / sm)))
    return _scalar_or_array(np.where(below, expo, pareto))


def mix_sample_truncated(spec: ExpParetoMixSpec, lower, u):
    """Draw from the mixture conditioned on S >= lower by closed-form inversion.

    Solves P(S >= s) = u P(S >= lower) on whichever branch the target falls in.
    """
    u = _check_u(u)
    if lower < 0:
        raise InputError("NEGATIVE_INPUT", "lower bound must be >= 0")
    k, sm, c = spec.k, spec.s_min, spec.c
    target = u * mix_survival(spec, lower)
    pmass = spec.pareto_mass
    on_pareto = target <= pmass
    t_par = np.where(on_pareto, target, pmass)
    t_exp = np.where(on_pareto, pmass, target)
    s_par = sm * (pmass / t_par) ** (1.0 / k)
    inner = math.exp(k + 1) - (1.0 - t_exp) * (k + 1) / (c * sm)
    s_exp = sm * (1.0 - np.log(inner) / (k + 1))
    out = np.where(on_pareto, s_par, s_exp)
    return _scalar_or_array(np.maximum(out, lower))


# -- Burr -----------------------------------------------------------------------------

def _burr_log_survival(spec: BurrSpec, s: np.ndarray) -> np.ndarray:
    # ln S(s) = ln(1 + s^{-k rho}) / rho, evaluated without overflow
    with np.errstate(divide="ignore"):
        a = -spec.k * spec.rho * np.log(s)
    return np.logaddexp(0.0, a) / spec.rho


def burr_survival(spec: BurrSpec, s):
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 0):
        raise InputError("NEGATIVE_INPUT", "survival defined for s >= 0")
    return _scalar_or_array(np.exp(_burr_log_survival(spec, s)))


def burr_sample(spec: BurrSpec, u):
    u = _check_u(u)
    # (1 + s^{-k rho})^{1/rho} = u  <=>  s = (u^rho - 1)^{-1/(k rho)}
    base = np.expm1(spec.rho * np.log(u))
    return _scalar_or_array(base ** (-1.0 / (spec.k * spec.rho)))


def truncated_burr_survival(spec: BurrSpec, lower: float, s):
    s = np.asarray(s, dtype=np.float64)
    if not lower > 0 or np.any(s < lower):
        raise InputError("BELOW_SUPPORT", f"truncated survival defined for s >= lower = {lower} > 0")
    ls = _burr_log_survival(spec, s) - _burr_log_survival(spec, np.float64(lower))
    return _scalar_or_array(np.exp(ls))
