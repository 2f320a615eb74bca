"""Pure numpy implementation of the inner loops, used when the Cython build is absent.

Same functions and semantics as ``_ckernels``; results agree to rounding, not bitwise.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

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

_table_cache = np.empty((2, 0))


def _log_tables(n: int) -> np.ndarray:
    # grown with math.log per element so any prefix is independent of the table size
    global _table_cache
    have = _table_cache.shape[1]
    if have < n:
        more = np.empty((2, n - have))
        more[0] = np.fromiter(map(math.log, range(have + 1, n + 1)), float, n - have)
        more[1] = np.fromiter((math.log(i - 0.5) for i in range(have + 1, n + 1)), float, n - have)
        _table_cache = np.hstack((_table_cache, more))
    return _table_cache[:, :n]


def correction_factors(n: int) -> tuple[float, float, float]:
    tab = _log_tables(n)
    L = tab[0] - tab[0, n - 1]
    sl = math.fsum(L)
    sll = math.fsum(L * L)
    # sum_j j^-1 sum_{i<=j} L_i == sum_i L_i * sum_{j>=i} 1/j
    tail_harmonic = np.cumsum(1.0 / np.arange(n, 0, -1, dtype=float))[::-1]
    dbl = math.fsum(L * tail_harmonic)
    f = -sl / (n - 1)
    g = sll / (sl / n - dbl)
    h = (sll - sl * sl / n) / (sl - dbl)
    return f, g, h


@np.errstate(divide="ignore", invalid="ignore")  # non-finite rows come back as nan
def estimate_batch(logs: np.ndarray, codes: np.ndarray, g: float, h: float) -> np.ndarray:
    nrow, m = logs.shape
    tab = _log_tables(m)
    lnm = tab[0, m - 1]
    L = tab[0, : m - 1] - lnm
    x = tab[1] - lnm
    y = logs[:, m - 1 : m] - logs  # (nrow, m), last column zero
    yi = y[:, : m - 1]
    codes = [int(c) for c in codes]
    out = np.empty((nrow, len(codes)))

    sy = yi.sum(axis=1)
    sly = (yi * L).sum(axis=1)
    sll = (L * L).sum()
    hill = -sy / (m - 1) + 0.0
    ols = sly / sll + 0.0
    for j, code in enumerate(codes):
        if code == HILL_SHIFTED:
            col = hill
        elif code == OLS:
            col = ols
        elif code == OLS_SHIFTED:
            col = g * ols
        elif code == OLS_GI:
            col = (y * x).sum(axis=1) / (x * x).sum() + 0.0
        elif code in (OLS_INTERCEPT, OLS_INTERCEPT_SHIFTED):
            Lfull = tab[0] - lnm
            dl = Lfull - Lfull.sum() / m
            dy = y - (sy / m)[:, None]
            col = (dy * dl).sum(axis=1) / (dl * dl).sum() + 0.0
            if code == OLS_INTERCEPT_SHIFTED:
                col = h * col
        elif code == WLS_D:
            w = 1.0 / (-L)
            col = (w * L * yi).sum(axis=1) / (w * L * L).sum() + 0.0
        elif code == K_ML:
            col = np.where(hill == 0.0, np.nan, 1.0 / (((m - 1.0) / m) * hill))
        elif code == K_OLS:
            syy = (yi * yi).sum(axis=1)
            col = np.where(syy == 0.0, np.nan, sly / syy)
        elif code == K_WLS:
            wt = 1.0 / (-yi)
            num = (wt * L * yi).sum(axis=1)
            den = (wt * yi * yi).sum(axis=1)
            col = np.where((yi == 0.0).any(axis=1), np.nan, num / den)
        else:
            col = np.full(nrow, np.nan)
        out[:, j] = col
    return out


def scan(logs: np.ndarray, m_min: int, m_max: int, codes: np.ndarray) -> np.ndarray:
    out = np.empty((m_max - m_min + 1, len(codes)))
    for m in range(m_min, m_max + 1):
        _, g, h = correction_factors(m)
        out[m - m_min] = estimate_batch(logs[None, :m], codes, g, h)[0]
    return out


def kml_weight_sum(logs: np.ndarray) -> tuple[np.ndarray, int]:
    t = logs[:, :-1] - logs[:, -1:]
    bad = np.flatnonzero((t <= 0.0).any(axis=1))
    if bad.size:
        return np.zeros(logs.shape[1] - 1), int(bad[0])
    w = 1.0 / t
    w /= w.sum(axis=1, keepdims=True)
    return w.sum(axis=0), -1
