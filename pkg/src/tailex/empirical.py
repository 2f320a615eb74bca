"""CSV ingestion, absolute log returns, empirical survival and support scans."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InputError
from .estimators import COMPARISON_SET, Estimator, OrderedSample, _undefined, order_sample

__all__ = [
    "Dataset",
    "SupportScanRow",
    "SurvivalPoint",
    "abs_log_returns",
    "empirical_survival",
    "load_csv",
    "read_column",
    "support_scan",
]


@dataclass(frozen=True)
class Dataset:
    name: str
    values: OrderedSample
    source_path: str = ""
    dropped: int = 0

    @property
    def n(self) -> int:
        return self.values.n


@dataclass(frozen=True)
class SurvivalPoint:
    s: float
    p: float
    rank: int


@dataclass(frozen=True)
class SupportScanRow:
    m: int
    threshold: float
    estimates: dict  # Estimator -> float
    errors: dict = field(default_factory=dict)  # Estimator -> DegenerateSampleError


def read_column(path, column=0, delimiter: str = ",") -> tuple[np.ndarray, int]:
    """Values of one column in file order, skipping blank and non-numeric cells.

    ``column`` is a header name or a 0-based index. Returns (values, skipped_rows).
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError("NO_VALID_ROWS", f"{path} is empty") from None
            header = [h.strip() for h in header]
            if isinstance(column, str) and column in header:
                idx = header.index(column)
            elif isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
                idx = int(column)
                if idx >= len(header):
                    raise InputError("COLUMN_NOT_FOUND", f"column index {idx} out of range in {path}")
            else:
                raise InputError("COLUMN_NOT_FOUND", f"no column {column!r} in {path}")
            values, skipped = [], 0
            for row in reader:
                if not row:
                    continue
                try:
                    values.append(float(row[idx]))
                except (ValueError, IndexError):
                    skipped += 1
    except OSError as exc:
        raise InputError("IO_ERROR", str(exc)) from exc
    return np.asarray(values, dtype=np.float64), skipped


def load_csv(path, column=0, delimiter: str = ",", name: str | None = None) -> Dataset:
    raw, skipped = read_column(path, column, delimiter)
    keep = np.isfinite(raw) & (raw > 0)
    if not keep.any():
        raise InputError("NO_VALID_ROWS", f"no positive finite values in column {column!r} of {path}")
    dropped = skipped + int((~keep).sum())
    return Dataset(name or str(column), order_sample(raw[keep]), str(path), dropped)


def abs_log_returns(prices: Sequence[float], drop_zeros: bool = True) -> np.ndarray:
    p = np.asarray(prices, dtype=np.float64)
    if p.size < 2:
        raise InputError("TOO_SHORT", "need at least two prices")
    bad = np.flatnonzero(~(p > 0))
    if bad.size:
        raise InputError("NONPOSITIVE_PRICE", f"price {p[bad[0]]!r} at index {bad[0]}", index=int(bad[0]))
    r = np.abs(np.diff(np.log(p)))
    return r[r > 0] if drop_zeros else r


def empirical_survival(d) -> list[SurvivalPoint]:
    """One point per rank: the share of observations >= S_(i) is i/n (ties keep distinct ranks)."""
    s = d.values if isinstance(d, Dataset) else d
    n = s.n
    return [SurvivalPoint(float(v), (i + 1) / n, i + 1) for i, v in enumerate(s.values)]


def support_scan(
    d,
    estimators: Sequence[Estimator] = COMPARISON_SET,
    m_min: int = 3,
    m_max: int | None = None,
) -> list[SupportScanRow]:
    """Re-estimate on the m largest observations for every tail size m in [m_min, m_max].

    The row for m = n reproduces the full-sample estimates bit for bit.
    """
    s = d.values if isinstance(d, Dataset) else d
    n = s.n
    m_max = n if m_max is None else m_max
    if m_min < 2:
        raise InputError("SAMPLE_TOO_SMALL", f"m_min must be >= 2, got {m_min}")
    if not m_min <= m_max <= n:
        raise InputError("INVALID_RANGE", f"need {m_min} <= m_max <= n={n}, got m_max={m_max}")
    estimators = list(estimators)
    codes = np.array([e.value for e in estimators], dtype=np.int64)
    table = kernels.scan(s.logs, m_min, m_max, codes)
    rows = []
    for m, vals in zip(range(m_min, m_max + 1), table):
        est, err = {}, {}
        for e, v in zip(estimators, vals):
            if math.isfinite(v):
                est[e] = float(v)
            else:
                err[e] = _undefined(e, s.head(m))
        rows.append(SupportScanRow(m, float(s.values[m - 1]), est, err))
    return rows
