"""Time-delay embedding with mutual-information delay selection.

The delay is picked at the first strict local minimum of the mutual
information between the series and its lagged copy, estimated with
equiprobable (quantile) binning. The embedding uses a fixed hand-selected
dimension with repeated delays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class EmbeddingSpec:
    delay: int
    dimension: int

    def __post_init__(self):
        if self.delay < 1 or self.dimension < 1:
            raise ValueError(
                f"embedding requires delay >= 1 and dimension >= 1, "
                f"got delay={self.delay}, dimension={self.dimension}"
            )


@dataclass
class MiDelayResult:
    lag: int
    is_minimum: bool  # False: no strict minimum found, lag fell back to max_lag
    mi: np.ndarray  # MI estimates for lags 0..max_lag


def _equiprobable_edges(x: np.ndarray, bins: int) -> np.ndarray:
    edges = np.quantile(x, np.linspace(0.0, 1.0, bins + 1))
    edges[0] -= 1e-12
    edges[-1] += 1e-12
    return np.unique(edges)


def mutual_information(x: np.ndarray, y: np.ndarray, bins: int) -> float:
    """Plug-in MI estimate with equiprobable bins per axis.

    Each axis is binned by its own quantiles, so the estimate is invariant
    to monotone transformations of either variable.
    """
    joint, _, _ = np.histogram2d(
        x, y, bins=(_equiprobable_edges(x, bins), _equiprobable_edges(y, bins))
    )
    joint /= joint.sum()
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    ratio = joint[nz] / (px[:, None] * py[None, :])[nz]
    return float(np.sum(joint[nz] * np.log(ratio)))


MI_TIE_TOLERANCE = 1e-4  # nats; bin-count roundoff produces wobble well below this


def mi_delay(series: np.ndarray, max_lag: int = 100) -> MiDelayResult:
    """First strict local minimum of MI(lag) over lags 1..max_lag.

    Strictness requires MI(lag-1) > MI(lag) < MI(lag+1), with both
    neighbors exceeding the candidate by more than MI_TIE_TOLERANCE so that
    quantile-edge roundoff plateaus never register as minima. The lag-0
    value (the entropy of the binning) serves as the left neighbor of
    lag 1. With no strict minimum the result falls back to max_lag and is
    flagged.
    """
    series = np.asarray(series, dtype=float).reshape(-1)
    T = series.size
    if T < 2 * max_lag:
        raise ValueError(f"series of length {T} is too short for max_lag={max_lag}")
    bins = max(2, math.ceil(math.sqrt(T / 5)))
    mi = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        mi[lag] = mutual_information(series[: T - lag], series[lag:], bins)
    tol = MI_TIE_TOLERANCE
    for lag in range(1, max_lag):
        if mi[lag - 1] > mi[lag] + tol and mi[lag + 1] > mi[lag] + tol:
            return MiDelayResult(lag=lag, is_minimum=True, mi=mi)
    return MiDelayResult(lag=max_lag, is_minimum=False, mi=mi)


def delay_embed(series: np.ndarray, spec: EmbeddingSpec) -> np.ndarray:
    """Rows (x_t, x_{t+tau}, ..., x_{t+(d-1) tau}); column 0 is the series."""
    series = np.asarray(series, dtype=float).reshape(-1)
    d, tau = spec.dimension, spec.delay
    rows = series.size - (d - 1) * tau
    if rows < 1:
        raise ValueError(
            f"series of length {series.size} too short for dimension={d}, delay={tau}"
        )
    return np.stack([series[j * tau : j * tau + rows] for j in range(d)], axis=1)
