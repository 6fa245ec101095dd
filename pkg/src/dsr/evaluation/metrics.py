"""Reconstruction-quality measures.

Four measures compare generated series against held-out data: a 1-D
Wasserstein distance between value distributions, a Hellinger distance
between smoothed Welch power spectra, a short-term prediction error, and
(for spiking signals) a Wasserstein distance between inter-spike-interval
distributions. A dataset-dependent weighted sum gives the composite score.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.signal import find_peaks, welch

WELCH_SEGMENT = 4096
PSD_SMOOTH_SIGMA = 2.0
PEAK_HEIGHT = 2.0
PEAK_PROMINENCE = 1.0

# (w_dd, w_ds, w_pe, w_isi) per dataset
SCORE_WEIGHTS = {
    "lorenz": (1.0, 1.0, 1.0, 0.0),
    "cell": (1.0, 1.0, 1.0, 0.0),
    "doublewell": (1.0, 1.0, 0.2, 0.0),
    "rnn": (1.0, 1.0, 0.2, 0.0),
    "neuron": (1.0, 1.0, 0.2, 0.0),
    "ecg": (1.0, 1.0, 1.0, 0.05),
}
DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 0.0)


def wasserstein_1d(u, v) -> float:
    """First Wasserstein distance between empirical 1-D distributions,
    via the integral of |F_u - F_v| over the merged sample grid."""
    u = np.sort(np.asarray(u, dtype=float).reshape(-1))
    v = np.sort(np.asarray(v, dtype=float).reshape(-1))
    if u.size == 0 or v.size == 0:
        raise ValueError("wasserstein_1d: empty sample set")
    grid = np.concatenate([u, v])
    grid.sort(kind="mergesort")
    deltas = np.diff(grid)
    cdf_u = np.searchsorted(u, grid[:-1], side="right") / u.size
    cdf_v = np.searchsorted(v, grid[:-1], side="right") / v.size
    return float(np.sum(np.abs(cdf_u - cdf_v) * deltas))


def _power_spectrum(x: np.ndarray, nperseg: int) -> np.ndarray:
    _, p = welch(x, nperseg=nperseg)  # Hann window, 50% overlap
    return p


def spectral_distance(a, b, segment: int = WELCH_SEGMENT) -> float:
    """Hellinger distance between smoothed, normalized Welch spectra.

    When a series is shorter than the segment, the segment length drops to
    the largest power of two that fits (flagged with a warning) so both
    spectra share a frequency grid.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    shortest = min(a.size, b.size)
    if shortest < 2:
        raise ValueError("spectral_distance: series too short")
    nperseg = segment
    if shortest < segment:
        nperseg = 2 ** int(math.floor(math.log2(shortest)))
        warnings.warn(
            f"spectral_distance: series shorter than segment {segment}; "
            f"using {nperseg}",
            stacklevel=2,
        )
    pa = gaussian_filter1d(_power_spectrum(a, nperseg), PSD_SMOOTH_SIGMA)
    pb = gaussian_filter1d(_power_spectrum(b, nperseg), PSD_SMOOTH_SIGMA)
    pa = np.maximum(pa, 0.0)
    pb = np.maximum(pb, 0.0)
    pa /= pa.sum()
    pb /= pb.sum()
    h = float(np.sqrt(np.sum((np.sqrt(pa) - np.sqrt(pb)) ** 2)) / math.sqrt(2.0))
    return min(1.0, h)


def detect_peaks(
    x: np.ndarray, height: float = PEAK_HEIGHT, prominence: float = PEAK_PROMINENCE
) -> np.ndarray:
    """Indices of strict local maxima with the given minimum height and
    topographic prominence (window-unbounded)."""
    idx, _ = find_peaks(np.asarray(x, dtype=float), height=height, prominence=prominence)
    return idx


def interspike_intervals(x: np.ndarray, **kw) -> np.ndarray:
    return np.diff(detect_peaks(x, **kw))


def isi_distance(a, b) -> float | None:
    """Wasserstein distance between inter-spike-interval distributions;
    None when either series has fewer than two qualifying peaks."""
    ia = interspike_intervals(np.asarray(a).reshape(-1))
    ib = interspike_intervals(np.asarray(b).reshape(-1))
    if ia.size == 0 or ib.size == 0:
        return None
    return wasserstein_1d(ia, ib)


def score_weights(dataset: str) -> tuple:
    return SCORE_WEIGHTS.get(dataset, DEFAULT_WEIGHTS)


def score(measures: dict, dataset: str) -> float:
    """Weighted sum of (D_d, D_s, PE_n, D_ISI); a missing measure is only
    acceptable when its weight is zero."""
    w = score_weights(dataset)
    keys = ("D_d", "D_s", "PE", "D_isi")
    total = 0.0
    for weight, key in zip(w, keys):
        value = measures.get(key)
        if weight == 0.0:
            continue
        if value is None:
            raise ValueError(f"score: measure {key} required for {dataset} is missing")
        total += weight * value
    return total
