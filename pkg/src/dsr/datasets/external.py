"""Preprocessing of external recordings into the common dataset format.

The loaders accept local raw sample arrays only; acquiring the recordings
is out of scope. Two kinds are supported:

    neuron  somatic voltage sampled at 5 kHz: drop the leading 600 and
            trailing 1200 samples (no stimulus applied there), smooth with
            a Gaussian filter of sigma = 0.2 ms, normalize over time, and
            split into two halves of 16100 points.
    ecg     preprocessed recording at 700 Hz: decimate by 4 to 175 Hz,
            normalize, split into equal halves (25000 points per split for
            the canonical 200000-sample input).
"""

from __future__ import annotations

import numpy as np

from .store import TimeSeriesDataset, apply_normalization, normalization_stats

NEURON_RATE_HZ = 5000.0
NEURON_DISCARD_HEAD = 600
NEURON_DISCARD_TAIL = 1200
NEURON_SMOOTH_SIGMA_MS = 0.2

ECG_RATE_HZ = 700.0
ECG_DOWNSAMPLE = 4


def gaussian_smooth(x: np.ndarray, sigma: float) -> np.ndarray:
    """Discrete Gaussian convolution truncated at +-4 sigma, reflected edges."""
    if sigma <= 0:
        return x.copy()
    radius = max(1, int(np.ceil(4.0 * sigma)))
    t = np.arange(-radius, radius + 1)
    kernel = np.exp(-0.5 * (t / sigma) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(x, radius, mode="reflect")
    return np.convolve(padded, kernel, mode="valid")


def _pair(obs: np.ndarray, dt: float, name: str, params: dict):
    stats = normalization_stats(obs)
    obs = apply_normalization(obs, stats)
    half = obs.shape[0] // 2
    make = lambda sl, split: TimeSeriesDataset(
        observations=obs[sl],
        dt=dt,
        name=name,
        split=split,
        normalization=stats,
        generator_params=params,
    )
    return make(slice(0, half), "train"), make(slice(half, 2 * half), "test")


def preprocess_external(
    raw: np.ndarray, kind: str
) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    raw = np.asarray(raw, dtype=float).reshape(-1)
    if kind == "neuron":
        if raw.size <= NEURON_DISCARD_HEAD + NEURON_DISCARD_TAIL:
            raise ValueError(
                f"neuron recording of {raw.size} samples is shorter than the "
                f"{NEURON_DISCARD_HEAD}+{NEURON_DISCARD_TAIL} discard window"
            )
        trimmed = raw[NEURON_DISCARD_HEAD : raw.size - NEURON_DISCARD_TAIL]
        sigma_samples = NEURON_SMOOTH_SIGMA_MS * 1e-3 * NEURON_RATE_HZ
        smooth = gaussian_smooth(trimmed, sigma_samples)
        return _pair(
            smooth[:, None],
            1.0 / NEURON_RATE_HZ,
            "neuron",
            {"rate_hz": NEURON_RATE_HZ, "smooth_sigma_ms": NEURON_SMOOTH_SIGMA_MS},
        )
    if kind == "ecg":
        if raw.size < 2 * ECG_DOWNSAMPLE:
            raise ValueError(f"ecg recording of {raw.size} samples is too short")
        decimated = raw[::ECG_DOWNSAMPLE]
        return _pair(
            decimated[:, None],
            ECG_DOWNSAMPLE / ECG_RATE_HZ,
            "ecg",
            {"rate_hz": ECG_RATE_HZ / ECG_DOWNSAMPLE, "downsample": ECG_DOWNSAMPLE},
        )
    raise ValueError(f"unknown external kind {kind!r}; expected 'neuron' or 'ecg'")
