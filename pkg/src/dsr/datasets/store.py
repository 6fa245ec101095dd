"""Dataset container and on-disk format.

A dataset is a binary payload of little-endian float64 in time-major order
plus a JSON sidecar carrying the metadata. A CSV export mirrors the payload
for inspection.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class NormalizationError(ValueError):
    pass


@dataclass
class TimeSeriesDataset:
    observations: np.ndarray  # (T, d_x), normalized
    dt: float
    name: str
    split: str  # "train" | "test"
    normalization: tuple[np.ndarray, np.ndarray]  # per-channel (mean, std) before normalization
    seed: int | None = None
    generator_params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.observations = np.ascontiguousarray(self.observations, dtype=np.float64)
        if self.observations.ndim == 1:
            self.observations = self.observations[:, None]

    @property
    def length(self) -> int:
        return self.observations.shape[0]

    @property
    def d_x(self) -> int:
        return self.observations.shape[1]


def normalization_stats(obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and standard deviation, rejecting constant channels."""
    obs = np.atleast_2d(obs)
    if obs.ndim == 1:
        obs = obs[:, None]
    mean = obs.mean(axis=0)
    std = obs.std(axis=0)
    floor = 1e-12 * np.maximum(1.0, np.abs(mean))
    bad = np.nonzero(std <= floor)[0]
    if bad.size:
        raise NormalizationError(
            f"zero-variance channel(s) {bad.tolist()}: cannot normalize a constant series"
        )
    return mean, std


def apply_normalization(obs: np.ndarray, stats) -> np.ndarray:
    mean, std = stats
    return (obs - mean) / std


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def save_dataset(ds: TimeSeriesDataset, path: str | os.PathLike) -> Path:
    """Write `<path>.bin` and `<path>.json` (suffix on `path` is ignored)."""
    path = Path(path).with_suffix(".bin")
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = ds.observations.astype("<f8")
    tmp = path.with_suffix(".bin.tmp")
    tmp.write_bytes(payload.tobytes(order="C"))
    os.replace(tmp, path)
    meta = {
        "name": ds.name,
        "dt": ds.dt,
        "shape": list(ds.observations.shape),
        "split": ds.split,
        "normalization": {
            "mean": list(map(float, ds.normalization[0])),
            "std": list(map(float, ds.normalization[1])),
        },
        "seed": ds.seed,
        "generator_params": ds.generator_params,
    }
    side = _sidecar_path(path)
    tmp = side.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, side)
    return path


def load_dataset(path: str | os.PathLike) -> TimeSeriesDataset:
    path = Path(path).with_suffix(".bin")
    meta = json.loads(_sidecar_path(path).read_text())
    shape = tuple(meta["shape"])
    data = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(shape).copy()
    return TimeSeriesDataset(
        observations=data,
        dt=float(meta["dt"]),
        name=meta["name"],
        split=meta["split"],
        normalization=(
            np.asarray(meta["normalization"]["mean"], dtype=float),
            np.asarray(meta["normalization"]["std"], dtype=float),
        ),
        seed=meta["seed"],
        generator_params=meta.get("generator_params", {}),
    )


def export_csv(ds: TimeSeriesDataset, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(f"x{i}" for i in range(ds.d_x))
    lines = [header]
    for row in ds.observations:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def chunk(
    ds: TimeSeriesDataset, T: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw `count` windows of length T uniformly over valid start offsets."""
    L = ds.length
    if T > L:
        raise ValueError(f"chunk: window {T} longer than series {L}")
    starts = rng.integers(0, L - T + 1, size=count)
    return np.stack([ds.observations[s : s + T] for s in starts])
