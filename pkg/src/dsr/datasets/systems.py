"""Benchmark system definitions and dataset generation.

Four synthetic benchmarks, each observed through a single variable and
normalized across the full series before the equal train/test split:

    lorenz      chaotic Lorenz system, observe x
    cell        six-dimensional cell division cycle model, observe C1
    doublewell  noise-driven bistable SDE with smoothing cascade, observe z5
    rnn         large randomly connected rate network, observe phi(h_1)

A 5% warmup stretch is simulated before the exported window to shed the
transient from the (unpublished) initial conditions. The `scale` factor
shortens the simulated window without touching any dynamics parameter.
"""

from __future__ import annotations

import math

import numpy as np

from .. import rng as rngmod
from .integrate import OdeSpec, SdeSpec, integrate_euler_maruyama, integrate_rk45
from .store import TimeSeriesDataset, apply_normalization, normalization_stats

DATASET_NAMES = ("lorenz", "cell", "doublewell", "rnn")

WARMUP_FRACTION = 0.05


def lorenz_drift(t, y, s=10.0, r=28.0, b=2.667):
    x, yy, z = y
    return np.array([s * (yy - x), r * x - yy - x * z, x * yy - b * z])


_CELL = dict(
    VM1=0.3, UM1=0.3, vi1=0.05, vi2=0.05, K=0.01, H=0.01, V2=0.15, U2=0.15,
    VM3=0.1, UM3=0.1, V4=0.05, U4=0.05, Kc1=0.5, Kc2=0.5, vd1=0.025, vd2=0.025,
    Kd1=0.02, Kd2=0.02, kd1=0.001, kd2=0.001, Kim1=0.65, Kim2=0.65,
)


def cell_cycle_drift(t, y):
    # scalar math: the 0.04 max-step constraint makes this the hottest drift
    c1, m1, x1, c2, m2, x2 = (float(v) for v in y)
    p = _CELL
    v1 = c1 / (p["Kc1"] + c1) * p["VM1"]
    v3 = m1 * p["VM3"]
    u1 = c2 / (p["Kc2"] + c2) * p["UM1"]
    u3 = m2 * p["UM3"]
    dc1 = p["vi1"] * p["Kim1"] / (p["Kim1"] + m2) - p["vd1"] * x1 * c1 / (p["Kd1"] + c1) - p["kd1"] * c1
    dm1 = v1 * (1 - m1) / (p["K"] + (1 - m1)) - p["V2"] * m1 / (p["K"] + m1)
    dx1 = v3 * (1 - x1) / (p["K"] + (1 - x1)) - p["V4"] * x1 / (p["K"] + x1)
    dc2 = p["vi2"] * p["Kim2"] / (p["Kim2"] + m1) - p["vd2"] * x2 * c2 / (p["Kd2"] + c2) - p["kd2"] * c2
    dm2 = u1 * (1 - m2) / (p["H"] + (1 - m2)) - p["U2"] * m2 / (p["H"] + m2)
    dx2 = u3 * (1 - x2) / (p["H"] + (1 - x2)) - p["U4"] * x2 / (p["H"] + x2)
    return np.array([dc1, dm1, dx1, dc2, dm2, dx2])


def double_well_drift(y, alpha=0.4):
    d = np.empty_like(y)
    d[0] = -y[0] ** 3 + y[0]
    d[1:] = alpha * (y[:-1] - y[1:])
    return d


def double_well_spec(alpha: float = 0.4, sigma2: float = 0.2) -> SdeSpec:
    diffusion = np.zeros(5)
    diffusion[0] = math.sqrt(sigma2)
    return SdeSpec(
        5,
        lambda y: double_well_drift(y, alpha),
        diffusion=diffusion,
        params={"alpha": alpha, "sigma2": sigma2},
    )


def rnn_connectivity(n: int, g: float, rng: np.random.Generator) -> np.ndarray:
    """Random coupling matrix with i.i.d. N(0, g/n^2) entries."""
    return rng.normal(0.0, math.sqrt(g) / n, size=(n, n))


def _simulate_lorenz(seed, scale):
    t_window = 10000.0 * scale
    warm = WARMUP_FRACTION * t_window
    dt = 0.05
    n = int(round(t_window / dt))
    samples = warm + dt * np.arange(n)
    traj = integrate_rk45(
        OdeSpec(3, lorenz_drift),
        t_end=warm + t_window,
        t_samples=samples,
        y0=np.array([1.0, 1.0, 1.0]),
    )
    return traj[:, :1], dt, {"s": 10.0, "r": 28.0, "b": 2.667, "T": t_window}


def _simulate_cell(seed, scale):
    t_window = 800000.0 * scale
    warm = WARMUP_FRACTION * t_window
    dt = 5.0
    n = int(round(t_window / dt))
    samples = warm + dt * np.arange(n)
    traj = integrate_rk45(
        OdeSpec(6, cell_cycle_drift, max_step=0.04),
        t_end=warm + t_window,
        t_samples=samples,
        y0=np.full(6, 0.5),
    )
    return traj[:, :1], dt, dict(_CELL, T=t_window)


def _simulate_doublewell(seed, scale):
    t_window = 400000.0 * scale
    warm = WARMUP_FRACTION * t_window
    dt = 0.2
    downsample = 10
    spec = double_well_spec()
    gen = rngmod.stream(seed, "doublewell", "noise")
    path = integrate_euler_maruyama(
        spec, dt, warm + t_window, gen, y0=np.ones(5)
    )
    warm_steps = int(round(warm / dt))
    n = int(round(t_window / dt)) // downsample
    kept = path[warm_steps:][: n * downsample : downsample]
    return kept[:, 4:5], dt * downsample, dict(spec.params, T=t_window, downsample=downsample)


def _simulate_rnn(seed, scale, n_neurons=1000, g=2.0):
    t_window = 100000.0 * scale
    warm = WARMUP_FRACTION * t_window
    dt = 0.5
    gen = rngmod.stream(seed, "rnn", "connectivity")
    J = rnn_connectivity(n_neurons, g, gen)
    h0 = rngmod.stream(seed, "rnn", "init").standard_normal(n_neurons)

    def drift(t, h):
        return -h + J @ np.tanh(h)

    n = int(round(t_window / dt))
    samples = warm + dt * np.arange(n)
    traj = integrate_rk45(
        OdeSpec(n_neurons, drift), t_end=warm + t_window, t_samples=samples, y0=h0
    )
    obs = np.tanh(traj[:, :1])
    return obs, dt, {"n": n_neurons, "g": g, "T": t_window}


_BUILDERS = {
    "lorenz": _simulate_lorenz,
    "cell": _simulate_cell,
    "doublewell": _simulate_doublewell,
    "rnn": _simulate_rnn,
}


def generate_dataset(
    name: str, seed: int, scale: float = 1.0
) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    """Simulate one benchmark and return the normalized (train, test) pair.

    Normalization statistics are computed over the full series; the split
    into equal halves happens afterwards so that both halves share them.
    """
    if name not in _BUILDERS:
        raise ValueError(f"unknown dataset {name!r}; expected one of {DATASET_NAMES}")
    if not 0 < scale <= 1.0:
        raise ValueError(f"scale must be in (0, 1], got {scale}")
    obs, dt, params = _BUILDERS[name](seed, scale)
    stats = normalization_stats(obs)
    obs = apply_normalization(obs, stats)
    half = obs.shape[0] // 2
    params = dict(params, scale=scale)
    make = lambda sl, split: TimeSeriesDataset(
        observations=obs[sl],
        dt=dt,
        name=name,
        split=split,
        normalization=stats,
        seed=seed,
        generator_params=params,
    )
    return make(slice(0, half), "train"), make(slice(half, 2 * half), "test")
