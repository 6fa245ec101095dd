"""Numerical integration: adaptive Dormand-Prince 5(4) and Euler-Maruyama."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "OdeSpec",
    "SdeSpec",
    "IntegrationError",
    "integrate_rk45",
    "integrate_euler_maruyama",
]


class IntegrationError(RuntimeError):
    pass


@dataclass
class OdeSpec:
    dimension: int
    drift: Callable[[float, np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    max_step: float = np.inf


@dataclass
class SdeSpec:
    dimension: int
    drift: Callable[[np.ndarray], np.ndarray]
    diffusion: np.ndarray  # per-channel noise scale; zero on deterministic channels
    params: dict = field(default_factory=dict)


# Dormand-Prince 5(4) tableau with the standard quartic dense-output
# extension (optimal c6 continuous coefficients).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_MIN_STEP = 1e-12


def _error_norm(err: np.ndarray, scale: np.ndarray) -> float:
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(drift, t0, y0, f0, rtol, atol):
    # standard Hairer-Norsett-Wanner heuristic
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = drift(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_rk45(
    spec: OdeSpec,
    t_end: float,
    sample_dt: float | None = None,
    rtol: float = 1e-3,
    atol: float = 1e-6,
    y0: np.ndarray | None = None,
    t0: float = 0.0,
    t_samples: np.ndarray | None = None,
) -> np.ndarray:
    """Integrate dy/dt = drift(t, y) and sample densely at fixed instants.

    Accepts a step when the RMS of err/(atol + rtol*|y|) is at most one,
    using the larger of |y| before and after the step. Values between
    accepted steps come from the 4th-order interpolant. Returns an array of
    shape (n_samples, dimension) with samples at t0 + k*sample_dt (or at
    the explicit `t_samples`).
    """
    drift = spec.drift
    y = np.asarray(y0 if y0 is not None else np.ones(spec.dimension), dtype=float)
    if t_samples is None:
        if sample_dt is None or sample_dt <= 0:
            raise ValueError("integrate_rk45: sample_dt must be positive")
        n_samples = int(round((t_end - t0) / sample_dt))
        t_samples = t0 + sample_dt * np.arange(n_samples)
    else:
        t_samples = np.asarray(t_samples, dtype=float)
    out = np.empty((len(t_samples), y.size))

    next_sample = 0
    while next_sample < len(t_samples) and t_samples[next_sample] <= t0:
        out[next_sample] = y
        next_sample += 1

    t = t0
    t_last = float(t_samples[-1]) if len(t_samples) else t0
    f = drift(t, y)
    h = min(_initial_step(drift, t, y, f, rtol, atol), spec.max_step)
    k = np.empty((7, y.size))
    powers = np.arange(1, 5)

    while next_sample < len(t_samples):
        h = min(h, spec.max_step, t_last - t)
        if h < _MIN_STEP:
            raise IntegrationError(f"step size underflow ({h:.3e}) at t={t:.6f}")
        k[0] = f
        for i in range(1, 6):
            k[i] = drift(t + _C[i] * h, y + h * (k[:i].T @ _A[i]))
        y_new = y + h * (k[:6].T @ _B)
        k[6] = drift(t + h, y_new)
        err = h * (k.T @ _E)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        norm = _error_norm(err, scale)
        if norm <= 1.0:
            # dense output for all sample instants inside (t, t+h]; the
            # tolerance absorbs roundoff when h was capped to land on the
            # final sample instant
            t_new = t + h
            emit_until = t_new + 1e-12 * max(1.0, abs(t_new))
            while next_sample < len(t_samples) and t_samples[next_sample] <= emit_until:
                theta = (t_samples[next_sample] - t) / h
                out[next_sample] = y + h * (k.T @ (_P @ theta**powers))
                next_sample += 1
            t = t_new
            y = y_new
            f = k[6].copy()  # k is reused; a view would be clobbered by a rejected step
            factor = _MAX_FACTOR if norm == 0.0 else min(_MAX_FACTOR, _SAFETY * norm**-0.2)
            h *= factor
        else:
            h *= max(_MIN_FACTOR, _SAFETY * norm**-0.2)
    return out


def integrate_euler_maruyama(
    spec: SdeSpec,
    dt: float,
    t_end: float,
    rng: np.random.Generator,
    y0: np.ndarray | None = None,
) -> np.ndarray:
    """Euler-Maruyama path: y_{k+1} = y_k + drift(y_k) dt + sigma sqrt(dt) xi_k.

    The per-channel diffusion vector gates where noise enters; channels
    with zero diffusion evolve by plain forward Euler. Deterministic for a
    given (spec, dt, t_end, generator state). Returns (n_steps+1, dim)
    including the initial state.
    """
    if dt <= 0:
        raise ValueError(f"euler_maruyama: dt must be positive, got {dt}")
    y = np.asarray(y0 if y0 is not None else np.zeros(spec.dimension), dtype=float)
    n_steps = int(round(t_end / dt))
    diffusion = np.asarray(spec.diffusion, dtype=float)
    noisy = diffusion != 0.0
    sqdt = np.sqrt(dt)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    # draw only the channels that are actually stochastic
    noise = rng.standard_normal((n_steps, int(noisy.sum()))) if noisy.any() else None
    drift = spec.drift
    for i in range(n_steps):
        y = y + drift(y) * dt
        if noise is not None:
            y[noisy] += diffusion[noisy] * sqdt * noise[i]
        out[i + 1] = y
    return out
