"""Predictability-time diagnostic over the teacher forcing interval.

For each trained interval tau, the maximal Lyapunov exponent is estimated
along the teacher-forced estimated trajectory (forcing applied identically
to the reference and perturbed runs). Positive exponents map to the
predictability time log(2)/lambda; non-positive exponents clamp to the
maximal trajectory length 200. Attracting fixed points of the relaxed
iteration tau_{i+1} = (1-alpha) tau_i + alpha tau_opt(tau_i) are the
diagonal crossings of the linear interpolant with slope below one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TAU_OPT_MAX = 200.0


@dataclass
class TauOptCurve:
    taus: list[float]
    lambda_max: list[float]
    tau_opt: list[float]
    fixed_points: list[dict]  # {"tau": crossing, "slope": interpolated slope}

    def asdict(self) -> dict:
        return {
            "taus": self.taus,
            "lambda_max": self.lambda_max,
            "tau_opt": self.tau_opt,
            "fixed_points": self.fixed_points,
        }

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.asdict(), indent=2, sort_keys=True) + "\n")
        return path


def tau_opt_value(lambda_max: float, clamp: float = TAU_OPT_MAX) -> float:
    """log 2 / lambda for positive exponents, else the clamp value."""
    if lambda_max > 0:
        return math.log(2.0) / lambda_max
    return clamp


def forced_lyapunov(
    model,
    zhat: np.ndarray,
    tau: int,
    delta0: float = 1e-8,
    seed: int = 0,
) -> float:
    """Maximal Lyapunov exponent along a teacher-forced trajectory.

    Both the reference and the perturbed run receive the same estimated
    states every tau steps (noise off); the perturbation therefore
    survives forcing only through the freely evolving components.
    """
    zhat = np.atleast_2d(np.asarray(zhat, dtype=float))
    T = len(zhat)
    d_zhat = model.cfg.d_zhat
    rng = np.random.default_rng(seed)
    z = model.complete_state_np(zhat[0:1])
    direction = rng.standard_normal(z.shape)
    direction /= np.linalg.norm(direction)
    y = z + delta0 * direction
    total = 0.0
    count = 0
    for t in range(T - 1):
        if t % tau == 0:
            z = np.concatenate([zhat[t : t + 1], z[:, d_zhat:]], axis=1)
            y = np.concatenate([zhat[t : t + 1], y[:, d_zhat:]], axis=1)
        z = model.deterministic_step(z)
        y = model.deterministic_step(y)
        delta = y - z
        dist = float(np.linalg.norm(delta))
        if dist == 0.0:
            y = z + delta0 * direction
            total += math.log(np.finfo(float).tiny)
        else:
            total += math.log(dist / delta0)
            y = z + (delta0 / dist) * delta
        count += 1
    return total / max(count, 1)


def diagonal_fixed_points(taus, tau_opts) -> list[dict]:
    """Diagonal crossings of the piecewise-linear tau_opt(tau) with
    interpolated slope strictly below one (ties excluded)."""
    taus = np.asarray(taus, dtype=float)
    tau_opts = np.asarray(tau_opts, dtype=float)
    if len(taus) < 2:
        raise ValueError("diagonal_fixed_points: need at least two grid points")
    order = np.argsort(taus)
    taus, tau_opts = taus[order], tau_opts[order]
    n = len(taus)
    h = tau_opts - taus
    slopes = np.diff(tau_opts) / np.diff(taus)
    found: list[dict] = []
    # crossings exactly at grid nodes: attracting when every adjacent
    # segment has slope below one
    for j in range(n):
        if h[j] == 0.0:
            adjacent = slopes[max(0, j - 1) : j + 1]
            if adjacent.size and adjacent.max() < 1.0:
                found.append({"tau": float(taus[j]), "slope": float(adjacent.max())})
    # crossings strictly inside a segment
    for i in range(n - 1):
        if (h[i] < 0) != (h[i + 1] < 0) and h[i] != 0.0 and h[i + 1] != 0.0:
            crossing = taus[i] - h[i] * (taus[i + 1] - taus[i]) / (h[i + 1] - h[i])
            if slopes[i] < 1.0:
                found.append({"tau": float(crossing), "slope": float(slopes[i])})
    found.sort(key=lambda fp: fp["tau"])
    return found


def tau_opt_curve(taus, lambda_maxes) -> TauOptCurve:
    taus = [float(t) for t in taus]
    lams = [float(l) for l in lambda_maxes]
    tau_opts = [tau_opt_value(l) for l in lams]
    return TauOptCurve(
        taus=taus,
        lambda_max=lams,
        tau_opt=tau_opts,
        fixed_points=diagonal_fixed_points(taus, tau_opts),
    )
