"""Attractor detection, classification, and maximal Lyapunov exponents.

All analysis runs on the deterministic skeleton of a model: a step map
acting on batches of states with any noise switched off. Attractors are
found by evolving a set of initial conditions, discarding the warmup, and
merging trajectories whose two-way 0.8-quantile nearest-point distances
fall below a class-dependent tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

FIXED_POINT_TOL = 1e-5
CYCLE_TOL = 1e-1
QUANTILE = 0.8


@dataclass
class Attractor:
    trajectory: np.ndarray  # (T, d) representative post-warmup trajectory
    lambda_max: float
    kind: str  # chaotic | limit_cycle | fixed_point
    basin_count: int = 0
    basin_fraction: float = 0.0

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "lambda_max": self.lambda_max,
            "basin_fraction": self.basin_fraction,
            "point": list(map(float, self.trajectory[-1])),
            "extent": float(np.linalg.norm(self.trajectory.max(0) - self.trajectory.min(0))),
        }


@dataclass
class AttractorReport:
    attractors: list[Attractor]
    n_init: int

    def asdict(self) -> dict:
        return {"n_init": self.n_init, "attractors": [a.summary() for a in self.attractors]}

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.asdict(), indent=2, sort_keys=True) + "\n")
        return path


def trajectory_spread(traj: np.ndarray) -> float:
    """Largest per-dimension range; near zero for a collapsed trajectory."""
    return float((traj.max(axis=0) - traj.min(axis=0)).max())


def classify(trajectory: np.ndarray, lambda_max: float, tol: float = FIXED_POINT_TOL) -> str:
    """chaotic when lambda_max > 0; fixed point when the trajectory has
    collapsed to a single point within tol; limit cycle otherwise."""
    if lambda_max > 0:
        return "chaotic"
    if trajectory_spread(trajectory) < tol:
        return "fixed_point"
    return "limit_cycle"


def max_lyapunov(
    step_fn,
    x0: np.ndarray,
    steps: int = 1000,
    delta0: float = 1e-8,
    rng: np.random.Generator | None = None,
) -> float:
    """Maximal Lyapunov exponent of a step map by perturbation rescaling.

    Evolves a reference and a perturbed trajectory together; each step
    records log(|delta| / delta0) and rescales the deviation back to
    delta0. Returns the mean of the per-step records, in nats per step.
    """
    rng = rng or np.random.default_rng(0)
    x = np.atleast_2d(np.asarray(x0, dtype=float))
    direction = rng.standard_normal(x.shape)
    direction /= np.linalg.norm(direction)
    y = x + delta0 * direction
    total = 0.0
    for _ in range(steps):
        x = np.atleast_2d(step_fn(x))
        y = np.atleast_2d(step_fn(y))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise FloatingPointError("max_lyapunov: trajectory escaped to non-finite values")
        delta = y - x
        dist = float(np.linalg.norm(delta))
        if dist == 0.0:
            # perturbation annihilated (exactly periodic fp in floats); the
            # growth factor is 0, re-seed the direction to continue
            total += math.log(np.finfo(float).tiny)
            y = x + delta0 * direction
            continue
        total += math.log(dist / delta0)
        y = x + (delta0 / dist) * delta
    return total / steps


def _directed_distance(a: np.ndarray, b: np.ndarray) -> float:
    """0.8-quantile over points of `a` of the nearest-neighbor distance to `b`."""
    d, _ = cKDTree(b).query(a, k=1)
    return float(np.quantile(d, QUANTILE))


def attractor_distance(a: np.ndarray, b: np.ndarray) -> float:
    return max(_directed_distance(a, b), _directed_distance(b, a))


def find_attractors(
    step_fn,
    init_points: np.ndarray,
    warmup: int = 1000,
    T: int = 20000,
    lyap_steps: int = 1000,
    seed: int = 0,
) -> AttractorReport:
    """Detect the attractors reached from a set of initial conditions.

    All initial points evolve in one batch for warmup + T steps with the
    deterministic map; each post-warmup trajectory is either merged into a
    previously identified attractor (distance below the tolerance for that
    attractor's class) or registered as a new one. Basin fractions count
    assigned trajectories and sum to one.
    """
    init_points = np.atleast_2d(np.asarray(init_points, dtype=float))
    n, d = init_points.shape
    states = init_points.copy()
    kept = np.empty((T, n, d))
    for t in range(warmup + T):
        states = np.atleast_2d(step_fn(states))
        if t >= warmup:
            kept[t - warmup] = states
    rng = np.random.default_rng(seed)
    attractors: list[Attractor] = []
    for i in range(n):
        traj = kept[:, i, :]
        collapsed = trajectory_spread(traj) < FIXED_POINT_TOL
        assigned = None
        for att in attractors:
            tol = FIXED_POINT_TOL if att.kind == "fixed_point" else CYCLE_TOL
            if collapsed and att.kind == "fixed_point":
                # both are single points: quantile distances reduce to the
                # plain point distance
                dist = float(np.linalg.norm(traj[-1] - att.trajectory[-1]))
            else:
                dist = attractor_distance(traj, att.trajectory)
            if dist <= tol:
                assigned = att
                break
        if assigned is None:
            lam = max_lyapunov(step_fn, traj[-1], steps=lyap_steps, rng=rng)
            assigned = Attractor(trajectory=traj, lambda_max=lam, kind=classify(traj, lam))
            attractors.append(assigned)
        assigned.basin_count += 1
    for att in attractors:
        att.basin_fraction = att.basin_count / n
    return AttractorReport(attractors=attractors, n_init=n)


def model_attractors(
    model,
    train_ds,
    n_init: int = 100,
    warmup: int = 1000,
    T: int = 20000,
    lyap_steps: int = 1000,
    seed: int = 0,
) -> AttractorReport:
    """Attractor report for a trained model, with initial conditions drawn
    from the encoder-embedded training trajectory and noise set to zero."""
    rng = np.random.default_rng(seed)
    x = train_ds.observations
    window = min(len(x), 2048)
    start = int(rng.integers(0, len(x) - window + 1))
    states = model.embedded_states(x[start : start + window])
    picks = rng.integers(0, len(states), size=n_init)
    return find_attractors(
        model.deterministic_step,
        states[picks],
        warmup=warmup,
        T=T,
        lyap_steps=lyap_steps,
        seed=seed,
    )
