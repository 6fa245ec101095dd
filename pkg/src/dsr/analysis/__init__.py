"""Attractor and teacher-forcing-interval analysis."""

from .attractors import (
    Attractor,
    AttractorReport,
    attractor_distance,
    classify,
    find_attractors,
    max_lyapunov,
    model_attractors,
    trajectory_spread,
)
from .tauopt import (
    TAU_OPT_MAX,
    TauOptCurve,
    diagonal_fixed_points,
    forced_lyapunov,
    tau_opt_curve,
    tau_opt_value,
)

__all__ = [
    "TAU_OPT_MAX",
    "Attractor",
    "AttractorReport",
    "TauOptCurve",
    "attractor_distance",
    "classify",
    "diagonal_fixed_points",
    "find_attractors",
    "forced_lyapunov",
    "max_lyapunov",
    "model_attractors",
    "tau_opt_curve",
    "tau_opt_value",
    "trajectory_spread",
]
