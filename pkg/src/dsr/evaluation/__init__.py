"""Reconstruction-quality evaluation."""

from .evaluate import (
    EvalConfig,
    EvaluationReport,
    evaluate_model,
    generate_long,
    kl_usage,
    prediction_error,
)
from .metrics import (
    SCORE_WEIGHTS,
    detect_peaks,
    interspike_intervals,
    isi_distance,
    score,
    score_weights,
    spectral_distance,
    wasserstein_1d,
)

__all__ = [
    "SCORE_WEIGHTS",
    "EvalConfig",
    "EvaluationReport",
    "detect_peaks",
    "evaluate_model",
    "generate_long",
    "interspike_intervals",
    "isi_distance",
    "kl_usage",
    "prediction_error",
    "score",
    "score_weights",
    "spectral_distance",
    "wasserstein_1d",
]
