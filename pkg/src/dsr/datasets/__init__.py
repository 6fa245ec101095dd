"""Benchmark dataset generation, preprocessing, and storage."""

from .external import gaussian_smooth, preprocess_external
from .integrate import (
    IntegrationError,
    OdeSpec,
    SdeSpec,
    integrate_euler_maruyama,
    integrate_rk45,
)
from .store import (
    NormalizationError,
    TimeSeriesDataset,
    apply_normalization,
    chunk,
    export_csv,
    load_dataset,
    normalization_stats,
    save_dataset,
)
from .systems import (
    DATASET_NAMES,
    cell_cycle_drift,
    double_well_drift,
    double_well_spec,
    generate_dataset,
    lorenz_drift,
    rnn_connectivity,
)

__all__ = [
    "DATASET_NAMES",
    "IntegrationError",
    "NormalizationError",
    "OdeSpec",
    "SdeSpec",
    "TimeSeriesDataset",
    "apply_normalization",
    "cell_cycle_drift",
    "chunk",
    "double_well_drift",
    "double_well_spec",
    "export_csv",
    "gaussian_smooth",
    "generate_dataset",
    "integrate_euler_maruyama",
    "integrate_rk45",
    "load_dataset",
    "lorenz_drift",
    "normalization_stats",
    "preprocess_external",
    "rnn_connectivity",
    "save_dataset",
]
