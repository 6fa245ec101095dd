"""Loss assembly, optimization loop, and sweep orchestration."""

from .config import DATASET_STATE_DIM, SweepGrid, TrainingConfig
from .loop import TrainResult, train
from .losses import (
    LOSS_FUNCTIONS,
    arlstm_loss,
    causal_encoder_loss,
    dkf_elbo,
    dpdsr_loss,
    kl_autoregressive,
    l1_penalty,
    state_stats_regularizer,
)
from .sweep import SweepError, sweep

__all__ = [
    "DATASET_STATE_DIM",
    "LOSS_FUNCTIONS",
    "SweepError",
    "SweepGrid",
    "TrainResult",
    "TrainingConfig",
    "arlstm_loss",
    "causal_encoder_loss",
    "dkf_elbo",
    "dpdsr_loss",
    "kl_autoregressive",
    "l1_penalty",
    "state_stats_regularizer",
    "sweep",
    "train",
]
