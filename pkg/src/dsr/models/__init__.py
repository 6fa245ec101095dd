"""Model variants and their building blocks."""

from __future__ import annotations

import numpy as np

from .arlstm import ArLstmModel
from .checkpoint import load_checkpoint, save_checkpoint
from .conv import ConvStack
from .dkf import DkfModel
from .dpdsr import DpdsrModel
from .encoders import AutoregressiveGaussianHead, NoiseEncoder, PosteriorSample, tile_batch
from .generative import (
    GenerativeCore,
    complete_state,
    evolve_map,
    evolve_step,
    observe,
    rollout_teacher_forced,
)
from .params import ModelConfig, ParamSet


def build_model(cfg: ModelConfig, rng: np.random.Generator | int):
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if cfg.variant in ("dpdsr", "spdsr"):
        return DpdsrModel(cfg, rng)
    if cfg.variant == "dkf":
        return DkfModel(cfg, rng)
    if cfg.variant == "arlstm":
        return ArLstmModel(cfg, rng)
    raise ValueError(f"unknown variant {cfg.variant!r}")


def load_model(path):
    """Rebuild a model from a checkpoint base path."""
    cfg, arrays, manifest = load_checkpoint(path)
    model = build_model(cfg, np.random.default_rng(0))
    model.params.load_arrays(arrays)
    return model, manifest


__all__ = [
    "ArLstmModel",
    "AutoregressiveGaussianHead",
    "ConvStack",
    "DkfModel",
    "DpdsrModel",
    "GenerativeCore",
    "ModelConfig",
    "NoiseEncoder",
    "ParamSet",
    "PosteriorSample",
    "build_model",
    "complete_state",
    "evolve_map",
    "evolve_step",
    "load_checkpoint",
    "load_model",
    "observe",
    "rollout_teacher_forced",
    "save_checkpoint",
    "tile_batch",
]
