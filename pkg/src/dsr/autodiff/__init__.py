"""Minimal reverse-mode automatic differentiation engine."""

from .engine import ShapeError, Tape, Tensor, active_tape
from .functional import (
    gaussian_log_density,
    gaussian_nll,
    kl_diag_gaussian,
    std_normal_log_density,
)
from .ops import (
    LOG_2PI,
    absolute,
    add,
    as_tensor,
    broadcast_to,
    clamp,
    concat,
    conv1d_dilated,
    div,
    exp,
    getitem,
    log,
    lstm_cell,
    matmul,
    mul,
    neg,
    reduce_mean,
    reduce_sum,
    relu,
    reparam_gaussian,
    reshape,
    sigmoid,
    square,
    stack_steps,
    sub,
    tanh,
)
from .optim import AdamState, adam_step, clip_global_norm, global_norm

__all__ = [
    "LOG_2PI",
    "AdamState",
    "ShapeError",
    "Tape",
    "Tensor",
    "absolute",
    "active_tape",
    "adam_step",
    "add",
    "as_tensor",
    "broadcast_to",
    "clamp",
    "clip_global_norm",
    "concat",
    "conv1d_dilated",
    "div",
    "exp",
    "gaussian_log_density",
    "gaussian_nll",
    "getitem",
    "global_norm",
    "kl_diag_gaussian",
    "log",
    "lstm_cell",
    "matmul",
    "mul",
    "neg",
    "reduce_mean",
    "reduce_sum",
    "relu",
    "reparam_gaussian",
    "reshape",
    "sigmoid",
    "square",
    "stack_steps",
    "std_normal_log_density",
    "sub",
    "tanh",
]
