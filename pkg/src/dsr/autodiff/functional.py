"""Gaussian likelihood building blocks used by all loss functions."""

from __future__ import annotations

import math

import numpy as np

from . import ops
from .engine import Tensor


def gaussian_nll(x, mu, var) -> Tensor:
    """Negative log density of x under N(mu, var), summed over components.

    `var` may be a positive float (fixed observation noise) or a Tensor of
    positive entries broadcastable against x.
    """
    diff = ops.sub(x, mu)
    quad = ops.square(diff)
    if isinstance(var, Tensor):
        if not np.all(var.data > 0.0):
            raise ValueError("gaussian_nll: variance must be positive")
        shape = np.broadcast_shapes(quad.shape, var.shape)
        n = int(np.prod(shape)) if shape else 1
        logterm = ops.mul(ops.reduce_sum(ops.broadcast_to(ops.log(var), shape)), 0.5)
        const = 0.5 * ops.LOG_2PI * n
        quadterm = ops.mul(ops.reduce_sum(ops.div(quad, var)), 0.5)
        return ops.add(ops.add(logterm, quadterm), const)
    var = float(var)
    if var <= 0.0:
        raise ValueError(f"gaussian_nll: variance must be positive, got {var}")
    n = quad.size
    const = 0.5 * n * math.log(2.0 * math.pi * var)
    return ops.add(ops.mul(ops.reduce_sum(quad), 0.5 / var), const)


def gaussian_log_density(x, mu, logvar) -> Tensor:
    """Elementwise log N(x | mu, exp(logvar)); no reduction."""
    diff = ops.sub(x, mu)
    quad = ops.mul(ops.square(diff), ops.exp(ops.neg(logvar)))
    inner = ops.add(ops.add(logvar, quad), ops.LOG_2PI)
    return ops.mul(inner, -0.5)


def std_normal_log_density(x) -> Tensor:
    """Elementwise log N(x | 0, 1); no reduction."""
    return ops.mul(ops.add(ops.square(x), ops.LOG_2PI), -0.5)


def kl_diag_gaussian(mu, var) -> Tensor:
    """KL( N(mu, diag var) || N(0, I) ), summed over components."""
    mu = ops.as_tensor(mu)
    var = ops.as_tensor(var)
    if not np.all(var.data > 0.0):
        raise ValueError("kl_diag_gaussian: variance must be positive")
    terms = ops.sub(ops.sub(ops.add(var, ops.square(mu)), 1.0), ops.log(var))
    return ops.mul(ops.reduce_sum(terms), 0.5)
