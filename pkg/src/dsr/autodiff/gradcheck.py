"""Finite-difference verification of backward rules."""

from __future__ import annotations

import numpy as np

from .engine import Tape, Tensor


def numeric_gradient(f, tensor: Tensor, h: float = 1e-5, coords=None) -> np.ndarray:
    """Central finite differences of the scalar f() w.r.t. tensor.data.

    f must rebuild its graph on every call and read the current tensor
    values. `coords` optionally restricts the check to a subset of flat
    indices (others are returned as nan).
    """
    flat = tensor.data.reshape(-1)
    grad = np.full(flat.shape, np.nan)
    indices = range(flat.size) if coords is None else coords
    for i in indices:
        orig = flat[i]
        flat[i] = orig + h
        fp = float(f().data)
        flat[i] = orig - h
        fm = float(f().data)
        flat[i] = orig
        grad[i] = (fp - fm) / (2.0 * h)
    return grad.reshape(tensor.data.shape)


def check_gradients(
    f,
    tensors: list[Tensor],
    h: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-8,
    max_coords_per_tensor: int | None = None,
    rng: np.random.Generator | None = None,
):
    """Compare tape gradients of scalar f() against finite differences.

    Returns (max_relative_error, failures) where the relative error of a
    coordinate is |ad - fd| / max(|ad|, |fd|, atol/rtol), so that the check
    |ad - fd| <= atol + rtol*max(|ad|,|fd|) corresponds to error <= rtol.
    """
    with Tape() as tape:
        loss = f()
    tape.backward(loss, params=tensors)
    analytic = [t.grad.copy() for t in tensors]

    max_err = 0.0
    failures = []
    for t, ad in zip(tensors, analytic):
        coords = None
        if max_coords_per_tensor is not None and t.size > max_coords_per_tensor:
            gen = rng if rng is not None else np.random.default_rng(0)
            coords = gen.choice(t.size, size=max_coords_per_tensor, replace=False)
        fd = numeric_gradient(f, t, h=h, coords=coords)
        sel = ~np.isnan(fd)
        a, b = ad[sel], fd[sel]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), atol / rtol)
        err = np.abs(a - b) / denom
        if err.size:
            worst = float(err.max())
            max_err = max(max_err, worst)
            if worst > rtol:
                failures.append((t, worst))
    return max_err, failures
