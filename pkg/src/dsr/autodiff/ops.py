"""Differentiable operations.

Every operator computes its forward value with numpy and, when a tape is
active and an input requires gradients, registers a backward rule. The set
is intentionally small: exactly what the model architectures and losses in
this package need.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import IndexGrad, ShapeError, Tensor, active_tape, as_tensor

LOG_2PI = math.log(2.0 * math.pi)


def _emit(op: str, inputs: tuple, out_data: np.ndarray, backward) -> Tensor:
    out = Tensor(out_data)
    tape = active_tape()
    if tape is not None and any(
        isinstance(t, Tensor) and t.requires_grad for t in inputs
    ):
        out.requires_grad = True
        tape.record(op, inputs, out, backward)
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to the shape of the broadcast operand."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _binary(op: str, a, b, fwd, bwd):
    a, b = as_tensor(a), as_tensor(b)
    try:
        out = fwd(a.data, b.data)
    except ValueError as exc:
        raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}") from exc
    return _emit(op, (a, b), out, lambda g: bwd(g, a, b))


def add(a, b) -> Tensor:
    return _binary(
        "add", a, b, np.add,
        lambda g, a, b: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a, b) -> Tensor:
    return _binary(
        "sub", a, b, np.subtract,
        lambda g, a, b: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a, b) -> Tensor:
    return _binary(
        "mul", a, b, np.multiply,
        lambda g, a, b: (
            _unbroadcast(g * b.data, a.shape),
            _unbroadcast(g * a.data, b.shape),
        ),
    )


def div(a, b) -> Tensor:
    return _binary(
        "div", a, b, np.divide,
        lambda g, a, b: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape),
        ),
    )


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _emit("neg", (a,), -a.data, lambda g: (-g,))


def matmul(a, b) -> Tensor:
    """Matrix product; the left operand may carry leading batch axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    out = a.data @ b.data

    def backward(g):
        ga = g @ b.data.T
        gb = a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1])
        return ga, gb

    return _emit("matmul", (a, b), out, backward)


def relu(a) -> Tensor:
    a = as_tensor(a)
    out = np.maximum(a.data, 0.0)
    return _emit("relu", (a,), out, lambda g: (g * (a.data > 0.0),))


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)
    return _emit("tanh", (a,), out, lambda g: (g * (1.0 - out * out),))


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out = _sigmoid_np(a.data)
    return _emit("sigmoid", (a,), out, lambda g: (g * out * (1.0 - out),))


def _sigmoid_np(x: np.ndarray) -> np.ndarray:
    # overflow-free and branch-free via the tanh half-angle identity
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return _emit("exp", (a,), out, lambda g: (g * out,))


def log(a) -> Tensor:
    a = as_tensor(a)
    return _emit("log", (a,), np.log(a.data), lambda g: (g / a.data,))


def square(a) -> Tensor:
    a = as_tensor(a)
    return _emit("square", (a,), a.data * a.data, lambda g: (2.0 * g * a.data,))


def absolute(a) -> Tensor:
    a = as_tensor(a)
    return _emit("abs", (a,), np.abs(a.data), lambda g: (g * np.sign(a.data),))


def clamp(a, lo: float, hi: float) -> Tensor:
    """Clip values to [lo, hi]; gradient passes only through the interior."""
    a = as_tensor(a)
    out = np.clip(a.data, lo, hi)
    mask = (a.data > lo) & (a.data < hi)
    return _emit("clamp", (a,), out, lambda g: (g * mask,))


def reduce_sum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _emit("sum", (a,), out, backward)


def reduce_mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.mean(axis=axis, keepdims=keepdims)
    if axis is None:
        count = a.data.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = 1
        for ax in axes:
            count *= a.shape[ax]

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g / count, a.shape).copy(),)
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return _emit("mean", (a,), out, backward)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = tuple(as_tensor(t) for t in tensors)
    if not tensors:
        raise ShapeError("concat: empty input list")
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeError(
            f"concat: incompatible shapes {[t.shape for t in tensors]}"
        ) from exc
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return _emit("concat", tensors, out, backward)


def getitem(a, idx) -> Tensor:
    """Basic slicing/integer indexing; backward scatters into the source."""
    a = as_tensor(a)
    out = a.data[idx]
    return _emit("slice", (a,), out, lambda g: (IndexGrad(idx, g),))


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    out = a.data.reshape(shape)
    return _emit("reshape", (a,), out, lambda g: (g.reshape(a.shape),))


def broadcast_to(a, shape) -> Tensor:
    a = as_tensor(a)
    try:
        out = np.broadcast_to(a.data, shape)
    except ValueError as exc:
        raise ShapeError(f"broadcast: cannot broadcast {a.shape} to {shape}") from exc
    return _emit("broadcast", (a,), out, lambda g: (_unbroadcast(g, a.shape),))


def conv1d_dilated(x, kernel, dilation: int = 1, padding_mode: str = "causal") -> Tensor:
    """Length-preserving dilated 1-D convolution over (..., T, C_in).

    Causal padding puts all (k-1)*dilation zeros on the left, so output t
    depends on inputs <= t only. Symmetric padding splits the total as
    evenly as possible with the extra element on the left.
    """
    x, kernel = as_tensor(x), as_tensor(kernel)
    if dilation < 1:
        raise ShapeError(f"conv1d: dilation must be >= 1, got {dilation}")
    if padding_mode not in ("causal", "symmetric"):
        raise ShapeError(f"conv1d: unknown padding mode {padding_mode!r}")
    squeeze = x.ndim == 2
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 3 or kernel.ndim != 3 or xd.shape[2] != kernel.shape[1]:
        raise ShapeError(f"conv1d: incompatible shapes {x.shape} and {kernel.shape}")
    batch, length, c_in = xd.shape
    k, _, c_out = kernel.shape
    if length == 0:
        raise ShapeError("conv1d: empty input sequence")
    total = (k - 1) * dilation
    left = total if padding_mode == "causal" else total - total // 2
    xp = np.zeros((batch, length + total, c_in))
    xp[:, left : left + length] = xd

    def gather_cols() -> np.ndarray:
        # im2col by per-tap slice copies (faster than one fancy-index
        # gather); rebuilt in backward so only the padded input stays alive
        cols = np.empty((batch, length, k, c_in))
        for j in range(k):
            cols[:, :, j, :] = xp[:, j * dilation : j * dilation + length]
        return cols.reshape(batch * length, k * c_in)

    kmat = kernel.data.reshape(k * c_in, c_out)
    out = (gather_cols() @ kmat).reshape(batch, length, c_out)
    if squeeze:
        out = out[0]

    def backward(g):
        gd = g[None] if squeeze else g
        gflat = gd.reshape(batch * length, c_out)
        gk = (gather_cols().T @ gflat).reshape(k, c_in, c_out)
        gcols = (gflat @ kmat.T).reshape(batch, length, k, c_in)
        gxp = np.zeros_like(xp)
        for j in range(k):
            gxp[:, j * dilation : j * dilation + length] += gcols[:, :, j]
        gx = gxp[:, left : left + length]
        return (gx[0] if squeeze else gx, gk)

    return _emit("conv1d", (x, kernel), out, backward)


def lstm_cell(x, h, c, w_ih, w_hh, b) -> tuple[Tensor, Tensor]:
    """One step of a standard LSTM cell.

    Gate order in the fused weight matrices is (input, forget, output,
    candidate), so that the three sigmoid gates occupy one contiguous
    block. Shapes: x (B, d_in), h and c (B, H), w_ih (d_in, 4H),
    w_hh (H, 4H), b (4H,). Returns (h', c').
    """
    x, h, c = as_tensor(x), as_tensor(h), as_tensor(c)
    w_ih, w_hh, b = as_tensor(w_ih), as_tensor(w_hh), as_tensor(b)
    hidden = h.shape[-1]
    if (
        x.ndim != 2
        or h.shape != c.shape
        or w_ih.shape != (x.shape[-1], 4 * hidden)
        or w_hh.shape != (hidden, 4 * hidden)
        or b.shape != (4 * hidden,)
    ):
        raise ShapeError(
            "lstm_cell: incompatible shapes "
            f"x={x.shape} h={h.shape} c={c.shape} "
            f"w_ih={w_ih.shape} w_hh={w_hh.shape} b={b.shape}"
        )
    pre = x.data @ w_ih.data + h.data @ w_hh.data + b.data
    gates = _sigmoid_np(pre[:, : 3 * hidden])
    i = gates[:, :hidden]
    f = gates[:, hidden : 2 * hidden]
    o = gates[:, 2 * hidden :]
    g_ = np.tanh(pre[:, 3 * hidden :])
    c_new = f * c.data + i * g_
    tc = np.tanh(c_new)
    h_new = o * tc
    out = np.concatenate([h_new, c_new], axis=1)

    def backward(gout):
        gh = gout[:, :hidden]
        gc_direct = gout[:, hidden:]
        gc_new = gc_direct + gh * o * (1.0 - tc * tc)
        gpre = np.empty_like(pre)
        gpre[:, :hidden] = gc_new * g_ * i * (1.0 - i)
        gpre[:, hidden : 2 * hidden] = gc_new * c.data * f * (1.0 - f)
        gpre[:, 2 * hidden : 3 * hidden] = gh * tc * o * (1.0 - o)
        gpre[:, 3 * hidden :] = gc_new * i * (1.0 - g_ * g_)
        gx = gpre @ w_ih.data.T
        gh_prev = gpre @ w_hh.data.T
        gw_ih = x.data.T @ gpre
        gw_hh = h.data.T @ gpre
        gb = gpre.sum(axis=0)
        gc = gc_new * f
        return gx, gh_prev, gc, gw_ih, gw_hh, gb

    hc = _emit("lstm_cell", (x, h, c, w_ih, w_hh, b), out, backward)
    return getitem(hc, (slice(None), slice(0, hidden))), getitem(
        hc, (slice(None), slice(hidden, 2 * hidden))
    )


def reparam_gaussian(head, xi: np.ndarray, clamp_logvar: float) -> tuple[Tensor, Tensor]:
    """Reparameterized draw from the Gaussian encoded as (mu | logvar).

    head: (B, 2d) with means in the first half and log-variances (clamped
    to [-clamp, clamp]) in the second; xi: fixed standard-normal draws
    (B, d). Returns (sample, logq) where sample = mu + exp(logvar/2) * xi
    and logq is the per-lane log-density of the sample under its own
    Gaussian, which reduces to -(log 2 pi + logvar + xi^2)/2 summed over d.
    """
    head = as_tensor(head)
    d = head.shape[-1] // 2
    if xi.shape != (head.shape[0], d):
        raise ShapeError(f"reparam_gaussian: xi shape {xi.shape} vs head {head.shape}")
    mu = head.data[:, :d]
    raw = head.data[:, d:]
    logvar = np.clip(raw, -clamp_logvar, clamp_logvar)
    inside = (raw > -clamp_logvar) & (raw < clamp_logvar)
    sigma_xi = np.exp(0.5 * logvar) * xi
    sample = mu + sigma_xi
    logq = -0.5 * np.sum(LOG_2PI + logvar + xi * xi, axis=1, keepdims=True)
    out = np.concatenate([sample, logq], axis=1)

    def backward(g):
        gs = g[:, :d]
        gq = g[:, d : d + 1]
        ghead = np.empty_like(head.data)
        ghead[:, :d] = gs
        ghead[:, d:] = (0.5 * gs * sigma_xi - 0.5 * gq) * inside
        return (ghead,)

    both = _emit("reparam_gaussian", (head,), out, backward)
    return getitem(both, (slice(None), slice(0, d))), getitem(
        both, (slice(None), slice(d, d + 1))
    )


def stack_steps(tensors, axis: int = 1) -> Tensor:
    """Stack per-step (B, d) tensors into a (B, T, d) sequence."""
    expanded = [reshape(t, t.shape[:axis] + (1,) + t.shape[axis:]) for t in tensors]
    return concat(expanded, axis=axis)


def _install_operators():
    def _radd(self, other):
        return add(other, self)

    def _rsub(self, other):
        return sub(other, self)

    def _rmul(self, other):
        return mul(other, self)

    def _rdiv(self, other):
        return div(other, self)

    Tensor.__add__ = lambda self, other: add(self, other)
    Tensor.__radd__ = _radd
    Tensor.__sub__ = lambda self, other: sub(self, other)
    Tensor.__rsub__ = _rsub
    Tensor.__mul__ = lambda self, other: mul(self, other)
    Tensor.__rmul__ = _rmul
    Tensor.__truediv__ = lambda self, other: div(self, other)
    Tensor.__rtruediv__ = _rdiv
    Tensor.__neg__ = lambda self: neg(self)
    Tensor.__matmul__ = lambda self, other: matmul(self, other)
    Tensor.__getitem__ = lambda self, idx: getitem(self, idx)


_install_operators()
