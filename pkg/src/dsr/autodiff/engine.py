"""Reverse-mode differentiation on a define-by-run tape.

Tensors wrap float64 numpy arrays. Operations executed while a Tape is
active append records in execution order, which is a valid topological
order of the graph; Tape.backward walks the records in reverse and
accumulates vector-Jacobian products. Without an active tape the same
operations run as plain numpy computations, which doubles as the fast
evaluation path for generation and analysis.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Tensor", "Tape", "ShapeError", "active_tape"]


class ShapeError(ValueError):
    """Operand shapes incompatible with the requested operation."""


_TAPE_STACK: list["Tape"] = []


def active_tape() -> "Tape | None":
    return _TAPE_STACK[-1] if _TAPE_STACK else None


class Tensor:
    """Dense float64 array participating in the differentiation graph."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # Arithmetic operators are attached by dsr.autodiff.ops to avoid a
    # circular import; see ops._install_operators().


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


class Record:
    __slots__ = ("op", "inputs", "out", "backward")

    def __init__(self, op, inputs, out, backward):
        self.op = op
        self.inputs = inputs
        self.out = out
        self.backward = backward


class IndexGrad:
    """Gradient concentrated on a basic-index region of the input.

    Lets slicing ops avoid materializing a full zero array per record; the
    engine scatters `values` into the accumulator at `index` instead.
    """

    __slots__ = ("index", "values")

    def __init__(self, index, values):
        self.index = index
        self.values = values

    def dense(self, shape) -> np.ndarray:
        out = np.zeros(shape)
        out[self.index] = self.values
        return out


class Tape:
    """Topologically ordered record of operations for one forward pass."""

    def __init__(self):
        self.records: list[Record] = []

    def __enter__(self) -> "Tape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, *exc):
        assert _TAPE_STACK and _TAPE_STACK[-1] is self
        _TAPE_STACK.pop()
        return False

    def record(self, op: str, inputs: tuple, out: Tensor, backward) -> None:
        self.records.append(Record(op, inputs, out, backward))

    def backward(self, loss: Tensor, params=None) -> "dict[int, np.ndarray]":
        """Accumulate d(loss)/d(tensor) for every tensor reachable from loss.

        Writes .grad on leaf tensors with requires_grad set. When `params`
        is given, every listed tensor gets a .grad buffer, zero-filled if
        the loss does not reach it. Rejects non-scalar roots.
        """
        if loss.data.size != 1:
            raise ShapeError(
                f"backward: root must be scalar, got shape {loss.data.shape}"
            )
        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        # ids whose accumulator buffer the engine allocated and may mutate;
        # anything else may alias a backward function's output and is
        # copied before the first in-place update
        owned: set[int] = {id(loss)}
        produced = {id(r.out) for r in self.records}
        leaves: dict[int, Tensor] = {}

        def accumulate(t: Tensor, gi):
            key = id(t)
            acc = grads.get(key)
            if isinstance(gi, IndexGrad):
                if acc is None:
                    acc = np.zeros_like(t.data)
                    grads[key] = acc
                    owned.add(key)
                elif key not in owned:
                    acc = acc.copy()
                    grads[key] = acc
                    owned.add(key)
                acc[gi.index] += gi.values
            else:
                if gi.shape != t.data.shape:
                    raise ShapeError(
                        f"backward produced gradient of shape {gi.shape} "
                        f"for input of shape {t.data.shape}"
                    )
                if acc is None:
                    grads[key] = gi
                elif key in owned:
                    np.add(acc, gi, out=acc)
                else:
                    grads[key] = acc + gi
                    owned.add(key)

        for rec in reversed(self.records):
            g = grads.pop(id(rec.out), None)
            if g is None:
                continue
            in_grads = rec.backward(g)
            for t, gi in zip(rec.inputs, in_grads):
                if gi is None or not isinstance(t, Tensor) or not t.requires_grad:
                    continue
                accumulate(t, gi)
                if id(t) not in produced:
                    leaves[id(t)] = t
        for t in leaves.values():
            t.grad = grads.get(id(t))
        if params is not None:
            for p in params:
                g = grads.get(id(p))
                p.grad = g if g is not None else np.zeros_like(p.data)
        return grads
