"""Dense tensors and the reverse-mode autodiff tape.

Tensors wrap a numpy float buffer (float32 for training, float64 for
gradient checks) plus an optional gradient buffer. Operations defined in
:mod:`pointer_gpt.ops` record themselves on the currently active
:class:`Tape`; :func:`backward` replays the tape in reverse.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "Tape",
    "backward",
    "active_tape",
    "set_finite_checks",
    "ContractError",
    "ShapeError",
]


class ContractError(ValueError):
    """An operation was called outside its contract."""


class ShapeError(ContractError):
    """Operand shapes are incompatible."""


_FINITE_CHECKS = False


def set_finite_checks(enabled):
    """Globally toggle per-op NaN/Inf checks (slow; used in tests)."""
    global _FINITE_CHECKS
    _FINITE_CHECKS = bool(enabled)


class Tensor:
    """Shape + float buffer + optional grad buffer."""

    __slots__ = ("data", "grad", "requires_grad")

    def __init__(self, data, requires_grad=False, dtype=None):
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype)
        elif arr.dtype not in (np.float32, np.float64, np.longdouble):
            arr = arr.astype(np.float32)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def zero_grad(self):
        self.grad = None

    def accumulate_grad(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def __repr__(self):
        return "Tensor(shape=%s, requires_grad=%s)" % (
            tuple(self.shape),
            self.requires_grad,
        )


_TAPE_STACK = []


def active_tape():
    return _TAPE_STACK[-1] if _TAPE_STACK else None


class Tape:
    """Ordered record of primitive ops; execution order is topological."""

    def __init__(self):
        self._records = []  # (output, inputs, backward_fn)

    def record(self, out, inputs, backward_fn):
        self._records.append((out, inputs, backward_fn))

    def __len__(self):
        return len(self._records)

    def __enter__(self):
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _TAPE_STACK.pop()
        assert popped is self
        return False


def _check_finite(arr):
    if _FINITE_CHECKS and not np.isfinite(arr).all():
        raise FloatingPointError("non-finite values produced by tensor op")


def make_output(out_data, inputs, backward_fn):
    """Wrap an op result, recording it on the active tape when grads flow."""
    _check_finite(out_data)
    requires = any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=requires)
    tape = active_tape()
    if tape is not None and requires:
        tape.record(out, inputs, backward_fn)
    return out


def backward(tape, loss):
    """Populate grads of every requires_grad tensor reachable from loss.

    Grads accumulate into ``.grad``; callers reset between steps. The
    traversal itself uses a scratch table, so replaying the same tape after
    a grad reset reproduces identical results.
    """
    if loss.data.size != 1:
        raise ContractError("backward expects a scalar loss, got shape %s"
                            % (tuple(loss.shape),))
    scratch = {id(loss): np.ones_like(loss.data)}
    tensors = {id(loss): loss}
    for out, inputs, backward_fn in reversed(tape._records):
        out_grad = scratch.get(id(out))
        if out_grad is None:
            continue
        input_grads = backward_fn(out_grad)
        for inp, g in zip(inputs, input_grads):
            if g is None or not inp.requires_grad:
                continue
            key = id(inp)
            if key in scratch:
                scratch[key] = scratch[key] + g
            else:
                scratch[key] = g
                tensors[key] = inp
    for key, t in tensors.items():
        if t.requires_grad:
            t.accumulate_grad(scratch[key])
