"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np

from .optim import reset_grads
from .tensor import ContractError, Tape, backward


def gradcheck(f, tensors, h=1e-5):
    """Compare analytic grads of scalar-valued f against central differences.

    `tensors` is one Tensor or a sequence of Tensors passed to f positionally.
    Use float64 tensors; float32 finite differences are too noisy for tight
    tolerances. Returns the max relative error
    |a - n| / max(1e-8, |a| + |n|) over all elements of all tensors.
    """
    if not isinstance(tensors, (list, tuple)):
        tensors = [tensors]
    tensors = list(tensors)

    reset_grads(tensors)
    with Tape() as tape:
        loss = f(*tensors)
    if loss.data.size != 1:
        raise ContractError("gradcheck expects a scalar-valued function")
    backward(tape, loss)

    worst = 0.0
    for t in tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            hi = flat[i]
            plus = f(*tensors).data.reshape(())[()]
            flat[i] = orig - h
            lo = flat[i]
            minus = f(*tensors).data.reshape(())[()]
            flat[i] = orig
            # divide by the representable step actually taken, not 2h
            numeric = (plus - minus) / (hi - lo)
            a = analytic.reshape(-1)[i]
            err = float(abs(a - numeric) / max(1e-8, abs(a) + abs(numeric)))
            if err > worst:
                worst = err
    return worst
