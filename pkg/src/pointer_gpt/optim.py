"""Adam optimizer and global gradient-norm clipping."""

from __future__ import annotations

import math

import numpy as np

from .tensor import ContractError


class AdamState:
    """Per-parameter first/second moments plus the shared step counter."""

    def __init__(self, params, lr=3e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]


def adam_step(state):
    """One bias-corrected Adam update over all tracked parameters."""
    for i, p in enumerate(state.params):
        if p.grad is None:
            raise ContractError("adam_step: parameter %d has no grad" % i)
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.t
    correction2 = 1.0 - b2 ** state.t
    step = state.lr * math.sqrt(correction2) / correction1
    for p, m, v in zip(state.params, state.m, state.v):
        g = p.grad
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p.data -= (step * m / (np.sqrt(v) + state.eps * math.sqrt(correction2))).astype(p.dtype)


def clip_grad_norm(params, max_norm=1.0):
    """Scale all grads so the global L2 norm is at most max_norm.

    Returns the pre-clip norm. Idempotent: a second application is a no-op.
    """
    params = list(params)
    for i, p in enumerate(params):
        if p.grad is None:
            raise ContractError("clip_grad_norm: parameter %d has no grad" % i)
    total = 0.0
    for p in params:
        total += float(np.sum(p.grad.astype(np.float64) ** 2))
    norm = math.sqrt(total)
    if norm > max_norm:
        factor = max_norm / norm
        for p in params:
            p.grad *= factor
    return norm


def reset_grads(params):
    for p in params:
        p.grad = None


def zero_fill_grads(params):
    """Give parameters untouched by backward (frozen paths) a zero grad."""
    for p in params:
        if p.grad is None:
            p.grad = np.zeros_like(p.data)
