"""Differentiable primitives over :class:`~pointer_gpt.tensor.Tensor`.

Every op computes its forward result eagerly in numpy and registers a
backward closure on the active tape. The set is deliberately small: just
what a decoder-only transformer with a pointer head needs.
"""

from __future__ import annotations

import math

import numpy as np

from .tensor import ShapeError, ContractError, Tensor, make_output

GELU_C = math.sqrt(2.0 / math.pi)
GELU_A = 0.044715


def _unbroadcast(g, shape):
    """Reduce a broadcast gradient back to the original operand shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


def add(a, b):
    out = a.data + b.data

    def bwd(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return make_output(out, (a, b), bwd)


def mul(a, b):
    out = a.data * b.data

    def bwd(g):
        return (_unbroadcast(g * b.data, a.data.shape),
                _unbroadcast(g * a.data, b.data.shape))

    return make_output(out, (a, b), bwd)


def affine(x, scale=1.0, shift=0.0):
    """scale * x + shift with python-float coefficients."""
    out = scale * x.data + shift

    def bwd(g):
        return (scale * g,)

    return make_output(out, (x,), bwd)


def add_const(x, const):
    """x + const where const is a plain array (no grad)."""
    out = x.data + np.asarray(const, dtype=x.dtype)

    def bwd(g):
        return (g,)

    return make_output(out, (x,), bwd)


def matmul(a, b):
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError("matmul expects 2-D operands, got %s and %s"
                         % (a.data.shape, b.data.shape))
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError("matmul inner dimensions differ: %s vs %s"
                         % (a.data.shape, b.data.shape))
    out = a.data @ b.data

    def bwd(g):
        return g @ b.data.T, a.data.T @ g

    return make_output(out, (a, b), bwd)


def transpose(x):
    out = x.data.T

    def bwd(g):
        return (g.T,)

    return make_output(out, (x,), bwd)


def gelu(x):
    """Tanh-approximation GELU (GPT-2 convention)."""
    xd = x.data
    inner = GELU_C * (xd + GELU_A * xd ** 3)
    t = np.tanh(inner)
    out = 0.5 * xd * (1.0 + t)

    def bwd(g):
        return (g * _gelu_grad(xd, t),)

    return make_output(out, (x,), bwd)


def _gelu_grad(xd, t):
    # d/dx [0.5 x (1 + tanh(c(x + a x^3)))]
    sech2 = 1.0 - t * t
    return 0.5 * (1.0 + t) + 0.5 * xd * sech2 * GELU_C * (1.0 + 3.0 * GELU_A * xd ** 2)


def sigmoid(x):
    out = 1.0 / (1.0 + np.exp(-x.data))

    def bwd(g):
        return (g * out * (1.0 - out),)

    return make_output(out, (x,), bwd)


def softmax_rows(x):
    """Row-wise softmax with max subtraction; rows sum to 1."""
    xd = x.data
    shifted = xd - xd.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def bwd(g):
        dot = (g * out).sum(axis=-1, keepdims=True)
        return ((g - dot) * out,)

    return make_output(out, (x,), bwd)


def layer_norm(x, gain, bias, eps=1e-5):
    """Per-row zero-mean/unit-variance normalization with affine."""
    xd = x.data
    mu = xd.mean(axis=-1, keepdims=True)
    var = xd.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (xd - mu) * inv
    out = xhat * gain.data + bias.data

    def bwd(g):
        d = xd.shape[-1]
        dxhat = g * gain.data
        dx = inv / d * (d * dxhat
                        - dxhat.sum(axis=-1, keepdims=True)
                        - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True))
        axes = tuple(range(xd.ndim - 1))
        return dx, (g * xhat).sum(axis=axes), g.sum(axis=axes)

    return make_output(out, (x, gain, bias), bwd)


def take_rows(table, indices):
    """Gather rows (embedding lookup); backward scatter-adds."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise ContractError("row index out of range [0, %d)"
                            % table.data.shape[0])
    out = table.data[idx]

    def bwd(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, idx, g)
        return (gt,)

    return make_output(out, (table,), bwd)


def slice_cols(x, start, stop):
    out = x.data[:, start:stop]

    def bwd(g):
        gx = np.zeros_like(x.data)
        gx[:, start:stop] = g
        return (gx,)

    return make_output(out, (x,), bwd)


def concat_cols(parts):
    widths = [p.data.shape[1] for p in parts]
    out = np.concatenate([p.data for p in parts], axis=1)

    def bwd(g):
        grads = []
        ofs = 0
        for w in widths:
            grads.append(g[:, ofs:ofs + w])
            ofs += w
        return tuple(grads)

    return make_output(out, tuple(parts), bwd)


def pad_cols(x, extra):
    """Append `extra` zero columns."""
    n, m = x.data.shape
    out = np.zeros((n, m + extra), dtype=x.dtype)
    out[:, :m] = x.data

    def bwd(g):
        return (g[:, :m],)

    return make_output(out, (x,), bwd)


def scatter_add_cols(values, col_ids, width):
    """out[n, col_ids[i]] += values[n, i]; duplicate ids accumulate."""
    ids = np.asarray(col_ids, dtype=np.int64)
    n, s = values.data.shape
    if ids.shape != (s,):
        raise ShapeError("col_ids length %d != values width %d"
                         % (ids.size, s))
    if ids.size and (ids.min() < 0 or ids.max() >= width):
        raise ContractError("scatter index out of range [0, %d)" % width)
    out = np.zeros((n, width), dtype=values.dtype)
    np.add.at(out, (np.arange(n)[:, None], ids[None, :]), values.data)

    def bwd(g):
        return (g[:, ids],)

    return make_output(out, (values,), bwd)


def gather_cols(x, col_per_row):
    """out[n] = x[n, col_per_row[n]], returned as a column vector."""
    idx = np.asarray(col_per_row, dtype=np.int64)
    n = x.data.shape[0]
    if idx.shape != (n,):
        raise ShapeError("need one column index per row")
    if idx.size and (idx.min() < 0 or idx.max() >= x.data.shape[1]):
        raise ContractError("column index out of range")
    rows = np.arange(n)
    out = x.data[rows, idx][:, None]

    def bwd(g):
        gx = np.zeros_like(x.data)
        gx[rows, idx] = g[:, 0]
        return (gx,)

    return make_output(out, (x,), bwd)


def clamped_log(x, floor=1e-12):
    """log(max(x, floor)); gradient is zero where the clamp is active."""
    clamped = np.maximum(x.data, floor)
    out = np.log(clamped)
    passthrough = x.data > floor

    def bwd(g):
        return (np.where(passthrough, g / clamped, 0.0),)

    return make_output(out, (x,), bwd)


def sum_all(x):
    out = np.asarray(x.data.sum(), dtype=x.dtype)

    def bwd(g):
        return (np.broadcast_to(g, x.data.shape).astype(x.dtype, copy=True),)

    return make_output(out, (x,), bwd)


def mean_all(x):
    n = x.data.size
    out = np.asarray(x.data.mean(), dtype=x.dtype)

    def bwd(g):
        return (np.broadcast_to(g / n, x.data.shape).astype(x.dtype, copy=True),)

    return make_output(out, (x,), bwd)


def dropout(x, rate, rng):
    """Inverted dropout; identity when rate == 0."""
    if rate <= 0.0:
        return x
    keep = (rng.random(x.data.shape) >= rate).astype(x.dtype)
    scale = 1.0 / (1.0 - rate)
    out = x.data * keep * scale

    def bwd(g):
        return (g * keep * scale,)

    return make_output(out, (x,), bwd)
