"""Deterministic teacher-forced training loop."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import ops
from .model import sequence_loss
from .optim import (AdamState, adam_step, clip_grad_norm, reset_grads,
                    zero_fill_grads)
from .tensor import Tape, backward


class TrainingError(RuntimeError):
    """Training aborted (non-finite loss)."""


@dataclass
class TrainConfig:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 1
    epochs: int = 1
    max_grad_norm: float = 1.0
    seed: int = 0
    eval_every: int = 0  # 0 disables periodic evaluation

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainReport:
    losses: list = field(default_factory=list)        # per optimizer step
    eval_points: list = field(default_factory=list)   # (step, mean loss)
    wall_clock: float = 0.0
    params: object = None


def evaluate_loss(params, dataset, mcfg):
    """Mean sequence loss, no grad recording, order-invariant."""
    if not dataset:
        raise ValueError("dataset must be nonempty")
    total = 0.0
    for ex in dataset:
        total += float(sequence_loss(params, ex, mcfg).data)
    return total / len(dataset)


def train(params, dataset, tcfg, mcfg, loss_log_path=None):
    """Epochs of seeded-shuffle batches: loss, backward, clip, Adam.

    Deterministic given (seed, dataset order) under single-threaded numpy.
    """
    if not dataset:
        raise ValueError("dataset must be nonempty")
    start = time.monotonic()
    rng = np.random.default_rng(tcfg.seed)
    drop_rng = np.random.default_rng(tcfg.seed + 1)
    tensors = params.values()
    state = AdamState(tensors, lr=tcfg.lr, beta1=tcfg.beta1,
                      beta2=tcfg.beta2, eps=tcfg.eps)
    report = TrainReport(params=params)
    log = open(loss_log_path, "a", encoding="utf-8") if loss_log_path else None
    step = 0
    try:
        for _epoch in range(tcfg.epochs):
            order = rng.permutation(len(dataset))
            for lo in range(0, len(order), tcfg.batch_size):
                batch = order[lo:lo + tcfg.batch_size]
                reset_grads(tensors)
                with Tape() as tape:
                    losses = [sequence_loss(params, dataset[i], mcfg,
                                            train=True, rng=drop_rng)
                              for i in batch]
                    total = losses[0]
                    for other in losses[1:]:
                        total = ops.add(total, other)
                    batch_loss = ops.affine(total, 1.0 / len(batch))
                value = float(batch_loss.data)
                if not np.isfinite(value):
                    bad = [int(i) for i, l in zip(batch, losses)
                           if not np.isfinite(float(l.data))]
                    raise TrainingError(
                        "non-finite loss at step %d (examples %s)"
                        % (step, bad))
                backward(tape, batch_loss)
                zero_fill_grads(tensors)
                clip_grad_norm(tensors, tcfg.max_grad_norm)
                adam_step(state)
                reset_grads(tensors)
                step += 1
                report.losses.append(value)
                if log:
                    log.write("%d\t%.6f\n" % (step, value))
                if tcfg.eval_every and step % tcfg.eval_every == 0:
                    report.eval_points.append(
                        (step, evaluate_loss(params, dataset, mcfg)))
    finally:
        if log:
            log.close()
    report.wall_clock = time.monotonic() - start
    return report
