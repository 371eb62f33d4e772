"""A tour of the tape-based autodiff kernel.

Builds a tiny computation, runs the backward pass, and cross-checks the
resulting gradients against central finite differences.
"""

import numpy as np

from pointer_gpt import ops
from pointer_gpt.gradcheck import gradcheck
from pointer_gpt.tensor import Tape, Tensor, backward

# 1. A scalar function of a matrix: f(W) = sum(softmax_rows(x @ W))
rng = np.random.default_rng(0)
x = Tensor(rng.normal(size=(3, 4)).astype(np.float64))
w = Tensor(rng.normal(size=(4, 5)).astype(np.float64), requires_grad=True)

with Tape() as tape:
    logits = ops.matmul(x, w)
    probs = ops.softmax_rows(logits)
    loss = ops.sum_all(probs)
backward(tape, loss)

print("loss =", float(loss.data))
print("grad shape:", w.grad.shape)
# each softmax row sums to one no matter what W is, so f is constant and
# every gradient entry must be (numerically) zero
print("max |grad| for a constant function:", np.abs(w.grad).max())

# 2. The same check, automated: gradcheck compares the analytic gradient
# against central differences and reports the worst relative error.
w2 = Tensor(rng.normal(size=(4, 4)).astype(np.float64), requires_grad=True)
b = Tensor(np.zeros(4), requires_grad=True)


def f(w2, b):
    return ops.mean_all(ops.gelu(ops.add(ops.matmul(x, w2), b)))


err = gradcheck(f, [w2, b])
print("gradcheck worst relative error:", err)
assert err < 1e-5

# 3. Gradients accumulate across backward calls until reset.
v = Tensor(np.ones(3), requires_grad=True)
for _ in range(2):
    with Tape() as tape:
        out = ops.sum_all(ops.mul(v, v))
    backward(tape, out)
print("accumulated grad after two backwards (expect 4s):", v.grad)
