"""Miniature decoder-only transformer with a pointer/copy output head.

The network runs over the concatenated [source, SEP, summary] id sequence.
Blocks are standard pre-norm GPT-2 style (causal multi-head self-attention,
GELU MLP, residuals). The output head mixes a vocabulary softmax with an
attention distribution over source positions through a learned gate, so
source words outside the vocabulary stay reachable via their extended ids.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import ops
from .tensor import ContractError, Tensor
from .tokenizer import SEP, UNK

NEG_INF = -1e9


@dataclass
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 2
    n_layers: int = 2
    d_ff: int = 128
    max_seq_len: int = 64
    dropout_rate: float = 0.0
    seed: int = 0
    baseline: bool = False  # gate frozen at p_gen = 1 (no copying)

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise ValueError("d_model must be divisible by n_heads")
        if self.max_seq_len < 8:
            raise ValueError("max_seq_len must be at least 8")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class ModelParams:
    """Named parameter tensors in a fixed order (checkpoint manifest order)."""

    def __init__(self, tensors):
        self.tensors = dict(tensors)

    def __getitem__(self, name):
        return self.tensors[name]

    def names(self):
        return list(self.tensors)

    def values(self):
        return list(self.tensors.values())

    def items(self):
        return self.tensors.items()


def init_params(config, dtype=np.float32):
    """Seeded init: weights ~ N(0, 0.02), biases zero, layer-norm gains one."""
    rng = np.random.default_rng(config.seed)
    d, v = config.d_model, config.vocab_size

    def w(*shape):
        return Tensor(rng.normal(0.0, 0.02, size=shape), requires_grad=True,
                      dtype=dtype)

    def zeros(*shape):
        return Tensor(np.zeros(shape), requires_grad=True, dtype=dtype)

    def one_d(n):
        return Tensor(np.ones(n), requires_grad=True, dtype=dtype)

    t = {}
    t["tok_emb"] = w(v, d)
    t["pos_emb"] = w(config.max_seq_len, d)
    for i in range(config.n_layers):
        p = "h%d." % i
        t[p + "ln1.gain"] = one_d(d)
        t[p + "ln1.bias"] = zeros(d)
        for name in ("wq", "wk", "wv", "wo"):
            t[p + "attn." + name] = w(d, d)
            t[p + "attn.b" + name[1]] = zeros(d)
        t[p + "ln2.gain"] = one_d(d)
        t[p + "ln2.bias"] = zeros(d)
        t[p + "mlp.w_in"] = w(d, config.d_ff)
        t[p + "mlp.b_in"] = zeros(config.d_ff)
        t[p + "mlp.w_out"] = w(config.d_ff, d)
        t[p + "mlp.b_out"] = zeros(d)
    t["ln_f.gain"] = one_d(d)
    t["ln_f.bias"] = zeros(d)
    t["w_vocab"] = w(d, v)
    t["ptr.w"] = w(d, d)
    t["gate.w_h"] = w(d, 1)
    t["gate.w_c"] = w(d, 1)
    t["gate.b"] = zeros(1, 1)
    return ModelParams(t)


def _causal_mask(t_len, dtype):
    mask = np.triu(np.full((t_len, t_len), NEG_INF, dtype=dtype), k=1)
    return mask


def _attention(params, prefix, x, config, mask):
    d = config.d_model
    n_heads = config.n_heads
    d_head = d // n_heads
    scale = 1.0 / math.sqrt(d_head)
    q = ops.add(ops.matmul(x, params[prefix + "wq"]), params[prefix + "bq"])
    k = ops.add(ops.matmul(x, params[prefix + "wk"]), params[prefix + "bk"])
    v = ops.add(ops.matmul(x, params[prefix + "wv"]), params[prefix + "bv"])
    heads = []
    for h in range(n_heads):
        lo, hi = h * d_head, (h + 1) * d_head
        qh = ops.slice_cols(q, lo, hi)
        kh = ops.slice_cols(k, lo, hi)
        vh = ops.slice_cols(v, lo, hi)
        scores = ops.affine(ops.matmul(qh, ops.transpose(kh)), scale)
        attn = ops.softmax_rows(ops.add_const(scores, mask))
        heads.append(ops.matmul(attn, vh))
    merged = heads[0] if n_heads == 1 else ops.concat_cols(heads)
    return ops.add(ops.matmul(merged, params[prefix + "wo"]),
                   params[prefix + "bo"])


def forward_hidden(params, input_ids, config, train=False, rng=None):
    """Hidden states [T x d_model]; hidden[t] depends only on ids[0..t]."""
    ids = np.asarray(input_ids, dtype=np.int64)
    t_len = ids.shape[0]
    if t_len == 0:
        raise ContractError("empty input sequence")
    if t_len > config.max_seq_len:
        raise ValueError("sequence length %d exceeds max_seq_len %d"
                         % (t_len, config.max_seq_len))
    if ids.min() < 0 or ids.max() >= config.vocab_size:
        raise ValueError("token id out of range [0, %d)" % config.vocab_size)

    dtype = params["tok_emb"].dtype
    drop = config.dropout_rate if train else 0.0
    if drop > 0.0 and rng is None:
        rng = np.random.default_rng(config.seed)

    x = ops.add(ops.take_rows(params["tok_emb"], ids),
                ops.take_rows(params["pos_emb"], np.arange(t_len)))
    mask = _causal_mask(t_len, dtype)
    for i in range(config.n_layers):
        p = "h%d." % i
        normed = ops.layer_norm(x, params[p + "ln1.gain"],
                                params[p + "ln1.bias"])
        a = _attention(params, p + "attn.", normed, config, mask)
        if drop > 0.0:
            a = ops.dropout(a, drop, rng)
        x = ops.add(x, a)
        normed = ops.layer_norm(x, params[p + "ln2.gain"],
                                params[p + "ln2.bias"])
        m = ops.matmul(normed, params[p + "mlp.w_in"])
        m = ops.gelu(ops.add(m, params[p + "mlp.b_in"]))
        m = ops.add(ops.matmul(m, params[p + "mlp.w_out"]),
                    params[p + "mlp.b_out"])
        if drop > 0.0:
            m = ops.dropout(m, drop, rng)
        x = ops.add(x, m)
    return ops.layer_norm(x, params["ln_f.gain"], params["ln_f.bias"])


@dataclass
class PointerOutput:
    """One generation step: copy attention, gate, mixed distribution."""

    attn: np.ndarray     # over source positions, sums to 1
    p_gen: float         # in [0, 1]
    mixed: np.ndarray    # over extended vocab V + |oov|, sums to 1


def _mixed_distribution(params, hidden, step_rows, source_len,
                        source_ext_ids, oov_count, config):
    """Batched pointer head: returns (attn, p_gen, mixed) Tensors.

    step_rows are the positions whose next token is being predicted; the
    final-layer states at source positions act as the encoder side, the
    state at each step row as the decoder side.
    """
    v = config.vocab_size
    ext_ids = np.asarray(source_ext_ids, dtype=np.int64)
    if ext_ids.shape[0] != source_len:
        raise ContractError("source_ext_ids length != source length")
    if ext_ids.size and ext_ids.max() >= v + oov_count:
        raise ContractError("oov_count %d inconsistent with max extended id %d"
                            % (oov_count, int(ext_ids.max())))
    h_src = ops.take_rows(hidden, np.arange(source_len))
    h_t = ops.take_rows(hidden, np.asarray(step_rows, dtype=np.int64))

    scores = ops.matmul(ops.matmul(h_t, params["ptr.w"]), ops.transpose(h_src))
    attn = ops.softmax_rows(scores)
    context = ops.matmul(attn, h_src)

    vocab_dist = ops.softmax_rows(ops.matmul(h_t, params["w_vocab"]))
    if config.baseline:
        p_gen = Tensor(np.ones((len(step_rows), 1)), dtype=hidden.dtype)
    else:
        gate_logit = ops.add(ops.add(ops.matmul(h_t, params["gate.w_h"]),
                                     ops.matmul(context, params["gate.w_c"])),
                             params["gate.b"])
        p_gen = ops.sigmoid(gate_logit)

    gen_mass = ops.pad_cols(ops.mul(p_gen, vocab_dist), oov_count)
    copy_weights = ops.mul(ops.affine(p_gen, -1.0, 1.0), attn)
    copy_mass = ops.scatter_add_cols(copy_weights, ext_ids, v + oov_count)
    mixed = ops.add(gen_mass, copy_mass)
    return attn, p_gen, mixed


def pointer_step(params, hidden, step, source_len, source_ext_ids,
                 oov_count, config):
    """Pointer head at one position; generation requires step >= source_len."""
    if source_len < 1:
        raise ContractError("source must be nonempty")
    if step < source_len:
        raise ContractError("pointer_step at %d precedes end of source %d"
                            % (step, source_len))
    attn, p_gen, mixed = _mixed_distribution(
        params, hidden, [step], source_len, source_ext_ids, oov_count, config)
    return PointerOutput(attn=attn.data[0].copy(),
                         p_gen=float(p_gen.data[0, 0]),
                         mixed=mixed.data[0].copy())


def teacher_forced_ids(example, vocab_size):
    """Model input [source, SEP, gold summary prefix] in plain vocab ids."""
    feed = [UNK if i >= vocab_size else i for i in example.target_ext_ids[:-1]]
    return list(example.source_ids) + [SEP] + feed


def sequence_loss(params, example, config, train=False, rng=None):
    """Mean NLL of the mixed distribution over all summary prediction steps."""
    s = len(example.source_ids)
    n = len(example.target_ext_ids)
    if n < 1:
        raise ContractError("example has an empty target")
    input_ids = teacher_forced_ids(example, config.vocab_size)
    if len(input_ids) > config.max_seq_len:
        raise ValueError("encoded example length %d exceeds max_seq_len %d"
                         % (len(input_ids), config.max_seq_len))
    hidden = forward_hidden(params, input_ids, config, train=train, rng=rng)
    step_rows = np.arange(s, s + n)
    _, _, mixed = _mixed_distribution(
        params, hidden, step_rows, s, example.source_ext_ids,
        len(example.oov), config)
    picked = ops.gather_cols(mixed, np.asarray(example.target_ext_ids))
    return ops.affine(ops.mean_all(ops.clamped_log(picked)), -1.0)
