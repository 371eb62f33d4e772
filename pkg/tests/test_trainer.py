"""Training-loop tests: determinism, overfit, evaluation."""

import numpy as np
import pytest

from pointer_gpt.model import ModelConfig, init_params
from pointer_gpt.tokenizer import build_vocab, encode_example
from pointer_gpt.trainer import TrainConfig, evaluate_loss, train

SRC = "patient reports chronic sob and cough with mild fever ."
TGT = "chronic sob and cough ."


@pytest.fixture(scope="module")
def corpus():
    vocab = build_vocab([SRC, TGT], max_size=50)
    example = encode_example(SRC, TGT, vocab)
    cfg = ModelConfig(vocab_size=vocab.size, d_model=16, n_heads=2,
                      n_layers=1, d_ff=32, max_seq_len=32, seed=0)
    return vocab, example, cfg


class TestTrain:
    def test_zero_epochs_is_a_no_op(self, corpus):
        _, example, cfg = corpus
        params = init_params(cfg)
        before = {n: t.data.copy() for n, t in params.items()}
        report = train(params, [example], TrainConfig(epochs=0), cfg)
        assert report.losses == []
        for name, t in params.items():
            assert np.array_equal(before[name], t.data)

    def test_empty_dataset_rejected(self, corpus):
        _, _, cfg = corpus
        with pytest.raises(ValueError):
            train(init_params(cfg), [], TrainConfig(), cfg)

    def test_same_seed_bit_identical_curves_and_params(self, corpus):
        _, example, cfg = corpus
        runs = []
        for _ in range(2):
            params = init_params(cfg)
            report = train(params, [example, example],
                           TrainConfig(epochs=5, batch_size=2, seed=9), cfg)
            runs.append((report.losses,
                         {n: t.data.copy() for n, t in params.items()}))
        assert runs[0][0] == runs[1][0]
        for name in runs[0][1]:
            assert np.array_equal(runs[0][1][name], runs[1][1][name])

    def test_loss_decreases_from_init(self, corpus):
        _, example, cfg = corpus
        params = init_params(cfg)
        init_loss = evaluate_loss(params, [example], cfg)
        train(params, [example], TrainConfig(epochs=50, batch_size=1), cfg)
        assert evaluate_loss(params, [example], cfg) < init_loss

    def test_params_stay_finite(self, corpus):
        _, example, cfg = corpus
        params = init_params(cfg)
        train(params, [example], TrainConfig(epochs=30), cfg)
        for _, t in params.items():
            assert np.isfinite(t.data).all()

    def test_loss_log_format(self, corpus, tmp_path):
        _, example, cfg = corpus
        params = init_params(cfg)
        log = tmp_path / "loss.log"
        train(params, [example], TrainConfig(epochs=3), cfg,
              loss_log_path=str(log))
        lines = log.read_text().splitlines()
        assert len(lines) == 3
        for i, line in enumerate(lines, start=1):
            step, loss = line.split("\t")
            assert int(step) == i
            float(loss)

    def test_overfit_single_pair(self, corpus):
        # memorization of one sequence must be achievable
        vocab, example, _ = corpus
        cfg = ModelConfig(vocab_size=vocab.size, d_model=64, n_heads=2,
                          n_layers=2, d_ff=128, max_seq_len=64, seed=0)
        params = init_params(cfg)
        report = train(params, [example],
                       TrainConfig(epochs=500, batch_size=1, seed=0), cfg)
        assert report.losses[-1] < 0.1


class TestEvaluateLoss:
    def test_single_example_equals_sequence_loss(self, corpus):
        from pointer_gpt.model import sequence_loss
        _, example, cfg = corpus
        params = init_params(cfg)
        direct = float(sequence_loss(params, example, cfg).data)
        assert evaluate_loss(params, [example], cfg) == pytest.approx(direct)

    def test_order_invariant(self, corpus):
        vocab, example, cfg = corpus
        other = encode_example("mild fever today .", "fever .", vocab)
        params = init_params(cfg)
        a = evaluate_loss(params, [example, other], cfg)
        b = evaluate_loss(params, [other, example], cfg)
        assert a == pytest.approx(b, rel=1e-6)

    def test_mostly_decreasing_across_overfit_checkpoints(self, corpus):
        _, example, cfg = corpus
        params = init_params(cfg)
        checkpoints = [evaluate_loss(params, [example], cfg)]
        for _ in range(10):
            train(params, [example], TrainConfig(epochs=20), cfg)
            checkpoints.append(evaluate_loss(params, [example], cfg))
        increases = sum(1 for a, b in zip(checkpoints, checkpoints[1:])
                        if b > a)
        assert increases <= 1  # allow <=10% non-monotone steps

    def test_eval_every_records_points(self, corpus):
        _, example, cfg = corpus
        params = init_params(cfg)
        report = train(params, [example],
                       TrainConfig(epochs=6, eval_every=2), cfg)
        assert [s for s, _ in report.eval_points] == [2, 4, 6]
