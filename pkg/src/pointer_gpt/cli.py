"""Command-line entry point: train / summarize / evaluate / compare."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .data import DatasetError, load_dataset, split_by_index
from .decoder import DecodeConfig, beam_decode, greedy_decode, resolve_summary
from .model import ModelConfig, init_params
from .rouge import format_report_table, rouge_report
from .tokenizer import Vocabulary, build_vocab, encode_example, encode_source
from .trainer import TrainConfig, TrainingError, train

DEFAULT_MAX_VOCAB = 4000


class CliError(RuntimeError):
    pass


def _resolve_seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("POINTER_GPT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError("POINTER_GPT_SEED must be an integer, got %r"
                           % env)
    return 0


def _load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError("cannot read config %s: %s" % (path, e))
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    return cfg


def _prepare_corpus(records, cfg, seed, baseline):
    texts = [r.source for r in records] + [r.summary for r in records]
    vocab_cfg = cfg.get("vocab", {})
    vocab = build_vocab(texts,
                        max_size=vocab_cfg.get("max_size", DEFAULT_MAX_VOCAB),
                        min_freq=vocab_cfg.get("min_freq", 1))
    model_cfg = ModelConfig(vocab_size=vocab.size, seed=seed,
                            baseline=baseline, **cfg.get("model", {}))
    examples = []
    for i, rec in enumerate(records):
        ex = encode_example(rec.source, rec.summary, vocab)
        need = len(ex.source_ids) + len(ex.target_ext_ids) + 1
        if need > model_cfg.max_seq_len:
            raise CliError("record %d needs %d positions but max_seq_len "
                           "is %d" % (i, need, model_cfg.max_seq_len))
        examples.append(ex)
    return vocab, model_cfg, examples


def _train_model(records, cfg, seed, baseline, loss_log=None):
    vocab, model_cfg, examples = _prepare_corpus(records, cfg, seed, baseline)
    params = init_params(model_cfg)
    train_cfg = TrainConfig(seed=seed, **cfg.get("train", {}))
    report = train(params, examples, train_cfg, model_cfg,
                   loss_log_path=loss_log)
    return vocab, model_cfg, params, report


def cmd_train(args):
    records = load_dataset(args.data)
    if not records:
        raise CliError("dataset %s is empty" % args.data)
    seed = _resolve_seed(args)
    cfg = _load_config_file(args.config)
    os.makedirs(args.out, exist_ok=True)
    vocab, model_cfg, params, _report = _train_model(
        records, cfg, seed, args.baseline,
        loss_log=os.path.join(args.out, "loss.log"))
    vocab.save(os.path.join(args.out, "vocab.txt"))
    save_checkpoint(params, model_cfg, os.path.join(args.out, "model.ckpt"))
    print("trained %d records; artifacts written to %s"
          % (len(records), args.out))
    return 0


def _decode_text(params, model_cfg, vocab, text, beam, max_len):
    source_ids, source_ext_ids, oov = encode_source(text, vocab)
    dcfg = DecodeConfig(max_summary_len=max_len, beam_width=max(beam, 1))
    if beam <= 1:
        ids = greedy_decode(params, source_ids, source_ext_ids, len(oov),
                            model_cfg, dcfg)
    else:
        hyp = beam_decode(params, source_ids, source_ext_ids, len(oov),
                          model_cfg, dcfg)
        ids = [i for i in hyp.ids]
    return resolve_summary(ids, vocab, oov)


def _load_model(args):
    try:
        params, model_cfg = load_checkpoint(args.ckpt)
    except CheckpointError as e:
        raise CliError(str(e))
    vocab = Vocabulary.load(args.vocab)
    if vocab.size != model_cfg.vocab_size:
        raise CliError("vocabulary size %d does not match checkpoint "
                       "vocab_size %d" % (vocab.size, model_cfg.vocab_size))
    return params, model_cfg, vocab


def cmd_summarize(args):
    params, model_cfg, vocab = _load_model(args)
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as f:
            text = f.read()
    print(_decode_text(params, model_cfg, vocab, text, args.beam,
                       args.max_len))
    return 0


def cmd_evaluate(args):
    params, model_cfg, vocab = _load_model(args)
    records = load_dataset(args.data)
    if not records:
        raise CliError("dataset %s is empty" % args.data)
    references = [r.summary for r in records]
    if args.self_test:
        candidates = list(references)
    else:
        candidates = [_decode_text(params, model_cfg, vocab, r.source,
                                   args.beam, args.max_len)
                      for r in records]
    report = rouge_report(candidates, references)
    print(format_report_table([("PointerGPT" if not model_cfg.baseline
                                else "GPT-baseline", report)]))
    return 0


def run_compare(records, cfg, seed, beam=1, max_len=32):
    """Train baseline and pointer variants identically; score held-out."""
    train_recs, eval_recs = split_by_index(records)
    if not train_recs or not eval_recs:
        raise CliError("dataset too small for an 80/20 split")
    rows = []
    for label, baseline in (("GPT-baseline", True), ("PointerGPT", False)):
        vocab, model_cfg, params, _report = _train_model(
            train_recs, cfg, seed, baseline)
        candidates = [_decode_text(params, model_cfg, vocab, r.source,
                                   beam, max_len)
                      for r in eval_recs]
        rows.append((label,
                     rouge_report(candidates,
                                  [r.summary for r in eval_recs])))
    return rows


def cmd_compare(args):
    records = load_dataset(args.data)
    if not records:
        raise CliError("dataset %s is empty" % args.data)
    seed = _resolve_seed(args)
    cfg = _load_config_file(args.config)
    decode_cfg = cfg.get("decode", {})
    rows = run_compare(records, cfg, seed,
                       beam=decode_cfg.get("beam_width", 1),
                       max_len=decode_cfg.get("max_summary_len", 32))
    print(format_report_table(rows))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pointer-gpt",
        description="Train and evaluate a pointer-augmented GPT summarizer.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write artifacts")
    p.add_argument("--data", required=True, help="JSONL dataset path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--baseline", action="store_true",
                   help="freeze the gate at p_gen=1 (no copying)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("summarize", help="summarize one document")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--input", required=True, help="text file or - for stdin")
    p.add_argument("--beam", type=int, default=1)
    p.add_argument("--max-len", type=int, default=32)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="ROUGE report over a dataset")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--beam", type=int, default=1)
    p.add_argument("--max-len", type=int, default=32)
    p.add_argument("--self-test", action="store_true",
                   help="score references against themselves (all 1.0)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="baseline vs pointer on an 80/20 split")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, DatasetError, TrainingError, ValueError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
