"""Dataset records: JSONL ingestion and the synthetic copy-task corpus."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .tokenizer import tokenize


@dataclass
class DatasetRecord:
    source: str
    summary: str


class DatasetError(ValueError):
    """Malformed dataset file."""


def load_dataset(path):
    """JSONL with string fields "source" and "summary"; blank lines skipped."""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError("line %d: invalid JSON (%s)"
                                   % (lineno, e.msg)) from e
            if not isinstance(obj, dict):
                raise DatasetError("line %d: expected a JSON object" % lineno)
            for fieldname in ("source", "summary"):
                if fieldname not in obj:
                    raise DatasetError('line %d: missing field "%s"'
                                       % (lineno, fieldname))
                if not isinstance(obj[fieldname], str):
                    raise DatasetError('line %d: field "%s" must be a string'
                                       % (lineno, fieldname))
                if not tokenize(obj[fieldname]):
                    raise DatasetError('line %d: field "%s" is empty after '
                                       "tokenization" % (lineno, fieldname))
            records.append(DatasetRecord(obj["source"], obj["summary"]))
    return records


def save_dataset(records, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps({"source": rec.source,
                                "summary": rec.summary}) + "\n")


# --- synthetic copy task -------------------------------------------------
#
# Each source embeds 2-4 rare "marker" words drawn from a pool large enough
# that frequency truncation keeps every marker out of the vocabulary. The
# reference summary is a fixed template that must copy the markers, so a
# model without a copy path cannot reproduce them.

# two intros only: every template word then occurs in at least half of the
# records, comfortably above the most frequent marker (~40 occurrences at
# 200 records), so frequency truncation can never keep a marker
_INTROS = ["patient reports onset of",
           "exam shows onset of"]
_SOURCE_TAIL = ("done today . exam shows stable vitals . "
                "plan follow up in clinic .")
_SUMMARY_TEMPLATE = "summary : %s noted ."

_MARKER_POOL_SIZE = 60
_SYLLABLES = ["zor", "vek", "quil", "dra", "fen", "lux", "mor", "tiv",
              "gax", "pyr", "wen", "hoz", "bim", "kel", "juf", "ryn"]


def marker_pool(size=_MARKER_POOL_SIZE):
    """Deterministic pool of nonsense marker words (never in-vocab)."""
    n = len(_SYLLABLES)
    if size > n * n * n:
        raise ValueError("marker pool cannot exceed %d" % (n * n * n))
    pool = []
    i = 0
    while len(pool) < size:
        word = (_SYLLABLES[i % n]
                + _SYLLABLES[(i // n + 3) % n]
                + _SYLLABLES[(i // (n * n) + 5) % n])
        if word not in pool:
            pool.append(word)
        i += 1
    return pool


def copy_task_vocab_size():
    """max_size holding exactly the template words, excluding every marker.

    Template words occur in (almost) every record while each marker occurs
    in only a handful, so frequency truncation at this size keeps all
    template words in-vocab and forces all markers out.
    """
    template_text = " ".join(_INTROS) + " " + _SOURCE_TAIL + " " \
        + (_SUMMARY_TEMPLATE % "")
    return 5 + len(set(tokenize(template_text)))


def synthetic_copy_task(n_records=200, seed=0):
    """Generate the copy-task corpus: markers must be copied verbatim."""
    rng = np.random.default_rng(seed)
    pool = marker_pool()
    records = []
    for _ in range(n_records):
        k = int(rng.integers(2, 5))
        markers = [pool[i] for i in rng.choice(len(pool), size=k,
                                               replace=False)]
        intro = _INTROS[int(rng.integers(len(_INTROS)))]
        source = "%s %s %s" % (intro, " ".join(markers), _SOURCE_TAIL)
        summary = _SUMMARY_TEMPLATE % " ".join(markers)
        records.append(DatasetRecord(source, summary))
    return records


def split_by_index(records, train_fraction=0.8):
    """Deterministic split: first floor(f*n) records train, rest held out."""
    cut = int(len(records) * train_fraction)
    return records[:cut], records[cut:]
