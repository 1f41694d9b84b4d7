"""Frozen vocabularies and the binary errorID + unigram + bigram encoding."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import bigrams
from .lang import EOL, UNK, AbstractedLine


class Vocabulary:
    """Ordered error IDs, unigram tags and bigrams.

    Feature layout is ``[errorID one-hot | unigram presence | bigram presence]``.
    Tags and bigrams never seen while building map to ``UNK`` and contribute
    no bit.
    """

    def __init__(self, error_ids, unigrams, bigram_list):
        self.error_ids = list(error_ids)
        self.unigrams = list(unigrams)
        self.bigrams = [tuple(b) for b in bigram_list]
        self.error_index = {e: i for i, e in enumerate(self.error_ids)}
        self.unigram_index = {u: i for i, u in enumerate(self.unigrams)}
        self.bigram_index = {b: i for i, b in enumerate(self.bigrams)}
        if (len(self.error_index) != len(self.error_ids) or len(self.unigram_index) != len(self.unigrams)
                or len(self.bigram_index) != len(self.bigrams)):
            raise ValueError("vocabulary lists must be duplicate-free")

    @property
    def dims(self):
        return len(self.error_ids), len(self.unigrams), len(self.bigrams)

    @property
    def size(self):
        return sum(self.dims)

    @property
    def bigram_offset(self):
        return len(self.error_ids) + len(self.unigrams)

    def map_tag(self, tag):
        return tag if tag in self.unigram_index else UNK

    def line_bigram_ids(self, tags) -> set[int]:
        return {self.bigram_index[b] for b in bigrams(tags) if b in self.bigram_index}

    def __eq__(self, other):
        return (isinstance(other, Vocabulary) and self.error_ids == other.error_ids
                and self.unigrams == other.unigrams and self.bigrams == other.bigrams)

    def save(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "error_ids.txt").write_text("".join(e + "\n" for e in self.error_ids), encoding="utf-8")
        (directory / "unigrams.txt").write_text("".join(u + "\n" for u in self.unigrams), encoding="utf-8")
        (directory / "bigrams.txt").write_text("".join(f"{a}\t{b}\n" for a, b in self.bigrams), encoding="utf-8")

    @classmethod
    def load(cls, directory):
        directory = Path(directory)

        def lines(name):
            return [ln for ln in (directory / name).read_text(encoding="utf-8").split("\n") if ln]

        return cls(lines("error_ids.txt"), lines("unigrams.txt"),
                   [tuple(ln.split("\t")) for ln in lines("bigrams.txt")])


def _line_tags(line) -> tuple:
    if isinstance(line, AbstractedLine):
        return line.tags
    return tuple(getattr(t, "tag", t) for t in line)


def build_vocabulary(examples: Iterable) -> Vocabulary:
    """Collect vocabularies from ``(error_id, source_line)`` items in first-seen order.

    Accepts mined examples (anything with ``error_id`` and ``line``) or plain
    tuples.  Target lines are never consulted.
    """
    errs, unis, bis = {}, {}, {}
    n = 0
    for ex in examples:
        if isinstance(ex, tuple):
            error_id, line = ex
        else:
            error_id, line = ex.error_id, ex.line
        n += 1
        errs.setdefault(error_id, None)
        tags = _line_tags(line)
        for t in tags:
            unis.setdefault(t, None)
        for b in bigrams(tags):
            bis.setdefault(b, None)
    if n == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return Vocabulary(errs, unis, bis)


def encode(line, error_id, vocab: Vocabulary) -> np.ndarray:
    """Binary feature vector (float64 of 0/1) for one abstracted line."""
    x = np.zeros(vocab.size)
    e = vocab.error_index.get(error_id)
    if e is not None:
        x[e] = 1.0
    tags = _line_tags(line)
    off = len(vocab.error_ids)
    for t in tags:
        u = vocab.unigram_index.get(t)
        if u is not None:
            x[off + u] = 1.0
    off = vocab.bigram_offset
    for b in bigrams(tags):
        k = vocab.bigram_index.get(b)
        if k is not None:
            x[off + k] = 1.0
    return x


def encode_many(items, vocab: Vocabulary) -> np.ndarray:
    """Stack encodings of ``(line, error_id)`` items into an ``(n, d)`` matrix."""
    items = list(items)
    X = np.zeros((len(items), vocab.size))
    for i, (line, error_id) in enumerate(items):
        X[i] = encode(line, error_id, vocab)
    return X


__all__ = ["Vocabulary", "build_vocabulary", "encode", "encode_many", "EOL"]
