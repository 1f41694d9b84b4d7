"""Per-class one-vs-rest bigram classifiers predicting where a repair applies."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import bigrams
from .features import Vocabulary
from .mlkit import DecisionTree, parse_arrays, dump_arrays, train_tree


@dataclass
class ClassLocalizer:
    """Binary trees keyed by bigram-vocabulary index.

    Only bigrams edited at least once in the class's training data get a
    tree.  ``prior`` is used instead of trees for classes with fewer than two
    training points.
    """

    class_id: int
    trees: dict = field(default_factory=dict)
    prior: frozenset = None

    def predict_ids(self, x, present_ids) -> set[int]:
        x = np.asarray(x, dtype=float)[None, :]
        if self.prior is not None:
            return set(self.prior) & set(present_ids)
        out = set()
        for b in present_ids:
            tree = self.trees.get(b)
            if tree is not None and tree.predict(x)[0] == 1:
                out.add(b)
        return out


def hamming_loss(predicted, gold) -> int:
    return len(set(predicted) ^ set(gold))


def train_localizers(X, labels, profiles, vocab: Vocabulary, max_depth=20, min_leaf=1) -> dict:
    """One :class:`ClassLocalizer` per class present in ``labels``.

    ``profiles`` are sets of bigrams (tag pairs); bigrams missing from the
    vocabulary cannot be predicted and are ignored.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    prof_ids = [frozenset(vocab.bigram_index[b] for b in p if b in vocab.bigram_index) for p in profiles]
    out = {}
    for cid in sorted(set(labels.tolist())):
        rows = np.flatnonzero(labels == cid)
        if len(rows) < 2:
            common = Counter(prof_ids[r] for r in rows).most_common(1)[0][0]
            out[cid] = ClassLocalizer(cid, prior=common)
            continue
        positives = sorted(set().union(*(prof_ids[r] for r in rows)))
        loc = ClassLocalizer(cid)
        for b in positives:
            y = np.array([int(b in prof_ids[r]) for r in rows])
            loc.trees[b] = train_tree(X[rows], y, max_depth, min_leaf)
        out[cid] = loc
    return out


def localize(x, line, class_id, localizers: dict, vocab: Vocabulary) -> frozenset:
    """Bigrams of ``line`` predicted to need an edit under ``class_id``.

    The result is always a subset of the line's own bigrams; an empty set
    means localization found nothing.
    """
    tags = line.tags if hasattr(line, "tags") else tuple(line)
    grams = set(bigrams(tags))
    present = {vocab.bigram_index[b] for b in grams if b in vocab.bigram_index}
    loc = localizers.get(class_id)
    if loc is None:
        return frozenset()
    return frozenset(vocab.bigrams[i] for i in loc.predict_ids(x, present))


def save_localizers(localizers: dict, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for cid, loc in sorted(localizers.items()):
        arrays = {}
        if loc.prior is not None:
            arrays["prior"] = np.array(sorted(loc.prior), dtype=float)
        for b, tree in sorted(loc.trees.items()):
            for name, arr in tree.to_arrays().items():
                arrays[f"b{b}.{name}"] = arr
        (directory / f"class_{cid:05d}.txt").write_text(dump_arrays(arrays), encoding="utf-8")


def load_localizers(directory) -> dict:
    out = {}
    for path in sorted(Path(directory).glob("class_*.txt")):
        cid = int(path.stem.split("_")[1])
        arrays = parse_arrays(path.read_text(encoding="utf-8"))
        loc = ClassLocalizer(cid)
        if "prior" in arrays:
            loc.prior = frozenset(int(v) for v in arrays.pop("prior"))
        grouped: dict = {}
        for key, arr in arrays.items():
            b, name = key[1:].split(".", 1)
            grouped.setdefault(int(b), {})[name] = arr
        loc.trees = {b: DecisionTree.from_arrays(a) for b, a in grouped.items()}
        out[cid] = loc
    return out
