"""Everything a trained repairer needs, trained together and stored as one directory."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import ClassCatalog, MinedCorpus, mine_corpus
from .features import Vocabulary, build_vocabulary, encode_many
from .localizer import load_localizers, save_localizers, train_localizers
from .ranker import (PrototypeBank, Ranker, RankingTree, TrainConfig, build_prototypes, build_tree,
                     load_prototypes, save_prototypes)

FORMAT_VERSION = 1


@dataclass
class ModelBundle:
    vocab: Vocabulary
    catalog: ClassCatalog
    tree: RankingTree
    bank: PrototypeBank
    localizers: dict
    config: TrainConfig = field(default_factory=TrainConfig)
    train_seconds: float = 0.0

    def ranker(self, rerank=True) -> Ranker:
        return Ranker(self.tree, self.bank, self.catalog, rerank=rerank)

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        self.vocab.save(d / "vocab")
        tree_manifest = self.tree.save(d)
        save_prototypes(self.bank, d)
        save_localizers(self.localizers, d / "localizers")
        manifest = {
            "format": FORMAT_VERSION,
            "config": self.config.to_dict(),
            "train_seconds": self.train_seconds,
            "catalog": self.catalog.to_records(),
            "tree": tree_manifest,
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, directory) -> "ModelBundle":
        d = Path(directory)
        mpath = d / "manifest.json"
        if not mpath.is_file():
            raise FileNotFoundError(f"no model bundle at {d}")
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
        if manifest.get("format") != FORMAT_VERSION:
            raise ValueError(f"unsupported bundle format {manifest.get('format')!r}")
        return cls(Vocabulary.load(d / "vocab"), ClassCatalog.from_records(manifest["catalog"]),
                   RankingTree.load(d, manifest["tree"]), load_prototypes(d),
                   load_localizers(d / "localizers"), TrainConfig.from_dict(manifest["config"]),
                   manifest.get("train_seconds", 0.0))


def training_matrix(mined: MinedCorpus, vocab: Vocabulary) -> np.ndarray:
    return encode_many([(ex.line, ex.error_id) for ex in mined.examples], vocab)


def train_bundle(pairs_or_mined, config: TrainConfig = None) -> ModelBundle:
    """Mine (if needed), build vocabularies and fit ranker, prototypes and localizers."""
    config = config or TrainConfig()
    t0 = time.perf_counter()
    mined = pairs_or_mined if isinstance(pairs_or_mined, MinedCorpus) else mine_corpus(pairs_or_mined)
    if not mined.examples:
        raise ValueError("no usable training pairs")
    vocab = build_vocabulary(mined.examples)
    X = training_matrix(mined, vocab)
    y = np.array(mined.labels)
    tree = build_tree(mined.catalog, X, y, config)
    bank = build_prototypes(X, y, config.seed)
    locs = train_localizers(X, y, [ex.profile for ex in mined.examples], vocab,
                            config.tree_max_depth, config.tree_min_leaf)
    return ModelBundle(vocab, mined.catalog, tree, bank, locs, config, time.perf_counter() - t0)


__all__ = ["ModelBundle", "train_bundle", "training_matrix"]
