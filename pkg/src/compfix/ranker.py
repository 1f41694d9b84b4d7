"""Repair-class ranking: a fixed label hierarchy plus prototype reranking.

The hierarchy splits a line first into Replace vs other repairs (a small MLP),
then by compiler error ID, deletion tokens and insertion tokens (softmax
regressions).  A class's tree score is the product of the conditional child
probabilities on its root-to-leaf path.  Prototype scores come from k-means
centroids of each class's training vectors, and the two are blended 0.8/0.2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import ClassCatalog
from .mlkit import FeedForwardNet, LinearClassifier, kmeans, train_linear, train_mlp

TREE_WEIGHT = 0.8
PROTOTYPE_WEIGHT = 0.2
POINTS_PER_PROTOTYPE = 25


@dataclass
class TrainConfig:
    seed: int = 42
    hidden: tuple = (128, 128)
    mlp_epochs: int = 50
    mlp_learning_rate: float = 0.01
    linear_epochs: int = 50
    linear_learning_rate: float = 0.01
    batch_size: int = 32
    tree_max_depth: int = 20
    tree_min_leaf: int = 1

    def to_dict(self):
        d = dict(self.__dict__)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "hidden" in d:
            d["hidden"] = tuple(d["hidden"])
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


@dataclass
class Node:
    """Internal node; ``children`` holds nested nodes or class IDs (leaves)."""

    key: tuple
    children: list
    model: Optional[object] = None

    def child_proba(self, X):
        X = np.atleast_2d(X)
        if len(self.children) == 1 or self.model is None:
            return np.ones((X.shape[0], len(self.children))) / len(self.children)
        return self.model.predict_proba(X)


def _group_key(rc):
    return "Replace" if rc.kind == "Replace" else "Other"


_LEVELS = (_group_key, lambda rc: rc.error_id, lambda rc: rc.deletions, lambda rc: rc.insertions)


class RankingTree:
    def __init__(self, root: Node, n_classes: int):
        self.root = root
        self.n_classes = n_classes

    def nodes(self):
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(c for c in reversed(node.children) if isinstance(c, Node))
        return out

    def leaves(self) -> list[int]:
        out = []

        def walk(node):
            for c in node.children:
                if isinstance(c, Node):
                    walk(c)
                else:
                    out.append(c)
        walk(self.root)
        return out

    def scores(self, X) -> np.ndarray:
        """``(n, n_classes)`` matrix of chain-rule leaf probabilities."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        S = np.zeros((X.shape[0], self.n_classes))

        def walk(node, mass):
            P = node.child_proba(X)
            for j, c in enumerate(node.children):
                m = mass * P[:, j]
                if isinstance(c, Node):
                    walk(c, m)
                else:
                    S[:, c] = m
        if self.root.children:
            walk(self.root, np.ones(X.shape[0]))
        return S

    # serialisation -------------------------------------------------------
    def save(self, directory):
        directory = Path(directory)
        (directory / "nodes").mkdir(parents=True, exist_ok=True)
        manifest = []
        ids = {id(n): i for i, n in enumerate(self.nodes())}
        for node in self.nodes():
            i = ids[id(node)]
            entry = {"id": i, "key": _jsonable(node.key), "children": [
                {"node": ids[id(c)]} if isinstance(c, Node) else {"class": int(c)} for c in node.children]}
            if node.model is not None:
                fname = f"nodes/node_{i:04d}.txt"
                (directory / fname).write_text(node.model.to_text(), encoding="utf-8")
                entry["model"] = fname
                entry["model_type"] = "mlp" if isinstance(node.model, FeedForwardNet) else "linear"
            manifest.append(entry)
        return {"n_classes": self.n_classes, "nodes": manifest}

    @classmethod
    def load(cls, directory, manifest):
        directory = Path(directory)
        entries = {e["id"]: e for e in manifest["nodes"]}
        built = {}

        def make(i):
            e = entries[i]
            model = None
            if "model" in e:
                text = (directory / e["model"]).read_text(encoding="utf-8")
                model = (FeedForwardNet if e["model_type"] == "mlp" else LinearClassifier).from_text(text)
            children = [make(c["node"]) if "node" in c else c["class"] for c in e["children"]]
            built[i] = Node(tuple(_tupled(k) for k in e["key"]), children, model)
            return built[i]
        return cls(make(0), manifest["n_classes"])


def _jsonable(key):
    return [list(k) if isinstance(k, tuple) else k for k in key]


def _tupled(k):
    return tuple(k) if isinstance(k, list) else k


def build_tree(catalog: ClassCatalog, X, labels, config: TrainConfig = None) -> RankingTree:
    """Grow the fixed hierarchy over the classes that have training points."""
    config = config or TrainConfig()
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    present = sorted(set(labels.tolist()))

    def grow(key, class_ids, level):
        if level == len(_LEVELS):
            return class_ids[0]
        groups: dict = {}
        for cid in class_ids:
            groups.setdefault(_LEVELS[level](catalog[cid]), []).append(cid)
        children = [grow(key + (g,), cids, level + 1) for g, cids in groups.items()]
        if level == 0 and len(children) == 1:
            # the root stays a node even when only one group exists
            return Node(key, children)
        if len(children) == 1:
            return children[0]
        node = Node(key, children)
        member = {cid: j for j, cids in enumerate(groups.values()) for cid in cids}
        rows = np.flatnonzero(np.isin(labels, list(member)))
        y = np.array([member[c] for c in labels[rows]])
        if level == 0:
            node.model = train_mlp(X[rows], y, config.hidden, config.mlp_epochs,
                                   config.mlp_learning_rate, config.batch_size, config.seed)
        else:
            node.model = train_linear(X[rows], y, config.linear_epochs, config.linear_learning_rate,
                                      config.batch_size, config.seed)
        return node

    if not present:
        return RankingTree(Node((), []), len(catalog))
    root = grow((), present, 0)
    return RankingTree(root, len(catalog))


def tree_scores(x, tree: RankingTree) -> dict:
    """Map class ID -> chain-rule probability for one feature vector."""
    s = tree.scores(x)[0]
    return {cid: float(s[cid]) for cid in tree.leaves()}


# ---------------------------------------------------------------------------
# prototypes

@dataclass
class PrototypeBank:
    centroids: dict = field(default_factory=dict)  # class id -> (k_c, d) array

    def stacked(self, dim):
        if not self.centroids:
            return np.zeros((0, dim)), np.zeros(0, dtype=int)
        owners = np.concatenate([np.full(len(c), cid) for cid, c in self.centroids.items()])
        return np.vstack(list(self.centroids.values())), owners

    def scores(self, X, n_classes) -> np.ndarray:
        """``(n, n_classes)`` matrix of best-prototype scores; classes without prototypes get 0."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        C, owners = self.stacked(X.shape[1])
        S = np.zeros((X.shape[0], n_classes))
        if len(C) == 0:
            return S
        d2 = np.maximum((X * X).sum(1)[:, None] - 2 * X @ C.T + (C * C).sum(1)[None, :], 0.0)
        K = np.exp(-0.5 * d2)
        for j, cid in enumerate(owners):
            np.maximum(S[:, cid], K[:, j], out=S[:, cid])
        return S


def n_prototypes(n_points: int) -> int:
    return math.ceil(n_points / POINTS_PER_PROTOTYPE)


def build_prototypes(X, labels, seed=42) -> PrototypeBank:
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    bank = PrototypeBank()
    for cid in sorted(set(labels.tolist())):
        pts = X[labels == cid]
        bank.centroids[cid] = kmeans(pts, n_prototypes(len(pts)), seed=seed).centroids
    return bank


def prototype_score(x, bank: PrototypeBank, class_id) -> float:
    cents = bank.centroids.get(class_id)
    if cents is None or len(cents) == 0:
        return 0.0
    d2 = ((cents - np.asarray(x, dtype=float)[None, :]) ** 2).sum(axis=1)
    return float(np.exp(-0.5 * d2).max())


# ---------------------------------------------------------------------------
# ranking

@dataclass(frozen=True)
class RankedClass:
    class_id: int
    score: float
    tree_score: float
    prototype_score: float


def blend(tree_s, proto_s):
    return TREE_WEIGHT * np.asarray(tree_s) + PROTOTYPE_WEIGHT * np.asarray(proto_s)


def order_classes(scores, counts) -> list[int]:
    """Class IDs by descending score, then descending count, then ascending ID."""
    scores = np.asarray(scores)
    counts = np.asarray(counts)
    return list(np.lexsort((np.arange(len(scores)), -counts, -scores)))


class Ranker:
    """Bundles tree, prototypes and catalog counts to rank repair classes."""

    def __init__(self, tree: RankingTree, bank: PrototypeBank, catalog: ClassCatalog, rerank=True):
        self.tree = tree
        self.bank = bank
        self.catalog = catalog
        self.rerank = rerank
        self.counts = np.array(catalog.counts(), dtype=float)

    def score_matrices(self, X):
        St = self.tree.scores(X)
        Sp = self.bank.scores(X, len(self.catalog)) if self.rerank else np.zeros_like(St)
        return blend(St, Sp), St, Sp

    def rank(self, x, k=None) -> list[RankedClass]:
        S, St, Sp = (m[0] for m in self.score_matrices(x))
        order = order_classes(S, self.counts)
        if k is not None:
            order = order[:k]
        return [RankedClass(int(c), float(S[c]), float(St[c]), float(Sp[c])) for c in order]


def rank(x, tree: RankingTree, bank: Optional[PrototypeBank], catalog: ClassCatalog, k=None):
    """Ranked classes for one vector; ``bank=None`` disables reranking."""
    return Ranker(tree, bank or PrototypeBank(), catalog, rerank=bank is not None).rank(x, k)


def save_prototypes(bank: PrototypeBank, directory):
    from .mlkit import save_arrays
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_arrays(directory / "prototypes.txt", {f"c{cid}": c for cid, c in sorted(bank.centroids.items())})


def load_prototypes(directory) -> PrototypeBank:
    from .mlkit import load_arrays
    arrays = load_arrays(Path(directory) / "prototypes.txt")
    return PrototypeBank({int(k[1:]): v for k, v in arrays.items()})


__all__ = ["Node", "RankingTree", "TrainConfig", "build_tree", "tree_scores", "PrototypeBank",
           "build_prototypes", "prototype_score", "RankedClass", "Ranker", "rank", "blend",
           "n_prototypes", "order_classes", "save_prototypes", "load_prototypes"]
