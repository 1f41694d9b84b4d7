"""Axis-aligned classification trees grown greedily on Gini impurity."""
from __future__ import annotations

import numpy as np

from .serial import dump_arrays, parse_arrays


def gini(counts):
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / total[..., None]
    return np.where(total > 0, 1.0 - np.nansum(p * p, axis=-1), 0.0)


class DecisionTree:
    """Array-backed binary tree.

    Node ``i`` is a leaf when ``feature[i] == -1``; otherwise samples with
    ``x[feature] <= threshold`` go to ``left[i]``.  ``value[i]`` is the class
    distribution of the training samples that reached the node.
    """

    def __init__(self, feature, threshold, left, right, value, classes):
        self.feature = np.asarray(feature, dtype=int)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=int)
        self.right = np.asarray(right, dtype=int)
        self.value = np.asarray(value, dtype=float).reshape(len(self.feature), -1)
        self.classes = np.asarray(classes)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        depths = {0: 0}
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return max(depths.values())

    def apply(self, X):
        """Leaf index reached by every row of ``X``."""
        X = np.atleast_2d(X)
        out = np.empty(X.shape[0], dtype=int)
        for r in range(X.shape[0]):
            node = 0
            while self.feature[node] >= 0:
                node = self.left[node] if X[r, self.feature[node]] <= self.threshold[node] else self.right[node]
            out[r] = node
        return out

    def predict_proba(self, X):
        return self.value[self.apply(X)]

    def predict(self, X):
        return self.classes[np.argmax(self.predict_proba(X), axis=1)]

    def to_arrays(self):
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left,
                "right": self.right, "value": self.value, "classes": self.classes}

    @classmethod
    def from_arrays(cls, a):
        return cls(a["feature"].astype(int), a["threshold"], a["left"].astype(int),
                   a["right"].astype(int), a["value"], a["classes"].astype(int))

    def to_text(self):
        return dump_arrays(self.to_arrays())

    @classmethod
    def from_text(cls, text):
        return cls.from_arrays(parse_arrays(text))


def best_split(X, Y, min_leaf=1):
    """Lowest weighted-Gini split ``(feature, threshold, impurity)`` or ``None``.

    ``Y`` is the one-hot label matrix.  Ties go to the lowest feature index,
    then the lowest threshold.
    """
    n, d = X.shape
    if n < 2 * min_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)
    cum = np.cumsum(Y[order], axis=0)  # (n, d, k)
    total = cum[-1, 0]
    left = cum[:-1]
    right = total - left
    n_left = np.arange(1, n)[:, None]
    n_right = n - n_left
    imp = (n_left * gini(left) + n_right * gini(right)) / n
    valid = (Xs[:-1] < Xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    imp = np.where(valid, imp, np.inf)
    best = imp.min()
    pos, feat = np.nonzero(imp <= best + 1e-12)
    j = np.lexsort((pos, feat))[0]
    pos, feat = pos[j], feat[j]
    thr = 0.5 * (Xs[pos, feat] + Xs[pos + 1, feat])
    return int(feat), float(thr), float(best)


def train_tree(X, y, max_depth=20, min_leaf=1):
    """Grow a Gini tree; a node splits only if impurity strictly drops."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError("train_tree needs a non-empty X with one label per row")
    classes, idx = np.unique(y, return_inverse=True)
    Y = np.eye(len(classes))[idx]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        counts = Y[rows].sum(axis=0)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts / counts.sum())
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        node_imp = float(gini(Y[rows].sum(axis=0)))
        if depth >= max_depth or node_imp == 0.0:
            continue
        split = best_split(X[rows], Y[rows], min_leaf)
        if split is None or split[2] >= node_imp - 1e-12:
            continue
        f, t, _ = split
        go_left = X[rows, f] <= t
        lrows, rrows = rows[go_left], rows[~go_left]
        feature[node], threshold[node] = f, t
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))
    return DecisionTree(feature, threshold, left, right, value, classes)
