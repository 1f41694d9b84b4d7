"""Multinomial logistic regression trained by mini-batch gradient descent."""
from __future__ import annotations

import numpy as np

from .serial import dump_arrays, parse_arrays


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(P, idx):
    return float(-np.mean(np.log(np.clip(P[np.arange(len(idx)), idx], 1e-300, None))))


class LinearClassifier:
    """Softmax over ``X @ weights.T + bias``.

    ``classes`` holds the label of each output row.  With one class the model
    is constant and ``predict_proba`` returns a column of ones.
    """

    def __init__(self, weights, bias, classes):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = np.asarray(bias, dtype=float)
        self.classes = np.asarray(classes)
        self.trained = True
        self.loss_history: list[float] = []

    def decision_function(self, X):
        return np.atleast_2d(X) @ self.weights.T + self.bias

    def predict_proba(self, X):
        if len(self.classes) == 1:
            return np.ones((np.atleast_2d(X).shape[0], 1))
        return softmax(self.decision_function(X))

    def predict(self, X):
        return self.classes[np.argmax(self.predict_proba(X), axis=1)]

    def to_text(self):
        return dump_arrays({"weights": self.weights, "bias": self.bias, "classes": self.classes})

    @classmethod
    def from_text(cls, text):
        a = parse_arrays(text)
        return cls(a["weights"], a["bias"], a["classes"].astype(int))


def _batches(n, batch_size, rng):
    order = rng.permutation(n)
    for s in range(0, n, batch_size):
        yield order[s:s + batch_size]


def train_linear(X, y, epochs=50, learning_rate=0.01, batch_size=32, seed=42, l2=1e-4):
    """Fit a softmax classifier on integer labels ``y``.

    Weights start at zero, so the result depends on ``seed`` only through
    the mini-batch order.  ``loss_history`` holds the epoch-averaged
    training loss.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError("train_linear needs a non-empty X with one label per row")
    classes, idx = np.unique(y, return_inverse=True)
    n, d = X.shape
    k = len(classes)
    W = np.zeros((k, d))
    b = np.zeros(k)
    model = LinearClassifier(W, b, classes)
    if k == 1:
        return model
    rng = np.random.default_rng(seed)
    Y = np.eye(k)[idx]
    for _ in range(epochs):
        total = 0.0
        for batch in _batches(n, batch_size, rng):
            P = softmax(X[batch] @ W.T + b)
            total += cross_entropy(P, idx[batch]) * len(batch)
            G = (P - Y[batch]) / len(batch)
            W -= learning_rate * (G.T @ X[batch] + l2 * W)
            b -= learning_rate * G.sum(axis=0)
        model.loss_history.append(total / n)
    return model
