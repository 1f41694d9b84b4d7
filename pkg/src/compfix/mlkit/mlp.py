"""Feed-forward network with rectifier hidden layers and a softmax output."""
from __future__ import annotations

import numpy as np

from .linear import cross_entropy, softmax
from .serial import dump_arrays, parse_arrays


class FeedForwardNet:
    def __init__(self, weights, biases, classes):
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]
        self.classes = np.asarray(classes)
        self.loss_history: list[float] = []

    @property
    def sizes(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_parameters(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def forward(self, X):
        """Activations of every layer; the last entry is the class distribution."""
        acts = [np.atleast_2d(np.asarray(X, dtype=float))]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            acts.append(np.maximum(acts[-1] @ w.T + b, 0.0))
        acts.append(softmax(acts[-1] @ self.weights[-1].T + self.biases[-1]))
        return acts

    def predict_proba(self, X):
        if len(self.classes) == 1:
            return np.ones((np.atleast_2d(X).shape[0], 1))
        return self.forward(X)[-1]

    def predict(self, X):
        return self.classes[np.argmax(self.predict_proba(X), axis=1)]

    def loss_and_gradients(self, X, idx):
        """Mean cross-entropy and its gradients with respect to every weight and bias."""
        acts = self.forward(X)
        P = acts[-1]
        n = P.shape[0]
        delta = P.copy()
        delta[np.arange(n), idx] -= 1.0
        delta /= n
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for layer in range(len(self.weights) - 1, -1, -1):
            gw[layer] = delta.T @ acts[layer]
            gb[layer] = delta.sum(axis=0)
            if layer:
                delta = (delta @ self.weights[layer]) * (acts[layer] > 0)
        return cross_entropy(P, idx), gw, gb

    def to_text(self):
        arrays = {"classes": self.classes}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        return dump_arrays(arrays)

    @classmethod
    def from_text(cls, text):
        a = parse_arrays(text)
        n = sum(1 for k in a if k.startswith("w"))
        return cls([a[f"w{i}"] for i in range(n)], [a[f"b{i}"] for i in range(n)],
                   a["classes"].astype(int))


def init_mlp(n_in, hidden, n_out, seed=42, classes=None):
    """He-initialised network of sizes ``[n_in, *hidden, n_out]``."""
    rng = np.random.default_rng(seed)
    sizes = [n_in, *hidden, n_out]
    weights = [rng.normal(0.0, np.sqrt(2.0 / a), size=(b, a)) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    return FeedForwardNet(weights, biases, np.arange(n_out) if classes is None else classes)


def train_mlp(X, y, hidden=(128, 128), epochs=50, learning_rate=0.01, batch_size=32, seed=42):
    """Mini-batch gradient descent on cross-entropy."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError("train_mlp needs a non-empty X with one label per row")
    classes, idx = np.unique(y, return_inverse=True)
    net = init_mlp(X.shape[1], hidden, max(len(classes), 2), seed, classes)
    if len(classes) == 1:
        return net
    rng = np.random.default_rng(seed + 1)
    n = X.shape[0]
    for _ in range(epochs):
        total = 0.0
        order = rng.permutation(n)
        for s in range(0, n, batch_size):
            batch = order[s:s + batch_size]
            loss, gw, gb = net.loss_and_gradients(X[batch], idx[batch])
            total += loss * len(batch)
            for w, g in zip(net.weights, gw):
                w -= learning_rate * g
            for b, g in zip(net.biases, gb):
                b -= learning_rate * g
        net.loss_history.append(total / n)
    return net
