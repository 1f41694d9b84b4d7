"""Lloyd's k-means with seeded farthest-point initialisation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray
    objective: list = field(default_factory=list)  # sum of squared distances after each step
    n_iter: int = 0


def _sq_dists(points, centroids):
    d = (points * points).sum(1)[:, None] - 2 * points @ centroids.T + (centroids * centroids).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans(points, k, seed=42, max_iter=100):
    """Cluster ``points`` into ``k`` groups.

    The first centre is drawn with the seeded generator; each further centre
    is the point farthest from the centres chosen so far (first index on
    ties).  Iterates until the assignment stops changing or ``max_iter``.
    An emptied cluster keeps its previous centre.
    """
    X = np.asarray(points, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(X, X[chosen])[:, 0]
    for _ in range(1, k):
        masked = closest.copy()
        masked[chosen] = -1.0
        nxt = int(np.argmax(masked))
        chosen.append(nxt)
        closest = np.minimum(closest, _sq_dists(X, X[[nxt]])[:, 0])
    C = X[chosen].copy()
    assign = np.argmin(_sq_dists(X, C), axis=1)
    objective = [float(_sq_dists(X, C)[np.arange(n), assign].sum())]
    it = 0
    for it in range(1, max_iter + 1):
        for c in range(k):
            members = assign == c
            if members.any():
                C[c] = X[members].mean(axis=0)
        D = _sq_dists(X, C)
        new = np.argmin(D, axis=1)
        # keep the current cluster when it is tied for nearest
        keep = D[np.arange(n), assign] <= D[np.arange(n), new] + 1e-12
        new = np.where(keep, assign, new)
        objective.append(float(D[np.arange(n), new].sum()))
        if np.array_equal(new, assign):
            break
        assign = new
    return KMeansResult(C, assign, objective, it)
