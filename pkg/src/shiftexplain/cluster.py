"""Deterministic k-means with greedy farthest-point initialization.

Small and self-contained on purpose: the cluster map family needs bit-stable
results for a given seed, explicit restart control, and a hard guarantee that
no returned cluster is empty. Restarts differ only in the seeded choice of the
first centroid.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import ClusteringError


def farthest_point_init(Z: np.ndarray, k: int, first: int) -> np.ndarray:
    """Greedy farthest-point centroid seeding starting from row ``first``."""
    n = Z.shape[0]
    chosen = [first]
    min_d2 = ((Z - Z[first]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(min_d2))
        chosen.append(nxt)
        min_d2 = np.minimum(min_d2, ((Z - Z[nxt]) ** 2).sum(axis=1))
    return Z[np.array(chosen)].copy()


def _lloyd(Z: np.ndarray, centroids: np.ndarray, max_iters: int):
    k = centroids.shape[0]
    labels = None
    for _ in range(max_iters):
        d2 = cdist(Z, centroids, "sqeuclidean")
        new_labels = np.argmin(d2, axis=1)  # argmin ties break to the lower index
        for empty in np.flatnonzero(np.bincount(new_labels, minlength=k) == 0):
            # Re-seat an empty centroid on the point currently worst served.
            worst = int(np.argmax(d2[np.arange(len(new_labels)), new_labels]))
            if d2[worst, new_labels[worst]] <= 0:
                # No genuinely distinct point left; report the empty cluster
                # so the caller can retry with another seed.
                return centroids, new_labels, np.inf
            new_labels[worst] = empty
            d2[worst, :] = -np.inf  # never pick the same point twice
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = Z[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    inertia = float(((Z - centroids[labels]) ** 2).sum())
    return centroids, labels, inertia


def seeded_kmeans(Z, k: int, seed: int, restarts: int = 10, max_iters: int = 300):
    """Best-of-``restarts`` k-means; returns (centroids, labels, inertia).

    Deterministic for a given (Z, k, seed, restarts). Raises ClusteringError
    when no restart yields k nonempty clusters (e.g. fewer than k distinct
    rows).
    """
    Z = np.asarray(Z, dtype=np.float64)
    n = Z.shape[0]
    if not 1 <= k <= n:
        raise ClusteringError(f"k must be between 1 and the number of rows ({n}), got {k}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(restarts, 1)):
        first = int(rng.integers(n))
        centroids, labels, inertia = _lloyd(Z, farthest_point_init(Z, k, first), max_iters)
        if np.bincount(labels, minlength=k).min() == 0:
            continue  # retry with the next seeded start
        if best is None or inertia < best[2]:
            best = (centroids, labels, inertia)
    if best is None:
        raise ClusteringError(
            f"clustering produced an empty cluster on all {restarts} restarts; "
            f"k={k} may exceed the number of distinct rows"
        )
    return best
