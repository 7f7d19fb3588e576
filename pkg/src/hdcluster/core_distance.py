"""Core distances and the mutual reachability distance."""

from dataclasses import dataclass

import numpy as np

from .metrics import distance
from .spacetree import _knn_arrays


@dataclass(frozen=True)
class CoreDistances:
    """Per-point distance to the k-th nearest neighbor, self included.

    ``values[i]`` is 0 exactly when at least k points (counting point i
    itself) share point i's coordinates. The neighbor arrays retain the
    full k-NN result ascending by (distance, index); downstream search
    seeds its first round from them.
    """

    values: np.ndarray
    k: int
    neighbor_indices: np.ndarray = None  # (n, k) point indices
    neighbor_distances: np.ndarray = None  # (n, k) distances


def core_distances(tree, points, k):
    """Compute every point's core distance via k-NN queries on the tree.

    Parameters
    ----------
    tree : SpaceTree
        Built over ``points`` with the metric to use.
    points : ndarray
        The same matrix the tree was built on (canonical row order).
    k : int
        Neighbor count, 1 <= k <= n_points. The count includes the query
        point itself, so k=1 gives all zeros.
    """
    k = int(k)
    n = tree.n_points
    if k < 1:
        raise ValueError(f"min_samples (k) must be >= 1, got {k}")
    if k > n:
        raise ValueError(
            f"min_samples (k={k}) exceeds the number of points ({n}); reduce k"
        )
    indices = np.empty((n, k), dtype=np.intp)
    dists = np.empty((n, k), dtype=np.float64)
    data = tree.data
    for i in range(n):
        dists[i], indices[i] = _knn_arrays(tree, data[i], k)
    return CoreDistances(
        values=dists[:, -1].copy(),
        k=k,
        neighbor_indices=indices,
        neighbor_distances=dists,
    )


def mutual_reachability(core, metric, points, i, j):
    """Mutual reachability distance between points i and j.

    max of the two core distances and the raw distance for i != j; exactly
    0 for i == j.
    """
    if i == j:
        return 0.0
    d = distance(metric, points[i], points[j])
    return max(d, float(core.values[i]), float(core.values[j]))
