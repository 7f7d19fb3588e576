"""Point-set validation and distance metric evaluation.

Everything downstream (trees, Boruvka, the brute-force oracle) computes
distances through the block helpers in this module so that the accelerated
and reference code paths produce bit-identical floating point values.
"""

import math

import numpy as np

BUILTIN_METRICS = ("euclidean", "manhattan", "chebyshev")


class InternalInvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


def validate_points(data):
    """Validate and convert raw input into the canonical N x D float64 matrix.

    Parameters
    ----------
    data : array-like of shape (n_points, n_dims)
        Row-per-point coordinates. A 1-D array is treated as single-feature
        data of shape (n_points, 1).

    Returns
    -------
    ndarray of float64, C-contiguous, shape (n_points, n_dims)

    Raises
    ------
    ValueError
        If the input is empty, not 1-D/2-D, or contains NaN/infinity.
    """
    points = np.ascontiguousarray(data, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2:
        raise ValueError(
            f"points must be a 2-D array, got {points.ndim} dimensions"
        )
    if points.shape[0] < 1 or points.shape[1] < 1:
        raise ValueError(
            f"points must have at least one row and one column, got shape {points.shape}"
        )
    if not np.isfinite(points).all():
        raise ValueError("points contain non-finite values (NaN or infinity)")
    return points


def check_metric(metric):
    """Return a validated metric: a builtin name or a user callable d(a, b)."""
    if callable(metric):
        return metric
    if metric in BUILTIN_METRICS:
        return metric
    raise ValueError(
        f"unknown metric {metric!r}; expected one of {BUILTIN_METRICS} or a callable"
    )


def distance(metric, a, b):
    """Distance between two points under the given metric.

    The two points must have equal dimension and finite coordinates.
    Symmetric and deterministic; raises ValueError on dimension mismatch.
    """
    metric = check_metric(metric)
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(
            f"dimension mismatch: point of dim {a.shape[0]} vs dim {b.shape[0]}"
        )
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("points contain non-finite values (NaN or infinity)")
    if callable(metric):
        return float(metric(a, b))
    diff = a - b
    if metric == "euclidean":
        return float(np.sqrt(np.sum(diff * diff)))
    if metric == "manhattan":
        return float(np.sum(np.abs(diff)))
    return float(np.max(np.abs(diff)))


def point_distances(metric, points, query):
    """Distances from ``query`` to every row of ``points`` (1-D float64)."""
    if callable(metric):
        return np.array([metric(row, query) for row in points], dtype=np.float64)
    diff = points - query
    if metric == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == "manhattan":
        return np.sum(np.abs(diff), axis=-1)
    return np.max(np.abs(diff), axis=-1)


def pairwise_block(metric, a, b):
    """All pairwise distances between rows of ``a`` and rows of ``b``.

    Returns an (len(a), len(b)) float64 matrix. Uses the same elementary
    per-pair arithmetic as :func:`distance` so results agree bitwise.
    """
    if callable(metric):
        out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
        for i, row in enumerate(a):
            for j, col in enumerate(b):
                out[i, j] = metric(row, col)
        return out
    diff = a[:, None, :] - b[None, :, :]
    if metric == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == "manhattan":
        return np.sum(np.abs(diff), axis=-1)
    return np.max(np.abs(diff), axis=-1)


def box_gap(metric, lo_a, hi_a, lo_b, hi_b):
    """Lower bound on the distance between points of two bounding boxes.

    Valid for the builtin metrics because each is monotone in the vector of
    per-coordinate gaps. Returns 0.0 for user-supplied callables (no pruning).
    """
    if callable(metric):
        return 0.0
    return _box_gap_rows(metric, list(lo_a), list(hi_a), list(lo_b), list(hi_b))


def _box_gap_rows(metric, lo_a, hi_a, lo_b, hi_b):
    # Hot path: plain-float arithmetic on list rows beats numpy calls for
    # the small dimensionalities trees are useful at.
    if metric == "euclidean":
        total = 0.0
        for d in range(len(lo_a)):
            g = lo_a[d] - hi_b[d]
            g2 = lo_b[d] - hi_a[d]
            if g2 > g:
                g = g2
            if g > 0.0:
                total += g * g
        return math.sqrt(total)
    if metric == "manhattan":
        total = 0.0
        for d in range(len(lo_a)):
            g = lo_a[d] - hi_b[d]
            g2 = lo_b[d] - hi_a[d]
            if g2 > g:
                g = g2
            if g > 0.0:
                total += g
        return total
    worst = 0.0
    for d in range(len(lo_a)):
        g = lo_a[d] - hi_b[d]
        g2 = lo_b[d] - hi_a[d]
        if g2 > g:
            g = g2
        if g > worst:
            worst = g
    return worst


def box_gap_to_point(metric, lo, hi, query):
    """Lower bound on the distance from ``query`` to any point inside a box."""
    if callable(metric):
        return 0.0
    return _box_gap_rows(metric, list(lo), list(hi), list(query), list(query))
