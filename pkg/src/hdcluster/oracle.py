"""Brute-force reference implementations for validating the fast paths.

Everything here is deliberately simple and at least quadratic. Apart from
the shared distance primitives in :mod:`hdcluster.metrics` (shared so float
results agree bitwise), no code is shared with the accelerated modules: no
space trees, no union-find, no dual-tree machinery.
"""

import itertools

import numpy as np

from .boruvka import MstEdgeList
from .metrics import check_metric, pairwise_block, validate_points

MATRIX_POINT_LIMIT = 5000
ANTICHAIN_CLUSTER_LIMIT = 20


def distance_matrix(points, metric):
    """Full matrix of raw pairwise distances (guarded at 5000 points)."""
    points = validate_points(points)
    metric = check_metric(metric)
    n = points.shape[0]
    if n > MATRIX_POINT_LIMIT:
        raise ValueError(
            f"refusing to materialize a {n}x{n} distance matrix "
            f"(limit {MATRIX_POINT_LIMIT})"
        )
    out = np.empty((n, n))
    chunk = max(1, min(n, 512))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        out[s:e] = pairwise_block(metric, points[s:e], points)
    return out


def brute_knn(points, metric, k):
    """Exhaustive k nearest neighbors for every point, ties by lower index.

    Returns a list of per-point lists of (index, distance) pairs, each
    ascending by (distance, index). The count includes the point itself.
    """
    points = validate_points(points)
    n = points.shape[0]
    k = int(k)
    if k < 1 or k > n:
        raise ValueError(f"k must be within [1, {n}], got {k}")
    dists = distance_matrix(points, metric)
    result = []
    idx = np.arange(n)
    for i in range(n):
        order = np.lexsort((idx, dists[i]))[:k]
        result.append([(int(j), float(dists[i, j])) for j in order])
    return result


def mutual_reachability_matrix(points, metric, k):
    """Full matrix of mutual reachability distances (zero diagonal)."""
    dists = distance_matrix(points, metric)
    core = np.sort(dists, axis=1)[:, int(k) - 1]
    mreach = np.maximum(dists, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mreach, 0.0)
    return mreach


def prim_mst_mreach(points, metric, k):
    """Exact MST of the mutual reachability graph via dense Prim.

    Deterministic: the next vertex is the unattached one with the smallest
    key, ties to the lowest index; attachments update on strict improvement
    only.
    """
    points = validate_points(points)
    n = points.shape[0]
    if n == 1:
        return MstEdgeList(
            point_a=np.empty(0, dtype=np.intp),
            point_b=np.empty(0, dtype=np.intp),
            weight=np.empty(0),
            n_points=1,
        )
    mreach = mutual_reachability_matrix(points, metric, k)
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    attach = np.full(n, -1, dtype=np.intp)
    in_tree[0] = True
    key[0] = 0.0
    improved = mreach[0] < key
    key[improved] = mreach[0][improved]
    attach[improved] = 0
    edges_a, edges_b, weights = [], [], []
    for _ in range(n - 1):
        masked = np.where(in_tree, np.inf, key)
        v = int(np.argmin(masked))
        u = int(attach[v])
        edges_a.append(min(u, v))
        edges_b.append(max(u, v))
        weights.append(float(key[v]))
        in_tree[v] = True
        improved = ~in_tree & (mreach[v] < key)
        key[improved] = mreach[v][improved]
        attach[improved] = v
    return MstEdgeList(
        point_a=np.array(edges_a, dtype=np.intp),
        point_b=np.array(edges_b, dtype=np.intp),
        weight=np.array(weights),
        n_points=n,
    )


def dbscan_star_reference(points, metric, epsilon, k):
    """Definition-checking flat clustering at a fixed distance scale.

    Core points have at least k dataset points (self included) inside their
    open epsilon-ball. Edges join mutually epsilon-contained core pairs;
    connected components of two or more core points are clusters (numbered
    by lowest member index); everything else is noise.
    """
    points = validate_points(points)
    epsilon = float(epsilon)
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    n = points.shape[0]
    dists = distance_matrix(points, metric)
    is_core = (dists < epsilon).sum(axis=1) >= int(k)
    labels = np.full(n, -1, dtype=np.intp)
    visited = np.zeros(n, dtype=bool)
    next_label = 0
    for i in range(n):
        if not is_core[i] or visited[i]:
            continue
        members = [i]
        visited[i] = True
        frontier = [i]
        while frontier:
            u = frontier.pop()
            reachable = np.flatnonzero(is_core & ~visited & (dists[u] < epsilon))
            for v in reachable:
                visited[v] = True
                members.append(int(v))
                frontier.append(int(v))
        if len(members) >= 2:
            labels[members] = next_label
            next_label += 1
    return labels


def brute_antichain_best(condensed, sigma, allow_single_cluster=False):
    """Exhaustive optimum of the non-overlapping cluster selection problem.

    Enumerates every antichain of the condensed cluster forest (root
    included only when ``allow_single_cluster``) and returns
    ``(best_total, best_antichain)``. Refuses beyond 20 clusters.
    """
    children = condensed.cluster_children()
    clusters = condensed.cluster_ids()
    if len(clusters) > ANTICHAIN_CLUSTER_LIMIT:
        raise ValueError(
            f"too many clusters for exhaustive enumeration "
            f"({len(clusters)} > {ANTICHAIN_CLUSTER_LIMIT})"
        )
    candidates = [
        c for c in clusters if allow_single_cluster or c != condensed.root
    ]
    ancestors = {}
    for c in clusters:
        for child in children.get(c, ()):  # direct edges; closure below
            ancestors.setdefault(child, set()).add(c)

    def all_ancestors(c):
        out = set()
        frontier = list(ancestors.get(c, ()))
        while frontier:
            a = frontier.pop()
            if a not in out:
                out.add(a)
                frontier.extend(ancestors.get(a, ()))
        return out

    closure = {c: all_ancestors(c) for c in candidates}
    best_total = 0.0
    best_set = ()
    for r in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, r):
            chosen = set(combo)
            if any(closure[c] & chosen for c in combo):
                continue
            total = sum(sigma[c] for c in combo)
            if total > best_total:
                best_total = total
                best_set = tuple(sorted(chosen))
    return best_total, best_set
