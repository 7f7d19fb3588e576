"""Cluster stability scoring and stability-optimal flat cluster extraction."""

from dataclasses import dataclass

import numpy as np

from .metrics import InternalInvariantError


@dataclass(frozen=True)
class FlatClustering:
    """Final labels (-1 noise, 0..K-1 clusters) and the selection behind them."""

    labels: np.ndarray
    selected: tuple
    n_clusters: int


def stability(condensed):
    """Stability of every cluster: the lambda range its members span inside it.

    For each condensed-tree row the child contributes
    ``(lambda_val - birth_lambda(parent)) * child_size`` to its parent's
    score; a point leaving via a true split is accounted through the child
    cluster's row. Works in extended reals: an infinite fall-out lambda over
    a finite birth gives infinite stability, while an infinite range start
    and end (duplicate-point pathologies) contributes zero.
    """
    birth = condensed.birth_lambda()
    sigma = {c: 0.0 for c in condensed.cluster_ids()}
    for p, lam, size in zip(
        condensed.parent, condensed.lambda_val, condensed.child_size
    ):
        born = birth[int(p)]
        if np.isinf(lam) and np.isinf(born):
            continue  # zero-length range at infinity
        sigma[int(p)] += (lam - born) * int(size)
    return sigma


def select_clusters(condensed, sigma, allow_single_cluster=False):
    """Choose the non-overlapping cluster set maximizing total stability.

    Bottom-up dynamic program over the condensed cluster forest: a cluster
    is kept when its own stability is at least the best total achievable by
    its descendants (ties keep the ancestor). The root is excluded unless
    ``allow_single_cluster`` is set, in which case it may win like any other
    cluster.
    """
    children = condensed.cluster_children()
    best = {}
    chosen = {}
    for c in sorted(condensed.cluster_ids(), reverse=True):
        kids = children.get(c, [])
        if not kids:
            best[c] = sigma[c]
            chosen[c] = (c,)
            continue
        subtotal = sum(best[k] for k in kids)
        if sigma[c] >= subtotal:
            best[c] = sigma[c]
            chosen[c] = (c,)
        else:
            best[c] = subtotal
            chosen[c] = tuple(x for k in kids for x in chosen[k])
    root = condensed.root
    if allow_single_cluster:
        return set(chosen[root])
    return {x for k in children.get(root, []) for x in chosen[k]}


def assign_labels(condensed, selected):
    """Materialize labels from a selected antichain of condensed clusters.

    A selected cluster's points are every point falling out of it or any of
    its condensed descendants. Labels number the selected clusters 0..K-1 in
    ascending cluster-id order; all other points are -1.
    """
    selected = sorted(selected)
    selected_set = set(selected)
    children = condensed.cluster_children()

    point_rows = {}
    for p, c in zip(condensed.parent, condensed.child):
        if c < condensed.n_points:
            point_rows.setdefault(int(p), []).append(int(c))

    labels = np.full(condensed.n_points, -1, dtype=np.intp)
    for label, cid in enumerate(selected):
        stack = [cid]
        while stack:
            c = stack.pop()
            if c != cid and c in selected_set:
                raise InternalInvariantError(
                    f"selected clusters {cid} and {c} overlap (not an antichain)"
                )
            for point in point_rows.get(c, ()):
                if labels[point] != -1:
                    raise InternalInvariantError(
                        f"point {point} claimed by two selected clusters"
                    )
                labels[point] = label
            stack.extend(children.get(c, ()))
    return FlatClustering(
        labels=labels, selected=tuple(selected), n_clusters=len(selected)
    )
