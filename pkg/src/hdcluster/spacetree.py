"""Axis-aligned space-partitioning tree with dual-tree node statistics.

The tree is stored as flat arrays in construction (pre-order) order, so a
node's id is always smaller than its children's ids. Leaves own contiguous,
index-sorted slices of a point permutation. Every node carries the tight
bounding box of its descendant points, the box center, and two radii
measured from that center: the maximum distance to the node's own (held)
points and the maximum distance to any descendant point. The descendant
radius is clamped to be monotone down the tree (parent >= child), which the
traversal pruning bound requires.
"""

from dataclasses import dataclass, field

import numpy as np

from .metrics import (
    _box_gap_rows,
    check_metric,
    point_distances,
    validate_points,
)

DEFAULT_LEAF_SIZE = 40


@dataclass
class TreeNode:
    """Read-only view of one tree node (testing / inspection surface)."""

    node_id: int
    region: tuple  # (lower, upper) per-dimension bounds
    points: np.ndarray | None  # canonical indices; None for internal nodes
    children: tuple
    parent: int | None
    centroid: np.ndarray
    point_radius: float
    descendant_radius: float


@dataclass
class SpaceTree:
    """Space-partitioning tree over an immutable point set."""

    data: np.ndarray
    metric: object
    leaf_size: int
    lower: np.ndarray = field(repr=False, default=None)
    upper: np.ndarray = field(repr=False, default=None)
    centroid: np.ndarray = field(repr=False, default=None)
    point_radius: np.ndarray = field(repr=False, default=None)
    descendant_radius: np.ndarray = field(repr=False, default=None)
    left: np.ndarray = field(repr=False, default=None)
    right: np.ndarray = field(repr=False, default=None)
    parent: np.ndarray = field(repr=False, default=None)
    start: np.ndarray = field(repr=False, default=None)
    end: np.ndarray = field(repr=False, default=None)
    point_permutation: np.ndarray = field(repr=False, default=None)
    # List-of-list mirrors of the box arrays for the scalar hot paths.
    lower_rows: list = field(repr=False, default=None)
    upper_rows: list = field(repr=False, default=None)

    root = 0

    @property
    def n_points(self):
        return self.data.shape[0]

    @property
    def n_nodes(self):
        return self.lower.shape[0]

    def is_leaf(self, node_id):
        return self.left[node_id] < 0

    def leaf_points(self, node_id):
        """Canonical indices held by a leaf, ascending."""
        return self.point_permutation[self.start[node_id] : self.end[node_id]]

    def descendant_points(self, node_id):
        """Canonical indices of all points under a node."""
        return self.point_permutation[self.start[node_id] : self.end[node_id]]

    def children(self, node_id):
        if self.is_leaf(node_id):
            return ()
        return (int(self.left[node_id]), int(self.right[node_id]))

    def node(self, node_id):
        pts = np.sort(self.leaf_points(node_id)) if self.is_leaf(node_id) else None
        parent = int(self.parent[node_id])
        return TreeNode(
            node_id=int(node_id),
            region=(self.lower[node_id].copy(), self.upper[node_id].copy()),
            points=pts,
            children=self.children(node_id),
            parent=None if parent < 0 else parent,
            centroid=self.centroid[node_id].copy(),
            point_radius=float(self.point_radius[node_id]),
            descendant_radius=float(self.descendant_radius[node_id]),
        )


def build(points, metric="euclidean", leaf_size=DEFAULT_LEAF_SIZE):
    """Build a space tree by median splits along the widest dimension.

    Splits pick the dimension of largest coordinate spread (ties to the
    lowest dimension index) and divide the node's points at the median of
    (coordinate, point index) order, so construction is fully deterministic.

    Parameters
    ----------
    points : array-like of shape (n_points, n_dims)
    metric : builtin metric name or callable
    leaf_size : int
        Maximum number of points per leaf (>= 1).
    """
    data = validate_points(points)
    metric = check_metric(metric)
    leaf_size = int(leaf_size)
    if leaf_size < 1:
        raise ValueError(f"leaf_size must be >= 1, got {leaf_size}")

    n = data.shape[0]
    perm = np.arange(n, dtype=np.intp)
    lower, upper, centroids = [], [], []
    point_radius, descendant_radius = [], []
    left, right, parent, start, end = [], [], [], [], []

    def allocate(s, e, parent_id):
        node_id = len(lower)
        block = data[perm[s:e]]
        lo = block.min(axis=0)
        hi = block.max(axis=0)
        lower.append(lo)
        upper.append(hi)
        centroids.append((lo + hi) * 0.5)
        point_radius.append(0.0)
        descendant_radius.append(0.0)
        left.append(-1)
        right.append(-1)
        parent.append(parent_id)
        start.append(s)
        end.append(e)
        return node_id

    def build_range(s, e, parent_id):
        node_id = allocate(s, e, parent_id)
        count = e - s
        center = centroids[node_id]
        if count <= leaf_size:
            perm[s:e] = np.sort(perm[s:e])
            dists = point_distances(metric, data[perm[s:e]], center)
            radius = float(dists.max())
            point_radius[node_id] = radius
            descendant_radius[node_id] = radius
            return node_id
        spread = upper[node_id] - lower[node_id]
        dim = int(np.argmax(spread))
        chunk = perm[s:e]
        order = np.lexsort((chunk, data[chunk, dim]))
        perm[s:e] = chunk[order]
        mid = s + count // 2
        left[node_id] = build_range(s, mid, node_id)
        right[node_id] = build_range(mid, e, node_id)
        dists = point_distances(metric, data[perm[s:e]], center)
        # Clamp to children so the descendant radius is monotone down the
        # tree; the exact per-node value alone does not guarantee that.
        descendant_radius[node_id] = max(
            float(dists.max()),
            descendant_radius[left[node_id]],
            descendant_radius[right[node_id]],
        )
        return node_id

    build_range(0, n, -1)

    lower_arr = np.array(lower)
    upper_arr = np.array(upper)
    return SpaceTree(
        data=data,
        metric=metric,
        leaf_size=leaf_size,
        lower=lower_arr,
        upper=upper_arr,
        centroid=np.array(centroids),
        point_radius=np.array(point_radius),
        descendant_radius=np.array(descendant_radius),
        left=np.array(left, dtype=np.intp),
        right=np.array(right, dtype=np.intp),
        parent=np.array(parent, dtype=np.intp),
        start=np.array(start, dtype=np.intp),
        end=np.array(end, dtype=np.intp),
        point_permutation=perm,
        lower_rows=lower_arr.tolist(),
        upper_rows=upper_arr.tolist(),
    )


def node_min_distance(tree, a, b):
    """Lower bound on the minimum distance between two nodes' points.

    Computed from the bounding regions only; 0.0 when the regions overlap
    (and always 0.0 for user-supplied metrics, which disables pruning but
    preserves correctness).
    """
    metric = tree.metric
    if callable(metric):
        return 0.0
    return _box_gap_rows(
        metric,
        tree.lower_rows[a],
        tree.upper_rows[a],
        tree.lower_rows[b],
        tree.upper_rows[b],
    )


def knn(tree, query, k):
    """The k nearest dataset points to ``query``, ascending by distance.

    Returns a list of ``(point_index, distance)`` pairs. Matches brute force
    exactly, including on distance ties, which are broken by the lower point
    index.
    """
    k = int(k)
    n = tree.n_points
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points ({n}); reduce k")
    query = np.asarray(query, dtype=np.float64).ravel()
    if query.shape[0] != tree.data.shape[1]:
        raise ValueError(
            f"dimension mismatch: query dim {query.shape[0]} vs data dim {tree.data.shape[1]}"
        )
    dists, idxs = _knn_arrays(tree, query, k)
    return [(int(i), float(d)) for i, d in zip(idxs, dists)]


def _knn_arrays(tree, query, k):
    metric = tree.metric
    fast = not callable(metric)
    data = tree.data
    lo_rows, hi_rows = tree.lower_rows, tree.upper_rows
    row = list(query)
    best_d = np.full(k, np.inf)
    best_i = np.full(k, -1, dtype=np.intp)
    worst = np.inf
    left, right = tree.left, tree.right
    stack = [(tree.root, 0.0)]
    while stack:
        node_id, gap = stack.pop()
        if gap > worst:
            continue
        l = left[node_id]
        if l < 0:
            pts = tree.leaf_points(node_id)
            d = point_distances(metric, data[pts], query)
            cat_d = np.concatenate([best_d, d])
            cat_i = np.concatenate([best_i, pts])
            order = np.lexsort((cat_i, cat_d))[:k]
            best_d = cat_d[order]
            best_i = cat_i[order]
            worst = best_d[-1]
            continue
        r = right[node_id]
        if fast:
            gap_l = _box_gap_rows(metric, lo_rows[l], hi_rows[l], row, row)
            gap_r = _box_gap_rows(metric, lo_rows[r], hi_rows[r], row, row)
        else:
            gap_l = gap_r = 0.0
        # Push the farther child first so the nearer one is explored next.
        if gap_l <= gap_r:
            stack.append((r, gap_r))
            stack.append((l, gap_l))
        else:
            stack.append((l, gap_l))
            stack.append((r, gap_r))
    return best_d, best_i
