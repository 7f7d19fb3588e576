"""Single-linkage dendrogram construction and condensed-tree smoothing.

Inverse distance (lambda = 1/epsilon) is represented in extended reals:
merges at distance zero (exact duplicate points) produce infinite lambda
values, which the stability arithmetic downstream treats as dominating any
finite value.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .metrics import InternalInvariantError
from .union_find import UnionFind


@dataclass(frozen=True)
class Dendrogram:
    """Single-linkage merge sequence.

    ``merges`` has one row (left_id, right_id, distance, size) per merge in
    nondecreasing distance order. Ids 0..n-1 are points; id n+t is the
    cluster created by merge t. Stored as float64; ids are exact integers.
    """

    merges: np.ndarray
    n_points: int

    @property
    def n_merges(self):
        return self.merges.shape[0]

    def cluster_size(self, node_id):
        if node_id < self.n_points:
            return 1
        return int(self.merges[node_id - self.n_points, 3])

    def children(self, node_id):
        row = self.merges[node_id - self.n_points]
        return int(row[0]), int(row[1])

    def leaves(self, node_id):
        """Point indices under a dendrogram node, ascending."""
        out = []
        stack = [node_id]
        while stack:
            node = stack.pop()
            if node < self.n_points:
                out.append(node)
            else:
                stack.extend(self.children(node))
        out.sort()
        return out


@dataclass(frozen=True)
class CondensedTree:
    """Minimum-cluster-size smoothed cluster tree.

    Rows are (parent, child, lambda_val, child_size). The root cluster id is
    ``n_points``; further clusters are numbered in breadth-first discovery
    order. A child below ``n_points`` is a point falling out of its parent
    (child_size 1); larger children are true-split subclusters recorded at
    the lambda of the split.
    """

    parent: np.ndarray
    child: np.ndarray
    lambda_val: np.ndarray
    child_size: np.ndarray
    n_points: int

    @property
    def n_rows(self):
        return self.parent.shape[0]

    @property
    def root(self):
        return self.n_points

    def cluster_ids(self):
        """All cluster ids, ascending (root first)."""
        ids = set(self.parent.tolist())
        ids.update(c for c in self.child.tolist() if c >= self.n_points)
        ids.add(self.root)
        return sorted(ids)

    def cluster_children(self):
        """Map cluster id -> list of cluster-typed child ids (row order)."""
        out = {c: [] for c in self.cluster_ids()}
        for p, c in zip(self.parent, self.child):
            if c >= self.n_points:
                out[int(p)].append(int(c))
        return out

    def birth_lambda(self):
        """Map cluster id -> lambda at which the cluster came into being."""
        birth = {self.root: 0.0}
        for p, c, lam in zip(self.parent, self.child, self.lambda_val):
            if c >= self.n_points:
                birth[int(c)] = float(lam)
        return birth

    def point_members(self, cluster_id):
        """Points that fall out of the cluster or any condensed descendant."""
        children = self.cluster_children()
        points = []
        stack = [cluster_id]
        point_rows = {}
        for p, c in zip(self.parent, self.child):
            if c < self.n_points:
                point_rows.setdefault(int(p), []).append(int(c))
        while stack:
            cid = stack.pop()
            points.extend(point_rows.get(cid, ()))
            stack.extend(children.get(cid, ()))
        return np.array(sorted(points), dtype=np.intp)


def single_linkage(mst, n):
    """Replay MST edges in weight order into a dendrogram.

    Edges are processed in ascending (weight, i, j) order; merge t records
    the two current cluster ids and assigns the new cluster id n+t. Cluster
    membership at any threshold equals the connected components of the MST
    edges at or below it.
    """
    if n == 1:
        return Dendrogram(merges=np.empty((0, 4)), n_points=1)
    if mst.n_edges != n - 1:
        raise InternalInvariantError(
            f"spanning tree over {n} points needs {n - 1} edges, got {mst.n_edges}"
        )
    order = np.lexsort((mst.point_b, mst.point_a, mst.weight))
    forest = UnionFind(n)
    cluster_id = np.arange(n, dtype=np.intp)
    cluster_size = np.ones(n, dtype=np.intp)
    merges = np.empty((n - 1, 4))
    for t, e in enumerate(order):
        a, b = int(mst.point_a[e]), int(mst.point_b[e])
        ra, rb = forest.find(a), forest.find(b)
        if ra == rb:
            raise InternalInvariantError("MST edge list contains a cycle")
        left, right = cluster_id[ra], cluster_id[rb]
        size = cluster_size[ra] + cluster_size[rb]
        merges[t] = (left, right, mst.weight[e], size)
        forest.union(a, b)
        root = forest.find(a)
        cluster_id[root] = n + t
        cluster_size[root] = size
    return Dendrogram(merges=merges, n_points=n)


def _inverse(distance):
    if distance <= 0.0:
        return np.inf
    return 1.0 / distance


def _split_components(dendrogram, node, dist):
    """Subtrees hanging below the run of merges at exactly ``dist``.

    A run of merges at one distance is a single multi-way event: the
    returned nodes are the connected components just below that level,
    which depend only on the underlying graph, not on which of the tied
    edges the spanning tree happened to use.
    """
    n = dendrogram.n_points
    parts = []
    stack = [node]
    while stack:
        x = stack.pop()
        if x >= n and dendrogram.merges[x - n, 2] == dist:
            left, right = dendrogram.children(x)
            stack.append(right)
            stack.append(left)
        else:
            parts.append(x)
    parts.reverse()
    return parts


def condense(dendrogram, min_cluster_size):
    """Smooth a dendrogram into the condensed cluster tree.

    Walking from the root down, each split event is classified by child
    sizes against ``min_cluster_size`` (m). Merges at exactly equal
    distances are treated as one multi-way event, so the result is
    identical for every minimum spanning tree of the same graph. Children
    smaller than m drop their points out of the parent at the split lambda;
    a single surviving large child continues the parent cluster; two or
    more large children make a true split, each born at the split lambda.
    """
    m = int(min_cluster_size)
    if m < 2:
        raise ValueError(f"min_cluster_size must be >= 2, got {m}")
    n = dendrogram.n_points
    parents, children, lambdas, sizes = [], [], [], []

    def emit(parent, child, lam, size):
        parents.append(parent)
        children.append(child)
        lambdas.append(lam)
        sizes.append(size)

    if n == 1:
        # A lone point never leaves the root by splitting; record it at the
        # top of the lambda scale so every point appears exactly once.
        emit(n, 0, np.inf, 1)
        return _as_condensed(parents, children, lambdas, sizes, n)

    queue = deque([(2 * n - 2, n)])
    next_id = n + 1
    while queue:
        node, cid = queue.popleft()
        while True:
            dist = dendrogram.merges[node - n, 2]
            lam = _inverse(dist)
            parts = _split_components(dendrogram, node, dist)
            large = [p for p in parts if dendrogram.cluster_size(p) >= m]
            for p in parts:
                if dendrogram.cluster_size(p) < m:
                    for point in dendrogram.leaves(p):
                        emit(cid, point, lam, 1)
            if len(large) >= 2:
                for part in large:
                    emit(cid, next_id, lam, dendrogram.cluster_size(part))
                    queue.append((part, next_id))
                    next_id += 1
                break
            if len(large) == 1:
                node = large[0]
                continue
            break
    return _as_condensed(parents, children, lambdas, sizes, n)


def _as_condensed(parents, children, lambdas, sizes, n):
    return CondensedTree(
        parent=np.array(parents, dtype=np.intp),
        child=np.array(children, dtype=np.intp),
        lambda_val=np.array(lambdas, dtype=np.float64),
        child_size=np.array(sizes, dtype=np.intp),
        n_points=n,
    )


def dbscan_star_cut(dendrogram, core, epsilon):
    """Flat labels equivalent to clustering at one fixed distance scale.

    Connected components of the dendrogram merges at distance <= epsilon,
    restricted to points whose core distance is <= epsilon; components with
    fewer than two such points, and all higher-core-distance points, are
    noise (-1).
    """
    epsilon = float(epsilon)
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    n = dendrogram.n_points
    forest = UnionFind(n)
    representative = np.arange(2 * n - 1 if n > 1 else 1, dtype=np.intp)
    for t in range(dendrogram.n_merges):
        left, right, dist, _ = dendrogram.merges[t]
        if dist > epsilon:
            break
        a, b = representative[int(left)], representative[int(right)]
        forest.union(a, b)
        representative[n + t] = a
    comp = forest.component_labels()
    labels = np.full(n, -1, dtype=np.intp)
    core_idx = np.flatnonzero(core.values <= epsilon)
    if core_idx.shape[0] == 0:
        return labels
    uniq, inverse, counts = np.unique(
        comp[core_idx], return_inverse=True, return_counts=True
    )
    # Components keeping >= 2 core points become clusters, numbered by the
    # lowest point index they contain.
    first_pos = np.full(uniq.shape[0], core_idx.shape[0], dtype=np.intp)
    np.minimum.at(first_pos, inverse, np.arange(core_idx.shape[0], dtype=np.intp))
    big = np.flatnonzero(counts >= 2)
    label_of = np.full(uniq.shape[0], -1, dtype=np.intp)
    label_of[big[np.argsort(first_pos[big], kind="stable")]] = np.arange(
        big.shape[0], dtype=np.intp
    )
    labels[core_idx] = label_of[inverse]
    return labels
