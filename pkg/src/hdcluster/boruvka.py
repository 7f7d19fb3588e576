"""Dual-tree Boruvka minimum spanning tree under mutual reachability.

Each Boruvka round finds, for every forest component, the minimum-weight
edge leaving it, then merges components along those edges. The search for
per-component nearest external points runs as a self dual-tree traversal
(query tree == reference tree) with three pruning devices:

* same-component pruning: node pairs whose descendant points all live in
  one shared component cannot yield an edge;
* a per-query-node pruning bound tracking the largest candidate distance
  still needed by any component below the node, tightened through cached
  child and parent bounds;
* core-distance filtering: a point whose core distance already exceeds its
  component's candidate distance cannot improve it, because mutual
  reachability is at least either endpoint's core distance.

Candidate updates are ordered by (distance, source index, candidate index),
so the final state of a round does not depend on traversal order and
repeated runs are bitwise reproducible.

``fast_ties`` mode re-runs the traversal after each merge round with the
previous round's (now stale) pruning bounds frozen in place, harvesting
edges at tied and near-tied distances cheaply. Stale bounds can prune pairs
a fresh round would inspect, so the result is only guaranteed to be a
spanning tree, not a minimal one.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import InternalInvariantError, _box_gap_rows, pairwise_block
from .union_find import UnionFind

PRUNE = math.inf

MODES = ("exact", "fast_ties")


@dataclass
class MstEdgeList:
    """Spanning tree edges (point_a < point_b) plus traversal statistics."""

    point_a: np.ndarray
    point_b: np.ndarray
    weight: np.ndarray
    n_points: int
    base_case_count: int = 0
    n_rounds: int = 0

    @property
    def n_edges(self):
        return self.weight.shape[0]

    @property
    def total_weight(self):
        return float(self.weight.sum())

    def sorted_weights(self):
        return np.sort(self.weight)


@dataclass
class BoruvkaState:
    """Mutable search state shared by one Boruvka run."""

    tree: object
    points: np.ndarray
    core: np.ndarray  # per-point core distance
    forest: UnionFind
    candidate_distance: np.ndarray  # per component root: best distance found
    candidate_point: np.ndarray  # per component root: external endpoint
    source_point: np.ndarray  # per component root: internal endpoint
    point_component: np.ndarray  # per point: component root (fixed per pass)
    node_component: np.ndarray  # per node: shared component root or -1 (mixed)
    node_bound: np.ndarray  # per node: cached pruning bound
    node_min_core: np.ndarray  # per node: min core distance below it
    frozen_bounds: bool = False
    base_case_count: int = 0
    _leaf_components: list = field(default_factory=list, repr=False)
    _min_core_rows: list = field(default=None, repr=False)

    def component_of(self, p):
        return int(self.point_component[p])

    def leaf_component_ids(self, node_id):
        cached = self._leaf_components[node_id]
        if cached is None:
            cached = self.point_component[self.tree.leaf_points(node_id)]
            self._leaf_components[node_id] = cached
        return cached


def make_state(tree, points, core):
    n = tree.n_points
    n_nodes = tree.n_nodes
    state = BoruvkaState(
        tree=tree,
        points=points,
        core=core.values,
        forest=UnionFind(n),
        candidate_distance=np.full(n, np.inf),
        candidate_point=np.full(n, -1, dtype=np.intp),
        source_point=np.full(n, -1, dtype=np.intp),
        point_component=np.arange(n, dtype=np.intp),
        node_component=np.full(n_nodes, -1, dtype=np.intp),
        node_bound=np.full(n_nodes, np.inf),
        node_min_core=np.empty(n_nodes),
    )
    for node_id in range(n_nodes - 1, -1, -1):
        if tree.is_leaf(node_id):
            state.node_min_core[node_id] = state.core[tree.leaf_points(node_id)].min()
        else:
            l, r = tree.left[node_id], tree.right[node_id]
            state.node_min_core[node_id] = min(
                state.node_min_core[l], state.node_min_core[r]
            )
    state._min_core_rows = state.node_min_core.tolist()
    begin_pass(state, reset_bounds=True)
    return state


def begin_pass(state, reset_bounds):
    """Prepare one traversal pass: refresh component labels, clear candidates."""
    tree = state.tree
    state.point_component = state.forest.component_labels()
    state._leaf_components = [None] * tree.n_nodes
    node_component = state.node_component
    for node_id in range(tree.n_nodes - 1, -1, -1):
        if tree.is_leaf(node_id):
            comps = state.leaf_component_ids(node_id)
            first = comps[0]
            node_component[node_id] = first if (comps == first).all() else -1
        else:
            a = node_component[tree.left[node_id]]
            b = node_component[tree.right[node_id]]
            node_component[node_id] = a if (a == b and a >= 0) else -1
    state.candidate_distance.fill(np.inf)
    state.candidate_point.fill(-1)
    state.source_point.fill(-1)
    if reset_bounds:
        state.node_bound.fill(np.inf)
    state.frozen_bounds = not reset_bounds


def base_case(p_q, p_r, state):
    """Offer the pair (p_q, p_r) as a candidate edge for p_q's component.

    No-op when the points are identical or share a component. Otherwise the
    mutual reachability distance is computed and the component's candidate
    is replaced when (dist, p_q, p_r) orders strictly below the incumbent
    (distance first, then source index, then candidate index). Never touches
    the forest.
    """
    state.base_case_count += 1
    if p_q == p_r:
        return
    c_q = state.component_of(p_q)
    if c_q == state.component_of(p_r):
        return
    d = pairwise_block(
        state.tree.metric, state.points[p_q : p_q + 1], state.points[p_r : p_r + 1]
    )[0, 0]
    dist = max(d, float(state.core[p_q]), float(state.core[p_r]))
    incumbent = (
        state.candidate_distance[c_q],
        state.source_point[c_q],
        state.candidate_point[c_q],
    )
    if (dist, p_q, p_r) < incumbent:
        state.candidate_distance[c_q] = dist
        state.source_point[c_q] = p_q
        state.candidate_point[c_q] = p_r


def _child_bound(node, state):
    # A child's cached bound, sharpened to the exact requirement when all
    # of its points share one component.
    bound = state.node_bound[node]
    comp = state.node_component[node]
    if comp >= 0:
        exact = state.candidate_distance[comp]
        if exact < bound:
            return exact
    return bound


def compute_bound(node_q, state):
    """Pruning bound for a query node; reference pairs at or beyond it are safe to skip.

    The bound upper-bounds the largest candidate distance over the
    components holding the node's descendant points: a pair whose distance
    reaches it cannot strictly improve any of those components. It is the
    candidate distance itself when the node is single-component, the max
    over the held points' components at a leaf, the max of the child
    bounds otherwise, always capped by the parent's cached bound along the
    current traversal path. Neighbor-candidate transfer terms (via the
    node radii) are deliberately not used: a nearby point's candidate can
    lie inside another point's own component, so distances bounded through
    it do not limit what that component still needs.

    Recomputing is always sound because candidate distances only shrink
    within a pass, so every cached value stays at or above the true
    requirement.
    """
    tree = state.tree
    comp = state.node_component[node_q]
    if comp >= 0:
        bound = state.candidate_distance[comp]
    elif tree.is_leaf(node_q):
        bound = float(
            state.candidate_distance[state.leaf_component_ids(node_q)].max()
        )
    else:
        bound = max(
            _child_bound(tree.left[node_q], state),
            _child_bound(tree.right[node_q], state),
        )
    parent = tree.parent[node_q]
    if parent >= 0:
        bound = min(bound, state.node_bound[parent])
    state.node_bound[node_q] = bound
    return bound


def _node_pair_lower_bound(node_q, node_r, state):
    # Mutual reachability between the nodes' points is at least the box gap
    # and at least the smallest core distance on either side.
    tree = state.tree
    metric = tree.metric
    if callable(metric):
        gap = 0.0
    else:
        gap = _box_gap_rows(
            metric,
            tree.lower_rows[node_q],
            tree.upper_rows[node_q],
            tree.lower_rows[node_r],
            tree.upper_rows[node_r],
        )
    cores = state._min_core_rows
    floor = cores[node_q]
    other = cores[node_r]
    if other > floor:
        floor = other
    return gap if gap > floor else floor


def score(node_q, node_r, state):
    """PRUNE when the pair cannot improve any candidate, else its distance bound.

    Prunes when every descendant point of both nodes shares one component,
    or when the pair's distance lower bound reaches the query node's pruning
    bound. The returned lower bound doubles as the descent priority.
    """
    c_q = state.node_component[node_q]
    if c_q >= 0 and c_q == state.node_component[node_r]:
        return PRUNE
    d_min = _node_pair_lower_bound(node_q, node_r, state)
    if state.frozen_bounds:
        bound = state.node_bound[node_q]
    else:
        bound = compute_bound(node_q, state)
    if d_min >= bound:
        return PRUNE
    return d_min


def _offer_candidates(state, val, src, cnd, comp):
    """Fold a batch of candidate offers into the per-component state.

    The final state is the lexicographic (distance, source, candidate)
    minimum over everything offered, independent of offer order.
    """
    if val.shape[0] > 2048:
        # Pre-reduce bulk batches to one lex-minimal row per component.
        order = np.lexsort((cnd, src, val))
        _, first = np.unique(comp[order], return_index=True)
        sel = order[first]
        val, src, cnd, comp = val[sel], src[sel], cnd[sel], comp[sel]
    best = {}
    for v, s, c, cm in zip(val.tolist(), src.tolist(), cnd.tolist(), comp.tolist()):
        cur = best.get(cm)
        if cur is None or (v, s, c) < cur:
            best[cm] = (v, s, c)
    cand_dist = state.candidate_distance
    source = state.source_point
    candidate = state.candidate_point
    for cm, (v, s, c) in best.items():
        incumbent = cand_dist[cm]
        if v < incumbent or (
            v == incumbent and (s, c) < (source[cm], candidate[cm])
        ):
            cand_dist[cm] = v
            source[cm] = s
            candidate[cm] = c


def seed_from_neighbors(state, neighbor_indices, neighbor_distances):
    """Prime a pass's candidates from the core-distance k-NN lists.

    Every cross-component (point, neighbor) pair is a genuine candidate
    edge, so offering them up front only tightens the pruning bounds; the
    traversal still verifies nothing better exists.
    """
    n, k = neighbor_indices.shape
    if k < 2:
        return
    src = np.repeat(np.arange(n, dtype=np.intp), k)
    cnd = neighbor_indices.ravel()
    comp_src = np.repeat(state.point_component, k)
    keep = comp_src != state.point_component[cnd]
    if not keep.any():
        return
    src, cnd = src[keep], cnd[keep]
    d = neighbor_distances.ravel()[keep]
    core = state.core
    val = np.maximum(np.maximum(d, core[src]), core[cnd])
    state.base_case_count += int(keep.sum())
    _offer_candidates(state, val, src, cnd, comp_src[keep])


def _leaf_pair(node_q, node_r, state):
    """Vectorized base cases for every point pair of two leaves.

    Equivalent to folding :func:`base_case` over the pairs that pass the
    core-distance filters (filters evaluated against the candidate
    distances as of entry to this leaf pair). The computed distance block
    is also offered to the reference side's components, which costs no
    extra distance evaluations and tightens bounds sooner.
    """
    tree = state.tree
    q_pts = tree.leaf_points(node_q)
    r_pts = tree.leaf_points(node_r)
    comp_q = state.leaf_component_ids(node_q)
    core = state.core
    cand = state.candidate_distance

    d_q = cand[comp_q]
    keep_q = core[q_pts] < d_q
    if not keep_q.any():
        return
    q_pts = q_pts[keep_q]
    comp_q = comp_q[keep_q]
    d_q = d_q[keep_q]

    keep_r = core[r_pts] < d_q.max()
    if not keep_r.any():
        return
    r_pts = r_pts[keep_r]
    comp_r = state.leaf_component_ids(node_r)[keep_r]
    core_r = core[r_pts]

    # A reference point only reaches the base case for query points whose
    # component candidate still exceeds its core distance.
    invoked = core_r[None, :] < d_q[:, None]
    state.base_case_count += int(invoked.sum())

    dist = pairwise_block(tree.metric, state.points[q_pts], state.points[r_pts])
    np.maximum(dist, core[q_pts][:, None], out=dist)
    np.maximum(dist, core_r[None, :], out=dist)
    dist[~invoked | (comp_q[:, None] == comp_r[None, :])] = np.inf

    # Leaf point arrays are index-sorted, so argmin resolves distance ties
    # to the lowest candidate index.
    j_best = np.argmin(dist, axis=1)
    rows = np.arange(dist.shape[0])
    best = dist[rows, j_best]
    ok = np.isfinite(best)
    if ok.any():
        _offer_candidates(
            state, best[ok], q_pts[ok], r_pts[j_best[ok]], comp_q[ok]
        )

    i_best = np.argmin(dist, axis=0)
    cols = np.arange(dist.shape[1])
    best_r = dist[i_best, cols]
    ok_r = np.isfinite(best_r)
    if ok_r.any():
        _offer_candidates(
            state, best_r[ok_r], r_pts[ok_r], q_pts[i_best[ok_r]], comp_r[ok_r]
        )


def dual_traversal(node_q, node_r, state):
    """Prune-and-descend traversal applying base cases to surviving leaf pairs.

    Child pairs are visited in ascending order of their distance lower
    bound (stable on ties by child ids) so bounds tighten as early as
    possible.
    """
    if score(node_q, node_r, state) == PRUNE:
        return
    tree = state.tree
    q_leaf = tree.is_leaf(node_q)
    r_leaf = tree.is_leaf(node_r)
    if q_leaf and r_leaf:
        _leaf_pair(node_q, node_r, state)
        return
    q_children = (node_q,) if q_leaf else tree.children(node_q)
    r_children = (node_r,) if r_leaf else tree.children(node_r)
    pairs = sorted(
        (
            (_node_pair_lower_bound(a, b, state), a, b)
            for a in q_children
            for b in r_children
        ),
    )
    for _, a, b in pairs:
        dual_traversal(a, b, state)


def collate_round(state):
    """Turn per-component candidates into forest edges; returns new edges.

    Components are visited in ascending root id. An edge is skipped when an
    earlier union in this same collation already joined its endpoints (the
    mutual-selection dedup).
    """
    edges = []
    forest = state.forest
    for c in np.unique(state.point_component):
        d = state.candidate_distance[c]
        if not np.isfinite(d):
            continue
        a = int(state.source_point[c])
        b = int(state.candidate_point[c])
        if forest.union(a, b):
            edges.append((min(a, b), max(a, b), float(d)))
    return edges


def boruvka_mst(tree, points, core, mode="exact"):
    """Minimum spanning tree of the mutual-reachability-weighted point graph.

    Parameters
    ----------
    tree : SpaceTree
        Built over ``points``.
    points : ndarray
        Canonical point matrix (same row order the core distances used).
    core : CoreDistances
    mode : "exact" or "fast_ties"
        ``exact`` yields a true minimum spanning tree. ``fast_ties`` reuses
        stale pruning bounds across extra passes to exploit tied distances;
        the result spans but may weigh slightly more than the minimum.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    n = tree.n_points
    if n == 1:
        return MstEdgeList(
            point_a=np.empty(0, dtype=np.intp),
            point_b=np.empty(0, dtype=np.intp),
            weight=np.empty(0),
            n_points=1,
        )
    state = make_state(tree, points, core)
    seedable = core.neighbor_indices is not None
    edges = []
    n_rounds = 0
    while state.forest.n_components > 1:
        if n_rounds > 0:
            begin_pass(state, reset_bounds=True)
        n_rounds += 1
        if seedable:
            seed_from_neighbors(state, core.neighbor_indices, core.neighbor_distances)
        dual_traversal(tree.root, tree.root, state)
        new_edges = collate_round(state)
        if not new_edges:
            raise InternalInvariantError(
                "Boruvka round found no candidate edges with multiple components"
            )
        edges.extend(new_edges)
        if mode == "fast_ties":
            while state.forest.n_components > 1:
                begin_pass(state, reset_bounds=False)
                if seedable:
                    seed_from_neighbors(
                        state, core.neighbor_indices, core.neighbor_distances
                    )
                dual_traversal(tree.root, tree.root, state)
                new_edges = collate_round(state)
                if not new_edges:
                    break
                edges.extend(new_edges)
    point_a = np.array([e[0] for e in edges], dtype=np.intp)
    point_b = np.array([e[1] for e in edges], dtype=np.intp)
    weight = np.array([e[2] for e in edges])
    return MstEdgeList(
        point_a=point_a,
        point_b=point_b,
        weight=weight,
        n_points=n,
        base_case_count=state.base_case_count,
        n_rounds=n_rounds,
    )
