import numpy as np
import pytest

from hdcluster import build, knn, node_min_distance, oracle
from hdcluster.metrics import distance, pairwise_block


def walk_points(tree, node_id=0):
    if tree.is_leaf(node_id):
        return list(tree.leaf_points(node_id))
    left, right = tree.children(node_id)
    return walk_points(tree, left) + walk_points(tree, right)


def test_single_point_tree():
    tree = build(np.array([[1.0, 2.0]]))
    assert tree.n_nodes == 1
    assert tree.is_leaf(tree.root)
    assert list(tree.leaf_points(0)) == [0]


def test_line4_median_split(line4):
    tree = build(line4, leaf_size=2)
    assert tree.n_nodes == 3
    left, right = tree.children(tree.root)
    assert sorted(tree.leaf_points(left)) == [0, 1]
    assert sorted(tree.leaf_points(right)) == [2, 3]


def test_every_point_in_exactly_one_leaf_and_regions_nest():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(1000, 2))
    tree = build(pts, leaf_size=40)
    seen = walk_points(tree)
    assert sorted(seen) == list(range(1000))
    for node_id in range(tree.n_nodes):
        node = tree.node(node_id)
        lo, hi = node.region
        block = pts[tree.descendant_points(node_id)]
        assert (block >= lo - 1e-15).all() and (block <= hi + 1e-15).all()
        if node.parent is not None:
            plo, phi = tree.node(node.parent).region
            assert (lo >= plo).all() and (hi <= phi).all()
        if node.children:
            assert node.parent is None or node_id > node.parent


def test_radius_statistics_bound_truth():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(500, 3))
    tree = build(pts, leaf_size=10)
    for node_id in range(tree.n_nodes):
        node = tree.node(node_id)
        centroid = node.centroid
        desc = pts[tree.descendant_points(node_id)]
        true_desc = pairwise_block("euclidean", desc, centroid[None, :]).max()
        assert node.descendant_radius >= true_desc - 1e-12
        assert node.point_radius <= node.descendant_radius
        if node.points is not None:
            held = pts[node.points]
            true_held = pairwise_block("euclidean", held, centroid[None, :]).max()
            assert node.point_radius == pytest.approx(true_held, abs=1e-12)
        for child in node.children:
            assert node.descendant_radius >= tree.node(child).descendant_radius


def test_knn_line4(line4):
    tree = build(line4, leaf_size=2)
    assert knn(tree, line4[0], 2) == [(0, 0.0), (1, 1.0)]


def test_knn_self_first():
    rng = np.random.default_rng(12)
    pts = rng.normal(size=(50, 3))
    tree = build(pts)
    for i in (0, 17, 49):
        assert knn(tree, pts[i], 1) == [(i, 0.0)]


def test_knn_duplicate_tie_prefers_lower_index():
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0]])
    tree = build(pts, leaf_size=1)
    assert knn(tree, pts[1], 1) == [(0, 0.0)]


def test_knn_k_bounds():
    tree = build(np.zeros((3, 2)))
    with pytest.raises(ValueError, match="reduce k"):
        knn(tree, np.zeros(2), 4)
    with pytest.raises(ValueError):
        knn(tree, np.zeros(2), 0)


@pytest.mark.parametrize("metric", ["euclidean", "manhattan", "chebyshev"])
@pytest.mark.parametrize("k", [1, 5, 16])
def test_knn_matches_brute_force(metric, k):
    rng = np.random.default_rng(40 + k)
    n = int(rng.integers(50, 500))
    d = int(rng.integers(1, 11))
    pts = rng.normal(size=(n, d))
    tree = build(pts, metric=metric, leaf_size=7)
    ref = oracle.brute_knn(pts, metric, k)
    for i in range(n):
        assert knn(tree, pts[i], k) == ref[i]


def test_knn_matches_brute_force_on_ties():
    rng = np.random.default_rng(77)
    pts = rng.integers(0, 4, size=(200, 2)).astype(float)
    tree = build(pts, leaf_size=5)
    ref = oracle.brute_knn(pts, "euclidean", 5)
    for i in range(200):
        mine = knn(tree, pts[i], 5)
        assert [p for p, _ in mine] == [p for p, _ in ref[i]]


def test_knn_200_random_2d_oracle():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(200, 2))
    tree = build(pts)
    ref = oracle.brute_knn(pts, "euclidean", 5)
    for i in range(200):
        assert [p for p, _ in knn(tree, pts[i], 5)] == [p for p, _ in ref[i]]


def test_node_min_distance_examples(line4):
    tree = build(line4, leaf_size=2)
    left, right = tree.children(tree.root)
    assert node_min_distance(tree, left, left) == 0.0
    assert node_min_distance(tree, left, right) == 2.0


def test_node_min_distance_lower_bounds_exhaustive():
    rng = np.random.default_rng(31)
    pts = rng.normal(size=(300, 4))
    tree = build(pts, leaf_size=20)
    node_ids = rng.integers(0, tree.n_nodes, size=(60, 2))
    for a, b in node_ids:
        bound = node_min_distance(tree, a, b)
        pa = pts[tree.descendant_points(a)]
        pb = pts[tree.descendant_points(b)]
        assert bound <= pairwise_block("euclidean", pa, pb).min() + 1e-12


def test_callable_metric_zero_bound_but_correct_knn():
    def wonky(a, b):
        return float(np.sqrt(np.sum((a - b) ** 2)))

    rng = np.random.default_rng(6)
    pts = rng.normal(size=(60, 2))
    tree = build(pts, metric=wonky, leaf_size=8)
    assert node_min_distance(tree, 0, 0) == 0.0
    ref = oracle.brute_knn(pts, "euclidean", 4)
    for i in range(0, 60, 7):
        mine = knn(tree, pts[i], 4)
        assert [p for p, _ in mine] == [p for p, _ in ref[i]]
        assert [pytest.approx(d) for _, d in ref[i]] == [d for _, d in mine]


def test_build_deterministic():
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(400, 3))
    t1 = build(pts, leaf_size=13)
    t2 = build(pts, leaf_size=13)
    assert np.array_equal(t1.point_permutation, t2.point_permutation)
    assert np.array_equal(t1.lower, t2.lower)


def test_leaf_size_validated():
    with pytest.raises(ValueError, match="leaf_size"):
        build(np.zeros((4, 2)), leaf_size=0)


def test_distance_evaluation_order_matches_metric():
    # tree knn distances must equal the scalar metric bitwise
    rng = np.random.default_rng(19)
    pts = rng.normal(size=(30, 5))
    tree = build(pts, leaf_size=4)
    for i in range(0, 30, 5):
        for j, d in knn(tree, pts[i], 3):
            assert d == distance("euclidean", pts[i], pts[j])
