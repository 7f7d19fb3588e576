"""scikit-learn compatible estimator wrapping the clustering pipeline."""

import numpy as np

from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from . import hierarchy, pipeline
from .spacetree import DEFAULT_LEAF_SIZE


class HDBSCAN(BaseEstimator, ClusterMixin):
    """Hierarchical density-based clustering with noise.

    Builds the mutual-reachability minimum spanning tree with a dual-tree
    search, condenses the single-linkage hierarchy by minimum cluster size,
    and extracts the stability-optimal flat clustering. Points that belong
    to no selected cluster are labeled -1.

    Parameters
    ----------
    min_samples : int, default=5
        Neighbor count for the core distance (the count includes the point
        itself). Larger values smooth the density estimate.

    min_cluster_size : int, default=5
        Smallest number of points a cluster may contain (>= 2); smaller
        splits are treated as points falling out of their parent cluster.

    metric : str or callable, default="euclidean"
        One of "euclidean", "manhattan", "chebyshev", or a callable
        ``d(a, b)`` satisfying the metric axioms. Callables disable tree
        pruning (slow but correct).

    mode : str, default="exact"
        "exact" computes a true minimum spanning tree. "fast_ties" reuses
        pruning bounds across tie-exploiting extra passes; faster on data
        with many duplicate distances, at the cost of an approximate tree.

    allow_single_cluster : bool, default=False
        Permit the hierarchy root itself to be returned as a cluster.

    leaf_size : int, default=40
        Space-tree leaf capacity; a performance knob only.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Cluster label per sample, -1 for noise.

    n_clusters_ : int
        Number of selected clusters.

    core_distances_ : ndarray of shape (n_samples,)
        Distance from each point to its min_samples-th nearest neighbor.

    mst_edges_ : ndarray of shape (n_samples - 1, 3)
        Spanning tree rows (point_a, point_b, mutual reachability weight).

    single_linkage_tree_ : ndarray of shape (n_samples - 1, 4)
        Merge rows (left_id, right_id, distance, size).

    condensed_tree_ : CondensedTree
        The smoothed cluster tree used for extraction.

    cluster_stability_ : dict
        Stability score per condensed cluster id.

    selected_clusters_ : tuple of int
        Condensed cluster ids behind labels 0..K-1, ascending.
    """

    def __init__(
        self,
        min_samples=5,
        min_cluster_size=5,
        metric="euclidean",
        mode="exact",
        allow_single_cluster=False,
        leaf_size=DEFAULT_LEAF_SIZE,
    ):
        self.min_samples = min_samples
        self.min_cluster_size = min_cluster_size
        self.metric = metric
        self.mode = mode
        self.allow_single_cluster = allow_single_cluster
        self.leaf_size = leaf_size

    def fit(self, X, y=None):
        """Cluster ``X`` and populate the fitted attributes.

        Parameters
        ----------
        X : array-like of shape (n_samples, n_features)
        y : ignored

        Returns
        -------
        self
        """
        result = pipeline.cluster(
            X,
            metric=self.metric,
            min_samples=self.min_samples,
            min_cluster_size=self.min_cluster_size,
            mode=self.mode,
            allow_single_cluster=self.allow_single_cluster,
            leaf_size=self.leaf_size,
        )
        self.labels_ = result.labels
        self.n_clusters_ = result.n_clusters
        self.core_distances_ = result.core.values
        self.mst_edges_ = np.column_stack(
            [result.mst.point_a, result.mst.point_b, result.mst.weight]
        )
        self.single_linkage_tree_ = result.dendrogram.merges
        self.condensed_tree_ = result.condensed
        self.cluster_stability_ = result.stability
        self.selected_clusters_ = result.selected
        self._dendrogram = result.dendrogram
        self._core = result.core
        return self

    def dbscan_star_labels(self, epsilon):
        """Flat labels at a fixed distance scale, from the fitted hierarchy."""
        check_is_fitted(self, "labels_")
        return hierarchy.dbscan_star_cut(self._dendrogram, self._core, epsilon)
