"""Fast hierarchical density-based clustering.

Sub-quadratic core distances via a space-partitioning tree, a dual-tree
Boruvka minimum spanning tree under the mutual reachability metric,
condensed-tree smoothing, and stability-optimal flat cluster extraction,
all cross-checkable against a built-in brute-force oracle.
"""

from .boruvka import MstEdgeList, boruvka_mst
from .core_distance import CoreDistances, core_distances, mutual_reachability
from .extraction import FlatClustering, assign_labels, select_clusters, stability
from .hierarchy import (
    CondensedTree,
    Dendrogram,
    condense,
    dbscan_star_cut,
    single_linkage,
)
from .io import load_points
from .metrics import InternalInvariantError, distance, validate_points
from .pipeline import ClusterResult, cluster, dbscan_star
from .spacetree import SpaceTree, build, knn, node_min_distance

__version__ = "0.1.0"


def __getattr__(name):
    # The estimator pulls in scikit-learn; load it on first use so the CLI
    # does not pay that import on every invocation.
    if name == "HDBSCAN":
        from .estimator import HDBSCAN

        return HDBSCAN
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "HDBSCAN",
    "ClusterResult",
    "CondensedTree",
    "CoreDistances",
    "Dendrogram",
    "FlatClustering",
    "InternalInvariantError",
    "MstEdgeList",
    "SpaceTree",
    "assign_labels",
    "boruvka_mst",
    "build",
    "cluster",
    "condense",
    "core_distances",
    "dbscan_star",
    "dbscan_star_cut",
    "distance",
    "knn",
    "load_points",
    "mutual_reachability",
    "node_min_distance",
    "select_clusters",
    "single_linkage",
    "stability",
    "validate_points",
]
