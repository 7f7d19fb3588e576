"""End-to-end clustering pipeline shared by the estimator and the CLI."""

import time
from dataclasses import dataclass

import numpy as np

from . import boruvka, extraction, hierarchy, spacetree
from .core_distance import core_distances
from .metrics import check_metric, validate_points


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    n_clusters: int
    selected: tuple
    condensed: hierarchy.CondensedTree
    dendrogram: hierarchy.Dendrogram
    mst: boruvka.MstEdgeList
    core: object
    tree: spacetree.SpaceTree
    stability: dict
    wall_seconds: float
    dedupe_inverse: np.ndarray | None = None


def cluster(
    points,
    *,
    metric="euclidean",
    min_samples=5,
    min_cluster_size=5,
    mode="exact",
    allow_single_cluster=False,
    leaf_size=spacetree.DEFAULT_LEAF_SIZE,
    dedupe=False,
):
    """Run the full pipeline: tree, core distances, MST, hierarchy, labels.

    With ``dedupe`` enabled, exact duplicate rows are collapsed before
    clustering and the resulting labels replicated back to the original
    rows, trading the infinite-lambda handling for a finite-scale run.
    """
    start = time.perf_counter()
    data = validate_points(points)
    metric = check_metric(metric)
    inverse = None
    work = data
    if dedupe:
        work, inverse = np.unique(data, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        if min_samples > work.shape[0]:
            raise ValueError(
                f"min_samples (k={min_samples}) exceeds the number of distinct "
                f"points ({work.shape[0]}) left after --dedupe; reduce k"
            )
    tree = spacetree.build(work, metric=metric, leaf_size=leaf_size)
    core = core_distances(tree, work, min_samples)
    mst = boruvka.boruvka_mst(tree, work, core, mode=mode)
    dendrogram = hierarchy.single_linkage(mst, work.shape[0])
    condensed = hierarchy.condense(dendrogram, min_cluster_size)
    sigma = extraction.stability(condensed)
    selected = extraction.select_clusters(
        condensed, sigma, allow_single_cluster=allow_single_cluster
    )
    flat = extraction.assign_labels(condensed, selected)
    labels = flat.labels if inverse is None else flat.labels[inverse]
    return ClusterResult(
        labels=labels,
        n_clusters=flat.n_clusters,
        selected=flat.selected,
        condensed=condensed,
        dendrogram=dendrogram,
        mst=mst,
        core=core,
        tree=tree,
        stability=sigma,
        wall_seconds=time.perf_counter() - start,
        dedupe_inverse=inverse,
    )


def dbscan_star(points, epsilon, *, metric="euclidean", min_samples=5,
                leaf_size=spacetree.DEFAULT_LEAF_SIZE, mode="exact"):
    """Fixed-scale flat clustering extracted from the hierarchical run."""
    data = validate_points(points)
    metric = check_metric(metric)
    tree = spacetree.build(data, metric=metric, leaf_size=leaf_size)
    core = core_distances(tree, data, min_samples)
    mst = boruvka.boruvka_mst(tree, data, core, mode=mode)
    dendrogram = hierarchy.single_linkage(mst, data.shape[0])
    return hierarchy.dbscan_star_cut(dendrogram, core, epsilon)
