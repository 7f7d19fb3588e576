import pathlib

import numpy as np
import pytest

from hdcluster import extraction, hierarchy, oracle

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

# 1-D four-point line; the worked example threaded through every module.
LINE4 = np.array([[0.0], [1.0], [3.0], [7.0]])


@pytest.fixture
def line4():
    return LINE4.copy()


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def two_blob():
    from hdcluster.io import load_points

    return load_points(FIXTURES / "two_blob.csv")


def labels_match_up_to_permutation(a, b):
    """True when two labelings induce the same clusters and the same noise."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or not np.array_equal(a == -1, b == -1):
        return False
    mapping = {}
    used = set()
    for x, y in zip(a, b):
        if x == -1:
            continue
        if x in mapping:
            if mapping[x] != y:
                return False
        else:
            if y in used:
                return False
            mapping[x] = y
            used.add(y)
    return True


def oracle_pipeline_labels(points, metric, k, m, allow_single_cluster=False):
    """Reference labels: Prim MST into the shared hierarchy/extraction code."""
    mst = oracle.prim_mst_mreach(points, metric, k)
    dendrogram = hierarchy.single_linkage(mst, points.shape[0])
    condensed = hierarchy.condense(dendrogram, m)
    sigma = extraction.stability(condensed)
    selected = extraction.select_clusters(
        condensed, sigma, allow_single_cluster=allow_single_cluster
    )
    return extraction.assign_labels(condensed, selected).labels
