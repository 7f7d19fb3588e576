"""Command-line interface: cluster files, fixed-scale cuts, benchmarks, oracle checks.

Exit codes: 0 success, 2 invalid input, 3 internal invariant violation.
All artifact writes are atomic, so a failing run leaves no partial output.
"""

import argparse
import sys
import time

import numpy as np

from . import extraction, hierarchy, io, oracle, pipeline
from .metrics import InternalInvariantError
from .spacetree import DEFAULT_LEAF_SIZE

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3


def generate_blobs(n_points, n_dims, n_clusters, rng):
    """Equal-variance Gaussian blobs inside a fixed-diameter hypercube.

    Cluster centers are uniform in a side-20 hypercube and each blob has
    unit standard deviation. Points are split across blobs as evenly as the
    total allows.
    """
    centers = rng.uniform(0.0, 20.0, size=(n_clusters, n_dims))
    counts = np.full(n_clusters, n_points // n_clusters, dtype=int)
    counts[: n_points % n_clusters] += 1
    rows = [
        centers[i] + rng.normal(0.0, 1.0, size=(counts[i], n_dims))
        for i in range(n_clusters)
    ]
    return np.vstack(rows)


def _add_common_options(parser, with_cluster_size=True):
    parser.add_argument("--input", required=True, help="delimited text point file")
    parser.add_argument("--metric", default="euclidean",
                        choices=["euclidean", "manhattan", "chebyshev"])
    parser.add_argument("--min-samples", type=int, default=5,
                        help="neighbor count for core distances (default 5)")
    if with_cluster_size:
        parser.add_argument("--min-cluster-size", type=int, default=5,
                            help="smallest cluster size accepted (default 5)")
    parser.add_argument("--mode", default="exact", choices=["exact", "fast_ties"])
    parser.add_argument("--leaf-size", type=int, default=DEFAULT_LEAF_SIZE)
    parser.add_argument("--labels-out", default="labels.txt",
                        help="labels artifact path (default labels.txt)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hdcluster",
        description="Hierarchical density-based clustering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cluster = sub.add_parser("cluster", help="cluster a point file")
    _add_common_options(p_cluster)
    p_cluster.add_argument("--allow-single-cluster", action="store_true")
    p_cluster.add_argument("--dedupe", action="store_true",
                           help="collapse exact duplicate points before clustering")
    p_cluster.add_argument("--tree-out", help="condensed tree JSON path")
    p_cluster.add_argument("--mst-out", help="MST edge list path")

    p_dbscan = sub.add_parser("dbscan-star", help="flat cut at a fixed distance scale")
    _add_common_options(p_dbscan, with_cluster_size=False)
    p_dbscan.add_argument("--epsilon", type=float, required=True)

    p_bench = sub.add_parser("bench", help="scaling benchmark on Gaussian blob data")
    p_bench.add_argument("--sizes", required=True,
                         help="comma-separated ascending point counts")
    p_bench.add_argument("--dims", default="2", help="comma-separated dimensions")
    p_bench.add_argument("--clusters", default="10",
                         help="comma-separated generated blob counts")
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("--metric", default="euclidean",
                         choices=["euclidean", "manhattan", "chebyshev"])
    p_bench.add_argument("--min-samples", type=int, default=5)
    p_bench.add_argument("--min-cluster-size", type=int, default=5)
    p_bench.add_argument("--mode", default="exact", choices=["exact", "fast_ties"])
    p_bench.add_argument("--leaf-size", type=int, default=DEFAULT_LEAF_SIZE)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--bench-out", help="benchmark table path (default stdout)")

    p_oracle = sub.add_parser("oracle-check",
                              help="cross-check the fast pipeline against brute force")
    _add_common_options(p_oracle)
    p_oracle.add_argument("--allow-single-cluster", action="store_true")

    return parser


def _cmd_cluster(args):
    points = io.load_points(args.input)
    result = pipeline.cluster(
        points,
        metric=args.metric,
        min_samples=args.min_samples,
        min_cluster_size=args.min_cluster_size,
        mode=args.mode,
        allow_single_cluster=args.allow_single_cluster,
        leaf_size=args.leaf_size,
        dedupe=args.dedupe,
    )
    io.write_labels(args.labels_out, result.labels)
    if args.tree_out:
        io.write_condensed_tree(args.tree_out, result.condensed)
    if args.mst_out:
        io.write_mst_edges(args.mst_out, result.mst)
    noise = int((result.labels == -1).sum())
    print(
        f"n_points={points.shape[0]} n_dims={points.shape[1]} "
        f"n_clusters={result.n_clusters} noise={noise} "
        f"wall_seconds={result.wall_seconds:.3f}"
    )
    return EXIT_OK


def _cmd_dbscan_star(args):
    points = io.load_points(args.input)
    start = time.perf_counter()
    labels = pipeline.dbscan_star(
        points,
        args.epsilon,
        metric=args.metric,
        min_samples=args.min_samples,
        leaf_size=args.leaf_size,
        mode=args.mode,
    )
    wall = time.perf_counter() - start
    io.write_labels(args.labels_out, labels)
    n_clusters = int(labels.max()) + 1 if labels.max() >= 0 else 0
    noise = int((labels == -1).sum())
    print(
        f"n_points={points.shape[0]} n_dims={points.shape[1]} "
        f"epsilon={args.epsilon:g} n_clusters={n_clusters} noise={noise} "
        f"wall_seconds={wall:.3f}"
    )
    return EXIT_OK


def run_bench(sizes, dims, clusters, seed, *, reps=1, metric="euclidean",
              min_samples=5, min_cluster_size=5, mode="exact",
              leaf_size=DEFAULT_LEAF_SIZE):
    """Time the full pipeline over generated blob datasets.

    Yields one record dict per (size, dim, cluster count, repetition), in
    that nesting order. Sizes must be ascending.
    """
    if list(sizes) != sorted(sizes):
        raise ValueError("bench sizes must be ascending")
    records = []
    for n in sizes:
        for d in dims:
            for c in clusters:
                for rep in range(reps):
                    rng = np.random.default_rng([seed, n, d, c, rep])
                    data = generate_blobs(n, d, c, rng)
                    result = pipeline.cluster(
                        data,
                        metric=metric,
                        min_samples=min_samples,
                        min_cluster_size=min_cluster_size,
                        mode=mode,
                        leaf_size=leaf_size,
                    )
                    records.append(
                        {
                            "n_points": n,
                            "n_dims": d,
                            "n_clusters_generated": c,
                            "wall_seconds": result.wall_seconds,
                            "mode": mode,
                            "seed": seed,
                        }
                    )
    return records


def bench_table(records):
    header = "n_points,n_dims,n_clusters_generated,wall_seconds,mode,seed"
    lines = [header]
    for r in records:
        lines.append(
            f"{r['n_points']},{r['n_dims']},{r['n_clusters_generated']},"
            f"{r['wall_seconds']:.6f},{r['mode']},{r['seed']}"
        )
    return "\n".join(lines) + "\n"


def _parse_int_list(text, name):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"--{name} expects comma-separated integers, got {text!r}")
    if not values:
        raise ValueError(f"--{name} expects at least one value")
    return values


def _cmd_bench(args):
    records = run_bench(
        _parse_int_list(args.sizes, "sizes"),
        _parse_int_list(args.dims, "dims"),
        _parse_int_list(args.clusters, "clusters"),
        args.seed,
        reps=args.reps,
        metric=args.metric,
        min_samples=args.min_samples,
        min_cluster_size=args.min_cluster_size,
        mode=args.mode,
        leaf_size=args.leaf_size,
    )
    table = bench_table(records)
    if args.bench_out:
        io.write_text_atomic(args.bench_out, table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def _labels_match_up_to_permutation(a, b):
    if a.shape != b.shape:
        return False
    if not np.array_equal(a == -1, b == -1):
        return False
    mapping = {}
    seen = set()
    for x, y in zip(a, b):
        if x == -1:
            continue
        if x in mapping:
            if mapping[x] != y:
                return False
        else:
            if y in seen:
                return False
            mapping[x] = y
            seen.add(y)
    return True


def _cmd_oracle_check(args):
    points = io.load_points(args.input)
    result = pipeline.cluster(
        points,
        metric=args.metric,
        min_samples=args.min_samples,
        min_cluster_size=args.min_cluster_size,
        mode=args.mode,
        allow_single_cluster=args.allow_single_cluster,
        leaf_size=args.leaf_size,
    )
    reference_mst = oracle.prim_mst_mreach(points, args.metric, args.min_samples)
    weight_fast = result.mst.total_weight
    weight_ref = reference_mst.total_weight
    scale = max(abs(weight_ref), 1e-300)
    weight_ok = abs(weight_fast - weight_ref) <= 1e-9 * scale

    dendrogram = hierarchy.single_linkage(reference_mst, points.shape[0])
    condensed = hierarchy.condense(dendrogram, args.min_cluster_size)
    sigma = extraction.stability(condensed)
    selected = extraction.select_clusters(
        condensed, sigma, allow_single_cluster=args.allow_single_cluster
    )
    reference_labels = extraction.assign_labels(condensed, selected).labels
    labels_ok = _labels_match_up_to_permutation(result.labels, reference_labels)

    print(f"mst_weight_fast={weight_fast:.17g}")
    print(f"mst_weight_oracle={weight_ref:.17g}")
    print(f"mst_weight_match={'yes' if weight_ok else 'NO'}")
    print(f"labels_match={'yes' if labels_ok else 'NO'}")
    if weight_ok and labels_ok:
        return EXIT_OK
    raise InternalInvariantError("fast pipeline disagrees with the brute-force oracle")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "cluster": _cmd_cluster,
        "dbscan-star": _cmd_dbscan_star,
        "bench": _cmd_bench,
        "oracle-check": _cmd_oracle_check,
    }
    try:
        return handlers[args.command](args)
    except InternalInvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
