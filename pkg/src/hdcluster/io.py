"""Delimited-text input and artifact writers.

Input files are UTF-8, one point per line, comma- or whitespace-separated,
with an optional single header row (detected by any non-numeric cell in the
first row). All writers go through a write-to-temp-then-rename so a failing
run never leaves a partial artifact behind.
"""

import json
import os
import tempfile

import numpy as np

from .metrics import validate_points


def _split_line(line):
    if "," in line:
        return [cell.strip() for cell in line.split(",")]
    return line.split()


def _is_numeric(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_points(path, delimiter=None):
    """Read a point set from a delimited text file.

    Parameters
    ----------
    path : str or Path
        File to read.
    delimiter : str or None
        Explicit cell delimiter. The default sniffs per line: comma if the
        line contains one, otherwise any whitespace.

    Returns
    -------
    ndarray of float64, shape (n_points, n_dims), row order as in the file.

    Raises
    ------
    ValueError
        On empty input, ragged rows, non-numeric cells (reported with the
        1-based line number) or non-finite values.
    """
    rows = []
    n_cols = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            cells = line.split(delimiter) if delimiter else _split_line(line)
            if not rows and n_cols is None and any(not _is_numeric(c) for c in cells):
                # Header row: only tolerated as the very first non-empty line.
                if lineno == 1:
                    n_cols = len(cells)
                    continue
                bad = next(c for c in cells if not _is_numeric(c))
                raise ValueError(f"line {lineno}: could not parse cell {bad!r}")
            if n_cols is None:
                n_cols = len(cells)
            elif len(cells) != n_cols:
                raise ValueError(
                    f"line {lineno}: expected {n_cols} columns, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                bad = next(c for c in cells if not _is_numeric(c))
                raise ValueError(f"line {lineno}: could not parse cell {bad!r}") from None
    if not rows:
        raise ValueError(f"no data rows found in {path}")
    return validate_points(np.array(rows, dtype=np.float64))


def write_text_atomic(path, text):
    """Write ``text`` to ``path`` atomically (temp file + rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def write_labels(path, labels):
    """Write one integer label per line, row order matching the input points."""
    write_text_atomic(path, "".join(f"{int(v)}\n" for v in labels))


def write_mst_edges(path, mst):
    """Write MST edges as ``i,j,w`` lines with 17 significant digits for w."""
    lines = [
        f"{int(i)},{int(j)},{w:.17g}\n"
        for i, j, w in zip(mst.point_a, mst.point_b, mst.weight)
    ]
    write_text_atomic(path, "".join(lines))


def condensed_tree_json(tree):
    """Condensed tree as a JSON string: rows sorted by (parent, lambda, child).

    Infinite lambda values are encoded as the string ``"inf"`` so the output
    stays valid JSON.
    """
    order = np.lexsort((tree.child, tree.lambda_val, tree.parent))
    rows = []
    for idx in order:
        lam = tree.lambda_val[idx]
        rows.append(
            {
                "parent": int(tree.parent[idx]),
                "child": int(tree.child[idx]),
                "lambda_val": "inf" if np.isinf(lam) else float(lam),
                "child_size": int(tree.child_size[idx]),
            }
        )
    return json.dumps(rows, indent=1)


def write_condensed_tree(path, tree):
    write_text_atomic(path, condensed_tree_json(tree) + "\n")
