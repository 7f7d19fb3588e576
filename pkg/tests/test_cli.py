import json
import subprocess
import sys

import numpy as np
import pytest

PY = [sys.executable, "-m", "hdcluster"]


def run_cli(*args, cwd=None):
    return subprocess.run(
        PY + list(args), capture_output=True, text=True, cwd=cwd
    )


@pytest.fixture
def line4_file(tmp_path):
    path = tmp_path / "line4.csv"
    path.write_text("0\n1\n3\n7\n")
    return path


class TestCluster:
    def test_line4_defaults_all_noise(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "cluster", "--input", str(line4_file),
            "--min-samples", "2", "--min-cluster-size", "2",
            "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert labels.read_text() == "-1\n-1\n-1\n-1\n"
        assert "n_clusters=0" in proc.stdout
        assert "noise=4" in proc.stdout

    def test_line4_allow_single_cluster(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "cluster", "--input", str(line4_file),
            "--min-samples", "2", "--min-cluster-size", "2",
            "--allow-single-cluster", "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert labels.read_text() == "0\n0\n0\n0\n"

    def test_two_blob_fixture(self, fixtures_dir, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "cluster", "--input", str(fixtures_dir / "two_blob.csv"),
            "--min-samples", "5", "--min-cluster-size", "10",
            "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert "n_clusters=2" in proc.stdout
        assert "noise=0" in proc.stdout
        values = [int(v) for v in labels.read_text().split()]
        assert len(values) == 100 and set(values) == {0, 1}

    def test_artifacts_written(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        tree_out = tmp_path / "tree.json"
        mst_out = tmp_path / "mst.txt"
        proc = run_cli(
            "cluster", "--input", str(line4_file),
            "--min-samples", "2", "--min-cluster-size", "2",
            "--labels-out", str(labels),
            "--tree-out", str(tree_out), "--mst-out", str(mst_out),
        )
        assert proc.returncode == 0, proc.stderr
        rows = json.loads(tree_out.read_text())
        assert {tuple(sorted(r)) for r in rows} == {
            ("child", "child_size", "lambda_val", "parent")
        }
        mst_lines = mst_out.read_text().splitlines()
        assert mst_lines == ["0,1,1", "1,2,2", "2,3,4"]

    def test_dedupe_flag(self, tmp_path):
        path = tmp_path / "dups.csv"
        path.write_text("0\n0\n0\n9\n9\n9\n")
        proc = run_cli(
            "cluster", "--input", str(path),
            "--min-samples", "2", "--min-cluster-size", "2", "--dedupe",
            "--labels-out", str(tmp_path / "labels.txt"),
        )
        assert proc.returncode == 0, proc.stderr

    def test_missing_input_exits_2(self, tmp_path):
        proc = run_cli(
            "cluster", "--input", str(tmp_path / "nothing.csv"),
            "--labels-out", str(tmp_path / "labels.txt"),
        )
        assert proc.returncode == 2
        assert "error:" in proc.stderr

    def test_bad_k_exits_2_and_writes_nothing(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "cluster", "--input", str(line4_file),
            "--min-samples", "10", "--labels-out", str(labels),
        )
        assert proc.returncode == 2
        assert "reduce k" in proc.stderr
        assert not labels.exists()

    def test_parse_error_names_line(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\noops,4\n")
        proc = run_cli(
            "cluster", "--input", str(bad),
            "--labels-out", str(tmp_path / "labels.txt"),
        )
        assert proc.returncode == 2
        assert "line 2" in proc.stderr

    def test_byte_identical_reruns(self, fixtures_dir, tmp_path):
        outputs = []
        for tag in ("a", "b"):
            labels = tmp_path / f"labels_{tag}.txt"
            tree_out = tmp_path / f"tree_{tag}.json"
            mst_out = tmp_path / f"mst_{tag}.txt"
            proc = run_cli(
                "cluster", "--input", str(fixtures_dir / "two_blob.csv"),
                "--min-samples", "5", "--min-cluster-size", "10",
                "--labels-out", str(labels),
                "--tree-out", str(tree_out), "--mst-out", str(mst_out),
            )
            assert proc.returncode == 0, proc.stderr
            outputs.append(
                (labels.read_bytes(), tree_out.read_bytes(), mst_out.read_bytes())
            )
        assert outputs[0] == outputs[1]


class TestDbscanStar:
    def test_line4_cut(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "dbscan-star", "--input", str(line4_file),
            "--min-samples", "2", "--epsilon", "2.5",
            "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert labels.read_text() == "0\n0\n0\n-1\n"

    def test_small_epsilon_all_noise(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "dbscan-star", "--input", str(line4_file),
            "--min-samples", "2", "--epsilon", "0.5",
            "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert labels.read_text() == "-1\n-1\n-1\n-1\n"

    def test_large_epsilon_single_cluster(self, line4_file, tmp_path):
        labels = tmp_path / "labels.txt"
        proc = run_cli(
            "dbscan-star", "--input", str(line4_file),
            "--min-samples", "2", "--epsilon", "10",
            "--labels-out", str(labels),
        )
        assert proc.returncode == 0, proc.stderr
        assert labels.read_text() == "0\n0\n0\n0\n"

    def test_invalid_epsilon_exits_2(self, line4_file, tmp_path):
        proc = run_cli(
            "dbscan-star", "--input", str(line4_file),
            "--min-samples", "2", "--epsilon", "0",
            "--labels-out", str(tmp_path / "labels.txt"),
        )
        assert proc.returncode == 2


class TestBench:
    def test_single_record(self, tmp_path):
        out = tmp_path / "bench.csv"
        proc = run_cli(
            "bench", "--sizes", "256", "--dims", "2", "--clusters", "10",
            "--seed", "0", "--bench-out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n_points,n_dims,n_clusters_generated,wall_seconds,mode,seed"
        assert len(lines) == 2
        n, d, c, wall, mode, seed = lines[1].split(",")
        assert (n, d, c, mode, seed) == ("256", "2", "10", "exact", "0")
        assert float(wall) > 0

    def test_descending_sizes_rejected(self, tmp_path):
        proc = run_cli("bench", "--sizes", "512,256", "--seed", "0")
        assert proc.returncode == 2
        assert "ascending" in proc.stderr

    def test_bad_sizes_rejected(self):
        proc = run_cli("bench", "--sizes", "abc")
        assert proc.returncode == 2


class TestOracleCheck:
    def test_two_blob_passes(self, fixtures_dir):
        proc = run_cli(
            "oracle-check", "--input", str(fixtures_dir / "two_blob.csv"),
            "--min-samples", "5", "--min-cluster-size", "10",
        )
        assert proc.returncode == 0, proc.stderr
        assert "mst_weight_match=yes" in proc.stdout
        assert "labels_match=yes" in proc.stdout

    def test_tie_heavy_fixture_passes(self, fixtures_dir):
        proc = run_cli(
            "oracle-check", "--input", str(fixtures_dir / "grid_ties.csv"),
            "--min-samples", "3", "--min-cluster-size", "3",
        )
        assert proc.returncode == 0, proc.stderr


def test_unknown_subcommand_exits_2():
    proc = run_cli("florp")
    assert proc.returncode == 2
