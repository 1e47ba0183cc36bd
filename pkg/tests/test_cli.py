import csv
import json
import re
import subprocess
import sys

import numpy as np
import pytest

import published_tables as pt
from conftest import make_blobs


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "blsbench.cli", *args],
        capture_output=True, text=True, env=env)


def write_dataset(path, n=60, seed=3):
    X, y = make_blobs(n // 2, [(0.0, 0.0), (2.5, 2.5)], 0.5, seed=seed)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "label"])
        for row, lab in zip(X, y):
            w.writerow([f"{row[0]:.6f}", f"{row[1]:.6f}", lab])
    return path


@pytest.fixture
def dataset_csv(tmp_path):
    return write_dataset(tmp_path / "blobs.csv")


class TestTrainPredict:
    def test_train_writes_model_and_manifest(self, dataset_csv, tmp_path):
        out = tmp_path / "model.json"
        res = run_cli("train", "--data", str(dataset_csv), "--variant", "bls",
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert out.exists()
        manifest = json.loads((tmp_path / "model.json.manifest.json").read_text())
        assert manifest["tool"] == "blsbench"
        digest = next(iter(manifest["datasets"].values()))
        assert re.fullmatch(r"[0-9a-f]{64}", digest)
        assert "accuracy" in res.stdout

    def test_predict_round_trip(self, dataset_csv, tmp_path):
        model = tmp_path / "model.json"
        run_cli("train", "--data", str(dataset_csv), "--variant", "f-bls",
                "--out", str(model))
        feats = tmp_path / "features.csv"
        with open(dataset_csv) as fh:
            rows = list(csv.reader(fh))
        with open(feats, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(rows[0][:2])
            for r in rows[1:]:
                w.writerow(r[:2])
        out = tmp_path / "preds.csv"
        res = run_cli("predict", "--model", str(model), "--data", str(feats),
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        preds = [r[-1] for r in list(csv.reader(out.open()))[1:]]
        truth = [r[-1] for r in rows[1:]]
        agree = np.mean([p == t for p, t in zip(preds, truth)])
        assert agree == 1.0

    def test_missing_variant_is_usage_error(self, dataset_csv, tmp_path):
        res = run_cli("train", "--data", str(dataset_csv),
                      "--out", str(tmp_path / "m.json"))
        assert res.returncode == 2
        assert "variant" in res.stderr

    def test_missing_file_is_runtime_error(self, tmp_path):
        res = run_cli("train", "--data", str(tmp_path / "absent.csv"),
                      "--variant", "bls", "--out", str(tmp_path / "m.json"))
        assert res.returncode == 1
        assert res.stderr.strip()

    def test_config_file_with_flag_override(self, dataset_csv, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[model]\nvariant = if-bls\nm = 2\np = 4\nq = 6\nseed = 5\n")
        out = tmp_path / "model.json"
        res = run_cli("train", "--data", str(dataset_csv), "--config", str(cfg),
                      "--seed", "9", "--out", str(out))
        assert res.returncode == 0, res.stderr
        doc = json.loads(out.read_text())
        assert doc["variant"] == "if-bls"
        assert doc["network"]["seed"] == 9  # flag beats file
        assert doc["network"]["m"] == 2


class TestCv:
    def test_writes_per_fold_rows(self, dataset_csv, tmp_path):
        out = tmp_path / "cv.csv"
        res = run_cli("cv", "--data", str(dataset_csv), "--variant", "bls",
                      "--k", "5", "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(out.open()))
        fold_rows = [r for r in rows if r["fold"].isdigit()]
        assert len(fold_rows) == 5
        assert {r["fold"] for r in rows} >= {"mean", "std"}
        accs = [float(r["accuracy"]) for r in fold_rows]
        assert all(0.0 <= a <= 1.0 for a in accs)

    def test_deterministic_across_runs(self, dataset_csv, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"cv_{tag}.csv"
            res = run_cli("cv", "--data", str(dataset_csv), "--variant", "if-bls",
                          "--seed", "4", "--fold-seed", "2", "--out", str(out))
            assert res.returncode == 0, res.stderr
            outs.append(out.read_text())
        assert outs[0] == outs[1]


class TestGridSearch:
    def test_small_grid_file(self, dataset_csv, tmp_path):
        grid = tmp_path / "grid.ini"
        grid.write_text("[grid]\nc_reg = 0.1, 10\nm = 2\np = 4\nq = 6\n")
        out = tmp_path / "grid.csv"
        res = run_cli("gridsearch", "--data", str(dataset_csv), "--variant",
                      "bls", "--grid", str(grid), "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 2
        assert "best" in res.stdout


class TestNoise:
    def test_writes_corrupted_copy(self, dataset_csv, tmp_path):
        out = tmp_path / "noisy.csv"
        res = run_cli("noise", "--data", str(dataset_csv), "--level", "20",
                      "--seed", "1", "--out", str(out))
        assert res.returncode == 0, res.stderr
        orig = np.array([r[:2] for r in list(csv.reader(dataset_csv.open()))[1:]],
                        dtype=float)
        noisy = np.array([r[:2] for r in list(csv.reader(out.open()))[1:]],
                         dtype=float)
        changed = (orig != noisy).any(axis=1).sum()
        assert changed == round(0.2 * len(orig))

    def test_out_of_range_level_is_usage_error(self, dataset_csv, tmp_path):
        res = run_cli("noise", "--data", str(dataset_csv), "--level", "101",
                      "--seed", "1", "--out", str(tmp_path / "n.csv"))
        assert res.returncode == 2


class TestStats:
    @pytest.fixture
    def table_csv(self, tmp_path):
        path = tmp_path / "accuracy.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dataset"] + pt.MODELS)
            for ds, row in zip(pt.DATASETS, pt.ACCURACY):
                w.writerow([ds] + [repr(float(v)) for v in row])
        return path

    def test_reports_written_and_consistent(self, table_csv, tmp_path):
        out_dir = tmp_path / "reports"
        res = run_cli("stats", "--table", str(table_csv),
                      "--out-dir", str(out_dir))
        assert res.returncode == 0, res.stderr
        for name in ("ranks.csv", "friedman.csv", "wilcoxon.csv",
                     "win_tie_loss.csv"):
            assert (out_dir / name).exists(), name
        ranks_rows = list(csv.reader((out_dir / "ranks.csv").open()))
        avg_row = [r for r in ranks_rows if r[0] == "average"][0]
        np.testing.assert_allclose(
            np.round([float(v) for v in avg_row[1:]], 4), pt.AVERAGE_RANKS)
        fr = list(csv.DictReader((out_dir / "friedman.csv").open()))[0]
        # full-precision average ranks, so compare to the recomputed value
        from blsbench import stats as bstats
        expected = bstats.friedman_test(
            bstats.rank_models(pt.ACCURACY, pt.DATASETS, pt.MODELS))
        assert float(fr["chi2"]) == pytest.approx(expected.chi2, abs=1e-3)

    def test_bad_table_is_runtime_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("dataset,m1\nd1,not-a-number\n")
        res = run_cli("stats", "--table", str(bad),
                      "--out-dir", str(tmp_path / "r"))
        assert res.returncode == 1


class TestTopLevel:
    def test_version_exits_zero(self):
        res = run_cli("--version")
        assert res.returncode == 0

    def test_no_command_is_usage_error(self):
        res = run_cli()
        assert res.returncode == 2
