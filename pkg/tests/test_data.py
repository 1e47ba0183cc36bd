import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blsbench import data
from blsbench.errors import DataFormatError


CSV = """f1,f2,label
1.0,2.0,yes
3.5,4.25,no
-1.0,0.5,yes
"""


@pytest.fixture
def csv_path(tmp_path):
    p = tmp_path / "toy.csv"
    p.write_text(CSV)
    return p


class TestLoadCsv:
    def test_basic_load(self, csv_path):
        ds = data.load_csv(csv_path)
        assert ds.n_samples == 3 and ds.n_features == 2
        np.testing.assert_array_equal(ds.X[1], [3.5, 4.25])
        assert list(ds.labels) == ["yes", "no", "yes"]
        assert ds.class_labels == ("no", "yes")  # lexicographic
        assert ds.name == "toy"

    def test_label_column_by_name(self, csv_path):
        ds = data.load_csv(csv_path, label_column="label")
        assert list(ds.labels) == ["yes", "no", "yes"]

    def test_label_column_by_index(self, tmp_path):
        p = tmp_path / "first.csv"
        p.write_text("cls,a,b\nx,1,2\ny,3,4\n")
        ds = data.load_csv(p, label_column=0)
        assert list(ds.labels) == ["x", "y"]
        np.testing.assert_array_equal(ds.X, [[1, 2], [3, 4]])

    def test_headerless(self, tmp_path):
        p = tmp_path / "raw.csv"
        p.write_text("1,2,pos\n3,4,neg\n")
        ds = data.load_csv(p, header=False)
        assert ds.n_samples == 2 and list(ds.labels) == ["pos", "neg"]

    def test_bad_cell_reported_with_location(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,label\n1,2,x\n1,oops,y\n")
        with pytest.raises(DataFormatError) as exc:
            data.load_csv(p)
        msg = str(exc.value)
        assert "oops" in msg or ("row" in msg.lower() and "b" in msg)

    def test_ragged_row_rejected(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("a,b,label\n1,2,x\n1,y\n")
        with pytest.raises(DataFormatError):
            data.load_csv(p)


class TestFolds:
    def test_partition_properties(self):
        plan = data.make_folds(23, 5, seed=3)
        all_test = np.concatenate([plan.test_indices(f) for f in range(5)])
        assert sorted(all_test) == list(range(23))
        for f in range(5):
            te = set(plan.test_indices(f))
            tr = set(plan.train_indices(f))
            assert te | tr == set(range(23)) and not (te & tr)

    def test_fold_sizes_balanced(self):
        plan = data.make_folds(23, 5, seed=0)
        sizes = sorted(len(plan.test_indices(f)) for f in range(5))
        assert sizes == [4, 4, 5, 5, 5]

    def test_seed_determinism(self):
        a = data.make_folds(50, 5, seed=9)
        b = data.make_folds(50, 5, seed=9)
        np.testing.assert_array_equal(a.assignments, b.assignments)
        c = data.make_folds(50, 5, seed=10)
        assert not np.array_equal(a.assignments, c.assignments)

    @given(st.integers(10, 60), st.integers(2, 6), st.integers(0, 100))
    @settings(max_examples=40, deadline=None)
    def test_every_sample_in_exactly_one_fold(self, n, k, seed):
        plan = data.make_folds(n, k, seed)
        counts = np.bincount(plan.assignments, minlength=k)
        assert counts.sum() == n
        assert counts.max() - counts.min() <= 1


class TestNoise:
    def make_ds(self, n=200, seed=0):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, 3)) * np.array([1.0, 5.0, 0.2])
        labels = np.array(["a", "b"] * (n // 2), dtype=object)
        return data.Dataset("toy", X, labels, ("a", "b"))

    def test_row_count_rule(self):
        ds = self.make_ds()
        noisy = data.inject_gaussian_noise(ds, level=5, seed=1)
        changed = (noisy.X != ds.X).any(axis=1).sum()
        assert changed == 10  # round(5% of 200)

    def test_rounding_of_row_count(self):
        ds = self.make_ds(n=30)
        noisy = data.inject_gaussian_noise(ds, level=5, seed=1)
        changed = (noisy.X != ds.X).any(axis=1).sum()
        assert changed == round(0.05 * 30)

    def test_input_not_mutated(self):
        ds = self.make_ds()
        before = ds.X.copy()
        data.inject_gaussian_noise(ds, level=50, seed=2)
        np.testing.assert_array_equal(ds.X, before)

    def test_labels_untouched(self):
        ds = self.make_ds()
        noisy = data.inject_gaussian_noise(ds, level=50, seed=2)
        assert list(noisy.labels) == list(ds.labels)

    def test_noise_scale_tracks_feature_std(self):
        # Perturbation magnitude on each feature should follow that
        # feature's empirical standard deviation.
        ds = self.make_ds(n=2000)
        sigma = ds.X.std(axis=0)
        deltas = []
        for seed in range(10):
            noisy = data.inject_gaussian_noise(ds, level=100, seed=seed)
            deltas.append(noisy.X - ds.X)
        observed = np.concatenate(deltas).std(axis=0)
        np.testing.assert_allclose(observed, sigma, rtol=0.1)

    def test_zero_level_is_identity(self):
        ds = self.make_ds()
        noisy = data.inject_gaussian_noise(ds, level=0, seed=3)
        np.testing.assert_array_equal(noisy.X, ds.X)

    def test_seed_determinism(self):
        ds = self.make_ds()
        a = data.inject_gaussian_noise(ds, level=20, seed=7)
        b = data.inject_gaussian_noise(ds, level=20, seed=7)
        np.testing.assert_array_equal(a.X, b.X)

    def test_invalid_level_rejected(self):
        ds = self.make_ds()
        with pytest.raises(ValueError):
            data.inject_gaussian_noise(ds, level=101, seed=0)
        with pytest.raises(ValueError):
            data.inject_gaussian_noise(ds, level=-1, seed=0)
