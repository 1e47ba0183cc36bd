"""Dataset loading, fold planning, and Gaussian feature corruption."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import ConfigError, DataFormatError
from .linalg import as_matrix

__all__ = [
    "Dataset",
    "FoldPlan",
    "load_csv",
    "make_folds",
    "inject_gaussian_noise",
]


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, string labels, and the fixed (lexicographic) class order."""

    name: str
    X: np.ndarray
    labels: tuple[str, ...]
    class_labels: tuple[str, ...]

    def __post_init__(self):
        if self.X.shape[0] != len(self.labels):
            raise ConfigError(
                f"{len(self.labels)} labels for {self.X.shape[0]} rows"
            )
        if self.X.shape[0] < 2:
            raise ConfigError("a dataset needs at least 2 samples")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FoldPlan:
    """Per-sample fold assignment; fold sizes differ by at most one."""

    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignments == fold)[0]

    def train_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignments != fold)[0]


def load_csv(
    path,
    label_column: Union[int, str] = -1,
    header: bool = True,
    name: Optional[str] = None,
) -> Dataset:
    """Parse a numeric CSV with one label column.

    label_column may be a zero-based index (negative counts from the end)
    or, when a header is present, a column name.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    col_names = None
    if header:
        col_names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataFormatError(f"{path}: no data rows after the header")
    width = len(rows[0])
    if isinstance(label_column, str):
        if col_names is None:
            raise DataFormatError(
                "label_column by name requires header=True"
            )
        if label_column not in col_names:
            raise DataFormatError(
                f"{path}: no column named {label_column!r}"
            )
        label_idx = col_names.index(label_column)
    else:
        label_idx = label_column % width
    features, labels = [], []
    first_data_line = 2 if header else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: row {r + first_data_line} has {len(row)} cells, expected {width}"
            )
        vals = []
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                col = col_names[c] if col_names else str(c)
                raise DataFormatError(
                    f"{path}: unparseable cell {cell!r} at row {r + first_data_line}, "
                    f"column {col}"
                ) from None
        features.append(vals)
        labels.append(row[label_idx].strip())
    X = as_matrix(np.array(features, dtype=np.float64), "features")
    return Dataset(
        name=name if name is not None else Path(path).stem,
        X=X,
        labels=tuple(labels),
        class_labels=tuple(sorted(set(labels))),
    )


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Deterministic shuffled round-robin fold assignment."""
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if k > n:
        raise ConfigError(f"k = {k} exceeds the sample count {n}")
    perm = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[perm] = np.arange(n) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


def inject_gaussian_noise(ds: Dataset, level: float, seed: int) -> Dataset:
    """Corrupt round(level% of N) rows with additive per-feature Gaussian noise.

    The noise sigma for feature f is the dataset-wide standard deviation
    of feature f, so corruption tracks each feature's natural scale.
    Unselected rows and all labels are untouched; the input dataset is
    never mutated.
    """
    if not (0.0 <= level <= 100.0):
        raise ConfigError(f"noise level must be in [0, 100], got {level!r}")
    n = ds.n_samples
    n_corrupt = int(round(level / 100.0 * n))
    X = ds.X.copy()
    if n_corrupt > 0:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(n, size=n_corrupt, replace=False)
        sigma = ds.X.std(axis=0)
        X[chosen] += rng.normal(0.0, 1.0, size=(n_corrupt, ds.n_features)) * sigma
    return Dataset(
        name=ds.name,
        X=X,
        labels=ds.labels,
        class_labels=ds.class_labels,
    )
