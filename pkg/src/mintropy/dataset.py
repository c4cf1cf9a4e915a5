"""Discrete tabular datasets: loading, binning, splitting and generators.

Every feature column holds small integer codes ``0 <= v < cardinality``.
Class labels are stored as indices into ``Dataset.class_names``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._io import atomic_write_text

__all__ = [
    "BinningSpec",
    "Dataset",
    "DatasetError",
    "FeatureColumn",
    "generate_fig1_dataset",
    "generate_redundant_dataset",
    "load_csv",
    "load_sparse",
    "random_dataset",
    "split",
    "split_indices",
]


class DatasetError(ValueError):
    """Raised for malformed input files or inconsistent dataset contents."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FeatureColumn:
    name: str
    values: np.ndarray
    cardinality: int
    levels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.cardinality < 1:
            raise DatasetError(f"feature {self.name!r}: cardinality must be >= 1")
        if self.values.ndim != 1:
            raise DatasetError(f"feature {self.name!r}: values must be 1-d")
        if self.values.size and (self.values.min() < 0 or self.values.max() >= self.cardinality):
            raise DatasetError(f"feature {self.name!r}: code outside [0, {self.cardinality})")
        if self.levels and len(self.levels) != self.cardinality:
            raise DatasetError(f"feature {self.name!r}: {len(self.levels)} levels for cardinality {self.cardinality}")

    def level_names(self) -> tuple[str, ...]:
        return self.levels or tuple(str(i) for i in range(self.cardinality))

    def __eq__(self, other):
        if not isinstance(other, FeatureColumn):
            return NotImplemented
        return (
            self.name == other.name
            and self.cardinality == other.cardinality
            and self.level_names() == other.level_names()
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of categorical features plus one class label per row.

    Parameters
    ----------
    features : tuple of FeatureColumn
        Columns in positional order; feature ``i`` is ``features[i]``.
    labels : np.ndarray
        Class index per row, pointing into ``class_names``.
    class_names : tuple of str
        Distinct class identifiers in first-appearance order.
    """

    features: tuple[FeatureColumn, ...]
    labels: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "labels", _frozen(self.labels))
        object.__setattr__(self, "class_names", tuple(str(c) for c in self.class_names))
        if not self.features:
            raise DatasetError("dataset needs at least one feature column")
        n = self.labels.shape[0]
        if n < 1:
            raise DatasetError("dataset needs at least one row")
        for col in self.features:
            if col.values.shape[0] != n:
                raise DatasetError(f"feature {col.name!r} has {col.values.shape[0]} rows, labels have {n}")
        if len(set(self.class_names)) != len(self.class_names):
            raise DatasetError("duplicate class names")
        if self.labels.min() < 0 or self.labels.max() >= len(self.class_names):
            raise DatasetError("label index outside class_names")

    @classmethod
    def from_codes(
        cls,
        matrix,
        labels,
        class_names: Sequence[str] | None = None,
        feature_names: Sequence[str] | None = None,
        cardinalities: Sequence[int] | None = None,
    ) -> "Dataset":
        """Build a dataset from an integer code matrix of shape (n_rows, n_features)."""
        matrix = np.asarray(matrix, dtype=np.int64)
        if matrix.ndim != 2:
            raise DatasetError("code matrix must be 2-d")
        labels = np.asarray(labels, dtype=np.int64)
        if class_names is None:
            class_names = [str(i) for i in range(int(labels.max()) + 1)]
        if feature_names is None:
            feature_names = [f"f{i}" for i in range(matrix.shape[1])]
        if cardinalities is None:
            cardinalities = [int(matrix[:, j].max()) + 1 if matrix.shape[0] else 1 for j in range(matrix.shape[1])]
        cols = tuple(
            FeatureColumn(str(name), matrix[:, j], int(card))
            for j, (name, card) in enumerate(zip(feature_names, cardinalities))
        )
        return cls(cols, labels, tuple(class_names))

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.features)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(c.cardinality for c in self.features)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Read-only (n_rows, n_features) code matrix."""
        m = np.column_stack([c.values for c in self.features])
        m.setflags(write=False)
        return m

    def same_schema(self, other: "Dataset") -> bool:
        return (
            self.feature_names == other.feature_names
            and self.cardinalities == other.cardinalities
            and self.class_names == other.class_names
        )

    def take(self, rows) -> "Dataset":
        """Row subset that keeps the full schema (cardinalities, levels, classes)."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = tuple(FeatureColumn(c.name, c.values[rows], c.cardinality, c.levels) for c in self.features)
        return Dataset(cols, self.labels[rows], self.class_names)

    def row(self, i: int) -> tuple[str, ...]:
        return tuple(c.level_names()[c.values[i]] for c in self.features)

    def to_csv(self, path, label_column: str = "class") -> None:
        """Write a header + one line per row, label column first, levels as text."""
        names = [c.level_names() for c in self.features]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([label_column, *self.feature_names])
        for i in range(self.n_rows):
            w.writerow(
                [self.class_names[self.labels[i]]]
                + [names[j][self.features[j].values[i]] for j in range(self.n_features)]
            )
        atomic_write_text(path, buf.getvalue())

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.features == other.features
            and self.class_names == other.class_names
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class BinningSpec:
    method: str = "equal-frequency"
    bins: int = 2

    def __post_init__(self):
        if self.method not in ("equal-width", "equal-frequency"):
            raise DatasetError(f"unknown binning method {self.method!r}")
        if int(self.bins) != self.bins or self.bins < 2:
            raise DatasetError("bins must be an integer >= 2")

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return dense bin codes (ascending bin order) for a numeric vector."""
        x = np.asarray(x, dtype=float)
        n = x.shape[0]
        if self.method == "equal-width":
            lo, hi = float(x.min()), float(x.max())
            if hi == lo:
                raw = np.zeros(n, dtype=np.int64)
            else:
                raw = np.floor((x - lo) / (hi - lo) * self.bins).astype(np.int64)
                raw = np.minimum(raw, self.bins - 1)
        else:
            # tied values share the lowest rank, so a boundary tie goes to the lower bin
            order = np.argsort(x, kind="stable")
            sx = x[order]
            first_rank = np.searchsorted(sx, x, side="left")
            raw = (first_rank * self.bins) // n
        _, dense = np.unique(raw, return_inverse=True)
        return dense.astype(np.int64)


def _dense_codes(tokens: Sequence[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """First-appearance dense coding."""
    index: dict[str, int] = {}
    codes = np.empty(len(tokens), dtype=np.int64)
    for i, t in enumerate(tokens):
        codes[i] = index.setdefault(t, len(index))
    return codes, tuple(index)


def _is_numeric(tokens: Iterable[str]) -> bool:
    try:
        for t in tokens:
            float(t)
    except ValueError:
        return False
    return True


def load_csv(path, label_column: str = "class", binning: BinningSpec | None = None) -> Dataset:
    """Load a comma-separated file with a header row.

    Every column other than ``label_column`` becomes a feature. Categories are
    coded in first-appearance order. When ``binning`` is given, columns whose
    cells all parse as numbers are discretized with it; otherwise numbers are
    treated as categories on their distinct text values.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DatasetError(f"{path}: missing header row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: no data rows after header")
    if label_column not in header:
        raise DatasetError(f"{path}: label column {label_column!r} not in header {header}")
    if len(set(header)) != len(header):
        raise DatasetError(f"{path}: duplicate column names in header")
    width = len(header)
    for lineno, r in enumerate(body, start=2):
        if len(r) != width:
            raise DatasetError(f"{path}:{lineno}: expected {width} fields, got {len(r)}")
        for j, cell in enumerate(r):
            if cell.strip() == "":
                raise DatasetError(f"{path}:{lineno}: missing value in column {header[j]!r}")
    if width < 2:
        raise DatasetError(f"{path}: no feature columns besides {label_column!r}")

    columns = list(zip(*body))
    label_idx = header.index(label_column)
    labels, class_names = _dense_codes([t.strip() for t in columns[label_idx]])
    features = []
    for j, name in enumerate(header):
        if j == label_idx:
            continue
        tokens = [t.strip() for t in columns[j]]
        if binning is not None and _is_numeric(tokens):
            codes = binning.apply(np.array([float(t) for t in tokens]))
            card = int(codes.max()) + 1
            features.append(FeatureColumn(name, codes, card, tuple(f"bin{k}" for k in range(card))))
        else:
            codes, levels = _dense_codes(tokens)
            features.append(FeatureColumn(name, codes, len(levels), levels))
    return Dataset(tuple(features), labels, class_names)


def load_sparse(path, binning: BinningSpec | None = None) -> Dataset:
    """Load ``<label> <idx>:<value> ...`` lines (1-based, strictly increasing indices).

    Absent indices read as 0. Feature values are coded by ascending numeric
    order of their distinct values, so for non-negative data code 0 is the
    implicit zero.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: file not found")
    label_tokens: list[str] = []
    entries: list[list[tuple[int, float]]] = []
    n_feat = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                float(parts[0])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-numeric label {parts[0]!r}") from None
            row: list[tuple[int, float]] = []
            prev = 0
            for tok in parts[1:]:
                idx_s, sep, val_s = tok.partition(":")
                try:
                    if not sep:
                        raise ValueError
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise DatasetError(f"{path}:{lineno}: malformed token {tok!r}") from None
                if idx <= prev:
                    raise DatasetError(f"{path}:{lineno}: index {idx} not strictly increasing (after {prev})")
                prev = idx
                row.append((idx, val))
            n_feat = max(n_feat, prev)
            label_tokens.append(parts[0])
            entries.append(row)
    if not entries:
        raise DatasetError(f"{path}: no data lines")
    if n_feat == 0:
        raise DatasetError(f"{path}: no feature indices in any line")
    dense = np.zeros((len(entries), n_feat), dtype=float)
    for i, row in enumerate(entries):
        for idx, val in row:
            dense[i, idx - 1] = val
    labels, class_names = _dense_codes(label_tokens)
    features = []
    for j in range(n_feat):
        x = dense[:, j]
        if binning is not None:
            codes = binning.apply(x)
            card = int(codes.max()) + 1
            levels = tuple(f"bin{k}" for k in range(card))
        else:
            uniq, codes = np.unique(x, return_inverse=True)
            card = len(uniq)
            levels = tuple(_fmt_number(v) for v in uniq)
        features.append(FeatureColumn(f"f{j + 1}", codes, card, levels))
    return Dataset(tuple(features), labels, class_names)


def _fmt_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def split_indices(n_rows: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle of ``range(n_rows)`` cut into train and test index arrays."""
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError("train_fraction must lie strictly between 0 and 1")
    n_train = int(round(n_rows * train_fraction))
    if n_train < 1 or n_train >= n_rows:
        raise DatasetError(f"train_fraction {train_fraction} on {n_rows} rows leaves an empty part")
    perm = np.random.default_rng(seed).permutation(n_rows)
    return perm[:n_train], perm[n_train:]


def split(dataset: Dataset, train_fraction: float = 0.8, seed: int = 0) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_indices(dataset.n_rows, train_fraction, seed)
    return dataset.take(train_idx), dataset.take(test_idx)


_FIG1_ROWS = (
    "ACFILO",
    "ADFILO",
    "AEGILO",
    "AEHILO",
    "BEFJLO",
    "BEFKLO",
    "BEFIMO",
    "BEFINO",
    "BEFILP",
    "BEFILQ",
)


def generate_fig1_dataset() -> Dataset:
    """Ten rows, one per class 0..9, six features f0..f5 with letter values.

    f0 splits the classes 4/6; each other feature singles out two classes
    and gives a shared value to the other eight.
    """
    matrix = [list(r) for r in _FIG1_ROWS]
    cols = []
    for j in range(6):
        codes, levels = _dense_codes([r[j] for r in matrix])
        cols.append(FeatureColumn(f"f{j}", codes, len(levels), levels))
    return Dataset(tuple(cols), np.arange(10), tuple(str(c) for c in range(10)))


def random_dataset(
    seed: int,
    n_rows: int | None = None,
    n_features: int | None = None,
    n_classes: int | None = None,
    max_cardinality: int = 4,
) -> Dataset:
    """Small random categorical dataset; unspecified sizes are drawn from the seed.

    Labels are a noisy function of the first features so that selection has
    some signal to find.
    """
    rng = np.random.default_rng(seed)
    n_rows = int(rng.integers(20, 201)) if n_rows is None else n_rows
    n_features = int(rng.integers(2, 9)) if n_features is None else n_features
    n_classes = int(rng.integers(2, 7)) if n_classes is None else n_classes
    cards = rng.integers(2, max_cardinality + 1, size=n_features)
    x = np.column_stack([rng.integers(0, c, size=n_rows) for c in cards])
    weights = rng.integers(0, 3, size=n_features)
    signal = (x * weights).sum(axis=1)
    noise = rng.integers(0, n_classes, size=n_rows)
    y = np.where(rng.random(n_rows) < 0.7, signal % n_classes, noise)
    return Dataset.from_codes(x, y, class_names=[str(c) for c in range(n_classes)], cardinalities=cards)


def generate_redundant_dataset(
    seed: int,
    n_rows: int = 500,
    n_features: int = 60,
    n_classes: int = 10,
    noise: float = 0.01,
) -> Dataset:
    """Repeat the fig1 structure over many noisy, highly correlated copies.

    Each block of features holds one balanced splitter (classes below
    ``4 * n_classes // 10`` vs the rest) followed by identifier features, each of
    which singles out two classes. Every block reuses the same class
    structure with its own value relabeling; each cell is replaced by a
    uniformly random value of its column with probability ``noise``.
    """
    if n_classes < 2:
        raise DatasetError("need at least two classes")
    rng = np.random.default_rng(seed)
    y = np.arange(n_rows) % n_classes
    rng.shuffle(y)
    n_ident = math.ceil(n_classes / 2)
    block = 1 + n_ident
    cut = max(1, (4 * n_classes) // 10)
    cols = []
    for j in range(n_features):
        pos = j % block
        if pos == 0:
            raw = (y >= cut).astype(np.int64)
            card = 2
        else:
            a, b = 2 * (pos - 1), 2 * (pos - 1) + 1
            raw = np.full(n_rows, 2, dtype=np.int64)
            raw[y == a] = 0
            raw[y == b] = 1
            card = 3
        relabel = rng.permutation(card)
        vals = relabel[raw]
        flip = rng.random(n_rows) < noise
        vals = np.where(flip, rng.integers(0, card, size=n_rows), vals)
        cols.append(FeatureColumn(f"f{j}", vals, card))
    return Dataset(tuple(cols), y, tuple(str(c) for c in range(n_classes)))

