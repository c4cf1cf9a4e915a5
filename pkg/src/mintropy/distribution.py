"""Empirical joint distributions of (feature-value tuple, class).

Tables hold integer counts; division by ``n_rows`` happens only when an
entropy is evaluated. Tuple codes are canonical: tuples are numbered in the
order of the first row on which they occur, so a table reached by
successive :func:`extend` calls is identical, count for count, to the one
built from scratch by :func:`joint`.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .dataset import Dataset

__all__ = ["JointTable", "as_subset", "class_marginal", "extend", "joint"]


def as_subset(indices: Iterable[int], n_features: int | None = None) -> tuple[int, ...]:
    """Normalize feature indices to a strictly increasing tuple."""
    idx = tuple(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate feature in subset {idx}")
    if n_features is not None:
        for i in idx:
            if not 0 <= i < n_features:
                raise IndexError(f"feature index {i} out of range for {n_features} features")
    return tuple(sorted(idx))


def _canonical_codes(key: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense codes numbered by first occurrence, plus the first-row of each code."""
    _, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse.ravel()], first[order]


class JointTable:
    """Counts ``n(t, c)`` for every observed tuple code ``t`` and class ``c``.

    Attributes
    ----------
    counts : np.ndarray
        Integer array of shape (n_tuples, class_count). Only observed tuples
        have a row; a zero entry means the class never co-occurs with it.
    n_rows : int
        Total count.
    subset : tuple of int
        Feature positions that produced the table (empty for ``from_counts``).
    row_codes : np.ndarray or None
        Tuple code of every dataset row; needed by :func:`extend`.
    """

    __slots__ = ("counts", "n_rows", "subset", "row_codes", "_first_rows", "_source")

    def __init__(self, counts, subset=(), row_codes=None, first_rows=None, source=None):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise ValueError("counts must be a non-empty 2-d array")
        if counts.min() < 0:
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        self.counts = counts
        self.n_rows = int(counts.sum())
        if self.n_rows < 1:
            raise ValueError("table has zero total count")
        self.subset = tuple(subset)
        self.row_codes = row_codes
        self._first_rows = first_rows
        self._source = source

    @classmethod
    def from_counts(cls, counts) -> "JointTable":
        """Table over anonymous tuples: row ``t`` of ``counts`` is tuple code ``t``."""
        return cls(counts)

    @classmethod
    def from_probabilities(cls, p, scale: int = 10**6) -> "JointTable":
        """Approximate a joint probability matrix by integer counts out of ``scale``."""
        c = np.rint(np.asarray(p, dtype=float) * scale).astype(np.int64)
        return cls(c)

    @property
    def n_tuples(self) -> int:
        return self.counts.shape[0]

    @property
    def class_count(self) -> int:
        return self.counts.shape[1]

    @property
    def tuple_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def class_counts(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def tuple_index(self) -> list[tuple[int, ...]]:
        """Observed feature-value tuples, position ``t`` holding tuple code ``t``."""
        if self._source is None:
            return [(t,) for t in range(self.n_tuples)]
        if not self.subset:
            return [()]
        vals = self._source[np.ix_(self._first_rows, list(self.subset))]
        return [tuple(int(v) for v in r) for r in vals]

    def cells(self) -> dict[tuple[tuple[int, ...], int], int]:
        """Sparse ``{(tuple, class): count}`` map of the non-zero cells."""
        tuples = self.tuple_index
        t_idx, c_idx = np.nonzero(self.counts)
        return {(tuples[t], int(c)): int(self.counts[t, c]) for t, c in zip(t_idx, c_idx)}

    def probability(self, t: int, c: int) -> float:
        return self.counts[t, c] / self.n_rows

    def transpose(self) -> "JointTable":
        """Swap roles: classes become tuples and tuples become classes."""
        return JointTable(self.counts.T.copy())

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.counts.shape == other.counts.shape and np.array_equal(self.counts, other.counts)

    def __repr__(self):
        return f"JointTable(subset={self.subset}, n_tuples={self.n_tuples}, classes={self.class_count}, n={self.n_rows})"


def _from_row_codes(codes: np.ndarray, first_rows: np.ndarray, labels: np.ndarray, n_classes: int, subset, source):
    n_t = first_rows.size
    counts = np.bincount(codes * n_classes + labels, minlength=n_t * n_classes).reshape(n_t, n_classes)
    return JointTable(counts, subset, codes, first_rows, source)


def table_for_target(row_codes: np.ndarray, target: np.ndarray, n_target: int) -> JointTable:
    """Table of ``target`` against arbitrary per-row tuple codes (first-occurrence coded)."""
    codes, first = _canonical_codes(np.asarray(row_codes, dtype=np.int64))
    n_t = first.size
    counts = np.bincount(codes * n_target + target, minlength=n_t * n_target).reshape(n_t, n_target)
    return JointTable(counts)


def joint(dataset: Dataset, subset=()) -> JointTable:
    """Empirical joint table of class and the feature tuple over ``subset``.

    The empty subset gives one tuple holding every row, so that
    conditioning on it is the same as not conditioning at all.
    """
    subset = as_subset(subset, dataset.n_features)
    n = dataset.n_rows
    if not subset:
        codes = np.zeros(n, dtype=np.int64)
        first = np.zeros(1, dtype=np.int64)
        return _from_row_codes(codes, first, dataset.labels, dataset.n_classes, subset, dataset.matrix)
    m = dataset.matrix
    key = np.zeros(n, dtype=np.int64)
    for j in subset:
        part, _ = _canonical_codes(key * dataset.features[j].cardinality + m[:, j])
        key = part
    codes, first = _canonical_codes(key)
    return _from_row_codes(codes, first, dataset.labels, dataset.n_classes, subset, m)


def extend(table: JointTable, dataset: Dataset, new_feature: int) -> JointTable:
    """Refine ``table`` by one more feature in a single pass over the rows."""
    if not 0 <= new_feature < dataset.n_features:
        raise IndexError(f"feature index {new_feature} out of range for {dataset.n_features} features")
    if new_feature in table.subset:
        raise ValueError(f"feature {new_feature} already in subset {table.subset}")
    if table.row_codes is None or table.row_codes.shape[0] != dataset.n_rows:
        raise ValueError("table was not built from this dataset")
    card = dataset.features[new_feature].cardinality
    key = table.row_codes * card + dataset.matrix[:, new_feature]
    codes, first = _canonical_codes(key)
    subset = tuple(sorted(table.subset + (new_feature,)))
    return _from_row_codes(codes, first, dataset.labels, dataset.n_classes, subset, dataset.matrix)


def class_marginal(table: JointTable) -> np.ndarray:
    """Class distribution ``p(c)`` of a table."""
    return table.class_counts / table.n_rows
