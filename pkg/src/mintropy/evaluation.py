"""Accuracy-versus-feature-count evaluation of selection criteria.

Each bootstrap split shuffles the rows under its own seed, selects features
on the training part only and then scores classifiers on the test part with
the first ``k`` selected features, for ``k = 1 .. max_features``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, DatasetError, split_indices
from .distribution import as_subset
from .selection import Criterion, SelectionTrace, StopRule, greedy_select

__all__ = [
    "ClassifierKind",
    "EvalReport",
    "classify",
    "predict",
    "run_pipeline",
    "reports_to_csv",
    "reports_to_json",
]

CSV_HEADER = ("split", "seed", "criterion", "classifier", "k", "feature", "accuracy")


@dataclass(frozen=True)
class ClassifierKind:
    kind: str = "ideal-bayes"
    laplace_alpha: float = 1.0

    def __post_init__(self):
        kind = {"ideal": "ideal-bayes", "bayes": "ideal-bayes", "naive": "naive-bayes", "nb": "naive-bayes"}.get(
            self.kind, self.kind
        )
        if kind not in ("ideal-bayes", "naive-bayes"):
            raise ValueError(f"unknown classifier {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not (self.laplace_alpha > 0 and math.isfinite(self.laplace_alpha)):
            raise ValueError("laplace_alpha must be positive")

    @classmethod
    def parse(cls, spec: str) -> "ClassifierKind":
        """``"ideal-bayes"`` or ``"naive-bayes[:alpha]"``."""
        kind, _, arg = spec.strip().partition(":")
        return cls(kind, float(arg) if arg else 1.0)

    @property
    def label(self) -> str:
        return f"naive-bayes:{self.laplace_alpha:g}" if self.kind == "naive-bayes" else self.kind


def _check_pair(train: Dataset, test: Dataset, subset) -> tuple[int, ...]:
    if not train.same_schema(test):
        raise DatasetError("train and test datasets have different schemas")
    return as_subset(subset, train.n_features)


def _ideal_bayes(train: Dataset, test: Dataset, subset: tuple[int, ...]) -> np.ndarray:
    k = train.n_classes
    prior = np.bincount(train.labels, minlength=k)
    fallback = int(np.argmax(prior))
    if not subset:
        return np.full(test.n_rows, fallback, dtype=np.int64)
    both = np.vstack([train.matrix[:, list(subset)], test.matrix[:, list(subset)]])
    _, codes = np.unique(both, axis=0, return_inverse=True)
    codes = codes.ravel()
    tr, te = codes[: train.n_rows], codes[train.n_rows :]
    n_t = int(codes.max()) + 1
    counts = np.bincount(tr * k + train.labels, minlength=n_t * k).reshape(n_t, k)
    best = np.argmax(counts, axis=1)
    seen = counts.sum(axis=1) > 0
    pred = np.where(seen, best, fallback)
    return pred[te]


def _naive_bayes(train: Dataset, test: Dataset, subset: tuple[int, ...], alpha: float) -> np.ndarray:
    k = train.n_classes
    class_n = np.bincount(train.labels, minlength=k).astype(float)
    with np.errstate(divide="ignore"):
        scores = np.tile(np.log(class_n / train.n_rows), (test.n_rows, 1))
    for j in subset:
        card = train.features[j].cardinality
        c = np.bincount(train.labels * card + train.matrix[:, j], minlength=k * card).reshape(k, card)
        logp = np.log((c + alpha) / (class_n[:, None] + alpha * card))
        scores = scores + logp[:, test.matrix[:, j]].T
    return np.argmax(scores, axis=1)


def predict(train: Dataset, test: Dataset, subset, kind: ClassifierKind) -> np.ndarray:
    """Class index predicted for every test row (ties go to the lowest class index)."""
    subset = _check_pair(train, test, subset)
    if kind.kind == "ideal-bayes":
        return _ideal_bayes(train, test, subset)
    return _naive_bayes(train, test, subset, kind.laplace_alpha)


def classify(train: Dataset, test: Dataset, subset, kind: ClassifierKind = ClassifierKind()) -> float:
    """Test accuracy of a classifier trained on ``train`` using only ``subset``.

    The ideal Bayes classifier predicts the most frequent training class of
    the test row's feature tuple, and the training prior's mode for tuples
    never seen in training. The naive Bayes classifier multiplies
    Laplace-smoothed per-feature likelihoods into the training prior.
    """
    if test.n_rows < 1:
        raise DatasetError("empty test set")
    pred = predict(train, test, subset, kind)
    return float(np.mean(pred == test.labels))


@dataclass
class EvalReport:
    """Curves for one criterion: ``curves[classifier][split][k-1]`` is the accuracy with ``k`` features."""

    criterion: str
    dataset_id: str
    seeds: list[int]
    classifiers: list[str]
    max_features: int
    train_fraction: float | None
    selected: list[list[int]] = field(default_factory=list)
    curves: dict[str, list[list[float]]] = field(default_factory=dict)

    @property
    def mean_curves(self) -> dict[str, list[float]]:
        return {
            name: [math.fsum(col) / len(col) for col in zip(*splits)] for name, splits in self.curves.items()
        }

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "dataset_id": self.dataset_id,
            "seeds": self.seeds,
            "classifiers": self.classifiers,
            "max_features": self.max_features,
            "train_fraction": self.train_fraction,
            "selected": self.selected,
            "curves": self.curves,
            "mean_curves": self.mean_curves,
        }

    def csv_rows(self):
        for name in self.classifiers:
            for s, curve in enumerate(self.curves[name]):
                feats = self.selected[s]
                for k, acc in enumerate(curve, start=1):
                    feat = feats[k - 1] if k <= len(feats) else ""
                    yield (s, self.seeds[s], self.criterion, name, k, feat, repr(acc))


def reports_to_json(reports: list[EvalReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def reports_to_csv(reports: list[EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerows(r.csv_rows())
    return buf.getvalue()


def _split_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def _run_split(dataset, split_seed, criteria, kinds, max_features, train_fraction):
    if train_fraction is None:
        train = test = dataset
    else:
        tr_idx, te_idx = split_indices(dataset.n_rows, train_fraction, split_seed)
        train, test = dataset.take(tr_idx), dataset.take(te_idx)
    out = []
    for crit in criteria:
        trace = greedy_select(train, crit, StopRule(max_features=max_features))
        feats = trace.selected
        curves = {}
        for kind in kinds:
            # past the end of a short trace the feature set stays the full selection
            curves[kind.label] = [classify(train, test, feats[: min(k, len(feats))], kind) for k in range(1, max_features + 1)]
        out.append((trace, curves))
    return out


def run_pipeline(
    dataset: Dataset,
    criteria: list[Criterion],
    kinds: list[ClassifierKind],
    n_bootstrap: int = 5,
    max_features: int = 50,
    seed: int = 0,
    train_fraction: float | None = 0.8,
    dataset_id: str = "dataset",
    threads: int = 1,
) -> list[EvalReport]:
    """One :class:`EvalReport` per criterion, in the order given.

    ``train_fraction=None`` evaluates on the training data itself (no hold-out).
    Splits may run in a thread pool; results are merged in split order.
    """
    if n_bootstrap < 1:
        raise ValueError("n_bootstrap must be positive")
    if not 1 <= max_features <= dataset.n_features:
        raise ValueError(f"max_features must lie in [1, {dataset.n_features}]")
    if not criteria or not kinds:
        raise ValueError("need at least one criterion and one classifier")
    labels = [k.label for k in kinds]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate classifier")
    seeds = _split_seeds(seed, n_bootstrap)
    args = dict(criteria=criteria, kinds=kinds, max_features=max_features, train_fraction=train_fraction)
    if threads > 1 and n_bootstrap > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_split = list(pool.map(lambda s: _run_split(dataset, s, **args), seeds))
    else:
        per_split = [_run_split(dataset, s, **args) for s in seeds]

    reports = []
    for ci, crit in enumerate(criteria):
        rep = EvalReport(crit.label, dataset_id, seeds, labels, max_features, train_fraction)
        for split_result in per_split:
            trace, curves = split_result[ci]
            rep.selected.append(trace.selected)
            for name in labels:
                rep.curves.setdefault(name, []).append(curves[name])
        reports.append(rep)
    return reports
