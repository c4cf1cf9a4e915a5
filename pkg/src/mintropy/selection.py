"""Greedy forward feature selection with pluggable scoring criteria.

Starting from the empty set, each step adds the unselected feature that
optimizes the criterion given the features chosen so far:

* ``renyi``  -- minimize the conditional min-entropy ``H_inf(C | S, f)``
* ``shannon`` -- minimize ``H1(C | S, f)`` (equivalently maximize ``I1(C; f | S)``)
* ``mifs``, ``mrmr``, ``jmi``, ``cmim`` -- maximize the classic Shannon scores

Ties go to the lowest feature index.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .dataset import Dataset
from .distribution import JointTable, as_subset, extend, joint, table_for_target
from .entropy import (
    MIN_ENTROPY,
    SHANNON,
    _clamp,
    bayes_error,
    class_entropy,
    cond_min_entropy,
    cond_shannon,
    max_mass,
    mutual_info_shannon,
)

__all__ = [
    "CRITERIA",
    "Criterion",
    "SelectionTrace",
    "StopRule",
    "TraceStep",
    "greedy_select",
    "score_cmim",
    "score_jmi",
    "score_mifs",
    "score_mrmr",
]

CRITERIA = ("renyi", "shannon", "mifs", "mrmr", "jmi", "cmim")
_ALIASES = {"renyi-min": "renyi", "min": "renyi", "hinf": "renyi", "h1": "shannon", "cmi": "cmim"}


@dataclass(frozen=True)
class Criterion:
    kind: str
    beta: float = 1.0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in CRITERIA:
            raise ValueError(f"unknown criterion {self.kind!r}; choose from {', '.join(CRITERIA)}")
        object.__setattr__(self, "kind", kind)
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError("mifs beta must be a finite non-negative number")

    @classmethod
    def parse(cls, spec: str, beta: float | None = None) -> "Criterion":
        """``"renyi"``, ``"shannon"``, ``"mifs:0.5"``, ... ; ``beta`` overrides the suffix."""
        kind, _, arg = spec.strip().partition(":")
        b = float(arg) if arg else 1.0
        if beta is not None:
            b = beta
        return cls(kind, b)

    @property
    def label(self) -> str:
        return f"mifs:{self.beta:g}" if self.kind == "mifs" else self.kind

    @property
    def is_entropy(self) -> bool:
        return self.kind in ("renyi", "shannon")


@dataclass(frozen=True)
class StopRule:
    """When to stop adding features; the first rule that fires wins."""

    threshold_h: float | None = None
    max_features: int | None = None
    target_error: float | None = None

    def __post_init__(self):
        if self.threshold_h is None and self.max_features is None and self.target_error is None:
            raise ValueError("StopRule needs at least one of threshold_h, max_features, target_error")
        if self.threshold_h is not None and not self.threshold_h >= 0:
            raise ValueError("threshold_h must be non-negative")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be positive")
        if self.target_error is not None and not 0 <= self.target_error <= 1:
            raise ValueError("target_error must be a probability")


@dataclass(frozen=True)
class TraceStep:
    step: int
    feature: int
    name: str
    criterion_value: float
    h1: float
    hinf: float
    bayes_error: float


@dataclass
class SelectionTrace:
    criterion: str
    steps: list[TraceStep]
    stopped_by: str
    n_features: int
    n_rows: int
    initial_h1: float
    initial_hinf: float
    initial_bayes_error: float
    thresholds: dict = field(default_factory=dict)

    @property
    def selected(self) -> list[int]:
        return [s.feature for s in self.steps]

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["selected"] = self.selected
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["step,feature,name,criterion_value,h1,hinf,bayes_error"]
        for s in self.steps:
            lines.append(
                f"{s.step},{s.feature},{s.name},{s.criterion_value!r},{s.h1!r},{s.hinf!r},{s.bayes_error!r}"
            )
        return "\n".join(lines) + "\n"


class _Scorer:
    """Memoized Shannon quantities on one dataset, shared across greedy steps."""

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self._h1_given: dict[tuple[int, ...], float] = {}
        self._redundancy: dict[tuple[int, int], float] = {}
        self._singles: dict[int, JointTable] = {}
        self.h_class = class_entropy(joint(dataset, ()), SHANNON)

    def single(self, f: int) -> JointTable:
        t = self._singles.get(f)
        if t is None:
            t = self._singles[f] = joint(self.dataset, (f,))
        return t

    def h1_given(self, subset: tuple[int, ...]) -> float:
        v = self._h1_given.get(subset)
        if v is None:
            if len(subset) == 1:
                t = self.single(subset[0])
            elif len(subset) == 2:
                t = extend(self.single(subset[0]), self.dataset, subset[1])
            else:
                t = joint(self.dataset, subset)
            v = self._h1_given[subset] = cond_shannon(t)
        return v

    def relevance(self, f: int) -> float:
        return _clamp(self.h_class - self.h1_given((f,)))

    def redundancy(self, s: int, f: int) -> float:
        """``I1(f_s; f)``, symmetric in its arguments."""
        key = (min(s, f), max(s, f))
        v = self._redundancy.get(key)
        if v is None:
            a, b = key
            t = table_for_target(self.dataset.matrix[:, a], self.dataset.matrix[:, b], self.dataset.features[b].cardinality)
            v = self._redundancy[key] = mutual_info_shannon(t)
        return v

    def joint_relevance(self, f: int, s: int) -> float:
        """``I1(C; f, f_s)``."""
        return _clamp(self.h_class - self.h1_given(as_subset((f, s))))

    def conditional_relevance(self, f: int, s: int) -> float:
        """``I1(C; f | f_s)``."""
        return _clamp(self.h1_given((s,)) - self.h1_given(as_subset((f, s))))


def _check_args(dataset: Dataset, f: int, subset) -> tuple[int, ...]:
    subset = as_subset(subset, dataset.n_features)
    if not 0 <= f < dataset.n_features:
        raise IndexError(f"feature index {f} out of range")
    if f in subset:
        raise ValueError(f"feature {f} already in selected set {subset}")
    return subset


def _mifs(sc: _Scorer, f: int, subset, beta: float) -> float:
    red = math.fsum(sc.redundancy(s, f) for s in subset)
    return sc.relevance(f) - beta * red


def _mrmr(sc: _Scorer, f: int, subset) -> float:
    if not subset:
        return sc.relevance(f)
    return sc.relevance(f) - math.fsum(sc.redundancy(s, f) for s in subset) / len(subset)


def _jmi(sc: _Scorer, f: int, subset) -> float:
    if not subset:
        return sc.relevance(f)
    return min(sc.joint_relevance(f, s) for s in subset)


def _cmim(sc: _Scorer, f: int, subset) -> float:
    if not subset:
        return sc.relevance(f)
    return min(sc.conditional_relevance(f, s) for s in subset)


def score_mifs(dataset: Dataset, f: int, subset=(), beta: float = 1.0, _scorer: _Scorer | None = None) -> float:
    """``I1(C; f) - beta * sum_{s in S} I1(f_s; f)``."""
    subset = _check_args(dataset, f, subset)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return _mifs(_scorer or _Scorer(dataset), f, subset, beta)


def score_mrmr(dataset: Dataset, f: int, subset=(), _scorer: _Scorer | None = None) -> float:
    """Relevance minus the mean redundancy with the selected features."""
    subset = _check_args(dataset, f, subset)
    return _mrmr(_scorer or _Scorer(dataset), f, subset)


def score_jmi(dataset: Dataset, f: int, subset=(), _scorer: _Scorer | None = None) -> float:
    """``min_{s in S} I1(C; f, f_s)``; plain relevance for an empty ``S``."""
    subset = _check_args(dataset, f, subset)
    return _jmi(_scorer or _Scorer(dataset), f, subset)


def score_cmim(dataset: Dataset, f: int, subset=(), _scorer: _Scorer | None = None) -> float:
    """``min_{s in S} I1(C; f | f_s)``; plain relevance for an empty ``S``."""
    subset = _check_args(dataset, f, subset)
    return _cmim(_scorer or _Scorer(dataset), f, subset)


def baseline_score(dataset: Dataset, criterion: Criterion, f: int, subset=(), _scorer=None) -> float:
    """Dispatch to the MIFS/mRMR/JMI/CMIM score named by ``criterion``."""
    if criterion.kind == "mifs":
        return score_mifs(dataset, f, subset, criterion.beta, _scorer)
    if criterion.kind == "mrmr":
        return score_mrmr(dataset, f, subset, _scorer)
    if criterion.kind == "jmi":
        return score_jmi(dataset, f, subset, _scorer)
    if criterion.kind == "cmim":
        return score_cmim(dataset, f, subset, _scorer)
    raise ValueError(f"{criterion.kind!r} is not a baseline criterion")


def _stop_reason(stop: StopRule, criterion: Criterion, table: JointTable, n_selected: int) -> str | None:
    if stop.max_features is not None and n_selected >= stop.max_features:
        return "max_features"
    if stop.threshold_h is not None:
        h = cond_shannon(table) if criterion.kind == "shannon" else cond_min_entropy(table)
        if h <= stop.threshold_h:
            return "threshold"
    if stop.target_error is not None and bayes_error(table) <= stop.target_error:
        return "target_error"
    return None


def greedy_select(dataset: Dataset, criterion: Criterion, stop: StopRule, threads: int = 1) -> SelectionTrace:
    """Run greedy forward selection and record every step.

    Parameters
    ----------
    dataset : Dataset
        Only this data is read; pass the training part when evaluating.
    criterion : Criterion
        Scoring rule.
    stop : StopRule
        ``threshold_h`` is compared with ``H1(C|S)`` for the shannon
        criterion and with ``H_inf(C|S)`` for every other one.
    threads : int
        Candidate scoring within a step may use a thread pool; the result is
        identical for any value.

    Features that take a single value in ``dataset`` are never candidates.
    The trace ends with ``stopped_by`` set to the stop rule that fired, or
    ``"exhausted"`` when no candidate is left.
    """
    n = dataset.n_rows
    live = [j for j in range(dataset.n_features) if np.unique(dataset.features[j].values).size > 1]
    scorer = _Scorer(dataset) if not criterion.is_entropy else None
    table = joint(dataset, ())
    selected: list[int] = []
    steps: list[TraceStep] = []
    pool = ThreadPoolExecutor(threads) if threads and threads > 1 else None

    def evaluate(f: int):
        if criterion.kind == "renyi":
            return max_mass(extend(table, dataset, f))
        if criterion.kind == "shannon":
            return -cond_shannon(extend(table, dataset, f))
        return baseline_score(dataset, criterion, f, selected, scorer)

    try:
        while True:
            reason = _stop_reason(stop, criterion, table, len(selected))
            if reason is not None:
                break
            taken = set(selected)
            remaining = [j for j in live if j not in taken]
            if not remaining:
                reason = "exhausted"
                break
            keys = list(pool.map(evaluate, remaining)) if pool else [evaluate(f) for f in remaining]
            best = 0
            for i in range(1, len(keys)):
                if keys[i] > keys[best]:
                    best = i
            f = remaining[best]
            table = extend(table, dataset, f)
            selected.append(f)
            hinf = cond_min_entropy(table)
            h1 = cond_shannon(table)
            if criterion.kind == "renyi":
                value = hinf
            elif criterion.kind == "shannon":
                value = h1
            else:
                value = float(keys[best])
            steps.append(
                TraceStep(len(steps) + 1, f, dataset.features[f].name, value, h1, hinf, bayes_error(table))
            )
    finally:
        if pool:
            pool.shutdown()

    t0 = joint(dataset, ())
    return SelectionTrace(
        criterion=criterion.label,
        steps=steps,
        stopped_by=reason,
        n_features=dataset.n_features,
        n_rows=n,
        initial_h1=cond_shannon(t0),
        initial_hinf=cond_min_entropy(t0),
        initial_bayes_error=bayes_error(t0),
        thresholds={k: v for k, v in asdict(stop).items() if v is not None},
    )
