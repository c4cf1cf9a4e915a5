"""Exhaustive reference computations.

:func:`min_set_exact` solves the minimum-size feature subset problem by
enumeration. The ``brute_force_*`` functions recompute every quantity from
raw rows with plain dictionaries and :mod:`math`, sharing no code with
the table and entropy modules, so tests can check one against the other.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .dataset import Dataset
from .distribution import JointTable, as_subset, extend, joint
from .entropy import cond_min_entropy, cond_shannon, max_mass, parse_order, MIN_ENTROPY, SHANNON
from .selection import Criterion, SelectionTrace

__all__ = [
    "MAX_ORACLE_FEATURES",
    "LocalOptimalityViolation",
    "MinSetResult",
    "brute_force_bayes_error",
    "brute_force_cond_entropy",
    "brute_force_score",
    "check_local_optimality",
    "min_set_exact",
]

MAX_ORACLE_FEATURES = 24


@dataclass(frozen=True)
class MinSetResult:
    subset: tuple[int, ...] | None
    achieved_entropy: float
    explored: int
    feasible: bool
    order: str
    threshold: float

    @property
    def size(self) -> int | None:
        return None if self.subset is None else len(self.subset)

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "subset": None if self.subset is None else list(self.subset),
            "size": self.size,
            "achieved_entropy": self.achieved_entropy,
            "explored": self.explored,
            "order": self.order,
            "h": self.threshold,
        }


def _measure(order: float):
    if order == SHANNON:
        return cond_shannon
    if order == MIN_ENTROPY:
        return cond_min_entropy
    raise ValueError("min_set_exact supports only the shannon and min-entropy orders")


def min_set_exact(dataset: Dataset, order="min", h: float = 0.0) -> MinSetResult:
    """Smallest feature subset ``S`` with ``H(C | S) <= h``.

    Subsets are tried by increasing size and lexicographically within a
    size, so the first satisfier found is returned. Tables are built
    depth-first, each refining its prefix by one feature. When even the
    full feature set misses ``h`` the result is marked infeasible and
    carries ``H(C | F)``.
    """
    alpha = parse_order(order)
    measure = _measure(alpha)
    label = "shannon" if alpha == SHANNON else "min"
    if h < 0 or math.isnan(h):
        raise ValueError("threshold h must be non-negative")
    nf = dataset.n_features
    if nf > MAX_ORACLE_FEATURES:
        raise ValueError(f"{nf} features exceeds the exhaustive-search limit of {MAX_ORACLE_FEATURES}")

    full = measure(joint(dataset, range(nf)))
    if full > h:
        return MinSetResult(None, full, 1, False, label, h)

    explored = 0
    root = joint(dataset, ())
    for size in range(nf + 1):
        # depth-first over increasing index sequences visits combinations in lexicographic order
        def visit(start: int, table: JointTable, depth: int):
            nonlocal explored
            if depth == size:
                explored += 1
                v = measure(table)
                return (tuple(table.subset), v) if v <= h else None
            for f in range(start, nf - (size - depth) + 1):
                hit = visit(f + 1, extend(table, dataset, f), depth + 1)
                if hit is not None:
                    return hit
            return None

        hit = visit(0, root, 0)
        if hit is not None:
            return MinSetResult(hit[0], hit[1], explored, True, label, h)
    raise AssertionError("full feature set satisfied the threshold but enumeration missed it")


@dataclass(frozen=True)
class LocalOptimalityViolation:
    step: int
    feature: int
    selected_error: float
    candidate_error: float


def check_local_optimality(dataset: Dataset, trace: SelectionTrace) -> list[LocalOptimalityViolation]:
    """Steps where adding some other feature would have given a strictly lower Bayes error.

    Step ``t`` (1-based) compares ``B(C | S^t)`` with ``B(C | S^{t-1} + f)``
    for every ``f`` outside ``S^{t-1}``. Comparisons use the integer
    count of correctly classified rows, so they are exact.
    """
    if trace.n_features != dataset.n_features or trace.n_rows != dataset.n_rows:
        raise ValueError("trace was not produced from this dataset")
    n = dataset.n_rows
    table = joint(dataset, ())
    taken: list[int] = []
    out = []
    for st in trace.steps:
        if not 0 <= st.feature < dataset.n_features or st.feature in taken:
            raise ValueError(f"trace step {st.step} names invalid feature {st.feature}")
        chosen = extend(table, dataset, st.feature)
        chosen_mass = max_mass(chosen)
        if abs((1.0 - chosen_mass / n) - st.bayes_error) > 1e-12:
            raise ValueError(f"trace step {st.step} Bayes error does not match this dataset")
        for f in range(dataset.n_features):
            if f in taken or f == st.feature:
                continue
            m = max_mass(extend(table, dataset, f))
            if m > chosen_mass:
                out.append(LocalOptimalityViolation(st.step, f, 1.0 - chosen_mass / n, 1.0 - m / n))
        taken.append(st.feature)
        table = chosen
    return out


def _rows(dataset: Dataset, subset) -> list[tuple]:
    cols = [dataset.features[j].values.tolist() for j in subset]
    return [tuple(c[i] for c in cols) for i in range(dataset.n_rows)]


def _h_cond(targets: list, given: list) -> float:
    """Plug-in ``H1(targets | given)`` in bits from paired sequences."""
    n = len(targets)
    pair = Counter(zip(given, targets))
    marg = Counter(given)
    return -sum(c / n * math.log2(c / marg[g]) for (g, _), c in pair.items())


def _h(values: list) -> float:
    n = len(values)
    return -sum(c / n * math.log2(c / n) for c in Counter(values).values())


def brute_force_cond_entropy(dataset: Dataset, subset=(), order="shannon") -> float:
    """``H1(C | S)`` or ``H_inf(C | S)`` straight from row counts."""
    subset = as_subset(subset, dataset.n_features)
    alpha = parse_order(order)
    keys = _rows(dataset, subset)
    labels = dataset.labels.tolist()
    if alpha == SHANNON:
        return _h_cond(labels, keys)
    if alpha == MIN_ENTROPY:
        best: dict[tuple, int] = {}
        for k, c in Counter(zip(keys, labels)).items():
            best[k[0]] = max(best.get(k[0], 0), c)
        return -math.log2(sum(best.values()) / dataset.n_rows)
    raise ValueError("brute force supports shannon and min-entropy only")


def brute_force_bayes_error(dataset: Dataset, subset=()) -> float:
    """Error rate of predicting, for each observed tuple, its most frequent class."""
    keys = _rows(dataset, as_subset(subset, dataset.n_features))
    per_tuple: dict[tuple, Counter] = {}
    for k, c in zip(keys, dataset.labels.tolist()):
        per_tuple.setdefault(k, Counter())[c] += 1
    right = sum(max(cnt.values()) for cnt in per_tuple.values())
    return 1.0 - right / dataset.n_rows


def brute_force_score(dataset: Dataset, criterion: Criterion, f: int, subset=()) -> float:
    """Recompute a selection score from raw rows.

    For the entropy criteria this is the conditional entropy of the class
    given ``S + f``; for the baselines it is the MIFS/mRMR/JMI/CMIM score.
    """
    subset = as_subset(subset, dataset.n_features)
    if f in subset:
        raise ValueError(f"feature {f} already in {subset}")
    if criterion.kind == "renyi":
        return brute_force_cond_entropy(dataset, subset + (f,), "min")
    if criterion.kind == "shannon":
        return brute_force_cond_entropy(dataset, subset + (f,), "shannon")

    y = dataset.labels.tolist()
    col = {j: dataset.features[j].values.tolist() for j in (*subset, f)}
    h_y = _h(y)

    def mi(a: list, b: list) -> float:
        return _h(a) - _h_cond(a, b)

    relevance = h_y - _h_cond(y, col[f])
    if criterion.kind in ("mifs", "mrmr"):
        red = sum(mi(col[s], col[f]) for s in subset)
        if criterion.kind == "mifs":
            return relevance - criterion.beta * red
        return relevance - (red / len(subset) if subset else 0.0)
    if not subset:
        return relevance
    if criterion.kind == "jmi":
        return min(h_y - _h_cond(y, list(zip(col[f], col[s]))) for s in subset)
    if criterion.kind == "cmim":
        return min(_h_cond(y, col[s]) - _h_cond(y, list(zip(col[f], col[s]))) for s in subset)
    raise ValueError(f"unsupported criterion {criterion.kind!r}")
