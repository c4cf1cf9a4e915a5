"""Information measures in bits: Rényi family, conditional entropies, Bayes error.

Conditional quantities take a :class:`~mintropy.distribution.JointTable`
(class given the tuple of a feature subset). Shannon sums are evaluated
from the histogram of cell counts with a correctly rounded sum, so the
value depends only on the multiset of counts and not on tuple or class
numbering. Min-entropy quantities reduce to an integer sum of per-tuple
maxima before the single division and logarithm.
"""

from __future__ import annotations

import math

import numpy as np

from .dataset import Dataset
from .distribution import JointTable, as_subset, extend, joint

__all__ = [
    "MIN_ENTROPY",
    "SHANNON",
    "bayes_error",
    "cachin_cond_min_entropy",
    "class_entropy",
    "cond_min_entropy",
    "cond_mutual_info_min",
    "cond_mutual_info_shannon",
    "cond_shannon",
    "min_entropy",
    "mutual_info_min",
    "mutual_info_shannon",
    "parse_order",
    "renyi_entropy",
    "shannon_entropy",
]

SHANNON = 1.0
MIN_ENTROPY = math.inf

PROB_TOL = 1e-9
NEG_CLAMP = 1e-9


def parse_order(order) -> float:
    """Map an order given as a number or name to ``1.0`` (Shannon), ``inf`` (min-entropy) or a finite alpha.

    Accepts numbers and the strings ``"shannon"``, ``"min"``, ``"inf"``.
    """
    if isinstance(order, str):
        key = order.strip().lower()
        if key in ("shannon", "shannon-limit", "1"):
            return SHANNON
        if key in ("min", "min-entropy", "min-entropy-limit", "inf", "infinity"):
            return MIN_ENTROPY
        try:
            order = float(key)
        except ValueError:
            raise ValueError(f"unknown Rényi order {order!r}") from None
    alpha = float(order)
    if math.isnan(alpha) or alpha <= 0:
        raise ValueError(f"Rényi order must be positive, got {order!r}")
    return alpha


def _check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < 0):
        raise ValueError("probability vector has a negative entry")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def renyi_entropy(p, order=SHANNON) -> float:
    """Rényi entropy of order ``order`` of the distribution ``p``.

    ``order`` 1 is the Shannon limit and ``inf`` the min-entropy limit; any
    other positive order uses the closed form ``log2(sum p**a) / (1 - a)``.
    For finite orders, entries below ``1e-300 ** (1/a)`` are dropped as
    exact zeros so that ``p**a`` never underflows.

    >>> round(renyi_entropy([0.75, 0.25], 2), 6)
    0.678072
    """
    p = _check_distribution(p)
    alpha = parse_order(order)
    if alpha == SHANNON:
        nz = p[p > 0]
        return float(max(0.0, -np.sum(nz * np.log2(nz))))
    if alpha == MIN_ENTROPY:
        return float(max(0.0, -math.log2(p.max())))
    floor = 1e-300 ** (1.0 / alpha)
    kept = p[p > floor]
    return float(max(0.0, math.log2(np.sum(kept**alpha)) / (1.0 - alpha)))


def shannon_entropy(p) -> float:
    return renyi_entropy(p, SHANNON)


def min_entropy(p) -> float:
    return renyi_entropy(p, MIN_ENTROPY)


_XLOGX_CACHE = np.zeros(1)


def _xlogx_table(kmax: int) -> np.ndarray:
    global _XLOGX_CACHE
    if _XLOGX_CACHE.size <= kmax:
        k = np.arange(max(kmax + 1, 2 * _XLOGX_CACHE.size), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = k * np.log2(k)
        t[0] = 0.0
        _XLOGX_CACHE = t
    return _XLOGX_CACHE


def _sum_xlogx(counts: np.ndarray) -> float:
    """``sum k*log2(k)`` over integer entries, independent of entry order."""
    hist = np.bincount(np.asarray(counts).ravel())
    ks = np.nonzero(hist[2:])[0] + 2
    if ks.size == 0:
        return 0.0
    table = _xlogx_table(int(ks[-1]))
    return math.fsum((hist[ks] * table[ks]).tolist())


def class_entropy(table: JointTable, order=SHANNON) -> float:
    """Unconditional entropy ``H(C)`` of the class marginal of ``table``."""
    alpha = parse_order(order)
    cc = table.class_counts
    n = table.n_rows
    if alpha == SHANNON:
        return max(0.0, (_sum_xlogx(np.array([n])) - _sum_xlogx(cc)) / n)
    if alpha == MIN_ENTROPY:
        return max(0.0, -math.log2(int(cc.max()) / n))
    return renyi_entropy(cc / n, alpha)


def cond_shannon(table: JointTable) -> float:
    """Conditional Shannon entropy ``H1(C | S) = sum_t p(t) H1(C | t)``."""
    n = table.n_rows
    v = (_sum_xlogx(table.tuple_counts) - _sum_xlogx(table.counts)) / n
    return max(0.0, v)


def max_mass(table: JointTable) -> int:
    """``sum_t max_c n(t, c)``: the number of rows the Bayes rule gets right."""
    return int(table.counts.max(axis=1).sum())


def cond_min_entropy(table: JointTable) -> float:
    """Arimoto/Smith conditional min-entropy ``-log2 sum_t max_c p(t, c)``."""
    return max(0.0, -math.log2(max_mass(table) / table.n_rows))


def bayes_error(table: JointTable) -> float:
    """Bayes error ``1 - sum_t p(t) max_c p(c | t)`` of predicting the class."""
    return 1.0 - max_mass(table) / table.n_rows


def cachin_cond_min_entropy(table: JointTable) -> float:
    """Expected posterior min-entropy ``sum_t p(t) * -log2 max_c p(c | t)``.

    Unlike :func:`cond_min_entropy` this can exceed the prior min-entropy.
    """
    nt = table.tuple_counts
    mx = table.counts.max(axis=1)
    terms = nt * np.log2(nt / mx)
    return max(0.0, math.fsum(terms.tolist()) / table.n_rows)


def _clamp(v: float) -> float:
    return 0.0 if -NEG_CLAMP <= v < 0.0 else v


def mutual_info_shannon(table: JointTable) -> float:
    """``I1(C; S) = H1(C) - H1(C | S)``."""
    return _clamp(class_entropy(table, SHANNON) - cond_shannon(table))


def mutual_info_min(table: JointTable) -> float:
    """``I_inf(C; S) = H_inf(C) - H_inf(C | S)`` (not symmetric)."""
    return _clamp(class_entropy(table, MIN_ENTROPY) - cond_min_entropy(table))


def _pair_tables(dataset: Dataset, feature: int, subset) -> tuple[JointTable, JointTable]:
    subset = as_subset(subset, dataset.n_features)
    if not 0 <= feature < dataset.n_features:
        raise IndexError(f"feature index {feature} out of range")
    if feature in subset:
        raise ValueError(f"feature {feature} already in conditioning set {subset}")
    base = joint(dataset, subset)
    return base, extend(base, dataset, feature)


def cond_mutual_info_shannon(dataset: Dataset, feature: int, subset=()) -> float:
    """``I1(C; f | S) = H1(C | S) - H1(C | S, f)``."""
    base, ext = _pair_tables(dataset, feature, subset)
    return _clamp(cond_shannon(base) - cond_shannon(ext))


def cond_mutual_info_min(dataset: Dataset, feature: int, subset=()) -> float:
    """``I_inf(C; f | S) = H_inf(C | S) - H_inf(C | S, f)``."""
    base, ext = _pair_tables(dataset, feature, subset)
    return _clamp(cond_min_entropy(base) - cond_min_entropy(ext))
