"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible with
``-s``) and records it for the terminal summary.
"""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from mintropy.dataset import Dataset, generate_fig1_dataset, generate_redundant_dataset, random_dataset, split_indices
from mintropy.distribution import JointTable, extend, joint
from mintropy.entropy import (
    bayes_error,
    cachin_cond_min_entropy,
    class_entropy,
    cond_min_entropy,
    cond_mutual_info_shannon,
    cond_shannon,
    mutual_info_shannon,
    renyi_entropy,
)
from mintropy.evaluation import ClassifierKind, reports_to_csv, reports_to_json, run_pipeline
from mintropy.oracle import brute_force_bayes_error, brute_force_score, check_local_optimality, min_set_exact
from mintropy.selection import Criterion, StopRule, baseline_score, greedy_select

RANDOM_SEEDS = range(100)
RENYI = Criterion("renyi")
SHANNON = Criterion("shannon")


@pytest.fixture
def verdict(verdicts):
    @contextmanager
    def run(number: int, title: str):
        try:
            yield
        except BaseException:
            verdicts.append((number, title, False))
            print(f"\ncriterion {number}: FAIL  {title}")
            raise
        verdicts.append((number, title, True))
        print(f"\ncriterion {number}: PASS  {title}")

    return run


@pytest.fixture(scope="module")
def random_sets():
    out = [random_dataset(s) for s in RANDOM_SEEDS]
    for ds in out:
        assert ds.n_features <= 8 and ds.n_classes <= 6 and ds.n_rows <= 200
    return out


def all_tables(ds: Dataset) -> dict[tuple[int, ...], JointTable]:
    """Joint table for every subset, each built from its prefix."""
    tables = {(): joint(ds, ())}
    for size in range(1, ds.n_features + 1):
        for s in itertools.combinations(range(ds.n_features), size):
            tables[s] = extend(tables[s[:-1]], ds, s[-1])
    return tables


def test_criterion_01_golden_values(verdict):
    with verdict(1, "golden conditional entropies on the fig1 table"):
        ds = generate_fig1_dataset()
        h1 = lambda *s: cond_shannon(joint(ds, s))
        hi = lambda *s: cond_min_entropy(joint(ds, s))
        # closed forms from the partition each subset induces on ten equiprobable rows
        exact = {
            "H1(C|f0)": (h1(0), 0.4 * 2 + 0.6 * math.log2(6)),
            "Hinf(C|f0)": (hi(0), math.log2(5)),
            "Hinf(C|f1,f2)": (hi(1, 2), 1.0),
            "Hinf(C|f0,f1)": (hi(0, 1), -math.log2(0.4)),
        }
        for i in range(1, 6):
            exact[f"H1(C|f{i})"] = (h1(i), 2.4)
            exact[f"Hinf(C|f{i})"] = (hi(i), -math.log2(0.3))
        for name, (got, want) in exact.items():
            assert got == pytest.approx(want, abs=1e-12), name

        four_places = [(h1(0), 2.3510), (hi(0), 2.3219), (hi(1), 1.7370), (hi(1, 2), 1.0), (hi(0, 1), 1.3219)]
        four_places += [(h1(i), 2.4) for i in range(1, 6)]
        for got, want in four_places:
            assert abs(got - want) <= 1e-3
        quoted = [(h1(0), 2.35), (h1(1), 2.4), (hi(0), 2.32), (hi(1), 1.74), (hi(1, 2), 1.0), (hi(0, 1), 1.32)]
        for got, want in quoted:
            assert round(got, 2) == want


def test_criterion_02_greedy_on_fig1(verdict):
    with verdict(2, "shannon takes f0 first and needs 6 features; renyi skips f0 and needs 5"):
        ds = generate_fig1_dataset()
        sh = greedy_select(ds, SHANNON, StopRule(threshold_h=0.0))
        assert sh.selected[0] == 0
        assert len(sh.selected) == 6 and sh.stopped_by == "threshold"
        assert sh.steps[-1].h1 == 0.0 and sh.steps[-2].h1 > 0.0

        rn = greedy_select(ds, RENYI, StopRule(threshold_h=0.0))
        assert 0 not in rn.selected
        assert len(rn.selected) == 5 and rn.stopped_by == "threshold"
        assert rn.steps[-1].hinf == 0.0 and rn.steps[-2].hinf > 0.0


def test_criterion_03_exact_min_set(verdict):
    with verdict(3, "exhaustive min set on fig1 has size 5 for both orders"):
        ds = generate_fig1_dataset()
        t0 = time.perf_counter()
        results = {order: min_set_exact(ds, order, 0.0) for order in ("shannon", "min")}
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0
        for res in results.values():
            assert res.feasible and res.size == 5 and res.achieved_entropy == 0.0
        sh = greedy_select(ds, SHANNON, StopRule(threshold_h=0.0))
        assert len(sh.selected) > results["shannon"].size


def test_criterion_04_bayes_identity(verdict, random_sets):
    with verdict(4, "B = 1 - 2^-Hinf on every nonempty subset"):
        fig1 = generate_fig1_dataset()
        checked = 0
        for ds in [fig1, *random_sets]:
            for s, t in all_tables(ds).items():
                if not s:
                    continue
                assert abs(bayes_error(t) - (1.0 - 2.0 ** -cond_min_entropy(t))) <= 1e-12
                checked += 1
        assert checked >= 63 + 100
        for s, t in all_tables(fig1).items():
            if s:
                assert abs(bayes_error(t) - brute_force_bayes_error(fig1, s)) <= 1e-12


def test_criterion_05_local_optimality(verdict, random_sets):
    with verdict(5, "renyi traces locally optimal; shannon on fig1 is not at step 1"):
        for ds in random_sets:
            trace = greedy_select(ds, RENYI, StopRule(threshold_h=0.0, max_features=ds.n_features))
            assert check_local_optimality(ds, trace) == []

        fig1 = generate_fig1_dataset()
        sh = greedy_select(fig1, SHANNON, StopRule(threshold_h=0.0))
        step1 = [v for v in check_local_optimality(fig1, sh) if v.step == 1]
        assert step1
        b0 = brute_force_bayes_error(fig1, (0,))
        b1 = brute_force_bayes_error(fig1, (1,))
        assert b0 == pytest.approx(0.8, abs=1e-12) and b1 == pytest.approx(0.7, abs=1e-12)
        v1 = next(v for v in step1 if v.feature == 1)
        assert v1.selected_error == pytest.approx(b0, abs=1e-12)
        assert v1.candidate_error == pytest.approx(b1, abs=1e-12)


def test_criterion_06_monotonicity(verdict, random_sets):
    with verdict(6, "Arimoto Hinf and H1 never grow with the subset; Cachin does"):
        pairs = 0
        for ds in random_sets:
            tables = all_tables(ds)
            hinf = {s: cond_min_entropy(t) for s, t in tables.items()}
            h1 = {s: cond_shannon(t) for s, t in tables.items()}
            hc_inf = class_entropy(tables[()], "min")
            hc_1 = class_entropy(tables[()], "shannon")
            for s in tables:
                assert hinf[s] <= hc_inf + 1e-12 and h1[s] <= hc_1 + 1e-12
                for f in range(ds.n_features):
                    if f in s:
                        continue
                    bigger = tuple(sorted(s + (f,)))
                    assert hinf[bigger] <= hinf[s] + 1e-12
                    assert h1[bigger] <= h1[s] + 1e-12
                    pairs += 1
        assert pairs > 1000

        # rows are the observables y1 (posterior 0.5/0.5) and y2 (posterior 1/0)
        t = JointTable.from_counts([[3, 3], [4, 0]])
        prior = class_entropy(t, "min")
        assert prior == pytest.approx(-math.log2(0.7), abs=1e-12)
        assert prior == pytest.approx(0.5146, abs=1e-4)
        cachin = cachin_cond_min_entropy(t)
        assert cachin == pytest.approx(0.6, abs=1e-12)
        assert cachin > prior
        assert cond_min_entropy(t) <= prior


def test_criterion_07_renyi_family(verdict):
    with verdict(7, "H_alpha weakly decreasing in alpha; uniform gives log2 n"):
        orders = [0.5, 0.999, 1.001, 2, 10, 100, math.inf]
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            p = rng.dirichlet(np.ones(n))
            p = p / p.sum()
            assert p.max() - p.min() > 1e-6
            hs = [renyi_entropy(p, a) for a in orders]
            for a, b in zip(hs, hs[1:]):
                assert b <= a + 1e-12
        for n in range(1, 33):
            u = np.full(n, 1.0 / n)
            for a in orders + [1.0]:
                assert abs(renyi_entropy(u, a) - math.log2(n)) <= 1e-9


def test_criterion_08_baseline_oracle(verdict):
    with verdict(8, "baseline scores equal brute force; JMI-CMI identity"):
        criteria = [Criterion("mifs", b) for b in (0.0, 0.5, 1.0)] + [Criterion(k) for k in ("mrmr", "jmi", "cmim")]
        compared = 0
        for seed in range(20):
            ds = random_dataset(1000 + seed, n_features=4)
            for crit in criteria:
                for size in range(4):
                    for s in itertools.combinations(range(4), size):
                        for f in range(4):
                            if f in s:
                                continue
                            got = baseline_score(ds, crit, f, s)
                            assert abs(got - brute_force_score(ds, crit, f, s)) <= 1e-9
                            compared += 1
            for i, s in itertools.permutations(range(4), 2):
                lhs = mutual_info_shannon(joint(ds, (i, s)))
                rhs = mutual_info_shannon(joint(ds, (s,))) + cond_mutual_info_shannon(ds, i, (s,))
                assert abs(lhs - rhs) <= 1e-9
        assert compared == 20 * 6 * 32


def _perturb_rows(ds: Dataset, rows: np.ndarray, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    m = ds.matrix.copy()
    labels = ds.labels.copy()
    m[rows] = rng.integers(0, np.array(ds.cardinalities), size=(len(rows), ds.n_features))
    labels[rows] = rng.integers(0, ds.n_classes, size=len(rows))
    return Dataset.from_codes(
        m, labels, class_names=ds.class_names, feature_names=ds.feature_names, cardinalities=ds.cardinalities
    )


def test_criterion_09_determinism_and_leakage(verdict):
    with verdict(9, "pipeline byte-deterministic; selection blind to test rows"):
        ds = random_dataset(9, n_rows=150, n_features=8, n_classes=4)
        kinds = [ClassifierKind("ideal-bayes"), ClassifierKind("naive-bayes")]
        criteria = [RENYI, SHANNON, Criterion("mrmr"), Criterion("cmim")]
        kw = dict(n_bootstrap=5, max_features=6, seed=11, train_fraction=0.8)
        a = run_pipeline(ds, criteria, kinds, **kw)
        b = run_pipeline(ds, criteria, kinds, threads=4, **kw)
        assert reports_to_json(a).encode() == reports_to_json(b).encode()
        assert reports_to_csv(a).encode() == reports_to_csv(b).encode()

        # perturb every split's test rows in turn; that split's selections must not move
        seeds = a[0].seeds
        changed_curves = 0
        for s, split_seed in enumerate(seeds):
            _, test_idx = split_indices(ds.n_rows, 0.8, split_seed)
            mutated = _perturb_rows(ds, test_idx, 100 + s)
            c = run_pipeline(mutated, criteria, kinds, **kw)
            for ra, rc in zip(a, c):
                assert ra.selected[s] == rc.selected[s]
                changed_curves += ra.curves != rc.curves
        assert changed_curves > 0


def test_criterion_10_redundant_smoke(verdict):
    with verdict(10, "renyi ideal-bayes curve dominates shannon up to k=20 on redundant data"):
        t0 = time.perf_counter()
        ds = generate_redundant_dataset(0)
        assert (ds.n_rows, ds.n_features, ds.n_classes) == (500, 60, 10)
        reports = run_pipeline(
            ds, [RENYI, SHANNON], [ClassifierKind("ideal-bayes")], n_bootstrap=1, max_features=20, train_fraction=None
        )
        rn = reports[0].mean_curves["ideal-bayes"]
        sh = reports[1].mean_curves["ideal-bayes"]
        assert len(rn) == len(sh) == 20
        for k in range(20):
            assert rn[k] >= sh[k], f"k={k + 1}: renyi {rn[k]} < shannon {sh[k]}"
        assert time.perf_counter() - t0 < 300
