import math

import numpy as np
import pytest

import mintropy.selection as selection
from mintropy.dataset import Dataset, random_dataset
from mintropy.distribution import joint
from mintropy.entropy import cond_mutual_info_shannon, cond_shannon, mutual_info_shannon
from mintropy.oracle import brute_force_score
from mintropy.selection import (
    Criterion,
    StopRule,
    greedy_select,
    score_cmim,
    score_jmi,
    score_mifs,
    score_mrmr,
)

ALL = [Criterion("renyi"), Criterion("shannon"), Criterion("mifs", 0.5), Criterion("mrmr"), Criterion("jmi"), Criterion("cmim")]


class TestFig1Greedy:
    def test_shannon_takes_f0_and_needs_all_six(self, fig1):
        tr = greedy_select(fig1, Criterion("shannon"), StopRule(threshold_h=0))
        assert tr.selected[0] == 0
        assert len(tr) == 6 and tr.stopped_by == "threshold"
        assert tr.steps[-1].h1 == 0.0

    def test_renyi_skips_f0(self, fig1):
        tr = greedy_select(fig1, Criterion("renyi"), StopRule(threshold_h=0))
        assert tr.selected == [1, 2, 3, 4, 5]
        assert 0 not in tr.selected
        assert tr.steps[-1].hinf == 0.0

    def test_renyi_two_steps(self, fig1):
        tr = greedy_select(fig1, Criterion("renyi-min"), StopRule(max_features=2))
        assert tr.selected == [1, 2]
        assert tr.steps[-1].hinf == 1.0
        assert tr.stopped_by == "max_features"

    def test_target_error(self, fig1):
        tr = greedy_select(fig1, Criterion("renyi"), StopRule(target_error=0.5))
        assert tr.selected == [1, 2]
        assert tr.stopped_by == "target_error"

    def test_baseline_threshold_uses_min_entropy(self, fig1):
        tr = greedy_select(fig1, Criterion("mrmr"), StopRule(threshold_h=1.0))
        assert tr.steps[-1].hinf <= 1.0
        assert all(s.hinf > 1.0 for s in tr.steps[:-1])

    def test_threshold_met_by_empty_set(self, fig1):
        tr = greedy_select(fig1, Criterion("renyi"), StopRule(threshold_h=4.0))
        assert tr.selected == [] and tr.stopped_by == "threshold"


class TestStopRule:
    def test_needs_a_field(self):
        with pytest.raises(ValueError):
            StopRule()

    @pytest.mark.parametrize("kw", [{"threshold_h": -1}, {"max_features": 0}, {"target_error": 1.5}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            StopRule(**kw)


class TestCriterion:
    def test_parse(self):
        assert Criterion.parse("mifs:0.25") == Criterion("mifs", 0.25)
        assert Criterion.parse("renyi-min").kind == "renyi"
        assert Criterion.parse("mifs", beta=0.0).beta == 0.0

    def test_rejects(self):
        with pytest.raises(ValueError):
            Criterion("gini")
        with pytest.raises(ValueError):
            Criterion("mifs", -0.1)


class TestScores:
    def test_empty_set_is_relevance(self, small_random):
        for f in range(small_random.n_features):
            rel = mutual_info_shannon(joint(small_random, (f,)))
            for v in (score_mifs(small_random, f, (), 0.7), score_mrmr(small_random, f), score_jmi(small_random, f), score_cmim(small_random, f)):
                assert v == pytest.approx(rel, abs=1e-12)

    def test_mifs_beta_zero_is_relevance_ranking(self):
        d = random_dataset(8, n_rows=150, n_features=6, n_classes=3)
        a = greedy_select(d, Criterion("mifs", 0.0), StopRule(max_features=3)).selected
        rel = [mutual_info_shannon(joint(d, (f,))) for f in range(6)]
        expected = sorted(range(6), key=lambda f: (-rel[f], f))[:3]
        assert a == expected

    def test_mrmr_is_mifs_with_mean_weight(self, small_random):
        s = (0, 2)
        assert score_mrmr(small_random, 1, s) == pytest.approx(score_mifs(small_random, 1, s, 1 / len(s)), abs=1e-12)

    def test_jmi_cmi_identity(self, small_random):
        nf = small_random.n_features
        for f in range(nf):
            for s in range(nf):
                if f == s:
                    continue
                lhs = mutual_info_shannon(joint(small_random, (f, s)))
                rhs = mutual_info_shannon(joint(small_random, (s,))) + cond_mutual_info_shannon(small_random, f, (s,))
                assert lhs == pytest.approx(rhs, abs=1e-9)

    @pytest.mark.parametrize("crit", [Criterion("mifs", b) for b in (0, 0.5, 1)] + [Criterion("mrmr"), Criterion("jmi"), Criterion("cmim")])
    def test_match_brute_force(self, small_random, crit):
        from mintropy.selection import baseline_score

        for subset in [(), (0,), (0, 3), (1, 2, 3)]:
            for f in set(range(4)) - set(subset):
                assert baseline_score(small_random, crit, f, subset) == pytest.approx(
                    brute_force_score(small_random, crit, f, subset), abs=1e-9
                )

    @pytest.mark.parametrize("fn", [score_mrmr, score_jmi, score_cmim])
    def test_duplicate_feature(self, fig1, fn):
        with pytest.raises(ValueError):
            fn(fig1, 1, (1,))


class TestTraceProperties:
    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("crit", ALL, ids=lambda c: c.label)
    def test_monotone_and_identity(self, seed, crit):
        d = random_dataset(seed)
        tr = greedy_select(d, crit, StopRule(threshold_h=0))
        feats = tr.selected
        assert len(set(feats)) == len(feats)
        prev = (tr.initial_h1, tr.initial_hinf, tr.initial_bayes_error)
        for s in tr.steps:
            assert s.h1 <= prev[0] and s.hinf <= prev[1] and s.bayes_error <= prev[2]
            assert abs(s.bayes_error - (1 - 2 ** -s.hinf)) <= 1e-12
            prev = (s.h1, s.hinf, s.bayes_error)

    @pytest.mark.parametrize("seed", range(15))
    def test_shannon_argmin_matches_argmax_of_conditional_mi(self, seed):
        d = random_dataset(seed)
        tr = greedy_select(d, Criterion("shannon"), StopRule(threshold_h=0))
        chosen = []
        for s in tr.steps:
            rest = [f for f in range(d.n_features) if f not in chosen]
            h = {f: cond_shannon(joint(d, chosen + [f])) for f in rest}
            mi = {f: cond_mutual_info_shannon(d, f, chosen) for f in rest}
            argmin = {f for f in rest if h[f] == min(h.values())}
            argmax = {f for f in rest if mi[f] == max(mi.values())}
            assert argmin == argmax
            assert s.feature == min(argmin)
            chosen.append(s.feature)

    @pytest.mark.parametrize("crit", ALL, ids=lambda c: c.label)
    def test_threads_do_not_change_trace(self, crit):
        d = random_dataset(33, n_rows=200, n_features=8, n_classes=5)
        a = greedy_select(d, crit, StopRule(max_features=6), threads=1)
        b = greedy_select(d, crit, StopRule(max_features=6), threads=4)
        assert a.to_json() == b.to_json()

    def test_constant_features_never_selected(self):
        x = np.array([[0, 0, 1], [0, 1, 0], [0, 1, 1], [0, 0, 0]])
        d = Dataset.from_codes(x, [0, 1, 1, 0], cardinalities=[2, 2, 2])
        tr = greedy_select(d, Criterion("renyi"), StopRule(max_features=3))
        assert 0 not in tr.selected
        assert tr.stopped_by == "exhausted" and len(tr) == 2

    def test_extend_calls_per_step(self, monkeypatch):
        d = random_dataset(2, n_rows=100, n_features=7, n_classes=3)
        calls = []
        real = selection.extend
        monkeypatch.setattr(selection, "extend", lambda *a: calls.append(1) or real(*a))
        tr = greedy_select(d, Criterion("renyi"), StopRule(max_features=4))
        # one table per unselected candidate, plus the winning table kept for the next step
        assert len(calls) == sum(d.n_features - t + 1 for t in range(len(tr)))


class TestSerialization:
    def test_json_fields(self, fig1):
        import json

        tr = greedy_select(fig1, Criterion("renyi"), StopRule(threshold_h=0))
        d = json.loads(tr.to_json())
        assert d["selected"] == [1, 2, 3, 4, 5]
        assert set(d["steps"][0]) == {"step", "feature", "name", "criterion_value", "h1", "hinf", "bayes_error"}
        assert d["stopped_by"] == "threshold" and d["criterion"] == "renyi"

    def test_csv_rows(self, fig1):
        tr = greedy_select(fig1, Criterion("shannon"), StopRule(threshold_h=0))
        lines = tr.to_csv().splitlines()
        assert lines[0] == "step,feature,name,criterion_value,h1,hinf,bayes_error"
        assert len(lines) == 7
        assert lines[1].startswith("1,0,f0,")
