import json
import math

import numpy as np
import pytest

from emergence_monitor.src.corpus import VocabMap, slice_by_time
from emergence_monitor.src.injection import (
    InjectionMode,
    LogisticSchedule,
    apply_plan,
    counts_from_cumulative,
    hold_out,
    logistic_volume,
    plan_control,
    plan_injection,
)


@pytest.fixture
def category_docs(doc_factory):
    """100 documents of the held-out category."""
    return [doc_factory(f"w{i}", category="held", time_index=0, doc_id=f"h{i}") for i in range(100)]


@pytest.fixture
def base_corpus(doc_factory):
    """Base corpus of 10 slices, one document each."""
    docs = [doc_factory("base", category="base", time_index=t, doc_id=f"b{t}") for t in range(10)]
    return slice_by_time(docs, 10, VocabMap(words=("base",)))


class TestLogisticVolume:
    """Tests for the logistic emergence signal."""

    def test_half_volume_at_center(self):
        schedule = LogisticSchedule(K=1.0, rate=0.3, n_slices=10)
        assert logistic_volume(0.0, schedule) == 0.5

    def test_half_of_k_exactly(self):
        schedule = LogisticSchedule(K=737.0, rate=1.7, n_slices=10)
        assert logistic_volume(0.0, schedule) == 737.0 / 2

    def test_asymptote(self):
        schedule = LogisticSchedule(K=1.0, rate=0.5, n_slices=10)
        assert logistic_volume(1e4, schedule) == pytest.approx(1.0)
        assert logistic_volume(-1e4, schedule) == pytest.approx(0.0)

    def test_closed_form(self):
        schedule = LogisticSchedule(K=1.0, rate=0.5, n_slices=10)
        assert logistic_volume(2.0, schedule) == pytest.approx(1 / (1 + math.exp(-1)))

    def test_strictly_increasing_and_bounded(self):
        schedule = LogisticSchedule(K=50.0, rate=0.3, n_slices=30)
        values = np.array([logistic_volume(t, schedule) for t in np.linspace(-10, 10, 10_000)])
        assert np.all(np.diff(values) > 0)
        assert np.all((values > 0) & (values < 50.0))

    def test_grid_is_centered(self):
        schedule = LogisticSchedule(K=1.0, rate=0.3, n_slices=30)
        grid = schedule.t_grid()
        assert grid[0] == pytest.approx(-10.0)
        assert grid[15] == pytest.approx(0.0)

    @pytest.mark.parametrize("field, value", [("K", 0), ("rate", -1), ("alpha", 0), ("n_slices", 0)])
    def test_invalid_schedule(self, field, value):
        params = {"K": 1.0, "rate": 0.5, "n_slices": 10}
        params[field] = value
        with pytest.raises(ValueError):
            LogisticSchedule(**params)


class TestPlanInjection:
    """Tests for logistic injection plans."""

    def test_cumulative_rounding(self):
        assert counts_from_cumulative([50.4, 100.0]) == [50, 50]

    def test_counts_sum_to_category_size(self, doc_factory):
        rng = np.random.default_rng(0)
        for seed in range(1000):
            n_docs = int(rng.integers(1, 300))
            docs = [doc_factory("x", category="held", doc_id=str(i)) for i in range(n_docs)]
            schedule = LogisticSchedule(K=float(n_docs), rate=float(rng.choice([0.3, 0.5, 1.0])),
                                        n_slices=int(rng.integers(2, 40)))
            plan = plan_injection(docs, schedule, seed)
            assert abs(plan.total - n_docs) <= 1
            assert all(c >= 0 for c in plan.counts)

    def test_step_function_limit(self, category_docs):
        schedule = LogisticSchedule(K=100.0, rate=1e6, n_slices=10)
        plan = plan_injection(category_docs, schedule, rng_seed=0)
        assert sum(plan.counts[:5]) == 0
        assert plan.total == 100
        # full rate from t > 0 on, half rate at t = 0
        assert plan.counts == (0, 0, 0, 0, 0, 11, 22, 23, 22, 22)

    def test_single_slice_steep_rate(self, category_docs):
        plan = plan_injection(category_docs, LogisticSchedule(K=100.0, rate=1e6, n_slices=1), 0)
        assert plan.counts == (100,)

    @pytest.mark.parametrize("rate", [0.3, 0.5, 1.0])
    def test_volume_per_slice_grows(self, rate, doc_factory):
        docs = [doc_factory("x", category="held", doc_id=str(i)) for i in range(500)]
        plan = plan_injection(docs, LogisticSchedule(K=500.0, rate=rate, n_slices=30), 0)
        counts = np.array(plan.counts)
        assert np.all(np.diff(counts) >= -1)
        assert counts[-1] > counts[0]
        assert counts[:15].sum() < counts[15:].sum()

    def test_counts_follow_rate(self, doc_factory):
        docs = [doc_factory("x", category="held", doc_id=str(i)) for i in range(500)]
        schedule = LogisticSchedule(K=500.0, rate=0.3, n_slices=30)
        plan = plan_injection(docs, schedule, 0)
        rates = np.array([logistic_volume(t, schedule) for t in schedule.t_grid()])
        expected = 500 * rates / rates.sum()
        assert np.all(np.abs(np.array(plan.counts) - expected) <= 1.0)
        assert plan.counts[0] >= 1

    def test_same_seed_same_plan(self, category_docs):
        schedule = LogisticSchedule(K=100.0, rate=0.5, n_slices=10)
        assert plan_injection(category_docs, schedule, 7) == plan_injection(category_docs, schedule, 7)

    def test_seed_changes_order_only(self, category_docs):
        schedule = LogisticSchedule(K=100.0, rate=0.5, n_slices=10)
        a = plan_injection(category_docs, schedule, 1)
        b = plan_injection(category_docs, schedule, 2)
        assert a.counts == b.counts
        assert a.order != b.order

    def test_slow_rate_spreads_volume(self, category_docs):
        slow = plan_injection(category_docs, LogisticSchedule(K=100.0, rate=0.3, n_slices=10), 0)
        fast = plan_injection(category_docs, LogisticSchedule(K=100.0, rate=1.0, n_slices=10), 0)
        assert sum(c > 0 for c in slow.counts) >= sum(c > 0 for c in fast.counts)

    def test_empty_category(self):
        with pytest.raises(ValueError):
            plan_injection([], LogisticSchedule(K=1.0, rate=0.5, n_slices=10), 0)

    def test_plan_json(self, category_docs):
        plan = plan_injection(category_docs, LogisticSchedule(K=100.0, rate=0.5, n_slices=10), 3)
        data = json.loads(plan.to_json())
        assert data == {"seed": 3, "rate": 0.5, "mode": "logistic", "per_slice_counts": list(plan.counts)}


class TestPlanControl:
    """Tests for control-group plans."""

    def test_noiseless_is_uniform(self, category_docs):
        plan = plan_control(category_docs, 10, rng_seed=0, noise_level=0.0)
        assert plan.counts == (10,) * 10
        assert plan.mode is InjectionMode.CONTROL

    def test_counts_sum_over_many_seeds(self, category_docs):
        for seed in range(1000):
            plan = plan_control(category_docs, 10, rng_seed=seed, noise_level=0.5)
            assert plan.total == 100
            assert all(c >= 0 for c in plan.counts)

    def test_same_seed_same_plan(self, category_docs):
        assert plan_control(category_docs, 10, 4) == plan_control(category_docs, 10, 4)

    @pytest.mark.parametrize("noise", [-0.1, 1.0])
    def test_invalid_noise(self, category_docs, noise):
        with pytest.raises(ValueError):
            plan_control(category_docs, 10, 0, noise_level=noise)


class TestApplyPlan:
    """Tests for merging a plan into the base corpus."""

    def test_zero_plan_keeps_base(self, base_corpus, category_docs):
        plan = plan_control(category_docs, 10, 0, noise_level=0.0)
        zero = type(plan)(counts=(0,) * 10, order=plan.order, seed=0, mode=plan.mode)
        merged = apply_plan(base_corpus, zero, category_docs)
        assert merged.slices == base_corpus.slices

    def test_per_slice_counts_match_plan(self, base_corpus, category_docs):
        plan = plan_injection(category_docs, LogisticSchedule(K=100.0, rate=0.5, n_slices=10), 0)
        merged = apply_plan(base_corpus, plan, category_docs)
        injected = [sum(d.category == "held" for d in docs) for docs in merged.slices]
        assert injected == list(plan.counts)
        assert sum(injected) == plan.total
        for t, docs in enumerate(merged.slices):
            assert all(d.time_index == t for d in docs)
        assert merged.vocab is base_corpus.vocab

    def test_injected_in_plan_order(self, base_corpus, category_docs):
        plan = plan_control(category_docs, 10, 5, noise_level=0.0)
        merged = apply_plan(base_corpus, plan, category_docs)
        injected = [d.id for docs in merged.slices for d in docs if d.category == "held"]
        assert injected == [category_docs[k].id for k in plan.order]

    def test_size_mismatch(self, base_corpus, category_docs):
        plan = plan_control(category_docs, 10, 0)
        with pytest.raises(ValueError):
            apply_plan(base_corpus, plan, category_docs[:50])

    def test_base_with_held_category(self, doc_factory, category_docs):
        base = slice_by_time([doc_factory("x", category="held")], 10)
        plan = plan_control(category_docs, 10, 0)
        with pytest.raises(ValueError):
            apply_plan(base, plan, category_docs)

    def test_hold_out(self, two_category_docs):
        base, held = hold_out(two_category_docs, "arts")
        assert {d.category for d in base} == {"sports"}
        assert [d.id for d in held] == ["d0", "d1", "d2"]
        with pytest.raises(ValueError):
            hold_out(two_category_docs, "politics")
