import math
from itertools import islice

import pytest

from minislot.allocation import (
    EnumerationBudgetError,
    _multiset_permutations,
    blind_allocate,
    enumerate_schedules,
    eq1_penalty,
    eq2_objective,
    minmax_allocate,
    schedule_count,
    upper_bound_allocate,
)
from minislot.rttmodel import PathParams, RttSamplerConfig, ThroughputEvaluator
from minislot.schedule import (
    DutyCycleSet,
    build_contiguous_schedule,
    derive_slot_plan,
    max_disconnection,
)
from minislot.schedule import SlotSchedule

WORKED_OWNERS = (1, 2, 3, 1, 2, 1)
WORKED_DURATIONS = (12.0, 15.0, 10.0, 12.0, 15.0, 12.0)


def make_worked_schedule():
    starts = tuple(math.fsum(WORKED_DURATIONS[:j]) for j in range(len(WORKED_DURATIONS)))
    return SlotSchedule(
        owners=WORKED_OWNERS,
        durations_ms=WORKED_DURATIONS,
        start_times_ms=starts,
        period_ms=math.fsum(WORKED_DURATIONS),
        n_vstas=3,
    )


@pytest.fixture
def case1_plan():
    return derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.125, 0.125, 0.125]), 15.0)


@pytest.fixture
def case2_plan():
    return derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.375]), 12.5)


@pytest.fixture
def case3_plan():
    return derive_slot_plan(DutyCycleSet([0.65, 0.25, 0.10]), 10.0)


class TestScheduleCount:
    def test_reference_counts(self, case1_plan, case2_plan, case3_plan):
        assert schedule_count(case1_plan) == 1680
        assert schedule_count(case2_plan) == 280
        assert schedule_count(case3_plan) == 252

    def test_single_vsta(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 10.0)
        assert schedule_count(plan) == 1


class TestEnumeration:
    def test_yields_exactly_count_distinct_vectors(self, case2_plan):
        schedules, count = enumerate_schedules(case2_plan)
        owners = [s.owners for s in schedules]
        assert len(owners) == count == 280
        assert len(set(owners)) == 280

    def test_lexicographic_order(self, case2_plan):
        schedules, _ = enumerate_schedules(case2_plan)
        owners = [s.owners for s in schedules]
        assert owners == sorted(owners)
        assert owners[0] == (1, 1, 1, 1, 2, 3, 3, 3)

    def test_budget_enforced_before_enumeration(self, case1_plan):
        with pytest.raises(EnumerationBudgetError) as exc_info:
            enumerate_schedules(case1_plan, max_schedules=1000)
        assert exc_info.value.count == 1680
        assert exc_info.value.budget == 1000

    def test_slot_counts_respected(self, case3_plan):
        schedules, _ = enumerate_schedules(case3_plan)
        for sched in islice(schedules, 25):
            for vsta, g in enumerate(case3_plan.slot_counts, start=1):
                assert sched.owners.count(vsta) == g

    def test_multiset_permutation_count(self):
        perms = list(_multiset_permutations((2, 2)))
        assert perms == [
            (1, 1, 2, 2),
            (1, 2, 1, 2),
            (1, 2, 2, 1),
            (2, 1, 1, 2),
            (2, 1, 2, 1),
            (2, 2, 1, 1),
        ]


class TestObjectives:
    def test_eq2_worked_example(self):
        sched = make_worked_schedule()
        # 1/25 + 1/24 + 1/66
        assert eq2_objective(sched) == pytest.approx(0.0968182, abs=5e-8)

    def test_eq2_infinite_without_disconnection(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 10.0)
        assert eq2_objective(build_contiguous_schedule(plan)) == math.inf

    def test_eq2_rotation_invariant(self):
        sched = make_worked_schedule()
        base = eq2_objective(sched)
        for k in range(1, sched.n_slots):
            assert eq2_objective(sched.rotated(k)) == pytest.approx(base, rel=1e-12)

    def test_eq1_prefers_shorter_worst_gaps(self, case2_plan):
        paths = [PathParams(delay_ms=50.0)] * 3
        contiguous = build_contiguous_schedule(case2_plan)
        spread = minmax_allocate(case2_plan).schedule
        assert eq1_penalty(spread, paths) < eq1_penalty(contiguous, paths)

    def test_eq1_zero_delay_is_infinite(self, case2_plan):
        sched = build_contiguous_schedule(case2_plan)
        assert eq1_penalty(sched, [PathParams(delay_ms=0.0)] * 3) == math.inf


class TestMinmaxAllocate:
    def test_case2_reference(self, case2_plan):
        result = minmax_allocate(case2_plan)
        assert result.schedule.owners == (1, 3, 1, 3, 1, 3, 1, 2)
        assert result.per_vsta_max_disconnection == pytest.approx(
            (12.5, 87.5, 37.5), abs=1e-9
        )
        assert result.evaluations == 6

    def test_case1_reference(self, case1_plan):
        result = minmax_allocate(case1_plan)
        assert result.schedule.owners == (1, 2, 1, 3, 1, 4, 1, 5)
        assert result.evaluations == 11

    def test_case3_reference(self, case3_plan):
        result = minmax_allocate(case3_plan)
        assert result.schedule.owners == (1, 1, 3, 1, 2, 1, 1, 1, 2)
        assert result.per_vsta_max_disconnection == pytest.approx(
            (12.5, 42.5, 90.0), abs=1e-6
        )
        assert result.evaluations == 5

    def test_objective_matches_schedule(self, case2_plan):
        result = minmax_allocate(case2_plan)
        assert result.objective_value == pytest.approx(
            eq2_objective(result.schedule), rel=1e-12
        )

    def test_single_vsta(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 10.0)
        result = minmax_allocate(plan)
        assert result.schedule.owners == (1,)


class TestBlindAllocate:
    def test_eq2_matches_heuristic_objective(self, case2_plan):
        blind = blind_allocate(case2_plan, "eq2")
        heuristic = minmax_allocate(case2_plan)
        assert blind.objective_value == pytest.approx(
            heuristic.objective_value, abs=1e-9
        )
        assert blind.evaluations == 280

    def test_eq2_dominates_every_schedule(self, case3_plan):
        best = blind_allocate(case3_plan, "eq2").objective_value
        schedules, _ = enumerate_schedules(case3_plan)
        assert all(eq2_objective(s) <= best + 1e-12 for s in schedules)

    def test_eq1_requires_paths(self, case2_plan):
        with pytest.raises(ValueError, match="path"):
            blind_allocate(case2_plan, "eq1")

    def test_eq1_dominates_every_schedule(self, case2_plan):
        paths = [PathParams(delay_ms=d) for d in (30.0, 50.0, 70.0)]
        best = blind_allocate(case2_plan, "eq1", paths=paths).objective_value
        schedules, _ = enumerate_schedules(case2_plan)
        assert all(eq1_penalty(s, paths) >= best - 1e-9 for s in schedules)

    def test_unknown_objective(self, case2_plan):
        with pytest.raises(ValueError, match="objective"):
            blind_allocate(case2_plan, "eq3")

    def test_budget_propagates(self, case1_plan):
        with pytest.raises(EnumerationBudgetError):
            blind_allocate(case1_plan, "eq2", max_schedules=100)

    def test_tie_break_is_lexicographic(self, case2_plan):
        # re-running with the same inputs must return the same owners
        a = blind_allocate(case2_plan, "eq2").schedule.owners
        b = blind_allocate(case2_plan, "eq2").schedule.owners
        assert a == b


class TestUpperBoundAllocate:
    CFG = RttSamplerConfig(n_samples=500, seed=3)

    def test_dominates_heuristic(self, case2_plan):
        paths = [PathParams(delay_ms=d) for d in (40.0, 60.0, 80.0)]
        evaluator = ThroughputEvaluator(self.CFG)
        result = upper_bound_allocate(
            case2_plan, paths, self.CFG, evaluator=evaluator
        )
        heuristic = minmax_allocate(case2_plan).schedule
        assert result.objective_value >= evaluator.aggregate(heuristic, paths)
        assert result.evaluations == 280

    def test_deterministic(self, case3_plan):
        paths = [PathParams(delay_ms=d) for d in (40.0, 60.0, 80.0)]
        a = upper_bound_allocate(case3_plan, paths, self.CFG)
        b = upper_bound_allocate(case3_plan, paths, self.CFG)
        assert a.schedule.owners == b.schedule.owners
        assert a.objective_value == b.objective_value

    def test_path_count_checked(self, case2_plan):
        with pytest.raises(ValueError, match="paths"):
            upper_bound_allocate(case2_plan, [PathParams(delay_ms=40.0)], self.CFG)


class TestMaxDisconnectionConsistency:
    def test_results_agree_with_schedule_module(self, case3_plan):
        for result in (minmax_allocate(case3_plan), blind_allocate(case3_plan, "eq2")):
            direct = tuple(
                max_disconnection(result.schedule, v)
                for v in range(1, case3_plan.n_vstas + 1)
            )
            assert result.per_vsta_max_disconnection == direct
