import math

import pytest

from minislot.schedule import (
    DutyCycleSet,
    SlotSchedule,
    build_contiguous_schedule,
    derive_slot_plan,
    disconnection_costs,
    max_disconnection,
)


def make_schedule(owners, durations, n_vstas):
    """Build a schedule directly from slot durations (test helper)."""
    starts = tuple(math.fsum(durations[:j]) for j in range(len(durations)))
    return SlotSchedule(
        owners=tuple(owners),
        durations_ms=tuple(durations),
        start_times_ms=starts,
        period_ms=math.fsum(durations),
        n_vstas=n_vstas,
    )


# the worked three-VSTA example: owners [1,2,3,1,2,1], slot sizes 12/15/10 ms
WORKED_OWNERS = (1, 2, 3, 1, 2, 1)
WORKED_DURATIONS = (12.0, 15.0, 10.0, 12.0, 15.0, 12.0)


@pytest.fixture
def worked_schedule():
    return make_schedule(WORKED_OWNERS, WORKED_DURATIONS, n_vstas=3)


class TestDutyCycleSet:
    def test_normalizes_rounded_input(self):
        duty = DutyCycleSet([0.3333333, 0.3333333, 0.3333334])
        assert math.isclose(sum(duty.fractions), 1.0, abs_tol=1e-12)

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sum to 1"):
            DutyCycleSet([0.5, 0.4])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="positive"):
            DutyCycleSet([1.5, -0.5])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DutyCycleSet([])


class TestDeriveSlotPlan:
    def test_case2_values(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.375]), 12.5)
        assert plan.period_ms == pytest.approx(100.0, abs=1e-9)
        assert plan.slot_counts == (4, 1, 3)
        assert plan.slot_sizes_ms == pytest.approx([12.5, 12.5, 12.5], abs=1e-9)
        assert plan.total_slots == 8

    def test_case3_uneven_slot_sizes(self):
        plan = derive_slot_plan(DutyCycleSet([0.65, 0.25, 0.10]), 10.0)
        assert plan.period_ms == pytest.approx(100.0, abs=1e-6)
        assert plan.slot_counts == (6, 2, 1)
        assert plan.slot_sizes_ms == pytest.approx([65 / 6, 12.5, 10.0], abs=1e-9)
        assert plan.total_slots == 9

    def test_single_vsta(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 15.0)
        assert plan.period_ms == 15.0
        assert plan.slot_counts == (1,)
        assert plan.slot_sizes_ms == (15.0,)

    def test_case1_period(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.125, 0.125, 0.125]), 15.0)
        assert plan.period_ms == pytest.approx(120.0, abs=1e-9)
        assert plan.slot_counts == (4, 1, 1, 1, 1)
        assert plan.total_slots == 8

    def test_rejects_nonpositive_slot_time(self):
        with pytest.raises(ValueError, match="slot time"):
            derive_slot_plan(DutyCycleSet([1.0]), 0.0)

    def test_plan_identity(self):
        # f_i * T == g_i * SlotTime_i for every VSTA
        duty = DutyCycleSet([0.4, 0.35, 0.25])
        plan = derive_slot_plan(duty, 11.0)
        for f, g, size in zip(duty.fractions, plan.slot_counts, plan.slot_sizes_ms):
            assert f * plan.period_ms == pytest.approx(g * size, abs=1e-9)


class TestContiguousSchedule:
    def test_case2_owner_order(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.375]), 12.5)
        sched = build_contiguous_schedule(plan)
        assert sched.owners == (1, 1, 1, 1, 2, 3, 3, 3)

    def test_case1_owner_order(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.125, 0.125, 0.125]), 15.0)
        assert build_contiguous_schedule(plan).owners == (1, 1, 1, 1, 2, 3, 4, 5)

    def test_single_vsta(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 15.0)
        assert build_contiguous_schedule(plan).owners == (1,)

    def test_start_times_tile_period(self):
        plan = derive_slot_plan(DutyCycleSet([0.65, 0.25, 0.10]), 10.0)
        sched = build_contiguous_schedule(plan)
        assert sched.start_times_ms[0] == 0.0
        for j in range(sched.n_slots - 1):
            assert sched.start_times_ms[j + 1] == pytest.approx(
                sched.start_times_ms[j] + sched.durations_ms[j], abs=1e-9
            )
        closing = sched.start_times_ms[-1] + sched.durations_ms[-1]
        assert closing == pytest.approx(plan.period_ms, abs=1e-9)

    def test_single_gap_cost(self):
        # contiguous placement gives each VSTA exactly one gap of (1-f_i)*T
        duty = DutyCycleSet([0.5, 0.3, 0.2])
        plan = derive_slot_plan(duty, 10.0)
        sched = build_contiguous_schedule(plan)
        for vsta, f in enumerate(duty.fractions, start=1):
            assert max_disconnection(sched, vsta) == pytest.approx(
                (1 - f) * plan.period_ms, abs=1e-6
            )


class TestDisconnectionCosts:
    def test_worked_example_first_entry(self, worked_schedule):
        costs = disconnection_costs(worked_schedule, 1)
        assert costs[0] == pytest.approx(25.0, abs=1e-12)

    def test_worked_example_full_vector(self, worked_schedule):
        assert disconnection_costs(worked_schedule, 1) == pytest.approx(
            [25.0, 15.0, 0.0], abs=1e-12
        )

    def test_worked_example_single_slot_vsta(self, worked_schedule):
        costs = disconnection_costs(worked_schedule, 3)
        assert costs == pytest.approx([66.0], abs=1e-12)
        assert costs[0] + 10.0 == pytest.approx(sum(WORKED_DURATIONS), abs=1e-12)

    def test_cost_conservation(self, worked_schedule):
        # sum of costs plus own airtime equals the period, per VSTA
        for vsta, g, size in ((1, 3, 12.0), (2, 2, 15.0), (3, 1, 10.0)):
            total = sum(disconnection_costs(worked_schedule, vsta))
            assert total + g * size == pytest.approx(76.0, abs=1e-9)

    def test_unknown_vsta(self, worked_schedule):
        with pytest.raises(ValueError, match="unknown VSTA"):
            disconnection_costs(worked_schedule, 4)


class TestMaxDisconnection:
    def test_case2_contiguous(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.125, 0.375]), 12.5)
        sched = build_contiguous_schedule(plan)
        assert max_disconnection(sched, 1) == pytest.approx(50.0, abs=1e-9)
        assert max_disconnection(sched, 2) == pytest.approx(87.5, abs=1e-9)

    def test_owner_of_all_slots(self):
        plan = derive_slot_plan(DutyCycleSet([1.0]), 20.0)
        assert max_disconnection(build_contiguous_schedule(plan), 1) == 0.0

    def test_worked_example(self, worked_schedule):
        assert max_disconnection(worked_schedule, 1) == pytest.approx(25.0)


class TestSlotScheduleValidation:
    def test_from_owners_rejects_wrong_counts(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.5]), 10.0)
        with pytest.raises(ValueError, match="must own"):
            SlotSchedule.from_owners(plan, [1, 1])

    def test_from_owners_rejects_wrong_length(self):
        plan = derive_slot_plan(DutyCycleSet([0.5, 0.5]), 10.0)
        with pytest.raises(ValueError, match="owners"):
            SlotSchedule.from_owners(plan, [1, 2, 1])

    def test_rotation_preserves_cost_multiset(self, worked_schedule):
        base = sorted(disconnection_costs(worked_schedule, 1))
        for k in range(1, worked_schedule.n_slots):
            rotated = worked_schedule.rotated(k)
            assert sorted(disconnection_costs(rotated, 1)) == pytest.approx(
                base, abs=1e-9
            )
