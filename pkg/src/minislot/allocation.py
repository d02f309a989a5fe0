"""Slot-allocation strategies.

Three ways to place the slots of a plan into the period:

* ``minmax_allocate`` -- cheap heuristic that spreads each VSTA's
  slots to minimize its worst index gap, serving VSTAs in descending
  slot-count order.
* ``blind_allocate`` -- exhaustive search over every feasible owner
  vector, maximizing the sum of inverse worst disconnection times
  (``eq2``) or minimizing the total model-throughput penalty (``eq1``,
  needs per-path delay and loss estimates).
* ``upper_bound_allocate`` -- exhaustive search scored by the
  Monte-Carlo throughput model; unattainable in practice, used as the
  comparison ceiling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .rttmodel import (
    PathParams,
    RttSamplerConfig,
    ThroughputEvaluator,
    mathis_throughput,
)
from .schedule import SlotPlan, SlotSchedule, disconnection_costs, max_disconnection

DEFAULT_MAX_SCHEDULES = 1_000_000
DEFAULT_COMBINATION_BUDGET = 1_000_000


class EnumerationBudgetError(RuntimeError):
    """Feasible-schedule count exceeds the configured enumeration budget."""

    def __init__(self, count: int, budget: int):
        super().__init__(
            f"{count} feasible schedules exceed the enumeration budget of {budget}"
        )
        self.count = count
        self.budget = budget


@dataclass(frozen=True)
class AllocationResult:
    schedule: SlotSchedule
    per_vsta_max_disconnection: tuple[float, ...]
    objective_value: float
    evaluations: int


def schedule_count(plan: SlotPlan) -> int:
    """Number of distinct owner vectors: G! / prod(g_i!)."""
    count = math.factorial(plan.total_slots)
    for g in plan.slot_counts:
        count //= math.factorial(g)
    return count


def _multiset_permutations(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All owner vectors in ascending lexicographic order."""
    arr: list[int] = []
    for vsta, g in enumerate(counts, start=1):
        arr.extend([vsta] * g)
    n = len(arr)
    while True:
        yield tuple(arr)
        i = n - 2
        while i >= 0 and arr[i] >= arr[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while arr[j] <= arr[i]:
            j -= 1
        arr[i], arr[j] = arr[j], arr[i]
        arr[i + 1:] = reversed(arr[i + 1:])


def enumerate_schedules(
    plan: SlotPlan, max_schedules: int = DEFAULT_MAX_SCHEDULES
) -> tuple[Iterator[SlotSchedule], int]:
    """Stream of every feasible schedule, plus the total count.

    Rotations of the same cyclic arrangement are enumerated as
    distinct owner vectors.
    """
    count = schedule_count(plan)
    if count > max_schedules:
        raise EnumerationBudgetError(count, max_schedules)

    def gen() -> Iterator[SlotSchedule]:
        for owners in _multiset_permutations(plan.slot_counts):
            yield SlotSchedule.from_owners(plan, owners)

    return gen(), count


def eq2_objective(schedule: SlotSchedule) -> float:
    """Sum over VSTAs of 1 / worst disconnection time (1/ms).

    Infinite when some VSTA is never disconnected, which only happens
    in the degenerate single-VSTA plan.
    """
    total = 0.0
    for vsta in range(1, schedule.n_vstas + 1):
        worst = max_disconnection(schedule, vsta)
        if worst <= 0.0:
            return math.inf
        total += 1.0 / worst
    return total


def eq1_penalty(schedule: SlotSchedule, paths: Sequence[PathParams]) -> float:
    """Total throughput lost to disconnections versus the bare wired paths."""
    penalty = 0.0
    for vsta, path in enumerate(paths, start=1):
        worst = max_disconnection(schedule, vsta)
        if worst <= 0.0:
            continue
        if path.delay_ms <= 0.0:
            return math.inf
        ideal = mathis_throughput(path.mss_bytes, path.delay_ms, path.loss_rate)
        degraded = mathis_throughput(
            path.mss_bytes, path.delay_ms + worst, path.loss_rate
        )
        penalty += ideal - degraded
    return penalty


def _circular_index_gaps(positions: Sequence[int], total_slots: int) -> list[int]:
    pos = sorted(positions)
    if len(pos) == 1:
        return [total_slots]
    gaps = [pos[i + 1] - pos[i] for i in range(len(pos) - 1)]
    gaps.append(pos[0] + total_slots - pos[-1])
    return gaps


def _evenly_spaced_positions(g: int, total_slots: int) -> list[int]:
    positions: list[int] = []
    for k in range(1, g + 1):
        p = round(1 + (k - 1) * total_slots / g)
        if p not in positions:
            positions.append(p)
    # rounding collisions are only possible for pathological g/G ratios;
    # top up with the smallest unused positions to keep exactly g slots
    fill = 1
    while len(positions) < g:
        if fill not in positions:
            positions.append(fill)
        fill += 1
    return sorted(positions)


def minmax_allocate(
    plan: SlotPlan, combination_budget: int = DEFAULT_COMBINATION_BUDGET
) -> AllocationResult:
    """Min-max disconnection-time heuristic.

    The VSTA with the most slots is placed first on maximally even
    positions; each following VSTA picks, among the still-free
    positions, the combination minimizing its maximum circular index
    gap (ties to the lexicographically smallest choice); the last VSTA
    takes the leftovers.
    """
    total_slots = plan.total_slots
    order = sorted(
        range(1, plan.n_vstas + 1),
        key=lambda v: (-plan.slot_counts[v - 1], v),
    )
    owner_of: dict[int, int] = {}
    free = list(range(1, total_slots + 1))
    evaluations = 0

    first = order[0]
    chosen = _evenly_spaced_positions(plan.slot_counts[first - 1], total_slots)
    evaluations += 1
    for p in chosen:
        owner_of[p] = first
        free.remove(p)

    for vsta in order[1:-1]:
        g = plan.slot_counts[vsta - 1]
        n_combos = math.comb(len(free), g)
        if n_combos <= combination_budget:
            best: tuple[int, ...] | None = None
            best_gap = None
            for combo in combinations(free, g):
                evaluations += 1
                gap = max(_circular_index_gaps(combo, total_slots))
                if best_gap is None or gap < best_gap:
                    best, best_gap = combo, gap
            chosen = list(best)  # type: ignore[arg-type]
        else:
            chosen = _greedy_even_pick(free, g, total_slots)
            evaluations += len(free)
        for p in chosen:
            owner_of[p] = vsta
            free.remove(p)

    if len(order) > 1:
        last = order[-1]
        evaluations += 1
        for p in free:
            owner_of[p] = last

    owners = [owner_of[p] for p in range(1, total_slots + 1)]
    schedule = SlotSchedule.from_owners(plan, owners)
    per_vsta = tuple(
        max_disconnection(schedule, v) for v in range(1, plan.n_vstas + 1)
    )
    return AllocationResult(
        schedule=schedule,
        per_vsta_max_disconnection=per_vsta,
        objective_value=eq2_objective(schedule),
        evaluations=evaluations,
    )


def _greedy_even_pick(free: Sequence[int], g: int, total_slots: int) -> list[int]:
    """Budget fallback: nearest free position to each ideal even target."""
    remaining = list(free)
    anchor = remaining[0]
    chosen: list[int] = []
    for k in range(g):
        target = anchor + k * total_slots / g

        def circ_dist(p: int) -> float:
            d = abs(p - target) % total_slots
            return min(d, total_slots - d)
        pick = min(remaining, key=circ_dist)
        chosen.append(pick)
        remaining.remove(pick)
    return sorted(chosen)


def blind_allocate(
    plan: SlotPlan,
    objective: str = "eq2",
    paths: Sequence[PathParams] | None = None,
    max_schedules: int = DEFAULT_MAX_SCHEDULES,
) -> AllocationResult:
    """Exhaustive search over every feasible schedule.

    ``objective="eq2"`` maximizes the sum of inverse worst
    disconnection times; ``objective="eq1"`` minimizes the total
    throughput penalty and requires ``paths``.  Enumeration is
    lexicographic, so ties keep the lexicographically smallest owner
    vector.
    """
    if objective not in ("eq1", "eq2"):
        raise ValueError(f"objective must be 'eq1' or 'eq2', got {objective!r}")
    if objective == "eq1":
        if paths is None:
            raise ValueError("objective 'eq1' requires per-VSTA path parameters")
        if len(paths) != plan.n_vstas:
            raise ValueError(f"expected {plan.n_vstas} paths, got {len(paths)}")
    schedules, count = enumerate_schedules(plan, max_schedules)
    best_schedule = None
    best_score = None
    for schedule in schedules:
        if objective == "eq2":
            score = eq2_objective(schedule)
            better = best_score is None or score > best_score
        else:
            score = eq1_penalty(schedule, paths)  # type: ignore[arg-type]
            better = best_score is None or score < best_score
        if better:
            best_schedule, best_score = schedule, score
    assert best_schedule is not None
    per_vsta = tuple(
        max_disconnection(best_schedule, v) for v in range(1, plan.n_vstas + 1)
    )
    return AllocationResult(
        schedule=best_schedule,
        per_vsta_max_disconnection=per_vsta,
        objective_value=best_score,  # type: ignore[arg-type]
        evaluations=count,
    )


def upper_bound_allocate(
    plan: SlotPlan,
    paths: Sequence[PathParams],
    cfg: RttSamplerConfig,
    max_schedules: int = DEFAULT_MAX_SCHEDULES,
    evaluator: ThroughputEvaluator | None = None,
) -> AllocationResult:
    """Best Monte-Carlo aggregate throughput over all feasible schedules.

    Scored with a fixed seed so the maximizer is reproducible; ties
    keep the lexicographically smallest owner vector.  Pass a shared
    ``evaluator`` to reuse RTT statistics across repeated calls (e.g.
    one call per swept delay).
    """
    if len(paths) != plan.n_vstas:
        raise ValueError(f"expected {plan.n_vstas} paths, got {len(paths)}")
    if evaluator is None:
        evaluator = ThroughputEvaluator(cfg)
    schedules, count = enumerate_schedules(plan, max_schedules)
    best_schedule = None
    best_score = -math.inf
    for schedule in schedules:
        score = evaluator.aggregate(schedule, paths)
        if best_schedule is None or score > best_score:
            best_schedule, best_score = schedule, score
    assert best_schedule is not None
    per_vsta = tuple(
        max_disconnection(best_schedule, v) for v in range(1, plan.n_vstas + 1)
    )
    return AllocationResult(
        schedule=best_schedule,
        per_vsta_max_disconnection=per_vsta,
        objective_value=best_score,
        evaluations=count,
    )
