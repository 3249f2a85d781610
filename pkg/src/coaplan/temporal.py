"""Temporal constraint propagation over activity start/end intervals.

Each constraint reads "from-anchor occurs [lo, hi] minutes before
to-anchor".  Propagation replaces the other endpoint's interval with its
intersection with the shifted constraining interval and recurses from every
adjusted activity.  An EMPTY result marks the activity INFEASIBLE(TEMPORAL)
and planning continues; there is no backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    EMPTY,
    INF,
    Activity,
    Anchor,
    Infeasibility,
    Interval,
    Plan,
    Status,
    TemporalConstraint,
    sat_add,
    sat_sub,
)


@dataclass
class PropagationCycle:
    cycle_id: int = 0
    # Keyed by (constraint id, adjusted activity id): each constraint is
    # applied at most once per direction per cycle.
    visited: set[tuple[str, str]] = field(default_factory=set)


class PropagationLimitError(RuntimeError):
    """Internal-logic guard: the fixpoint loop exceeded its pass ceiling."""


def _apply_duration_coupling(act: Activity) -> bool:
    """Tighten start/end intervals against min/max duration.  True if changed."""
    changed = False
    for _ in range(4):
        si, ei = act.start_interval, act.end_interval
        if si.is_empty or ei.is_empty:
            return changed
        new_e = ei.intersect(
            Interval(sat_add(si.lo, act.min_duration), sat_add(si.hi, act.max_duration))
        )
        new_s = si.intersect(
            Interval(sat_sub(ei.lo, act.max_duration), sat_sub(ei.hi, act.min_duration))
        )
        if new_s == si and new_e == ei:
            return changed
        act.start_interval, act.end_interval = new_s, new_e
        changed = True
    return changed


def _constrained_interval(tc: TemporalConstraint, plan: Plan, target_id: str) -> tuple[Anchor, Interval]:
    """The target's anchor and the interval the constraint allows for it."""
    if target_id == tc.to_activity:
        src = plan.activities[tc.from_activity].anchor_interval(tc.from_anchor)
        return tc.to_anchor, src.shift(tc.lo, tc.hi)
    src = plan.activities[tc.to_activity].anchor_interval(tc.to_anchor)
    return tc.from_anchor, src.shift(-tc.hi, -tc.lo)


def propagate_time_constraints(
    from_act: Activity, plan: Plan, cycle: PropagationCycle
) -> set[str]:
    """Propagate every constraint touching from_act; returns changed ids."""
    changed: set[str] = set()
    if from_act.status is Status.INFEASIBLE:
        return changed
    for tc in plan.constraints_on(from_act.id):
        other_id = tc.other(from_act.id)
        key = (tc.id, other_id)
        if key in cycle.visited:
            continue
        other = plan.activities[other_id]
        if other.is_scheduled or other.status is Status.INFEASIBLE:
            continue
        cycle.visited.add(key)
        anchor, allowed = _constrained_interval(tc, plan, other_id)
        if allowed.is_empty:
            continue  # source already empty; source carries the flag
        current = other.anchor_interval(anchor)
        tightened = current.intersect(allowed)
        if tightened == current:
            continue
        if anchor is Anchor.STARTS:
            other.start_interval = tightened
        else:
            other.end_interval = tightened
        _apply_duration_coupling(other)
        changed.add(other_id)
        if other.start_interval.is_empty or other.end_interval.is_empty:
            plan.mark_infeasible(other_id, Infeasibility.TEMPORAL)
            continue
        changed |= propagate_time_constraints(other, plan, cycle)
    return changed


def run_to_fixpoint(plan: Plan, seeds: list[str]) -> None:
    """Open fresh cycles seeded by each seed until a full pass changes nothing."""
    ceiling = max(1, len(plan.activities)) * max(1, len(plan.constraints)) + 1
    cycle_id = 0
    for _ in range(ceiling):
        cycle = PropagationCycle(cycle_id=cycle_id)
        cycle_id += 1
        changed: set[str] = set()
        for seed in seeds:
            act = plan.activities.get(seed)
            if act is None:
                continue
            changed |= propagate_time_constraints(act, plan, cycle)
        if not changed:
            return
    raise PropagationLimitError(
        f"propagation did not reach a fixpoint within {ceiling} passes"
    )
