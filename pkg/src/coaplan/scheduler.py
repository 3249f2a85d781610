"""Priority-driven activity selection and resource-calendar scheduling.

Selection order: most temporally restricted first (start-interval width,
then end-interval width), then higher domain priority, then later latest
end time, then smallest id.  Scheduling walks candidate resources in order
and takes the earliest conflict-free start (earliest-first rule); failure
flags the activity infeasible and planning continues.
"""

from __future__ import annotations

import enum
from typing import Callable, Optional

from .model import (
    Activity,
    Assignment,
    Echelon,
    Effort,
    Infeasibility,
    Plan,
    Status,
    Unit,
)


class SchedulerError(ValueError):
    pass


class ActivityPriority(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


def calculate_priority(act: Activity, resource: Optional[Unit]) -> ActivityPriority:
    """Domain priority; the shipped rule is the artillery-emplacement one.

    Divisional resource -> HIGH; main-effort activity -> MEDIUM;
    supporting-effort activity or subordinate resource -> LOW; else MEDIUM.
    Classes without a priority method default to MEDIUM.
    """
    if not act.params.get("use_priority_rule", False):
        return ActivityPriority.MEDIUM
    if resource is not None and resource.divisional:
        return ActivityPriority.HIGH
    if act.params.get("effort") == Effort.MAIN.value:
        return ActivityPriority.MEDIUM
    if act.params.get("effort") == Effort.SUPPORTING.value or (
        resource is not None and not resource.divisional and resource.echelon in (Echelon.COMPANY, Echelon.BATTALION)
    ):
        return ActivityPriority.LOW
    return ActivityPriority.MEDIUM


def _first_candidate(act: Activity, plan: Plan) -> Optional[Unit]:
    for uid in act.candidate_units:
        unit = plan.scenario.units.get(uid) if plan.scenario else None
        if unit is not None:
            return unit
    return None


def get_highest_priority_activity(acts: list[Activity], plan: Plan) -> Activity:
    if not acts:
        raise SchedulerError("NO_CANDIDATES: empty activity list")

    def key(act: Activity):
        prio = calculate_priority(act, _first_candidate(act, plan))
        return (
            act.start_interval.width,
            act.end_interval.width,
            -int(prio),
            -act.latest_end,
            act.id,
        )

    return min(acts, key=key)


DurationFn = Callable[[Unit, Activity], int]
ConsumptionFn = Callable[[Unit, Activity, int, int], None]


def _earliest_free_start(
    unit: Unit, es: int, ls: int, duration: int, ee: int, le: int
) -> Optional[int]:
    """First start in [es, ls] with end in [ee, le] and a free calendar.

    Equivalent to the 1-minute forward scan; conflicting assignments are
    skipped by jumping to their end times.
    """
    t = max(es, ee - duration)
    if t > ls or t + duration > le:
        return None
    busy = sorted((a.start, a.end) for a in unit.assignments)
    while t <= ls and t + duration <= le:
        conflict = None
        for b_start, b_end in busy:
            if b_start < t + duration and t < b_end:
                conflict = b_end
                break
        if conflict is None:
            return t
        t = conflict
    return None


def schedule(
    candidate_resources: list[Unit],
    act: Activity,
    plan: Plan,
    duration_fn: DurationFn,
    consumption_fn: Optional[ConsumptionFn] = None,
) -> None:
    """Book the first feasible (resource, window) pair, earliest-first."""
    if act.start_interval.is_empty or act.end_interval.is_empty:
        plan.mark_infeasible(act.id, Infeasibility.TEMPORAL)
        return
    remaining = list(candidate_resources)
    while remaining:
        unit = remaining[0]
        duration = duration_fn(unit, act)
        duration = max(act.min_duration, min(duration, act.max_duration))
        # The window itself may demand a longer or shorter span than the
        # natural duration (aligned constraints can pin both anchors).  Fit
        # the duration into what the window admits; minDuration stays a
        # hard floor, so movement never shrinks below its travel time.
        dur_lo = max(act.min_duration, act.end_interval.lo - act.start_interval.hi)
        dur_hi = min(act.max_duration, act.end_interval.hi - act.start_interval.lo)
        if dur_lo <= dur_hi:
            duration = max(dur_lo, min(duration, dur_hi))
        start = _earliest_free_start(
            unit,
            act.start_interval.lo,
            act.start_interval.hi,
            duration,
            act.end_interval.lo,
            act.end_interval.hi,
        )
        if start is None:
            remaining.pop(0)
            continue
        end = start + duration
        fraction = float(act.params.get("required_fraction", 1.0))
        unit.assignments.append(Assignment(act.id, start, end, fraction))
        act.performers = [unit.id]
        act.scheduled_start = start
        act.scheduled_end = end
        act.status = Status.SCHEDULED
        plan.revision += 1
        if consumption_fn is not None:
            consumption_fn(unit, act, start, end)
        return
    plan.mark_infeasible(act.id, Infeasibility.NO_RESOURCE_WINDOW)
