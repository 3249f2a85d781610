"""Interleaved incremental planning loop.

Each increment expands the most constrained activities (about ten new
activities), propagates temporal constraints, and schedules whatever is
ready, recording consumption and attrition as activities are booked.
Infeasibilities are annotations, never aborts, and nothing backtracks
except the documented next-candidate-resource retry inside scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import arc, kb as kb_mod, scheduler, temporal
from .combat import AttritionParams, ConsumptionRates
from .kb import ExpansionContext, KnowledgeBase
from .model import (
    Activity,
    Infeasibility,
    Interval,
    Plan,
    Status,
    project_state,
)
from .routing import TerrainNetwork

ACTIVITY_CEILING = 10_000


class EngineError(RuntimeError):
    pass


class StepOnComplete(EngineError):
    pass


class InvalidEdit(EngineError):
    def __init__(self, message: str, interval: Optional[Interval] = None):
        super().__init__(message)
        self.interval = interval


@dataclass
class IncrementReport:
    increment: int
    new_activities: list[str] = field(default_factory=list)
    scheduled: list[str] = field(default_factory=list)
    infeasibilities: list[tuple[str, str]] = field(default_factory=list)
    complete: bool = False


@dataclass
class SessionParams:
    max_count: int = 10
    weighting: str = "fastest"
    period_minutes: int = 15


@dataclass
class PlanningSession:
    plan: Plan
    kb: KnowledgeBase
    terrain: TerrainNetwork
    params: SessionParams = field(default_factory=SessionParams)
    rates: ConsumptionRates = field(default_factory=ConsumptionRates)
    attrition: AttritionParams = field(default_factory=AttritionParams)
    step_log: list[dict] = field(default_factory=list)
    _increment: int = 0
    _ctx: Optional[ExpansionContext] = None

    def __post_init__(self):
        self._ctx = ExpansionContext(
            plan=self.plan,
            kb=self.kb,
            terrain=self.terrain,
            rates=self.rates,
            attrition=self.attrition,
            weighting=self.params.weighting,
        )

    @property
    def ctx(self) -> ExpansionContext:
        return self._ctx

    def restore_counters(self) -> None:
        """Rebuild child-id counters and the increment number after loading
        a saved plan, so resumed sessions continue the same id sequence."""
        counts: dict[str, int] = {}
        for aid in self.plan.activities:
            parent, _, suffix = aid.rpartition(".")
            if parent and suffix.isdigit():
                counts[parent] = max(counts.get(parent, 0), int(suffix))
        self._ctx._child_counts.update(counts)
        increments = [e["number"] for e in self.step_log if e.get("event") == "increment"]
        self._increment = max(increments, default=0)

    @property
    def revision(self) -> int:
        return self.plan.revision

    # -- status ------------------------------------------------------------

    def _is_composite(self, act: Activity) -> bool:
        return self.kb.is_composite(act.class_id)

    def _needs_work(self, act: Activity) -> bool:
        if act.status is Status.UNEXPANDED:
            return True
        return (
            act.status is Status.EXPANDED
            and not self._is_composite(act)
        )

    def work_list(self) -> list[Activity]:
        return [a for a in self.plan.activities.values() if self._needs_work(a)]

    @property
    def complete(self) -> bool:
        return not self.work_list()

    # -- expansion ---------------------------------------------------------

    def expand(self, act: Activity, earliest_start: int) -> list[Activity]:
        """Expand one activity: class procedure plus ARC, constraints wired."""
        state = project_state(self.plan, earliest_start, self.terrain)
        children, constraints = kb_mod.expand_activity(act, earliest_start, state, self.ctx)
        arc_acts, arc_constraints = arc.generate_arc(act, state, self.ctx)
        new_acts = children + arc_acts
        for child in new_acts:
            self.plan.add_activity(child)
        for tc in constraints + arc_constraints:
            self.plan.add_constraint(tc)
        if act.status is Status.UNEXPANDED:
            act.status = Status.EXPANDED
        self.step_log.append(
            {"event": "expand", "activity": act.id, "children": [a.id for a in new_acts]}
        )
        if len(self.plan.activities) > ACTIVITY_CEILING:
            raise EngineError(f"plan exceeded {ACTIVITY_CEILING} activities")
        return new_acts

    # -- scheduling --------------------------------------------------------

    def _schedule_one(self, act: Activity) -> None:
        state = project_state(self.plan, max(0, act.start_interval.lo), self.terrain)
        units = [self.plan.scenario.units[u] for u in sorted(self.plan.scenario.units)]
        candidates = kb_mod.calculate_candidate_resources(units, act, state, self.kb)
        if not candidates:
            self.plan.mark_infeasible(act.id, Infeasibility.NO_CANDIDATES)
            self.step_log.append({"event": "infeasible", "activity": act.id, "reason": "NO_CANDIDATES"})
            return

        def duration_fn(unit, a):
            return kb_mod.calculate_duration(unit, a, self.ctx)

        def consumption_fn(unit, a, start, end):
            kb_mod.record_class_consumption(unit, a, start, end, self.ctx)
            kb_mod.record_class_attrition(unit, a, start, end, state, self.ctx)

        scheduler.schedule(candidates, act, self.plan, duration_fn, consumption_fn)
        if act.is_scheduled:
            temporal.run_to_fixpoint(self.plan, [act.id])
            self.step_log.append(
                {"event": "schedule", "activity": act.id,
                 "start": act.scheduled_start, "end": act.scheduled_end,
                 "performer": act.performers[0] if act.performers else None}
            )
        else:
            self.step_log.append(
                {"event": "infeasible", "activity": act.id,
                 "reason": act.infeasible_reason.value if act.infeasible_reason else "UNKNOWN"}
            )

    def _is_ready(self, act: Activity) -> bool:
        return (
            act.status is Status.EXPANDED
            and not self._is_composite(act)
            and not act.start_interval.is_empty
            and not act.end_interval.is_empty
        )

    # -- the interleaved increment ------------------------------------------

    def produce_partial_plan(self, acts: list[Activity], max_count: int) -> IncrementReport:
        if max_count < 1:
            raise EngineError("max_count must be >= 1")
        self._increment += 1
        report = IncrementReport(increment=self._increment)
        infeas_before = len(self.plan.infeasibilities)
        working = list(acts)
        new_count = 0
        while working and new_count < max_count:
            for a in working:
                # Emptied intervals always surface as flags, never stalls.
                if (
                    a.status is Status.EXPANDED
                    and not self._is_composite(a)
                    and (a.start_interval.is_empty or a.end_interval.is_empty)
                ):
                    self.plan.mark_infeasible(a.id, Infeasibility.TEMPORAL)
            working = [a for a in working if self._needs_work(a)]
            if not working:
                break
            top = scheduler.get_highest_priority_activity(working, self.plan)
            if top.status is Status.UNEXPANDED:
                new_acts = self.expand(top, max(0, top.start_interval.lo))
                new_count += len(new_acts)
                report.new_activities.extend(a.id for a in new_acts)
                working = [a for a in new_acts if self._needs_work(a)] + working
                temporal.run_to_fixpoint(self.plan, [top.id] + [a.id for a in new_acts])
                working = [a for a in working if self._needs_work(a)]
            ready = [a for a in working if self._is_ready(a)]
            if ready:
                target = scheduler.get_highest_priority_activity(ready, self.plan)
                self._schedule_one(target)
                report.scheduled.append(target.id)
            elif top.status is not Status.UNEXPANDED and not self._needs_work(top):
                continue
            elif not any(a.status is Status.UNEXPANDED for a in working):
                break  # nothing schedulable and nothing to expand
        report.infeasibilities = self.plan.infeasibilities[infeas_before:]
        report.complete = self.complete
        return report

    def step(self) -> IncrementReport:
        """Run exactly one increment; raises once the plan is complete."""
        if self.complete:
            raise StepOnComplete("STEP_ON_COMPLETE")
        report = self.produce_partial_plan(self.work_list(), self.params.max_count)
        self.step_log.append(
            {"event": "increment", "number": report.increment,
             "new": list(report.new_activities), "scheduled": list(report.scheduled)}
        )
        return report

    def produce_plan(self) -> Plan:
        """Loop increments until no unexpanded or unallocated activity remains."""
        while not self.complete:
            self.step()
        return self.plan

    # -- user edits (between steps) -----------------------------------------

    def edit_pin(self, activity_id: str, start: int) -> None:
        act = self.plan.activities[activity_id]
        if not act.start_interval.contains(start):
            raise InvalidEdit(
                f"pin {start} outside start interval {act.start_interval!r}",
                act.start_interval,
            )
        duration = max(act.min_duration, 1)
        end = start + duration
        if not act.end_interval.contains(end):
            raise InvalidEdit(
                f"pinned end {end} outside end interval {act.end_interval!r}",
                act.end_interval,
            )
        act.scheduled_start = start
        act.scheduled_end = end
        act.status = Status.SCHEDULED
        self.plan.revision += 1
        self.step_log.append({"event": "edit", "kind": "pin", "activity": activity_id, "start": start})
        temporal.run_to_fixpoint(self.plan, [activity_id])

    def edit_params(self, activity_id: str, params: dict) -> None:
        act = self.plan.activities[activity_id]
        act.params.update(params)
        self.plan.revision += 1
        self.step_log.append({"event": "edit", "kind": "params", "activity": activity_id, "params": params})

    def edit_delete(self, activity_id: str) -> None:
        if activity_id not in self.plan.activities:
            raise InvalidEdit(f"unknown activity {activity_id!r}")
        doomed = {activity_id}
        # Children go with their parent.
        grew = True
        while grew:
            grew = False
            for a in self.plan.activities.values():
                if a.parent in doomed and a.id not in doomed:
                    doomed.add(a.id)
                    grew = True
        for aid in doomed:
            act = self.plan.activities.pop(aid)
            for uid in act.performers:
                unit = self.plan.scenario.units.get(uid)
                if unit:
                    unit.assignments = [x for x in unit.assignments if x.activity_id != aid]
        self.plan.constraints = [
            tc for tc in self.plan.constraints
            if tc.from_activity not in doomed and tc.to_activity not in doomed
        ]
        self.plan.infeasibilities = [
            (aid, r) for aid, r in self.plan.infeasibilities if aid not in doomed
        ]
        self.plan.root_activities = [r for r in self.plan.root_activities if r not in doomed]
        self.plan.revision += 1
        self.step_log.append({"event": "edit", "kind": "delete", "activity": activity_id})
