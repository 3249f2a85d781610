"""Activity selection order and resource-calendar booking."""

import pytest

from coaplan.model import (
    Activity,
    Assignment,
    Echelon,
    Effort,
    Interval,
    Plan,
    Side,
    Status,
    Unit,
)
from coaplan.scheduler import (
    ActivityPriority,
    SchedulerError,
    calculate_priority,
    get_highest_priority_activity,
    schedule,
)


def act_with(aid, slo, shi, elo, ehi, **kw):
    return Activity(
        aid, "ACTIVITY", Side.BLUE,
        start_interval=Interval(slo, shi), end_interval=Interval(elo, ehi),
        **kw,
    )


class _Scn:
    def __init__(self, units):
        self.units = units


def plan_with(*units):
    return Plan(scenario=_Scn({u.id: u for u in units}))


class TestPriorityRule:
    def _mine_act(self, **params):
        params["use_priority_rule"] = True
        return Activity("m", "EMPLACE_SCATTERABLE_MINEFIELD", Side.BLUE, params=params)

    def test_divisional_resource_high(self):
        unit = Unit("a1", Side.BLUE, divisional=True)
        assert calculate_priority(self._mine_act(), unit) is ActivityPriority.HIGH

    def test_main_effort_medium(self):
        unit = Unit("a1", Side.BLUE, echelon=Echelon.BRIGADE)
        act = self._mine_act(effort="MAIN")
        assert calculate_priority(act, unit) is ActivityPriority.MEDIUM

    def test_supporting_effort_low(self):
        unit = Unit("a1", Side.BLUE, echelon=Echelon.BRIGADE)
        act = self._mine_act(effort="SUPPORTING")
        assert calculate_priority(act, unit) is ActivityPriority.LOW

    def test_subordinate_resource_low(self):
        unit = Unit("a1", Side.BLUE, echelon=Echelon.BATTALION)
        assert calculate_priority(self._mine_act(), unit) is ActivityPriority.LOW

    def test_rule_off_is_medium(self):
        unit = Unit("a1", Side.BLUE, divisional=True)
        act = Activity("m", "MOVE", Side.BLUE)
        assert calculate_priority(act, unit) is ActivityPriority.MEDIUM


class TestSelection:
    def test_most_constrained_start_wins(self):
        a = act_with("a", 0, 100, 0, 200)
        b = act_with("b", 0, 10, 0, 200)
        plan = plan_with()
        assert get_highest_priority_activity([a, b], plan) is b

    def test_end_width_breaks_start_tie(self):
        a = act_with("a", 0, 10, 0, 200)
        b = act_with("b", 0, 10, 0, 50)
        plan = plan_with()
        assert get_highest_priority_activity([a, b], plan) is b

    def test_priority_breaks_width_tie(self):
        unit = Unit("u1", Side.BLUE, divisional=True)
        plan = plan_with(unit)
        lo = act_with("a", 0, 10, 0, 50)
        hi = act_with("b", 0, 10, 0, 50,
                      params={"use_priority_rule": True},
                      candidate_units=["u1"])
        assert get_highest_priority_activity([lo, hi], plan) is hi

    def test_later_latest_end_breaks_remaining_tie(self):
        a = act_with("a", 0, 10, 0, 50)
        b = act_with("b", 0, 10, 100, 150)
        plan = plan_with()
        assert get_highest_priority_activity([a, b], plan) is b

    def test_id_is_final_tiebreak(self):
        a = act_with("z", 0, 10, 0, 50)
        b = act_with("a", 0, 10, 0, 50)
        plan = plan_with()
        assert get_highest_priority_activity([a, b], plan) is b

    def test_empty_list_raises(self):
        with pytest.raises(SchedulerError):
            get_highest_priority_activity([], plan_with())


class TestSchedule:
    def _duration(self, minutes):
        return lambda unit, act: minutes

    def test_books_earliest_start(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 10, 100, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert act.status is Status.SCHEDULED
        assert (act.scheduled_start, act.scheduled_end) == (10, 40)
        assert unit.assignments[-1].activity_id == "a"

    def test_skips_calendar_conflicts(self):
        unit = Unit("u1", Side.BLUE)
        unit.assignments.append(Assignment("busy", 0, 60))
        plan = plan_with(unit)
        act = act_with("a", 0, 200, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert act.scheduled_start == 60

    def test_back_to_back_is_not_a_conflict(self):
        unit = Unit("u1", Side.BLUE)
        unit.assignments.append(Assignment("busy", 30, 60))
        plan = plan_with(unit)
        act = act_with("a", 0, 200, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert (act.scheduled_start, act.scheduled_end) == (0, 30)

    def test_falls_through_to_second_resource(self):
        u1 = Unit("u1", Side.BLUE)
        u1.assignments.append(Assignment("busy", 0, 1000))
        u2 = Unit("u2", Side.BLUE)
        plan = plan_with(u1, u2)
        act = act_with("a", 0, 100, 0, 500, candidate_units=["u1", "u2"])
        plan.add_activity(act)
        schedule([u1, u2], act, plan, self._duration(30))
        assert act.performers == ["u2"]

    def test_no_window_flags_infeasible(self):
        unit = Unit("u1", Side.BLUE)
        unit.assignments.append(Assignment("busy", 0, 1000))
        plan = plan_with(unit)
        act = act_with("a", 0, 100, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert act.status is Status.INFEASIBLE
        assert ("a", "NO_RESOURCE_WINDOW") in plan.infeasibilities

    def test_empty_interval_flags_temporal(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 50, 40, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert ("a", "TEMPORAL") in plan.infeasibilities

    def test_duration_stretches_to_window_demand(self):
        # Both anchors effectively pinned: [100,100] .. [160,160] demands 60
        # even though the natural duration is 30.
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 100, 100, 160, 160, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert (act.scheduled_start, act.scheduled_end) == (100, 160)

    def test_duration_shrinks_but_not_below_floor(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 100, 100, 120, 120, min_duration=45,
                       candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(90))
        # Window demands 20 but the floor is 45: booking is impossible.
        assert act.status is Status.INFEASIBLE

    def test_end_interval_respected(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 0, 200, 90, 120, candidate_units=["u1"])
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert 90 <= act.scheduled_end <= 120

    def test_required_fraction_recorded(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 0, 100, 0, 500, candidate_units=["u1"],
                       params={"required_fraction": 0.5})
        plan.add_activity(act)
        schedule([unit], act, plan, self._duration(30))
        assert unit.assignments[-1].fraction == 0.5

    def test_consumption_hook_called_with_booking(self):
        unit = Unit("u1", Side.BLUE)
        plan = plan_with(unit)
        act = act_with("a", 0, 100, 0, 500, candidate_units=["u1"])
        plan.add_activity(act)
        calls = []
        schedule([unit], act, plan, self._duration(30),
                 consumption_fn=lambda u, a, s, e: calls.append((u.id, a.id, s, e)))
        assert calls == [("u1", "a", 0, 30)]
