"""Acceptance gate: one test per headline guarantee, at stated tolerances."""

import json
import random
import time
from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from conftest import DEMO_SCENARIO, OVERCONSTRAINED_SCENARIO, run_demo
from coaplan import combat, service, storage, temporal
from coaplan.arc import MAX_ARC_DEPTH
from coaplan.cli import main as cli_main
from coaplan.model import INF, Anchor, Interval, Side, Status, Unit
from coaplan.routing import calculate_path, path_cost, weighting_preset
from oracles import enumerate_projections, floyd_warshall
from test_routing import random_graph
from test_temporal import build_plan, propagate_all, random_network


class TestPlanScaleAndSpeed:
    def test_demo_expands_within_bounds_and_budget(self, default_kb):
        t0 = time.perf_counter()
        sess = run_demo(default_kb)
        elapsed = time.perf_counter() - t0
        assert 150 <= len(sess.plan.activities) <= 600
        assert elapsed <= 5.0, f"planning took {elapsed:.2f}s"


class TestIncrementSize:
    def test_average_increment_between_10_and_20(self, completed_demo):
        sizes = [
            len(e["new"]) for e in completed_demo.step_log
            if e.get("event") == "increment" and e["new"]
        ]
        avg = sum(sizes) / len(sizes)
        assert 10 <= avg <= 20, f"avg increment {avg:.1f} over {len(sizes)} increments"


class TestSeizeSecurePropagation:
    def test_exact_shift_and_intersection(self):
        plan = build_plan(
            {
                "seize": (60, 60, 60, 1440, 0, INF),
                "secure": (0, 150, 0, 1440, 0, INF),
            },
            [("seize", "S", 30, 120, "secure", "S")],
        )
        propagate_all(plan)
        # [60,60] shifted by [30,120] -> [90,180], intersected with [0,150].
        assert plan.activities["secure"].start_interval == Interval(90, 150)


class TestTemporalOracle:
    def test_200_random_networks_exact(self):
        rng = random.Random(987123)
        infeasible = 0
        for trial in range(200):
            acts, cons, grid = random_network(rng)
            plan = build_plan(acts, cons)
            propagate_all(plan)
            expected = enumerate_projections(
                {
                    aid: {"start": (v[0], v[1]), "end": (v[2], v[3]),
                          "min_dur": v[4], "max_dur": v[5]}
                    for aid, v in acts.items()
                },
                cons,
                grid,
            )
            if expected is None:
                infeasible += 1
                assert any(
                    a.start_interval.is_empty or a.end_interval.is_empty
                    for a in plan.activities.values()
                ), f"trial {trial}"
                continue
            for aid, (slo, shi, elo, ehi) in expected.items():
                act = plan.activities[aid]
                assert act.start_interval == Interval(slo, shi), f"trial {trial} {aid}"
                assert act.end_interval == Interval(elo, ehi), f"trial {trial} {aid}"
        assert infeasible < 200  # the sweep must exercise feasible networks


class TestRoutingOracle:
    def test_200_random_graphs_exact(self):
        rng = random.Random(424242)
        for trial in range(200):
            net, ids = random_graph(rng)
            w = weighting_preset(rng.choice(["fastest", "covered"]), speed=20.0)
            index = {pid: i for i, pid in enumerate(ids)}
            edges = {}
            for seg in net.segments:
                key = (index[seg.src], index[seg.dst])
                c = w.edge_cost(seg)
                if key not in edges or c < edges[key]:
                    edges[key] = c
            dist = floyd_warshall(len(ids), edges)
            src = rng.choice(ids)
            for dst in ids:
                path = calculate_path(src, dst, net, w)
                expected = dist[index[src]][index[dst]]
                if expected is None:
                    assert path is None, f"trial {trial} {src}->{dst}"
                else:
                    assert path is not None, f"trial {trial} {src}->{dst}"
                    assert path_cost(path, w) == expected, f"trial {trial} {src}->{dst}"


class TestSchedulerSafety:
    def test_no_overlaps_across_corpus(self, completed_demo):
        for unit in completed_demo.plan.scenario.units.values():
            booked = sorted((a.start, a.end) for a in unit.assignments)
            for (s1, e1), (s2, e2) in zip(booked, booked[1:]):
                assert e1 <= s2, f"{unit.id} overlap at {s2} < {e1}"

    def test_scheduled_satisfy_constraints_or_are_flagged(self, completed_demo):
        plan = completed_demo.plan
        flagged = {aid for aid, _ in plan.infeasibilities}
        for tc in plan.constraints:
            f = plan.activities.get(tc.from_activity)
            t = plan.activities.get(tc.to_activity)
            if f is None or t is None or not (f.is_scheduled and t.is_scheduled):
                continue
            if f.id in flagged or t.id in flagged:
                continue
            fv = f.scheduled_start if tc.from_anchor is Anchor.STARTS else f.scheduled_end
            tv = t.scheduled_start if tc.to_anchor is Anchor.STARTS else t.scheduled_end
            assert fv + tc.lo <= tv <= fv + tc.hi, tc.id

    def test_earliest_first_by_rescan(self, completed_demo):
        # With the final calendars (a superset of every booking-time
        # calendar), no scheduled activity may have an earlier start that is
        # simultaneously inside its final bounds and conflict-free; such a
        # slot would also have been available when it was booked.
        plan = completed_demo.plan
        for act in plan.activities.values():
            if not act.is_scheduled or not act.performers:
                continue
            unit = plan.scenario.units[act.performers[0]]
            duration = act.scheduled_end - act.scheduled_start
            busy = sorted(
                (a.start, a.end) for a in unit.assignments
                if a.activity_id != act.id
            )
            for t in range(act.start_interval.lo, act.scheduled_start):
                end = t + duration
                if end < act.end_interval.lo or end > act.end_interval.hi:
                    continue
                if any(bs < end and t < be for bs, be in busy):
                    continue
                pytest.fail(
                    f"{act.id} booked at {act.scheduled_start} but {t} was free"
                )


class TestArcContract:
    def test_passage_cell_reproduced(self, default_kb):
        # Panel A: the passage itself.  Panel B: in-range enemy artillery
        # fires on the passage point 15-30 minutes before it starts.
        # Panel C: counterbattery and its spotter start aligned with the
        # incoming fire, counterbattery ending with it.
        from test_arc import make_state, passage_cell
        from coaplan.arc import generate_arc

        ctx, passage, units = passage_cell(default_kb, blue_intel=True)
        state = make_state(units)
        (fire,), fire_cons = generate_arc(passage, state, ctx)
        ctx.plan.add_activity(fire)
        counter_acts, counter_cons = generate_arc(fire, state, ctx)
        for a in counter_acts:
            ctx.plan.add_activity(a)
        for tc in fire_cons + counter_cons:
            ctx.plan.add_constraint(tc)

        passage.status = Status.SCHEDULED
        passage.scheduled_start, passage.scheduled_end = 100, 145
        temporal.run_to_fixpoint(ctx.plan, [passage.id])

        assert fire.start_interval == Interval(70, 85)  # 15-30 min lead
        by_class = {a.class_id: a for a in counter_acts}
        cb = by_class["ARTILLERY_FIRE"]
        find = by_class["FIND_ENEMY"]
        assert cb.start_interval == fire.start_interval
        assert find.start_interval == fire.start_interval
        assert cb.end_interval == fire.end_interval

    def test_depth_bound_across_corpus(self, completed_demo):
        # Three levels: action (0), reaction (1), counteraction (2).
        assert MAX_ARC_DEPTH == 2
        for act in completed_demo.plan.activities.values():
            assert act.arc_depth <= MAX_ARC_DEPTH, act.id


class TestAttritionFormula:
    K = 0.01

    def _fight(self, att_strength, def_strength):
        from test_combat import fight
        return fight(att_strength, def_strength)

    def test_unit_ratio_equal_losses(self):
        losses = self._fight(1.0, 1.0)
        assert abs(losses["att"]["PERSONNEL"] - self.K) < 1e-9
        assert abs(losses["tgt"]["PERSONNEL"] - self.K) < 1e-9

    def test_ratio_two_power_law(self):
        losses = self._fight(1.0, 2.0)
        assert abs(losses["att"]["PERSONNEL"] - self.K * 2 ** 0.41) < 1e-9
        assert abs(losses["tgt"]["PERSONNEL"] - self.K * 2 ** -0.41) < 1e-9

    def test_monotonicity_sweep(self):
        ratios = [0.25, 0.5, 1.0, 2.0, 4.0]
        att = [self._fight(1.0, r)["att"]["PERSONNEL"] for r in ratios]
        dfd = [self._fight(1.0, r)["tgt"]["PERSONNEL"] for r in ratios]
        assert all(a < b for a, b in zip(att, att[1:]))
        assert all(a > b for a, b in zip(dfd, dfd[1:]))


class TestMinefieldDuration:
    def _battery(self, n):
        return Unit("arty", Side.BLUE, capabilities={f"HOWITZER={n}"})

    def test_reference_case_exact(self):
        # 4 aiming points x 30 rounds / (6 howitzers x 4 rds/min) = 5 min.
        dur = combat.calculate_minefield_duration(
            self._battery(6), "turn", 400.0, "scatterable"
        )
        assert dur == Fraction(5)

    def test_homogeneity_exact(self):
        six = combat.calculate_minefield_duration(
            self._battery(6), "turn", 400.0, "scatterable"
        )
        twelve = combat.calculate_minefield_duration(
            self._battery(12), "turn", 400.0, "scatterable"
        )
        assert twelve * 2 == six


class TestDeterminismAndEquivalence:
    def test_rerun_byte_identical(self, default_kb, completed_demo):
        again = run_demo(default_kb)
        assert storage.export_plan(again.plan, again.step_log) == storage.export_plan(
            completed_demo.plan, completed_demo.step_log
        )

    def test_step_equals_batch(self, default_kb, demo_scenario, completed_demo):
        from coaplan.engine import PlanningSession
        sess = PlanningSession(
            plan=storage.make_plan(demo_scenario), kb=default_kb,
            terrain=demo_scenario.terrain,
        )
        while not sess.complete:
            sess.step()
        assert storage.export_plan(sess.plan, sess.step_log) == storage.export_plan(
            completed_demo.plan, completed_demo.step_log
        )

    def test_cli_library_api_agree(self, tmp_path, capsys, completed_demo):
        code = cli_main(
            ["plan", "--scenario", str(DEMO_SCENARIO), "--out", str(tmp_path)]
        )
        capsys.readouterr()
        assert code == 0
        lib_plan = storage.export_plan(completed_demo.plan, completed_demo.step_log)
        lib_matrix, _ = storage.export_sync_matrix(completed_demo.plan, 15)
        assert (tmp_path / "demo.plan.json").read_text() == lib_plan
        assert (tmp_path / "demo.sync.json").read_text() == lib_matrix

        client = TestClient(service.app)
        resp = client.post(
            "/sessions", json={"scenario": json.loads(DEMO_SCENARIO.read_text())}
        )
        sid = resp.json()["sessionId"]
        client.post(f"/sessions/{sid}/run")
        assert client.get(f"/sessions/{sid}/plan").text == lib_plan
        assert client.get(f"/sessions/{sid}/matrix", params={"period": 15}).text == lib_matrix


class TestNoBacktracking:
    def test_overconstrained_completes_exit_zero(self, tmp_path, capsys):
        code = cli_main(
            ["plan", "--scenario", str(OVERCONSTRAINED_SCENARIO), "--out", str(tmp_path)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "infeasible:" in out and "TEMPORAL" in out
        doc = json.loads((tmp_path / "overconstrained.plan.json").read_text())
        assert doc["infeasibilities"]
        statuses = {a["status"] for a in doc["activities"]}
        assert "INFEASIBLE" in statuses
