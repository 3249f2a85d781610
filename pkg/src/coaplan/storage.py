"""Scenario/plan persistence and synchronization-matrix exports.

All documents are versioned JSON with stable key ordering so exports are
deterministic and plans round-trip byte-exactly.  The matrix also exports
as CSV for spreadsheet tools.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .kb import KnowledgeBase
from .model import (
    INF,
    Activity,
    Anchor,
    ArcRole,
    Assignment,
    AttritionRecord,
    BosRow,
    ConsumptionRecord,
    ControlMeasure,
    Echelon,
    Effort,
    Infeasibility,
    Interval,
    Plan,
    Side,
    Status,
    TemporalConstraint,
    Unit,
    fmt_time,
)
from .routing import Segment, TerrainNetwork

SCENARIO_VERSION = 1
PLAN_VERSION = 1
MATRIX_VERSION = 1

WARN_THRESHOLD = 0.50
CRITICAL_THRESHOLD = 0.25


class IOError_(ValueError):
    pass


@dataclass
class IODiagnostic:
    code: str  # IO_PARSE | IO_DANGLING_REF | IO_VERSION | IO_BAD_PERIOD
    position: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.position}: {self.message}"


class IOLoadError(IOError_):
    def __init__(self, diagnostics: list[IODiagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class ScenarioDocument:
    name: str = "scenario"
    units: dict[str, Unit] = field(default_factory=dict)
    control_measures: dict[str, ControlMeasure] = field(default_factory=dict)
    terrain: TerrainNetwork = field(default_factory=TerrainNetwork)
    root_activities: list[Activity] = field(default_factory=list)
    constraints: list[TemporalConstraint] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def canonical_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _enc_time(t: Optional[int]):
    if t is None:
        return None
    return None if t >= INF else t


def _dec_time(v, default: int) -> int:
    return default if v is None else int(v)


def _enc_interval(iv: Interval):
    return [iv.lo, _enc_time(iv.hi)]


def _dec_interval(v) -> Interval:
    return Interval(int(v[0]), _dec_time(v[1], INF))


# --------------------------------------------------------------------------
# Scenario
# --------------------------------------------------------------------------


def load_scenario(text: str) -> ScenarioDocument:
    diags: list[IODiagnostic] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise IOLoadError([IODiagnostic("IO_PARSE", f"line {e.lineno} col {e.colno}", e.msg)]) from e
    if not isinstance(doc, dict):
        raise IOLoadError([IODiagnostic("IO_PARSE", "$", "document must be an object")])
    if doc.get("version") != SCENARIO_VERSION:
        raise IOLoadError([IODiagnostic("IO_VERSION", "$.version", f"expected {SCENARIO_VERSION}")])

    scn = ScenarioDocument(name=doc.get("name", "scenario"))
    terrain = scn.terrain
    for pid, xy in doc.get("terrain", {}).get("points", {}).items():
        terrain.add_point(pid, float(xy[0]), float(xy[1]))
    for i, seg in enumerate(doc.get("terrain", {}).get("segments", [])):
        pos = f"$.terrain.segments[{i}]"
        for endpoint in (seg["src"], seg["dst"]):
            if endpoint not in terrain.points:
                diags.append(IODiagnostic("IO_DANGLING_REF", pos, f"unknown point {endpoint!r}"))
        try:
            terrain.add_segment(
                Segment(
                    seg["src"], seg["dst"], float(seg["length"]),
                    seg.get("trafficability", "high"),
                    float(seg.get("threat", 0.0)),
                    float(seg.get("concealment", 0.0)),
                    tuple(seg.get("attributes", [])),
                ),
                two_way=bool(seg.get("twoWay", False)),
            )
        except (KeyError, ValueError) as e:
            diags.append(IODiagnostic("IO_PARSE", pos, str(e)))

    for i, u in enumerate(doc.get("units", [])):
        pos = f"$.units[{i}]"
        try:
            unit = Unit(
                id=u["id"],
                side=Side(u["side"]),
                branch=u.get("branch", "Infantry"),
                echelon=Echelon(u.get("echelon", "Battalion")),
                initial_location=u.get("location", ""),
                strength=float(u.get("strength", 1.0)),
                capabilities=set(u.get("capabilities", [])),
                supplies=dict(u.get("supplies", {})),
                firing_range=float(u.get("firingRange", 0.0)),
                speed=float(u.get("speed", 20.0)),
                divisional=bool(u.get("divisional", False)),
                effort=Effort(u["effort"]) if u.get("effort") else None,
            )
        except (KeyError, ValueError) as e:
            diags.append(IODiagnostic("IO_PARSE", pos, str(e)))
            continue
        if unit.initial_location and unit.initial_location not in terrain.points:
            diags.append(
                IODiagnostic("IO_DANGLING_REF", pos, f"unknown location {unit.initial_location!r}")
            )
        scn.units[unit.id] = unit

    for i, cm in enumerate(doc.get("controlMeasures", [])):
        pos = f"$.controlMeasures[{i}]"
        measure = ControlMeasure(
            id=cm["id"], kind=cm.get("kind", "ObjectiveArea"),
            geometry=list(cm.get("geometry", [])), attributes=dict(cm.get("attributes", {})),
        )
        if measure.kind == "MobilityCorridor" and len(measure.geometry) < 2:
            diags.append(IODiagnostic("IO_PARSE", pos, "MobilityCorridor needs >= 2 points"))
        for p in measure.geometry:
            if p not in terrain.points:
                diags.append(IODiagnostic("IO_DANGLING_REF", pos, f"unknown point {p!r}"))
        scn.control_measures[measure.id] = measure

    act_ids = set()
    for i, a in enumerate(doc.get("activities", [])):
        pos = f"$.activities[{i}]"
        try:
            act = Activity(
                id=a["id"],
                class_id=a["class"],
                side=Side(a["side"]),
                candidate_units=list(a.get("candidateUnits", [])),
                start_interval=_dec_interval(a.get("startInterval", [0, None])),
                end_interval=_dec_interval(a.get("endInterval", [0, None])),
                min_duration=int(a.get("minDuration", 0)),
                max_duration=_dec_time(a.get("maxDuration"), INF),
                location=a.get("location"),
                params=dict(a.get("params", {})),
            )
        except (KeyError, ValueError) as e:
            diags.append(IODiagnostic("IO_PARSE", pos, str(e)))
            continue
        for uid in act.candidate_units:
            if uid not in scn.units:
                diags.append(IODiagnostic("IO_DANGLING_REF", pos, f"unknown unit {uid!r}"))
        act_ids.add(act.id)
        scn.root_activities.append(act)

    for i, c in enumerate(doc.get("constraints", [])):
        pos = f"$.constraints[{i}]"
        try:
            tc = TemporalConstraint(
                from_activity=c["from"],
                from_anchor=Anchor(c.get("fromAnchor", "ENDS")),
                lo=int(c.get("lo", 0)),
                hi=_dec_time(c.get("hi"), INF),
                to_activity=c["to"],
                to_anchor=Anchor(c.get("toAnchor", "STARTS")),
                id=c.get("id", f"tc-root-{i}"),
            )
        except (KeyError, ValueError) as e:
            diags.append(IODiagnostic("IO_PARSE", pos, str(e)))
            continue
        for aid in (tc.from_activity, tc.to_activity):
            if aid not in act_ids:
                diags.append(
                    IODiagnostic(
                        "IO_DANGLING_REF", pos,
                        f"constraint {tc.id!r} references missing activity {aid!r}",
                    )
                )
        scn.constraints.append(tc)

    scn.config = dict(doc.get("config", {}))
    if diags:
        raise IOLoadError(diags)

    # Typical-size advisories, never errors.
    if not 5 <= len(scn.units) <= 50:
        scn.warnings.append(f"unit count {len(scn.units)} outside typical 5-50")
    entity_count = len(scn.control_measures) + len(terrain.points) + len(terrain.segments)
    if not 50 <= entity_count <= 500:
        scn.warnings.append(f"terrain/control-measure count {entity_count} outside typical 50-500")
    if not 2 <= len(scn.root_activities) <= 20:
        scn.warnings.append(f"root activity count {len(scn.root_activities)} outside typical 2-20")
    if not 2 <= len(scn.constraints) <= 20:
        scn.warnings.append(f"constraint count {len(scn.constraints)} outside typical 2-20")
    return scn


def make_plan(scn: ScenarioDocument) -> Plan:
    plan = Plan(scenario=scn)
    for act in scn.root_activities:
        plan.add_activity(act)
        plan.root_activities.append(act.id)
    for tc in scn.constraints:
        plan.add_constraint(tc)
    plan.revision = 0
    return plan


# --------------------------------------------------------------------------
# Plan round-trip
# --------------------------------------------------------------------------


def _activity_to_doc(act: Activity) -> dict:
    return {
        "id": act.id,
        "class": act.class_id,
        "side": act.side.value,
        "performers": list(act.performers),
        "candidateUnits": list(act.candidate_units),
        "startInterval": _enc_interval(act.start_interval),
        "endInterval": _enc_interval(act.end_interval),
        "minDuration": act.min_duration,
        "maxDuration": _enc_time(act.max_duration),
        "scheduledStart": act.scheduled_start,
        "scheduledEnd": act.scheduled_end,
        "status": act.status.value,
        "parent": act.parent,
        "arcDepth": act.arc_depth,
        "arcRole": act.arc_role.value,
        "location": act.location,
        "path": list(act.path),
        "bosRow": act.bos_row.value,
        "params": act.params,
        "infeasibleReason": act.infeasible_reason.value if act.infeasible_reason else None,
    }


def _activity_from_doc(d: dict) -> Activity:
    return Activity(
        id=d["id"],
        class_id=d["class"],
        side=Side(d["side"]),
        performers=list(d["performers"]),
        candidate_units=list(d["candidateUnits"]),
        start_interval=_dec_interval(d["startInterval"]),
        end_interval=_dec_interval(d["endInterval"]),
        min_duration=d["minDuration"],
        max_duration=_dec_time(d["maxDuration"], INF),
        scheduled_start=d["scheduledStart"],
        scheduled_end=d["scheduledEnd"],
        status=Status(d["status"]),
        parent=d["parent"],
        arc_depth=d["arcDepth"],
        arc_role=ArcRole(d["arcRole"]),
        location=d["location"],
        path=list(d["path"]),
        bos_row=BosRow(d["bosRow"]),
        params=dict(d["params"]),
        infeasible_reason=Infeasibility(d["infeasibleReason"]) if d["infeasibleReason"] else None,
    )


def export_plan(plan: Plan, step_log: Optional[list[dict]] = None) -> str:
    doc = {
        "version": PLAN_VERSION,
        "revision": plan.revision,
        "rootActivities": list(plan.root_activities),
        "activities": [_activity_to_doc(plan.activities[k]) for k in sorted(plan.activities)],
        "constraints": [
            {
                "id": tc.id,
                "from": tc.from_activity,
                "fromAnchor": tc.from_anchor.value,
                "lo": tc.lo,
                "hi": _enc_time(tc.hi),
                "to": tc.to_activity,
                "toAnchor": tc.to_anchor.value,
            }
            for tc in plan.constraints
        ],
        "infeasibilities": [[aid, reason] for aid, reason in plan.infeasibilities],
        "attrition": [
            [r.unit_id, r.kind, r.amount, r.start, r.end] for r in plan.attrition_ledger
        ],
        "consumption": [
            [r.unit_id, r.supply_class, r.amount, r.start, r.end]
            for r in plan.consumption_ledger
        ],
        "assignments": {
            uid: [[a.activity_id, a.start, a.end, a.fraction] for a in plan.scenario.units[uid].assignments]
            for uid in sorted(plan.scenario.units)
        },
        "stepLog": step_log or [],
    }
    return canonical_dumps(doc)


def import_plan(text: str, scn: ScenarioDocument) -> tuple[Plan, list[dict]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise IOLoadError([IODiagnostic("IO_PARSE", f"line {e.lineno} col {e.colno}", e.msg)]) from e
    if doc.get("version") != PLAN_VERSION:
        raise IOLoadError([IODiagnostic("IO_VERSION", "$.version", f"expected {PLAN_VERSION}")])
    plan = Plan(scenario=scn)
    plan.root_activities = list(doc["rootActivities"])
    for a in doc["activities"]:
        plan.activities[a["id"]] = _activity_from_doc(a)
    for c in doc["constraints"]:
        plan.constraints.append(
            TemporalConstraint(
                c["from"], Anchor(c["fromAnchor"]), c["lo"], _dec_time(c["hi"], INF),
                c["to"], Anchor(c["toAnchor"]), id=c["id"],
            )
        )
    plan.infeasibilities = [tuple(x) for x in doc["infeasibilities"]]
    plan.attrition_ledger = [AttritionRecord(*r) for r in doc["attrition"]]
    plan.consumption_ledger = [ConsumptionRecord(*r) for r in doc["consumption"]]
    for uid, assigns in doc["assignments"].items():
        if uid in scn.units:
            scn.units[uid].assignments = [Assignment(*a) for a in assigns]
    plan.revision = doc["revision"]
    return plan, list(doc.get("stepLog", []))


# --------------------------------------------------------------------------
# Synchronization matrix + logistics
# --------------------------------------------------------------------------

MATRIX_ROWS = [
    "THREAT ACTION",
    "DECISION POINTS",
    BosRow.INTEL.value,
    BosRow.MANEUVER.value,
    BosRow.FIRE_SUPPORT.value,
    BosRow.MOBILITY.value,
    BosRow.LOGISTICS.value,
    BosRow.COMMAND.value,
]


def supply_style(fraction: float) -> str:
    if fraction <= CRITICAL_THRESHOLD:
        return "critical"
    if fraction <= WARN_THRESHOLD:
        return "warn"
    return "ok"


def _activity_row(act: Activity, friendly: Side) -> str:
    if act.side is not friendly:
        return "THREAT ACTION"
    return act.bos_row.value


def build_sync_matrix(plan: Plan, period_minutes: int, friendly: Side = Side.BLUE) -> dict:
    """Structured matrix document; deterministic layout."""
    if period_minutes <= 0:
        raise IOLoadError([IODiagnostic("IO_BAD_PERIOD", "$.period", "period must be positive")])
    scheduled = [
        a for a in plan.activities.values() if a.is_scheduled and a.scheduled_start is not None
    ]
    scheduled.sort(key=lambda a: (a.scheduled_start, a.id))
    horizon = max((a.scheduled_end for a in scheduled), default=0)
    n_cols = max(1, -(-max(horizon, 1) // period_minutes)) if scheduled else 0
    columns = [fmt_time(i * period_minutes) for i in range(n_cols)]

    rows: dict[str, list[dict]] = {r: [] for r in MATRIX_ROWS}
    for act in scheduled:
        row = _activity_row(act, friendly)
        start_col = act.scheduled_start // period_minutes
        last = max(act.scheduled_start, act.scheduled_end - 1)
        end_col = last // period_minutes
        rows[row].append(
            {
                "activity": act.id,
                "label": _cell_label(act),
                "startCol": start_col,
                "endCol": end_col,
                "status": act.status.value,
            }
        )

    decision_points = plan.scenario.config.get("decisionPoints", []) if plan.scenario else []
    for dp in decision_points:
        col = int(dp.get("time", 0)) // period_minutes
        rows["DECISION POINTS"].append(
            {"activity": None, "label": str(dp.get("label", "DP")), "startCol": col, "endCol": col,
             "status": "DECISION"}
        )

    flagged = [
        {"activity": aid, "reason": reason}
        for aid, reason in plan.infeasibilities
    ]

    return {
        "version": MATRIX_VERSION,
        "periodMinutes": period_minutes,
        "columns": columns,
        "rows": [{"name": r, "cells": rows[r]} for r in MATRIX_ROWS],
        "infeasible": flagged,
        "logistics": _logistics_sheets(plan, period_minutes, n_cols),
    }


def _cell_label(act: Activity) -> str:
    performer = act.performers[0] if act.performers else "?"
    return f"{performer} {act.class_id}"


def _logistics_sheets(plan: Plan, period_minutes: int, n_cols: int) -> list[dict]:
    from .model import project_state  # local import to avoid cycle at module load

    sheets = []
    if plan.scenario is None or n_cols == 0:
        return sheets
    states = [
        project_state(plan, (i + 1) * period_minutes) for i in range(n_cols)
    ]
    for uid in sorted(plan.scenario.units):
        series = {"unit": uid, "strength": [], "supplies": {}}
        supply_classes = sorted(plan.scenario.units[uid].supplies)
        for sc in supply_classes:
            series["supplies"][sc] = []
        for st in states:
            strength = st.unit_strengths.get(uid, 0.0)
            series["strength"].append(
                {"value": round(strength, 6), "style": supply_style(strength)}
            )
            for sc in supply_classes:
                level = st.unit_supplies.get(uid, {}).get(sc, 0.0)
                series["supplies"][sc].append(
                    {"value": round(level, 6), "style": supply_style(level)}
                )
        sheets.append(series)
    return sheets


def matrix_to_csv(matrix: dict) -> str:
    """Spreadsheet mirror: rows x period columns, labels joined with ' | '."""
    import csv
    import io as _io

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + matrix["columns"])
    n_cols = len(matrix["columns"])
    for row in matrix["rows"]:
        cells = [""] * n_cols
        for cell in row["cells"]:
            for col in range(cell["startCol"], min(cell["endCol"], n_cols - 1) + 1):
                cells[col] = (cells[col] + " | " + cell["label"]) if cells[col] else cell["label"]
        writer.writerow([row["name"]] + cells)
    for sheet in matrix["logistics"]:
        writer.writerow([])
        writer.writerow([f"{sheet['unit']} Consumption/Attrition"] + matrix["columns"])
        writer.writerow(
            ["Personnel"] + [f"{int(round(p['value'] * 100))}%" for p in sheet["strength"]]
        )
        for sc in sorted(sheet["supplies"]):
            writer.writerow(
                [sc] + [f"{int(round(p['value'] * 100))}%" for p in sheet["supplies"][sc]]
            )
    return buf.getvalue()


def export_sync_matrix(plan: Plan, period_minutes: int = 15) -> tuple[str, str]:
    """(json text, csv text) for the matrix + logistics sheets."""
    matrix = build_sync_matrix(plan, period_minutes)
    return canonical_dumps(matrix), matrix_to_csv(matrix)
