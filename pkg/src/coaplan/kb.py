"""Activity-class knowledge base.

Classes form a single-parent hierarchy; child classes inherit any slot they
do not define.  Each class has exactly one expansion procedure: either a
compiled-in builtin (the complex military behaviors) or a declarative
template over a fixed vocabulary (simple conditional emissions), never
both.  KB documents are plain JSON and are validated on load with
positioned diagnostics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from typing import Callable, Optional

from . import combat, routing
from .model import (
    INF,
    Activity,
    Anchor,
    ArcRole,
    BattlefieldState,
    BosRow,
    Infeasibility,
    Interval,
    Plan,
    Side,
    Status,
    TemporalConstraint,
    Unit,
)

# Class slots a KB document may define.  Anything else is rejected.
KNOWN_SLOTS = {
    "parent",
    "bosRow",
    "expansion",
    "expansionTemplate",
    "priority",
    "duration",
    "candidates",
    "capability",
    "requiredFraction",
    "pathWeighting",
    "consumption",
    "attrition",
    "arc",
    "minDuration",
    "maxDuration",
    "defaultDuration",
    "requiredParams",
    "composite",
}

CONDITION_KEYS = {"always", "supplyBelow", "enemyInRange"}
EMIT_KEYS = {"class", "id", "constraint"}
CONSTRAINT_KEYS = {"from", "fromAnchor", "lo", "hi", "to", "toAnchor"}

ORDNANCE_THRESHOLD = 0.5
FUEL_THRESHOLD = 0.3


class KBError(ValueError):
    pass


@dataclass
class Diagnostic:
    code: str  # KB_CYCLE | KB_DUPLICATE | KB_UNKNOWN_DIRECTIVE | KB_PARSE
    position: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.position}: {self.message}"


class KBLoadError(KBError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class ActivityClass:
    class_id: str
    slots: dict = field(default_factory=dict)


@dataclass
class KnowledgeBase:
    classes: dict[str, ActivityClass] = field(default_factory=dict)

    def resolve(self, class_id: str) -> dict:
        """Slot map with parent inheritance applied (child wins)."""
        chain = []
        cur = class_id
        while cur is not None:
            cls = self.classes.get(cur)
            if cls is None:
                raise KBError(f"unknown activity class {cur!r}")
            chain.append(cls.slots)
            cur = cls.slots.get("parent")
        merged: dict = {}
        for slots in reversed(chain):
            merged.update({k: v for k, v in slots.items() if k != "parent"})
        return merged

    def slot(self, class_id: str, name: str, default=None):
        return self.resolve(class_id).get(name, default)

    def bos_row(self, class_id: str) -> BosRow:
        return BosRow(self.slot(class_id, "bosRow", "MANEUVER"))

    def is_composite(self, class_id: str) -> bool:
        return bool(self.slot(class_id, "composite", False))


def _pairs_hook(path_stack: list[str]):
    def hook(pairs):
        seen = set()
        for k, _ in pairs:
            if k in seen:
                path_stack.append(k)
            seen.add(k)
        return dict(pairs)

    return hook


def load_kb(text: str) -> KnowledgeBase:
    """Parse and validate a KB document; raises KBLoadError on any defect."""
    diags: list[Diagnostic] = []
    dup_keys: list[str] = []
    try:
        doc = json.loads(text, object_pairs_hook=_pairs_hook(dup_keys))
    except json.JSONDecodeError as e:
        raise KBLoadError(
            [Diagnostic("KB_PARSE", f"line {e.lineno} col {e.colno}", e.msg)]
        ) from e
    for key in dup_keys:
        diags.append(Diagnostic("KB_DUPLICATE", key, f"duplicate key {key!r}"))
    if not isinstance(doc, dict) or "classes" not in doc:
        diags.append(Diagnostic("KB_PARSE", "$", "document must have a 'classes' map"))
        raise KBLoadError(diags)

    classes: dict[str, ActivityClass] = {}
    for cid, slots in doc["classes"].items():
        pos = f"classes.{cid}"
        if not isinstance(slots, dict):
            diags.append(Diagnostic("KB_PARSE", pos, "class body must be a map"))
            continue
        for slot_name in slots:
            if slot_name not in KNOWN_SLOTS:
                diags.append(
                    Diagnostic("KB_UNKNOWN_DIRECTIVE", f"{pos}.{slot_name}", f"unknown slot {slot_name!r}")
                )
        if "expansion" in slots and "expansionTemplate" in slots:
            diags.append(
                Diagnostic(
                    "KB_DUPLICATE", pos, "a class has exactly one expansion procedure"
                )
            )
        if "expansion" in slots and slots["expansion"] not in EXPANSIONS:
            diags.append(
                Diagnostic(
                    "KB_UNKNOWN_DIRECTIVE",
                    f"{pos}.expansion",
                    f"unknown expansion builtin {slots['expansion']!r}",
                )
            )
        if "expansionTemplate" in slots:
            diags.extend(_validate_template(slots["expansionTemplate"], f"{pos}.expansionTemplate"))
        classes[cid] = ActivityClass(cid, slots)

    # Hierarchy checks: parents exist, no cycles.
    for cid, cls in classes.items():
        parent = cls.slots.get("parent")
        if parent is not None and parent not in classes:
            diags.append(
                Diagnostic("KB_UNKNOWN_DIRECTIVE", f"classes.{cid}.parent", f"unknown parent {parent!r}")
            )
    for cid in classes:
        seen = []
        cur = cid
        while cur is not None and cur in classes:
            if cur in seen:
                diags.append(
                    Diagnostic("KB_CYCLE", f"classes.{cid}", f"inheritance cycle via {cur!r}")
                )
                break
            seen.append(cur)
            cur = classes[cur].slots.get("parent")

    if diags:
        raise KBLoadError(diags)
    return KnowledgeBase(classes)


def _validate_template(template, pos: str) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if not isinstance(template, list):
        return [Diagnostic("KB_PARSE", pos, "template must be a list of steps")]
    for i, step in enumerate(template):
        spos = f"{pos}[{i}]"
        if not isinstance(step, dict):
            diags.append(Diagnostic("KB_PARSE", spos, "step must be a map"))
            continue
        for key in step:
            if key not in {"when", "emit"}:
                diags.append(Diagnostic("KB_UNKNOWN_DIRECTIVE", f"{spos}.{key}", f"unknown step key {key!r}"))
        when = step.get("when", {"always": True})
        for ckey in when:
            if ckey not in CONDITION_KEYS:
                diags.append(
                    Diagnostic("KB_UNKNOWN_DIRECTIVE", f"{spos}.when.{ckey}", f"unknown condition {ckey!r}")
                )
        emit = step.get("emit")
        if emit is None:
            diags.append(Diagnostic("KB_PARSE", spos, "step requires an 'emit' directive"))
            continue
        for ekey in emit:
            if ekey not in EMIT_KEYS:
                diags.append(Diagnostic("KB_UNKNOWN_DIRECTIVE", f"{spos}.emit.{ekey}", f"unknown emit key {ekey!r}"))
        constraint = emit.get("constraint")
        if constraint is not None:
            for kkey in constraint:
                if kkey not in CONSTRAINT_KEYS:
                    diags.append(
                        Diagnostic(
                            "KB_UNKNOWN_DIRECTIVE",
                            f"{spos}.emit.constraint.{kkey}",
                            f"unknown constraint key {kkey!r}",
                        )
                    )
    return diags


def default_kb_text() -> str:
    return importlib_resources.files("coaplan.data").joinpath("default.kb.json").read_text()


def load_default_kb() -> KnowledgeBase:
    return load_kb(default_kb_text())


# --------------------------------------------------------------------------
# Expansion machinery
# --------------------------------------------------------------------------


@dataclass
class ExpansionContext:
    plan: Plan
    kb: KnowledgeBase
    terrain: routing.TerrainNetwork
    rates: combat.ConsumptionRates
    attrition: combat.AttritionParams
    weighting: str = "fastest"
    ordnance_threshold: float = ORDNANCE_THRESHOLD
    fuel_threshold: float = FUEL_THRESHOLD
    _child_counts: dict[str, int] = field(default_factory=dict)

    def new_child_id(self, parent_id: str) -> str:
        n = self._child_counts.get(parent_id, 0) + 1
        self._child_counts[parent_id] = n
        return f"{parent_id}.{n}"

    def weighting_for(self, class_id: str, unit: Unit) -> routing.RouteWeighting:
        preset = self.kb.slot(class_id, "pathWeighting", self.weighting)
        return routing.weighting_preset(preset, speed=max(unit.speed, 1.0))

    def make_child(
        self,
        parent: Activity,
        class_id: str,
        *,
        side: Optional[Side] = None,
        candidates: Optional[list[str]] = None,
        location: Optional[str] = None,
        path: Optional[list[str]] = None,
        params: Optional[dict] = None,
        arc_depth: Optional[int] = None,
        arc_role: Optional[ArcRole] = None,
    ) -> Activity:
        slots = self.kb.resolve(class_id)
        act = Activity(
            id=self.new_child_id(parent.id),
            class_id=class_id,
            side=side or parent.side,
            candidate_units=list(candidates or []),
            start_interval=Interval(0, INF),
            end_interval=Interval(0, INF),
            min_duration=int(slots.get("minDuration", 0)),
            max_duration=int(slots["maxDuration"]) if slots.get("maxDuration") is not None else INF,
            parent=parent.id,
            arc_depth=parent.arc_depth if arc_depth is None else arc_depth,
            arc_role=arc_role or parent.arc_role,
            location=location,
            path=list(path or []),
            bos_row=self.kb.bos_row(class_id),
            params=dict(params or {}),
        )
        if slots.get("priority") == "minefield_rule":
            act.params["use_priority_rule"] = True
        if "effort" in parent.params and "effort" not in act.params:
            act.params["effort"] = parent.params["effort"]
        if slots.get("requiredFraction") is not None:
            act.params.setdefault("required_fraction", slots["requiredFraction"])
        return act

    def link(
        self,
        from_act: Activity,
        from_anchor: Anchor,
        lo: int,
        hi: int,
        to_act: Activity,
        to_anchor: Anchor,
    ) -> TemporalConstraint:
        return TemporalConstraint(
            from_act.id, from_anchor, lo, hi, to_act.id, to_anchor
        )


ExpansionResult = tuple[list[Activity], list[TemporalConstraint]]
ExpansionFn = Callable[[Activity, int, BattlefieldState, ExpansionContext], ExpansionResult]

EXPANSIONS: dict[str, ExpansionFn] = {}


def expansion(name: str):
    def deco(fn: ExpansionFn) -> ExpansionFn:
        EXPANSIONS[name] = fn
        return fn

    return deco


# ---- candidate resource selection ----------------------------------------


def calculate_candidate_resources(
    all_units: list[Unit], act: Activity, state: BattlefieldState, kb: KnowledgeBase
) -> list[Unit]:
    """Ordered candidates per the class's candidates slot."""
    if act.candidate_units:
        by_id = {u.id: u for u in all_units}
        return [by_id[uid] for uid in act.candidate_units if uid in by_id]
    method = kb.slot(act.class_id, "candidates", "by_capability")
    if method == "artillery_preference":
        return _artillery_preference(all_units, act)
    capability = kb.slot(act.class_id, "capability", "MANEUVER")
    out = [
        u
        for u in sorted(all_units, key=lambda u: u.id)
        if u.side is act.side and u.has_capability(capability)
    ]
    return out


def _artillery_preference(all_units: list[Unit], act: Activity) -> list[Unit]:
    """Divisional artillery inserted at the front, main-effort-subordinate
    artillery appended after."""
    front: list[Unit] = []
    back: list[Unit] = []
    for u in sorted(all_units, key=lambda u: u.id):
        if u.side is not act.side or not u.has_capability("ARTILLERY"):
            continue
        if u.divisional:
            front.insert(0, u)
        elif u.effort is not None and u.effort.value == "MAIN":
            back.append(u)
    return front + back


# ---- duration methods -----------------------------------------------------


def calculate_duration(unit: Unit, act: Activity, ctx: ExpansionContext) -> int:
    method = ctx.kb.slot(act.class_id, "duration", "fixed")
    if method == "travel":
        segments = _path_segments(act.path, ctx.terrain)
        if segments:
            return routing.travel_time(segments, unit)
        return int(ctx.kb.slot(act.class_id, "defaultDuration", 30))
    if method == "minefield":
        exact = combat.calculate_minefield_duration(
            unit,
            act.params.get("intent", "turn"),
            float(act.params.get("width", 400)),
            act.params.get("mtype", "scatterable"),
            ctx.rates,
        )
        return max(1, math.ceil(exact))
    return int(ctx.kb.slot(act.class_id, "defaultDuration", 30))


def _path_segments(path: list[str], terrain: routing.TerrainNetwork) -> list[routing.Segment]:
    segs = []
    for a, b in zip(path, path[1:]):
        s = terrain.segment(a, b)
        if s is not None:
            segs.append(s)
    return segs


# ---- consumption methods --------------------------------------------------


def record_class_consumption(
    unit: Unit, act: Activity, start: int, end: int, ctx: ExpansionContext
) -> None:
    method = ctx.kb.slot(act.class_id, "consumption")
    if method is None:
        return
    rates = ctx.rates
    if method == "moving_fuel":
        combat.record_consumption(
            start, end, unit, combat.FUEL, ctx.plan, rate=rates.moving_fuel_rate, rates=rates
        )
    elif method == "idle":
        combat.record_consumption(
            start, end, unit, combat.FUEL, ctx.plan, rate=rates.non_moving_fuel_rate, rates=rates
        )
    elif method == "engagement":
        combat.record_consumption(
            start, end, unit, combat.FUEL, ctx.plan, rate=rates.non_moving_fuel_rate, rates=rates
        )
        combat.record_consumption(
            start, end, unit, combat.STANDARD_ORDNANCE, ctx.plan,
            rate=rates.background_ordnance_rate, rates=rates,
        )
    elif method == "minefield":
        num_apts, rnds = combat.minefield_rounds(
            act.params.get("intent", "turn"),
            float(act.params.get("width", 400)),
            act.params.get("mtype", "scatterable"),
            rates,
        )
        total_rounds = rnds * num_apts
        combat.record_consumption(
            start, end, unit, combat.MINEFIELD_ORDNANCE, ctx.plan,
            amount=total_rounds / rates.basic_load_rounds, rates=rates,
        )
        combat.record_consumption(
            start, end, unit, combat.FUEL, ctx.plan, rate=rates.non_moving_fuel_rate, rates=rates
        )
        combat.record_consumption(
            start, end, unit, combat.STANDARD_ORDNANCE, ctx.plan,
            rate=rates.background_ordnance_rate, rates=rates,
        )
    elif method == "resupply":
        # Replenishment is modeled as a negative draw back to full.
        for supply_class in (combat.FUEL, combat.STANDARD_ORDNANCE, combat.MINEFIELD_ORDNANCE):
            level = combat._supply_at(ctx.plan, unit.id, supply_class, end)
            full = ctx.plan.scenario.units[unit.id].supplies.get(supply_class)
            if full is None:
                continue
            refill = level - full
            if refill < 0:
                ctx.plan.consumption_ledger.append(
                    combat.ConsumptionRecord(unit.id, supply_class, refill, start, end)
                )


# ---- attrition hook -------------------------------------------------------


def record_class_attrition(
    unit: Unit, act: Activity, start: int, end: int, state: BattlefieldState, ctx: ExpansionContext
) -> None:
    if ctx.kb.slot(act.class_id, "attrition") != "engagement":
        return
    targets = _engagement_targets(unit, act, state, ctx)
    if not targets:
        return
    try:
        combat.record_attrition(
            start, end, unit, targets, ctx.attrition, ctx.plan,
            att_posture=act.params.get("posture", "attack"),
            def_posture="defend",
            terrain_class=act.params.get("terrain", "open"),
            activity_class=act.class_id,
        )
    except combat.CombatError:
        pass  # zero-strength attacker: engagement is moot, no records


def _engagement_targets(
    unit: Unit, act: Activity, state: BattlefieldState, ctx: ExpansionContext
) -> list[Unit]:
    units = ctx.plan.scenario.units
    named = act.params.get("targets")
    if named:
        return [units[t] for t in named if t in units and state.unit_strengths.get(t, 0) > 0]
    if act.location is None:
        return []
    out = []
    for uid in sorted(units):
        u = units[uid]
        if u.side is act.side or state.unit_strengths.get(uid, 0) <= 0:
            continue
        pos = state.unit_positions.get(uid)
        if pos == act.location:
            out.append(u)
    return out


# ---- helper: routed movement for a unit ----------------------------------


def units_in_range(
    side: Side, point: str, state: BattlefieldState, ctx: ExpansionContext, capability: str
) -> list[Unit]:
    """Units of a side with a capability whose projected position is within
    their own firing range of a point, nearest first."""
    out = []
    for uid in sorted(ctx.plan.scenario.units):
        u = ctx.plan.scenario.units[uid]
        if u.side is not side or not u.has_capability(capability):
            continue
        pos = state.unit_positions.get(uid)
        if pos is None or pos not in ctx.terrain.points or point not in ctx.terrain.points:
            continue
        d = ctx.terrain.distance(pos, point)
        if d <= u.firing_range:
            out.append((d, uid, u))
    out.sort(key=lambda t: (t[0], t[1]))
    return [u for _, _, u in out]


def _advance_required_type(
    seg: routing.Segment, state: BattlefieldState, parent: Activity, ctx: ExpansionContext
) -> str:
    enemy_here = any(
        state.unit_positions.get(uid) == seg.dst and state.unit_strengths.get(uid, 0) > 0
        for uid, u in ctx.plan.scenario.units.items()
        if u.side is not parent.side
    )
    if enemy_here:
        return "ATTACK" if parent.params.get("intent") == "seize" else "BYPASS"
    if "obstacle" in seg.attributes:
        return "BREACH"
    if _is_passage_point(seg.dst, ctx):
        return "PASSAGE_OF_LINES"
    return "MOVE"


def _is_passage_point(point: str, ctx: ExpansionContext) -> bool:
    for cm in ctx.plan.scenario.control_measures.values():
        if cm.kind == "PassagePoint" and point in cm.geometry:
            return True
    return False


def _stamp_travel_floor(act: Activity, unit: Unit, ctx: ExpansionContext) -> None:
    """Movement children carry their projected travel time as a duration
    floor so constraint propagation spaces successors honestly."""
    if ctx.kb.slot(act.class_id, "duration") != "travel":
        return
    segs = _path_segments(act.path, ctx.terrain)
    if segs:
        act.min_duration = max(act.min_duration, routing.travel_time(segs, unit))


def advance(
    resource: Unit,
    path: list[str],
    projected_start: int,
    state: BattlefieldState,
    ctx: ExpansionContext,
    parent: Activity,
) -> ExpansionResult:
    """Walk path segments emitting movement/engagement activities.

    Consecutive segments demanding the same type merge into one activity; a
    type change starts a new one constrained to begin within two hours of
    the previous ending.  Projected fuel is tracked per segment and a
    refuel activity is inserted when it crosses the threshold.
    """
    segments = _path_segments(path, ctx.terrain)
    if not segments:
        return [], []
    acts: list[Activity] = []
    constraints: list[TemporalConstraint] = []
    fuel = state.unit_supplies.get(resource.id, {}).get(combat.FUEL, 1.0)
    ordnance = state.unit_supplies.get(resource.id, {}).get(combat.STANDARD_ORDNANCE, 1.0)
    current: Optional[Activity] = None
    for seg in segments:
        required = _advance_required_type(seg, state, parent, ctx)
        if current is not None and current.class_id == required:
            current.path.append(seg.dst)
            current.location = seg.dst
        else:
            new = ctx.make_child(
                parent,
                required,
                candidates=[resource.id],
                location=seg.dst,
                path=[seg.src, seg.dst],
            )
            if current is not None:
                constraints.append(
                    ctx.link(current, Anchor.ENDS, 0, 120, new, Anchor.STARTS)
                )
            acts.append(new)
            current = new
        travel_min = routing.travel_time([seg], resource)
        fuel -= ctx.rates.moving_fuel_rate * travel_min
        if required in ("ATTACK", "BYPASS"):
            ordnance -= 0.1
        if fuel < ctx.fuel_threshold or ordnance < ctx.ordnance_threshold:
            supply_class = (
                "FULL_RESUPPLY" if ordnance < ctx.ordnance_threshold else "BASIC_REFUEL"
            )
            supply = ctx.make_child(parent, supply_class, candidates=[resource.id], location=seg.dst)
            constraints.append(ctx.link(current, Anchor.ENDS, 0, 30, supply, Anchor.STARTS))
            acts.append(supply)
            fuel = 1.0
            ordnance = 1.0
            current = supply
    for a in acts:
        _stamp_travel_floor(a, resource, ctx)
    return acts, constraints


# ---- builtin expansions ---------------------------------------------------


@expansion("leaf")
def _expand_leaf(act, earliest_start, state, ctx) -> ExpansionResult:
    return [], []


@expansion("minefield")
def expand_minefield(act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    units = [ctx.plan.scenario.units[u] for u in sorted(ctx.plan.scenario.units)]
    candidates = calculate_candidate_resources(units, act, state, ctx.kb)
    if not candidates:
        ctx.plan.mark_infeasible(act.id, Infeasibility.NO_CANDIDATES)
        return [], []
    act.candidate_units = [u.id for u in candidates]
    unit = candidates[0]
    start_pt = state.unit_positions[unit.id]
    mine_pts = [act.params.get("location") or act.location]
    end_pt = routing.calculate_end_point(
        start_pt, mine_pts, ctx.terrain, unit, ctx.weighting_for(act.class_id, unit)
    )
    if end_pt is None:
        ctx.plan.mark_infeasible(act.id, Infeasibility.NO_POSITION)
        return [], []
    act.location = end_pt
    new_acts: list[Activity] = []
    constraints: list[TemporalConstraint] = []
    move = None
    if start_pt != end_pt:
        path = routing.calculate_path(
            start_pt, end_pt, ctx.terrain, ctx.weighting_for("MOVE", unit)
        )
        move = ctx.make_child(
            act, "MOVE", candidates=[unit.id], location=end_pt,
            path=[start_pt] + [s.dst for s in path],
        )
        _stamp_travel_floor(move, unit, ctx)
        constraints.append(ctx.link(move, Anchor.ENDS, 0, INF, act, Anchor.STARTS))
        new_acts.append(move)
    supplies = state.unit_supplies.get(unit.id, {})
    fuel = supplies.get(combat.FUEL, 1.0)
    ordnance = supplies.get(combat.MINEFIELD_ORDNANCE, 1.0)
    supply = None
    if ordnance < ctx.ordnance_threshold and fuel < ctx.fuel_threshold:
        supply = ctx.make_child(act, "FULL_RESUPPLY", candidates=[unit.id])
    elif fuel < ctx.fuel_threshold:
        supply = ctx.make_child(act, "BASIC_REFUEL", candidates=[unit.id])
    if supply is not None:
        anchor_target = move if move is not None else act
        constraints.append(ctx.link(supply, Anchor.ENDS, 0, 30, anchor_target, Anchor.STARTS))
        new_acts.append(supply)
    return new_acts, constraints


@expansion("advance_root")
def expand_advance_root(act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    units = [ctx.plan.scenario.units[u] for u in sorted(ctx.plan.scenario.units)]
    candidates = calculate_candidate_resources(units, act, state, ctx.kb)
    if not candidates:
        ctx.plan.mark_infeasible(act.id, Infeasibility.NO_CANDIDATES)
        return [], []
    act.candidate_units = [u.id for u in candidates]
    unit = candidates[0]
    start_pt = state.unit_positions[unit.id]
    end_pt = _destination_point(act, ctx)
    if end_pt is None or end_pt not in ctx.terrain.points:
        ctx.plan.mark_infeasible(act.id, Infeasibility.NO_POSITION)
        return [], []
    if start_pt == end_pt:
        return [], []
    path = routing.calculate_path(start_pt, end_pt, ctx.terrain, ctx.weighting_for(act.class_id, unit))
    if path is None:
        ctx.plan.mark_infeasible(act.id, Infeasibility.UNREACHABLE)
        return [], []
    point_path = [start_pt] + [s.dst for s in path]
    acts, constraints = advance(unit, point_path, earliest_start, state, ctx, act)
    if acts:
        constraints.append(ctx.link(act, Anchor.STARTS, 0, INF, acts[0], Anchor.STARTS))
        constraints.append(ctx.link(acts[-1], Anchor.ENDS, 0, INF, act, Anchor.ENDS))
    return acts, constraints


def _destination_point(act: Activity, ctx: ExpansionContext) -> Optional[str]:
    dest = act.params.get("to") or act.location
    cm = ctx.plan.scenario.control_measures.get(dest) if dest else None
    if cm is not None and cm.geometry:
        return cm.geometry[-1]
    return dest


@expansion("seize")
def expand_seize(act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    act.params.setdefault("intent", "seize")
    acts, constraints = expand_advance_root(act, earliest_start, state, ctx)
    if act.status is Status.INFEASIBLE:
        return acts, constraints
    unit_id = act.candidate_units[0] if act.candidate_units else None
    objective = _destination_point(act, ctx)
    attack = ctx.make_child(
        act, "ATTACK",
        candidates=[unit_id] if unit_id else None,
        location=objective,
        params={"targets": act.params.get("targets", []), "posture": "attack"},
    )
    if acts:
        constraints.append(ctx.link(acts[-1], Anchor.ENDS, 0, 120, attack, Anchor.STARTS))
    else:
        constraints.append(ctx.link(act, Anchor.STARTS, 0, INF, attack, Anchor.STARTS))
    acts = acts + [attack]

    units = [ctx.plan.scenario.units[u] for u in sorted(ctx.plan.scenario.units)]
    intel = [u for u in units if u.side is act.side and u.has_capability("INTEL")]
    if intel:
        recon = ctx.make_child(
            act, "FIND_ENEMY", candidates=[u.id for u in intel], location=objective
        )
        constraints.append(ctx.link(recon, Anchor.ENDS, 0, 360, attack, Anchor.STARTS))
        acts.append(recon)
    artillery = _artillery_preference(units, act)
    if artillery:
        prep = ctx.make_child(
            act, "ARTILLERY_FIRE", candidates=[u.id for u in artillery], location=objective,
            params={"purpose": "preparation"},
        )
        constraints.append(ctx.link(prep, Anchor.STARTS, 5, 30, attack, Anchor.STARTS))
        acts.append(prep)
    constraints.append(ctx.link(attack, Anchor.ENDS, 0, INF, act, Anchor.ENDS))
    return acts, constraints


@expansion("passage_of_lines")
def expand_passage_of_lines(act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    units = [ctx.plan.scenario.units[u] for u in sorted(ctx.plan.scenario.units)]
    candidates = calculate_candidate_resources(units, act, state, ctx.kb)
    if not candidates:
        ctx.plan.mark_infeasible(act.id, Infeasibility.NO_CANDIDATES)
        return [], []
    act.candidate_units = [u.id for u in candidates]
    passing = candidates[0]
    stationary_id = act.params.get("stationaryUnit")
    stationary = (
        ctx.plan.scenario.units.get(stationary_id)
        if stationary_id
        else (candidates[1] if len(candidates) > 1 else None)
    )
    point = act.params.get("passagePoint") or act.location
    artillery = _artillery_preference(units, act)

    march = ctx.make_child(act, "TACTICAL_MARCH", candidates=[passing.id], location=point)
    start_pt = state.unit_positions.get(passing.id)
    if start_pt and point and start_pt != point and point in ctx.terrain.points:
        path = routing.calculate_path(
            start_pt, point, ctx.terrain, ctx.weighting_for("TACTICAL_MARCH", passing)
        )
        if path is not None:
            march.path = [start_pt] + [s.dst for s in path]
            _stamp_travel_floor(march, passing, ctx)
    passage = ctx.make_child(act, "PASSAGE", candidates=[passing.id], location=point)
    acts = [march, passage]
    constraints = [
        ctx.link(act, Anchor.STARTS, 0, INF, march, Anchor.STARTS),
        ctx.link(march, Anchor.ENDS, 0, 15, passage, Anchor.STARTS),
        ctx.link(passage, Anchor.ENDS, 0, INF, act, Anchor.ENDS),
    ]
    if stationary is not None:
        being_passed = ctx.make_child(act, "BEING_PASSED", candidates=[stationary.id], location=point)
        constraints.append(ctx.link(passage, Anchor.STARTS, 0, 0, being_passed, Anchor.STARTS))
        acts.append(being_passed)
    if artillery:
        arty = artillery[0]
        arty_ids = [u.id for u in artillery]
        suppress = ctx.make_child(act, "SUPPRESSIVE_FIRES", candidates=arty_ids, location=point)
        lift = ctx.make_child(act, "LIFT_SHIFT_FIRES", candidates=arty_ids, location=point)
        constraints.append(ctx.link(suppress, Anchor.STARTS, 0, 0, march, Anchor.STARTS))
        constraints.append(ctx.link(suppress, Anchor.ENDS, 0, 0, lift, Anchor.STARTS))
        constraints.append(ctx.link(lift, Anchor.STARTS, 0, 0, passage, Anchor.STARTS))
        acts.extend([suppress, lift])
        displacing = artillery[1] if len(artillery) > 1 else arty
        displace = ctx.make_child(act, "ARTY_DISPLACE", candidates=[displacing.id], location=point)
        constraints.append(ctx.link(displace, Anchor.STARTS, 0, 0, passage, Anchor.STARTS))
        acts.append(displace)
    return acts, constraints


@expansion("template")
def expand_template(act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    """Interpreter for declarative expansion templates."""
    template = ctx.kb.slot(act.class_id, "expansionTemplate", [])
    acts: list[Activity] = []
    constraints: list[TemporalConstraint] = []
    emitted: dict[str, Activity] = {}
    for step in template:
        if not _condition_holds(step.get("when", {"always": True}), act, state, ctx):
            continue
        emit = step["emit"]
        child = ctx.make_child(act, emit["class"], location=act.location)
        if emit.get("id"):
            emitted[emit["id"]] = child
        acts.append(child)
        cspec = emit.get("constraint")
        if cspec is not None:
            from_act = _resolve_ref(cspec.get("from", "self"), act, child, emitted)
            to_act = _resolve_ref(cspec.get("to", "parent"), act, child, emitted)
            hi = cspec.get("hi")
            constraints.append(
                TemporalConstraint(
                    from_act.id,
                    Anchor(cspec.get("fromAnchor", "ENDS")),
                    int(cspec.get("lo", 0)),
                    INF if hi is None else int(hi),
                    to_act.id,
                    Anchor(cspec.get("toAnchor", "STARTS")),
                )
            )
    return acts, constraints


def _condition_holds(when: dict, act: Activity, state: BattlefieldState, ctx: ExpansionContext) -> bool:
    if "always" in when:
        return bool(when["always"])
    if "supplyBelow" in when:
        spec = when["supplyBelow"]
        unit_id = act.candidate_units[0] if act.candidate_units else None
        if unit_id is None:
            return False
        level = state.unit_supplies.get(unit_id, {}).get(spec["supplyClass"], 1.0)
        return level < float(spec["threshold"])
    if "enemyInRange" in when:
        spec = when["enemyInRange"]
        if act.location is None or act.location not in ctx.terrain.points:
            return False
        for uid in sorted(ctx.plan.scenario.units):
            u = ctx.plan.scenario.units[uid]
            if u.side is act.side or state.unit_strengths.get(uid, 0) <= 0:
                continue
            pos = state.unit_positions.get(uid)
            if pos in ctx.terrain.points and ctx.terrain.distance(pos, act.location) <= float(
                spec.get("rangeKm", 10.0)
            ):
                return True
        return False
    return False


def _resolve_ref(ref: str, parent: Activity, current: Activity, emitted: dict[str, Activity]) -> Activity:
    if ref == "parent":
        return parent
    if ref == "self":
        return current
    return emitted[ref]


def expand_activity(
    act: Activity, earliest_start: int, state: BattlefieldState, ctx: ExpansionContext
) -> ExpansionResult:
    """Dispatch the class's single expansion procedure."""
    slots = ctx.kb.resolve(act.class_id)
    if "expansionTemplate" in slots:
        return expand_template(act, earliest_start, state, ctx)
    name = slots.get("expansion", "leaf")
    return EXPANSIONS[name](act, earliest_start, state, ctx)
