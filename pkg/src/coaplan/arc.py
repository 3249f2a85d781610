"""Action-Reaction-Counteraction generation.

Linear, depth-first, bounded: an action (depth 0) may draw an enemy
reaction (depth 1), which may draw a friendly counteraction (depth 2);
counteractions never spawn further levels.  Generated activities join the
plan and flow through the normal expansion/scheduling stream.
"""

from __future__ import annotations

from typing import Callable

from .model import (
    Activity,
    Anchor,
    ArcRole,
    BattlefieldState,
    TemporalConstraint,
)
from .kb import ExpansionContext, ExpansionResult, units_in_range

MAX_ARC_DEPTH = 2  # 0=action, 1=reaction, 2=counteraction

ArcFn = Callable[[Activity, BattlefieldState, ExpansionContext], ExpansionResult]

ARC_GENERATORS: dict[str, ArcFn] = {}


def arc_generator(name: str):
    def deco(fn: ArcFn) -> ArcFn:
        ARC_GENERATORS[name] = fn
        return fn

    return deco


def _next_role(depth: int) -> ArcRole:
    return ArcRole.REACTION if depth == 1 else ArcRole.COUNTERACTION


@arc_generator("passage_fires")
def passage_fires(act: Activity, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    """Enemy artillery in range of a passage fires on the passage points,
    15 to 30 minutes before the passage starts."""
    if act.location is None:
        return [], []
    enemy_side = act.side.opponent
    shooters = units_in_range(enemy_side, act.location, state, ctx, "ARTILLERY")
    if not shooters:
        return [], []
    depth = act.arc_depth + 1
    fire = ctx.make_child(
        act,
        "ARTILLERY_FIRE",
        side=enemy_side,
        candidates=[u.id for u in shooters],
        location=act.location,
        params={"purpose": "fire_on_passage"},
        arc_depth=depth,
        arc_role=_next_role(depth),
    )
    tc = TemporalConstraint(fire.id, Anchor.STARTS, 15, 30, act.id, Anchor.STARTS)
    return [fire], [tc]


# Defensive fires against an approaching attack follow the same pattern:
# in-range enemy artillery opens up shortly before the action begins.
ARC_GENERATORS["artillery_reaction"] = passage_fires


@arc_generator("counterbattery")
def counterbattery(act: Activity, state: BattlefieldState, ctx: ExpansionContext) -> ExpansionResult:
    """The targeted side locates the firing artillery and returns
    counterbattery fire aligned with the incoming fire."""
    if act.location is None:
        return [], []
    responder_side = act.side.opponent
    shooters = units_in_range(responder_side, act.location, state, ctx, "ARTILLERY")
    if not shooters:
        return [], []
    units = ctx.plan.scenario.units
    intel = [
        units[uid]
        for uid in sorted(units)
        if units[uid].side is responder_side and units[uid].has_capability("INTEL")
    ]
    # Nearest collector spots; without one the shooters observe their own fires.
    if intel and act.location in ctx.terrain.points:
        intel.sort(
            key=lambda u: (
                ctx.terrain.distance(state.unit_positions.get(u.id, u.initial_location), act.location)
                if state.unit_positions.get(u.id, u.initial_location) in ctx.terrain.points
                else float("inf"),
                u.id,
            )
        )
    spotters = intel if intel else shooters
    depth = act.arc_depth + 1
    role = _next_role(depth)
    cb = ctx.make_child(
        act, "ARTILLERY_FIRE", side=responder_side, candidates=[u.id for u in shooters],
        location=act.location, params={"purpose": "counterbattery"},
        arc_depth=depth, arc_role=role,
    )
    find = ctx.make_child(
        act, "FIND_ENEMY", side=responder_side, candidates=[u.id for u in spotters],
        location=act.location, arc_depth=depth, arc_role=role,
    )
    constraints = [
        TemporalConstraint(cb.id, Anchor.STARTS, 0, 0, act.id, Anchor.STARTS),
        TemporalConstraint(find.id, Anchor.STARTS, 0, 0, act.id, Anchor.STARTS),
        TemporalConstraint(cb.id, Anchor.ENDS, 0, 0, act.id, Anchor.ENDS),
    ]
    return [find, cb], constraints


def select_reaction(
    candidates: list[str], act: Activity, state: BattlefieldState, ctx: ExpansionContext
) -> ExpansionResult:
    """Evaluate candidate generators in KB order; all that pass emit."""
    acts: list[Activity] = []
    constraints: list[TemporalConstraint] = []
    for name in candidates:
        fn = ARC_GENERATORS.get(name)
        if fn is None:
            continue
        a, c = fn(act, state, ctx)
        acts.extend(a)
        constraints.extend(c)
    return acts, constraints


def generate_arc(
    new_act: Activity, state: BattlefieldState, ctx: ExpansionContext
) -> ExpansionResult:
    """Dispatch the class's ARC slot; hard depth stop at the counteraction."""
    if new_act.arc_depth >= MAX_ARC_DEPTH:
        return [], []
    slot = ctx.kb.slot(new_act.class_id, "arc")
    if not slot:
        return [], []
    if isinstance(slot, str):
        slot = [slot]
    return select_reaction(slot, new_act, state, ctx)
