"""Core domain types: times, intervals, units, activities, plans, projections.

All timing is integer minutes since H-hour.  Open-ended bounds use the
integer sentinel INF so that every schedule computation stays exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

# Open-bound sentinel: one billion minutes, far beyond any plan horizon.
INF = 10**9


def sat_add(a: int, b: int) -> int:
    """Add two times/durations, saturating at the +/-INF sentinels."""
    if a >= INF or b >= INF:
        return INF
    if a <= -INF or b <= -INF:
        return -INF
    return a + b


def sat_sub(a: int, b: int) -> int:
    if a >= INF:
        return INF
    if b >= INF:
        return -INF
    return a - b


def fmt_time(minutes: int) -> str:
    """Render minutes-since-H-hour as ``H+H:MM`` (negative as ``H-H:MM``)."""
    if minutes >= INF:
        return "H+inf"
    sign = "+" if minutes >= 0 else "-"
    m = abs(minutes)
    return f"H{sign}{m // 60}:{m % 60:02d}"


class Side(str, enum.Enum):
    BLUE = "BLUE"
    RED = "RED"

    @property
    def opponent(self) -> "Side":
        return Side.RED if self is Side.BLUE else Side.BLUE


class Echelon(str, enum.Enum):
    COMPANY = "Company"
    BATTALION = "Battalion"
    BRIGADE = "Brigade"
    DIVISION = "Division"


class Effort(str, enum.Enum):
    MAIN = "MAIN"
    SUPPORTING = "SUPPORTING"


class Status(str, enum.Enum):
    UNEXPANDED = "UNEXPANDED"
    EXPANDED = "EXPANDED"
    SCHEDULED = "SCHEDULED"
    INFEASIBLE = "INFEASIBLE"


class ArcRole(str, enum.Enum):
    ACTION = "ACTION"
    REACTION = "REACTION"
    COUNTERACTION = "COUNTERACTION"


class Anchor(str, enum.Enum):
    STARTS = "STARTS"
    ENDS = "ENDS"


class BosRow(str, enum.Enum):
    INTEL = "INTEL"
    MANEUVER = "MANEUVER"
    FIRE_SUPPORT = "FIRE_SUPPORT"
    MOBILITY = "MOBILITY"
    LOGISTICS = "LOGISTICS"
    COMMAND = "COMMAND"


class Infeasibility(str, enum.Enum):
    TEMPORAL = "TEMPORAL"
    NO_RESOURCE_WINDOW = "NO_RESOURCE_WINDOW"
    NO_CANDIDATES = "NO_CANDIDATES"
    NO_POSITION = "NO_POSITION"
    UNREACHABLE = "UNREACHABLE"
    SUPPLY = "SUPPLY"


@dataclass(frozen=True)
class Interval:
    """Closed interval of times.  ``lo > hi`` means the EMPTY interval."""

    lo: int
    hi: int

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> int:
        if self.is_empty:
            return 0
        return sat_sub(self.hi, self.lo)

    def contains(self, t: int) -> bool:
        return self.lo <= t <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return EMPTY
        return Interval(lo, hi)

    def shift(self, lo_off: int, hi_off: int) -> "Interval":
        if self.is_empty:
            return EMPTY
        return Interval(sat_add(self.lo, lo_off), sat_add(self.hi, hi_off))

    def __repr__(self) -> str:
        if self.is_empty:
            return "EMPTY"
        return f"[{fmt_time(self.lo)}, {fmt_time(self.hi)}]"


EMPTY = Interval(0, -1)


def interval_intersect(a: Interval, b: Interval) -> Interval:
    return a.intersect(b)


@dataclass
class Assignment:
    """A booked busy window on a unit calendar."""

    activity_id: str
    start: int
    end: int
    fraction: float = 1.0


@dataclass
class Unit:
    id: str
    side: Side
    branch: str = "Infantry"
    echelon: Echelon = Echelon.BATTALION
    initial_location: str = ""
    strength: float = 1.0
    capabilities: set[str] = field(default_factory=set)
    supplies: dict[str, float] = field(default_factory=dict)
    firing_range: float = 0.0  # km
    speed: float = 20.0  # km/h
    divisional: bool = False
    effort: Optional[Effort] = None
    assignments: list[Assignment] = field(default_factory=list)

    def vehicles(self, kind: str) -> int:
        """Counted platforms of a kind, from capability tags like HOWITZER=6."""
        for cap in self.capabilities:
            if cap.startswith(kind + "="):
                return int(cap.split("=", 1)[1])
        return 0

    def has_capability(self, tag: str) -> bool:
        return tag in self.capabilities or any(
            c.startswith(tag + "=") for c in self.capabilities
        )

    def is_free(self, start: int, end: int) -> bool:
        """True when the calendar has no assignment overlapping [start, end)."""
        for a in self.assignments:
            if a.start < end and start < a.end:
                return False
        return True


@dataclass
class ControlMeasure:
    id: str
    kind: str  # ObjectiveArea | MobilityCorridor | Boundary | PassagePoint | Axis
    geometry: list[str] = field(default_factory=list)
    attributes: dict = field(default_factory=dict)


@dataclass
class TemporalConstraint:
    """``from`` anchor occurs [lo, hi] minutes before the ``to`` anchor."""

    from_activity: str
    from_anchor: Anchor
    lo: int
    hi: int
    to_activity: str
    to_anchor: Anchor
    id: str = ""

    def other(self, activity_id: str) -> str:
        return self.to_activity if activity_id == self.from_activity else self.from_activity


@dataclass
class Activity:
    id: str
    class_id: str
    side: Side
    performers: list[str] = field(default_factory=list)
    candidate_units: list[str] = field(default_factory=list)
    start_interval: Interval = Interval(0, INF)
    end_interval: Interval = Interval(0, INF)
    min_duration: int = 0
    max_duration: int = INF
    scheduled_start: Optional[int] = None
    scheduled_end: Optional[int] = None
    status: Status = Status.UNEXPANDED
    parent: Optional[str] = None
    arc_depth: int = 0
    arc_role: ArcRole = ArcRole.ACTION
    location: Optional[str] = None
    path: list[str] = field(default_factory=list)  # ordered point ids
    bos_row: BosRow = BosRow.MANEUVER
    params: dict = field(default_factory=dict)
    infeasible_reason: Optional[Infeasibility] = None

    @property
    def is_scheduled(self) -> bool:
        return self.status is Status.SCHEDULED

    def anchor_interval(self, anchor: Anchor) -> Interval:
        """Current possible times for one anchor; a point once scheduled."""
        if self.is_scheduled:
            t = self.scheduled_start if anchor is Anchor.STARTS else self.scheduled_end
            return Interval(t, t)
        return self.start_interval if anchor is Anchor.STARTS else self.end_interval

    @property
    def latest_end(self) -> int:
        return self.anchor_interval(Anchor.ENDS).hi


@dataclass
class AttritionRecord:
    unit_id: str
    kind: str  # PERSONNEL | WEAPONS_SYSTEMS
    amount: float  # fraction of full strength lost
    start: int
    end: int


@dataclass
class ConsumptionRecord:
    unit_id: str
    supply_class: str
    amount: float  # fraction of basic load consumed
    start: int
    end: int


@dataclass
class Plan:
    scenario: "object" = None  # storage.ScenarioDocument once loaded
    activities: dict[str, Activity] = field(default_factory=dict)
    constraints: list[TemporalConstraint] = field(default_factory=list)
    root_activities: list[str] = field(default_factory=list)
    infeasibilities: list[tuple[str, str]] = field(default_factory=list)
    attrition_ledger: list[AttritionRecord] = field(default_factory=list)
    consumption_ledger: list[ConsumptionRecord] = field(default_factory=list)
    revision: int = 0

    def add_activity(self, act: Activity) -> None:
        if act.id in self.activities:
            raise ValueError(f"duplicate activity id {act.id!r}")
        self.activities[act.id] = act
        self.revision += 1

    def add_constraint(self, tc: TemporalConstraint) -> None:
        if not tc.id:
            tc.id = f"tc-{len(self.constraints)}"
        if tc.from_activity not in self.activities or tc.to_activity not in self.activities:
            raise ValueError(f"constraint {tc.id!r} references unknown activity")
        self.constraints.append(tc)
        self.revision += 1

    def constraints_on(self, activity_id: str) -> list[TemporalConstraint]:
        return [
            tc
            for tc in self.constraints
            if tc.from_activity == activity_id or tc.to_activity == activity_id
        ]

    def mark_infeasible(self, activity_id: str, reason: Infeasibility) -> None:
        act = self.activities[activity_id]
        act.status = Status.INFEASIBLE
        act.infeasible_reason = reason
        self.infeasibilities.append((activity_id, reason.value))
        self.revision += 1

    def unit(self, unit_id: str) -> Unit:
        return self.scenario.units[unit_id]


def project_state(plan: Plan, t: int, terrain=None) -> "BattlefieldState":
    """Project unit positions, strengths and supplies at time t.

    Positions follow the latest movement activity ending at or before t;
    mid-move units are interpolated along their path by elapsed fraction.
    Units mid-activity on non-movement tasks stay at the activity location.
    Strengths/supplies apply every ledger record whose effect time (the
    record's end) is at or before t.
    """
    scn = plan.scenario
    positions: dict[str, str] = {}
    strengths: dict[str, float] = {}
    supplies: dict[str, dict[str, float]] = {}
    for uid, unit in scn.units.items():
        positions[uid] = unit.initial_location
        strengths[uid] = unit.strength
        supplies[uid] = dict(unit.supplies)

    # Movement: latest relevant scheduled activity per unit.
    per_unit: dict[str, list[Activity]] = {}
    for act in plan.activities.values():
        if not act.is_scheduled or act.scheduled_start is None:
            continue
        if act.scheduled_start > t:
            continue
        for uid in act.performers:
            per_unit.setdefault(uid, []).append(act)
    for uid, acts in per_unit.items():
        acts.sort(key=lambda a: (a.scheduled_start, a.scheduled_end, a.id))
        current = acts[-1]
        if current.scheduled_end <= t:
            if current.path:
                positions[uid] = current.path[-1]
            elif current.location:
                positions[uid] = current.location
        else:
            if current.path and terrain is not None:
                positions[uid] = _interpolate_position(current, t, terrain)
            elif current.path:
                positions[uid] = current.path[0]
            elif current.location:
                positions[uid] = current.location

    for rec in plan.attrition_ledger:
        if rec.end <= t and rec.kind == "PERSONNEL" and rec.unit_id in strengths:
            strengths[rec.unit_id] = max(0.0, strengths[rec.unit_id] - rec.amount)
    for rec in plan.consumption_ledger:
        if rec.end <= t and rec.unit_id in supplies:
            cur = supplies[rec.unit_id].get(rec.supply_class, 0.0)
            supplies[rec.unit_id][rec.supply_class] = max(0.0, cur - rec.amount)

    return BattlefieldState(
        as_of=t,
        unit_positions=positions,
        unit_strengths=strengths,
        unit_supplies=supplies,
        terrain=terrain,
    )


def _interpolate_position(act: Activity, t: int, terrain) -> str:
    """Nearest path point for a unit partway through a move.

    The unit advances linearly in cumulative path length by the elapsed
    fraction of the scheduled window; we snap to the segment's start point
    until the segment midpoint, then to its end point.
    """
    total = 0.0
    seg_lengths = []
    for a, b in zip(act.path, act.path[1:]):
        length = terrain.segment_length(a, b)
        seg_lengths.append(length)
        total += length
    if total <= 0:
        return act.path[0]
    span = act.scheduled_end - act.scheduled_start
    frac = 0.0 if span <= 0 else (t - act.scheduled_start) / span
    covered = frac * total
    run = 0.0
    for i, length in enumerate(seg_lengths):
        if covered <= run + length:
            within = (covered - run) / length if length > 0 else 0.0
            return act.path[i] if within < 0.5 else act.path[i + 1]
        run += length
    return act.path[-1]


@dataclass
class BattlefieldState:
    as_of: int
    unit_positions: dict[str, str]
    unit_strengths: dict[str, float]
    unit_supplies: dict[str, dict[str, float]]
    terrain: "object" = None
