"""Attrition and supply-consumption estimation.

Personnel attrition follows a power law on the defender/attacker strength
ratio with a fixed exponent of 0.41 (attacker) / -0.41 (defender); weapons
systems losses are a fixed multiple of personnel losses.  Coefficients are
placeholder config values, not doctrine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .model import AttritionRecord, ConsumptionRecord, Infeasibility, Plan, Unit

ATTRITION_EXPONENT = 0.41

FUEL = "POL"
STANDARD_ORDNANCE = "STANDARD_ORDNANCE"
MINEFIELD_ORDNANCE = "MINEFIELD_ORDNANCE"


class CombatError(ValueError):
    pass


@dataclass
class AttritionParams:
    """Placeholder coefficients; the formula shape is the contract."""

    k: float = 0.01  # base personnel attrition per engagement
    c: float = 1.0  # weapons-systems multiplier
    posture_factors: dict[str, float] = field(
        default_factory=lambda: {"attack": 1.0, "defend": 0.9, "delay": 0.8, "withdraw": 0.7}
    )
    terrain_factors: dict[str, float] = field(default_factory=lambda: {"open": 1.0, "close": 1.2})
    friendly_attrition_factors: dict[str, float] = field(default_factory=dict)

    def posture(self, name: str) -> float:
        return self.posture_factors.get(name, 1.0)

    def terrain(self, name: str) -> float:
        return self.terrain_factors.get(name, 1.0)

    def friendly_factor(self, class_id: str) -> float:
        return self.friendly_attrition_factors.get(class_id, 1.0)


@dataclass
class ConsumptionRates:
    """Per-minute supply draw rates, as fractions of a basic load."""

    moving_fuel_rate: float = 0.002
    non_moving_fuel_rate: float = 0.0002
    background_ordnance_rate: float = 0.0005
    # Minefield tables: aiming points per 100 m of width by minefield type,
    # density class by intent, rounds per aiming point by density.
    aiming_points_per_100m: dict[str, float] = field(default_factory=lambda: {"scatterable": 1.0})
    density_by_intent: dict[str, str] = field(
        default_factory=lambda: {"block": "high", "turn": "medium", "disrupt": "low"}
    )
    rounds_per_aiming_point: dict[str, int] = field(
        default_factory=lambda: {"high": 40, "medium": 30, "low": 20}
    )
    firing_rate_per_vehicle: float = 4.0  # rounds per minute, howitzer
    basic_load_rounds: int = 1000  # converts round counts to load fractions

    known_supply_classes: tuple = (FUEL, STANDARD_ORDNANCE, MINEFIELD_ORDNANCE)


def record_attrition(
    start: int,
    end: int,
    attacker: Unit,
    targets: list[Unit],
    params: AttritionParams,
    plan: Plan,
    *,
    att_posture: str = "attack",
    def_posture: str = "defend",
    terrain_class: str = "open",
    activity_class: str = "",
) -> None:
    """Append fraction-of-strength loss records for both sides over [start, end]."""
    if not targets:
        raise CombatError("attrition requires at least one target")
    att_strength = _strength_at(plan, attacker.id, start)
    if att_strength <= 0:
        raise CombatError("ZERO_STRENGTH_ATTACKER")
    def_strength = sum(_strength_at(plan, t.id, start) for t in targets)

    ratio = (def_strength * params.terrain(terrain_class) * params.posture(def_posture)) / att_strength
    att_personnel = params.k * params.posture(att_posture) * ratio**ATTRITION_EXPONENT
    def_personnel = params.k * params.posture(def_posture) * ratio**-ATTRITION_EXPONENT
    att_ws = params.c * att_personnel
    def_ws = params.c * def_personnel

    friendly = params.friendly_factor(activity_class)
    for t in targets:
        plan.attrition_ledger.append(AttritionRecord(t.id, "WEAPONS_SYSTEMS", def_ws, start, end))
        plan.attrition_ledger.append(AttritionRecord(t.id, "PERSONNEL", def_personnel, start, end))
    plan.attrition_ledger.append(
        AttritionRecord(attacker.id, "WEAPONS_SYSTEMS", att_ws * friendly, start, end)
    )
    plan.attrition_ledger.append(
        AttritionRecord(attacker.id, "PERSONNEL", att_personnel * friendly, start, end)
    )
    plan.revision += 1


def _strength_at(plan: Plan, unit_id: str, t: int) -> float:
    strength = plan.scenario.units[unit_id].strength if plan.scenario else 1.0
    for rec in plan.attrition_ledger:
        if rec.unit_id == unit_id and rec.kind == "PERSONNEL" and rec.end <= t:
            strength -= rec.amount
    return max(0.0, strength)


def record_consumption(
    start: int,
    end: int,
    resource: Unit,
    supply_class: str,
    plan: Plan,
    *,
    amount: float = None,
    rate: float = None,
    rates: ConsumptionRates = None,
) -> None:
    """Append a consumption ledger entry; amounts are basic-load fractions.

    Pass either an absolute ``amount`` or a per-minute ``rate`` applied over
    the elapsed window.  A draw that floors the projected on-hand at zero
    flags the activity's plan with INFEASIBLE(SUPPLY) via the infeasibility
    list (keyed by the consuming unit).
    """
    known = (rates or ConsumptionRates()).known_supply_classes
    if supply_class not in known:
        raise CombatError(f"UNKNOWN_SUPPLY_CLASS: {supply_class!r}")
    if amount is None:
        if rate is None:
            raise CombatError("either amount or rate is required")
        amount = rate * max(0, end - start)
    if amount < 0:
        raise CombatError("consumption amount must be non-negative")
    if amount == 0:
        return
    on_hand = _supply_at(plan, resource.id, supply_class, end)
    plan.consumption_ledger.append(
        ConsumptionRecord(resource.id, supply_class, amount, start, end)
    )
    if on_hand - amount < 0:
        plan.infeasibilities.append((resource.id, Infeasibility.SUPPLY.value))
    plan.revision += 1


def _supply_at(plan: Plan, unit_id: str, supply_class: str, t: int) -> float:
    level = 0.0
    if plan.scenario:
        level = plan.scenario.units[unit_id].supplies.get(supply_class, 0.0)
    for rec in plan.consumption_ledger:
        if rec.unit_id == unit_id and rec.supply_class == supply_class and rec.end <= t:
            level -= rec.amount
    return max(0.0, level)


def minefield_rounds(intent: str, width_m: float, mtype: str, rates: ConsumptionRates) -> tuple[int, int]:
    """(aiming points, rounds per aiming point) from the config tables."""
    per_100m = rates.aiming_points_per_100m.get(mtype)
    if per_100m is None:
        raise CombatError(f"unknown minefield type {mtype!r}")
    num_apts = max(1, math.ceil(width_m / 100.0 * per_100m))
    density = rates.density_by_intent.get(intent)
    if density is None:
        raise CombatError(f"unknown minefield intent {intent!r}")
    rnds_per_apt = rates.rounds_per_aiming_point[density]
    return num_apts, rnds_per_apt


def calculate_minefield_duration(
    resource: Unit, intent: str, width_m: float, mtype: str, rates: ConsumptionRates = None
) -> Fraction:
    """Exact firing time in minutes: (rounds/pt * pts) / (vehicles * rate).

    Returned exact (so homogeneity holds bit-for-bit); schedulers ceil it
    to whole minutes.
    """
    rates = rates or ConsumptionRates()
    num_vehicles = resource.vehicles("HOWITZER")
    if num_vehicles < 1:
        raise CombatError("NO_FIRING_PLATFORMS")
    num_apts, rnds_per_apt = minefield_rounds(intent, width_m, mtype, rates)
    return Fraction(rnds_per_apt * num_apts) / Fraction(
        Fraction(num_vehicles) * Fraction(rates.firing_rate_per_vehicle)
    )
