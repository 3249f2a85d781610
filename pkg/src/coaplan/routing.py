"""Terrain network routing: weighted Dijkstra with deterministic tie-breaks.

Edge cost = a_time * (length / effective speed) + a_threat * threat
          + a_concealment * (1 - concealment).
Costs are accumulated as exact fractions so identical path costs compare
equal regardless of summation order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .model import Unit

NO_PATH = None
NO_POINT = None

# Config defaults, not doctrine.
TRAFFICABILITY_FACTORS = {"high": 1.0, "medium": 0.6, "low": 0.3}


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    src: str
    dst: str
    length: float  # km
    trafficability: str = "high"
    threat: float = 0.0
    concealment: float = 0.0
    attributes: tuple = ()  # e.g. ("obstacle",)


@dataclass
class TerrainNetwork:
    points: dict[str, tuple[float, float]] = field(default_factory=dict)
    segments: list[Segment] = field(default_factory=list)
    _adj: dict[str, list[Segment]] = field(default_factory=dict, repr=False)

    def add_point(self, pid: str, x: float = 0.0, y: float = 0.0) -> None:
        self.points[pid] = (x, y)

    def add_segment(self, seg: Segment, two_way: bool = False) -> None:
        if seg.length <= 0:
            raise RoutingError(f"segment {seg.src}->{seg.dst} has non-positive length")
        self.segments.append(seg)
        self._adj.setdefault(seg.src, []).append(seg)
        if two_way:
            back = Segment(
                seg.dst, seg.src, seg.length, seg.trafficability, seg.threat,
                seg.concealment, seg.attributes,
            )
            self.segments.append(back)
            self._adj.setdefault(back.src, []).append(back)

    def neighbors(self, pid: str) -> list[Segment]:
        return sorted(self._adj.get(pid, []), key=lambda s: s.dst)

    def segment(self, src: str, dst: str) -> Optional[Segment]:
        for s in self._adj.get(src, []):
            if s.dst == dst:
                return s
        return None

    def segment_length(self, src: str, dst: str) -> float:
        s = self.segment(src, dst)
        return s.length if s else 0.0

    def distance(self, a: str, b: str) -> float:
        """Straight-line distance between two points (km) from coordinates."""
        ax, ay = self.points[a]
        bx, by = self.points[b]
        return math.hypot(ax - bx, ay - by)


@dataclass(frozen=True)
class RouteWeighting:
    a_time: float = 1.0
    a_threat: float = 0.0
    a_concealment: float = 0.0
    speed: float = 1.0  # km/h used for the time term

    def __post_init__(self):
        if self.a_time < 0 or self.a_threat < 0 or self.a_concealment < 0:
            raise RoutingError("weighting coefficients must be non-negative")
        if self.a_time == self.a_threat == self.a_concealment == 0:
            raise RoutingError("at least one weighting coefficient must be positive")

    def edge_cost(self, seg: Segment) -> Fraction:
        factor = TRAFFICABILITY_FACTORS.get(seg.trafficability, 1.0)
        eff_speed = self.speed * factor
        time_h = seg.length / eff_speed if eff_speed > 0 else float("inf")
        cost = (
            self.a_time * time_h
            + self.a_threat * seg.threat
            + self.a_concealment * (1.0 - seg.concealment)
        )
        if cost < 0:
            raise RoutingError("negative edge cost")
        return Fraction(cost)


def weighting_preset(name: str, speed: float = 1.0) -> RouteWeighting:
    if name == "fastest":
        return RouteWeighting(a_time=1.0, a_threat=0.0, a_concealment=0.0, speed=speed)
    if name == "covered":
        return RouteWeighting(a_time=0.2, a_threat=5.0, a_concealment=1.0, speed=speed)
    raise RoutingError(f"unknown weighting preset {name!r}")


def calculate_path(
    start: str, end: str, net: TerrainNetwork, w: RouteWeighting
) -> Optional[list[Segment]]:
    """Minimum-cost route, ties broken by smallest point-id sequence."""
    if start not in net.points or end not in net.points:
        raise RoutingError(f"unknown point {start!r} or {end!r}")
    if start == end:
        return []
    # Heap entries carry the full point sequence so equal-cost pops come out
    # in lexicographic order; graphs here are small (terrain networks).
    heap: list[tuple[Fraction, tuple[str, ...]]] = [(Fraction(0), (start,))]
    settled: set[str] = set()
    while heap:
        cost, seq = heapq.heappop(heap)
        node = seq[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == end:
            # Parallel segments between the same pair are possible; return
            # the cheapest one so the path's cost matches the settled cost.
            return [
                min(
                    (s for s in net._adj.get(a, []) if s.dst == b),
                    key=lambda s: w.edge_cost(s),
                )
                for a, b in zip(seq, seq[1:])
            ]
        for seg in net.neighbors(node):
            if seg.dst in settled:
                continue
            heapq.heappush(heap, (cost + w.edge_cost(seg), seq + (seg.dst,)))
    return NO_PATH


def path_cost(path: list[Segment], w: RouteWeighting) -> Fraction:
    return sum((w.edge_cost(s) for s in path), Fraction(0))


def calculate_end_point(
    start_point: str,
    target_points: list[str],
    net: TerrainNetwork,
    unit: Unit,
    w: Optional[RouteWeighting] = None,
) -> Optional[str]:
    """Nearest point to start that is within firing range of the targets and
    reachable from start; NO_POINT when no point qualifies."""
    if w is None:
        w = RouteWeighting(speed=max(unit.speed, 1.0))
    by_proximity = sorted(
        net.points, key=lambda p: (net.distance(start_point, p), p)
    )
    for p in by_proximity:
        in_range = all(net.distance(p, t) <= unit.firing_range for t in target_points)
        if not in_range:
            continue
        if calculate_path(start_point, p, net, w) is not None:
            return p
    return NO_POINT


def travel_time(path: list[Segment], unit: Unit) -> int:
    """Minutes to traverse the path at the unit's speed per trafficability."""
    if unit.speed <= 0:
        raise RoutingError("UNMOVABLE_UNIT: unit speed must be positive")
    hours = Fraction(0)
    for seg in path:
        factor = TRAFFICABILITY_FACTORS.get(seg.trafficability, 1.0)
        hours += Fraction(seg.length) / Fraction(unit.speed * factor)
    return math.ceil(hours * 60)
