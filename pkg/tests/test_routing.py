"""Route finding: presets, tie-breaks, travel time, and the
Floyd-Warshall oracle."""

import random
from fractions import Fraction

import pytest

from coaplan.model import Side, Unit
from coaplan.routing import (
    NO_PATH,
    NO_POINT,
    RouteWeighting,
    RoutingError,
    Segment,
    TerrainNetwork,
    calculate_end_point,
    calculate_path,
    path_cost,
    travel_time,
    weighting_preset,
)
from oracles import floyd_warshall


def grid_net():
    """3x3 grid, unit-length two-way edges, threat high along the top row."""
    net = TerrainNetwork()
    for r in range(3):
        for c in range(3):
            net.add_point(f"p{r}{c}", c * 1.0, r * 1.0)
    for r in range(3):
        for c in range(3):
            threat = 0.8 if r == 0 else 0.0
            conceal = 0.9 if r == 2 else 0.0
            if c < 2:
                net.add_segment(
                    Segment(f"p{r}{c}", f"p{r}{c+1}", 1.0, threat=threat,
                            concealment=conceal),
                    two_way=True,
                )
            if r < 2:
                net.add_segment(
                    Segment(f"p{r}{c}", f"p{r+1}{c}", 1.0), two_way=True
                )
    return net


class TestPresets:
    def test_fastest_ignores_threat(self):
        net = grid_net()
        path = calculate_path("p00", "p02", net, weighting_preset("fastest"))
        assert [s.dst for s in path] == ["p01", "p02"]

    def test_covered_detours_around_threat(self):
        net = grid_net()
        path = calculate_path("p00", "p02", net, weighting_preset("covered"))
        points = ["p00"] + [s.dst for s in path]
        assert "p01" not in points  # top-row edges carry 0.8 threat
        assert points[-1] == "p02"

    def test_unknown_preset(self):
        with pytest.raises(RoutingError):
            weighting_preset("scenic")


class TestWeighting:
    def test_negative_coefficient_rejected(self):
        with pytest.raises(RoutingError):
            RouteWeighting(a_time=-1.0)

    def test_all_zero_rejected(self):
        with pytest.raises(RoutingError):
            RouteWeighting(a_time=0.0, a_threat=0.0, a_concealment=0.0)

    def test_trafficability_slows_edge(self):
        w = RouteWeighting(a_time=1.0, speed=10.0)
        fast = w.edge_cost(Segment("a", "b", 6.0, trafficability="high"))
        slow = w.edge_cost(Segment("a", "b", 6.0, trafficability="low"))
        assert float(fast) == pytest.approx(0.6)
        assert float(slow) == pytest.approx(2.0)  # 6 / (10 * 0.3)


class TestCalculatePath:
    def test_same_point_is_empty_path(self):
        net = grid_net()
        assert calculate_path("p11", "p11", net, weighting_preset("fastest")) == []

    def test_unknown_point_raises(self):
        net = grid_net()
        with pytest.raises(RoutingError):
            calculate_path("p00", "nowhere", net, weighting_preset("fastest"))

    def test_unreachable_returns_no_path(self):
        net = TerrainNetwork()
        net.add_point("a")
        net.add_point("b")
        assert calculate_path("a", "b", net, weighting_preset("fastest")) is NO_PATH

    def test_equal_cost_tie_breaks_lexicographically(self):
        # Two equal-cost routes a->m1->z and a->m2->z: the smaller point-id
        # sequence must win, every time.
        net = TerrainNetwork()
        for p in ("a", "m1", "m2", "z"):
            net.add_point(p)
        net.add_segment(Segment("a", "m1", 2.0), two_way=True)
        net.add_segment(Segment("a", "m2", 2.0), two_way=True)
        net.add_segment(Segment("m1", "z", 2.0), two_way=True)
        net.add_segment(Segment("m2", "z", 2.0), two_way=True)
        for _ in range(5):
            path = calculate_path("a", "z", net, weighting_preset("fastest"))
            assert [s.dst for s in path] == ["m1", "z"]


class TestTravelTime:
    def _unit(self, speed):
        return Unit("u", Side.BLUE, speed=speed)

    def test_simple(self):
        # 20 km at 20 km/h = 60 minutes.
        path = [Segment("a", "b", 20.0)]
        assert travel_time(path, self._unit(20.0)) == 60

    def test_rounds_up(self):
        path = [Segment("a", "b", 1.0)]  # 1 km at 25 km/h = 2.4 min
        assert travel_time(path, self._unit(25.0)) == 3

    def test_trafficability_factor(self):
        path = [Segment("a", "b", 6.0, trafficability="medium")]
        # 6 km at 20*0.6 = 12 km/h -> 30 minutes.
        assert travel_time(path, self._unit(20.0)) == 30

    def test_unmovable_unit(self):
        with pytest.raises(RoutingError, match="UNMOVABLE_UNIT"):
            travel_time([Segment("a", "b", 1.0)], self._unit(0.0))


class TestCalculateEndPoint:
    def test_picks_nearest_in_range(self):
        net = grid_net()
        unit = Unit("arty", Side.BLUE, speed=20.0, firing_range=1.5)
        # From p00, needing range to p22: nearest qualifying point.
        got = calculate_end_point("p00", ["p22"], net, unit)
        assert got is not None
        assert net.distance(got, "p22") <= 1.5

    def test_no_point_when_in_range_points_unreachable(self):
        # The only point within range of the target is the target itself,
        # and nothing connects to it.
        net = TerrainNetwork()
        net.add_point("a", 0.0, 0.0)
        net.add_point("b", 1.0, 0.0)
        net.add_point("z", 100.0, 0.0)
        net.add_segment(Segment("a", "b", 1.0), two_way=True)
        unit = Unit("arty", Side.BLUE, speed=20.0, firing_range=0.5)
        assert calculate_end_point("a", ["z"], net, unit) is NO_POINT

    def test_in_place_when_already_in_range(self):
        net = grid_net()
        unit = Unit("arty", Side.BLUE, speed=20.0, firing_range=10.0)
        assert calculate_end_point("p11", ["p22"], net, unit) == "p11"


def random_graph(rng):
    n = rng.randint(3, 25)
    net = TerrainNetwork()
    ids = [f"v{i:02d}" for i in range(n)]
    for i, pid in enumerate(ids):
        net.add_point(pid, float(i % 5), float(i // 5))
    m = rng.randint(n, min(3 * n, n * (n - 1) // 2))
    seen = set()
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        if (u, v) in seen:
            continue
        seen.add((u, v))
        net.add_segment(
            Segment(
                ids[u], ids[v],
                length=rng.choice([0.5, 1.0, 1.5, 2.5, 4.0, 7.5]),
                trafficability=rng.choice(["high", "high", "medium", "low"]),
                threat=rng.choice([0.0, 0.0, 0.3, 0.8]),
                concealment=rng.choice([0.0, 0.5, 0.9]),
            ),
            two_way=rng.random() < 0.5,
        )
    return net, ids


class TestFloydWarshallOracle:
    @pytest.mark.parametrize("preset", ["fastest", "covered"])
    def test_costs_match_all_pairs(self, preset):
        rng = random.Random(hash(preset) % (2**32))
        for trial in range(100):
            net, ids = random_graph(rng)
            w = weighting_preset(preset, speed=20.0)
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
                    assert path is NO_PATH, f"trial {trial}: {src}->{dst}"
                else:
                    assert path is not None, f"trial {trial}: {src}->{dst}"
                    assert path_cost(path, w) == expected, (
                        f"trial {trial}: {src}->{dst} cost mismatch"
                    )


class TestDeterminism:
    def test_identical_reruns(self):
        rng = random.Random(7)
        net, ids = random_graph(rng)
        w = weighting_preset("covered", speed=15.0)
        first = {
            (a, b): tuple(s.dst for s in p) if (p := calculate_path(a, b, net, w)) is not None else None
            for a in ids[:5] for b in ids[:5]
        }
        second = {
            (a, b): tuple(s.dst for s in p) if (p := calculate_path(a, b, net, w)) is not None else None
            for a in ids[:5] for b in ids[:5]
        }
        assert first == second
