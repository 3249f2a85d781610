"""Independent reference implementations used to cross-check the engine.

These deliberately use different algorithms from the production code:
exhaustive enumeration for temporal projection and Floyd–Warshall for
route costs, both in exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional


def enumerate_projections(
    acts: dict[str, dict],
    constraints: list[tuple[str, str, int, int, str, str]],
    grid: list[int],
) -> Optional[dict[str, tuple[int, int, int, int]]]:
    """Exact per-activity (start-lo, start-hi, end-lo, end-hi) projections.

    ``acts`` maps id -> {"start": (lo, hi), "end": (lo, hi),
    "min_dur": int, "max_dur": int}.  ``constraints`` entries read
    (from_id, from_anchor, lo, hi, to_id, to_anchor) with anchors "S"/"E",
    meaning from-anchor + lo <= to-anchor <= from-anchor + hi.
    Returns None when no complete assignment exists.
    """
    ids = sorted(acts)
    pairs: dict[str, list[tuple[int, int]]] = {}
    for aid in ids:
        spec = acts[aid]
        slo, shi = spec["start"]
        elo, ehi = spec["end"]
        opts = [
            (s, e)
            for s in grid
            if slo <= s <= shi
            for e in grid
            if elo <= e <= ehi and spec["min_dur"] <= e - s <= spec["max_dur"]
        ]
        if not opts:
            return None
        pairs[aid] = opts

    by_act: dict[str, list] = {aid: [] for aid in ids}
    for c in constraints:
        by_act[c[0]].append(c)
        by_act[c[4]].append(c)

    def anchor_value(assignment, aid, anchor):
        s, e = assignment[aid]
        return s if anchor == "S" else e

    def consistent(assignment, c) -> bool:
        fid, fa, lo, hi, tid, ta = c
        if fid not in assignment or tid not in assignment:
            return True
        f = anchor_value(assignment, fid, fa)
        t = anchor_value(assignment, tid, ta)
        return f + lo <= t <= f + hi

    # Order activities so each one connects to the already-assigned prefix
    # where possible, maximizing pruning.
    order: list[str] = []
    remaining = set(ids)
    while remaining:
        connected = [
            aid
            for aid in sorted(remaining)
            if any(c[0] in order or c[4] in order for c in by_act[aid])
        ]
        nxt = connected[0] if connected else sorted(remaining)[0]
        order.append(nxt)
        remaining.discard(nxt)

    found: dict[str, list[tuple[int, int]]] = {aid: [] for aid in ids}
    assignment: dict[str, tuple[int, int]] = {}
    any_solution = [False]

    def dfs(i: int) -> None:
        if i == len(order):
            any_solution[0] = True
            for aid in ids:
                found[aid].append(assignment[aid])
            return
        aid = order[i]
        for opt in pairs[aid]:
            assignment[aid] = opt
            if all(consistent(assignment, c) for c in by_act[aid]):
                dfs(i + 1)
            del assignment[aid]

    dfs(0)
    if not any_solution[0]:
        return None
    out = {}
    for aid in ids:
        starts = [s for s, _ in found[aid]]
        ends = [e for _, e in found[aid]]
        out[aid] = (min(starts), max(starts), min(ends), max(ends))
    return out


def floyd_warshall(n: int, edges: dict[tuple[int, int], Fraction]) -> list[list[Optional[Fraction]]]:
    """All-pairs shortest path costs in exact arithmetic; None = unreachable."""
    dist: list[list[Optional[Fraction]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    for (u, v), w in edges.items():
        if dist[u][v] is None or w < dist[u][v]:
            dist[u][v] = w
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            for j in range(n):
                dkj = dist[k][j]
                if dkj is None:
                    continue
                alt = dik + dkj
                if dist[i][j] is None or alt < dist[i][j]:
                    dist[i][j] = alt
    return dist
