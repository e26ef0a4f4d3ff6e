"""Group significant points into numbered hot/cold spots with hull geometry
and descriptive profiles (report counts, distinct participants, event rates).

Grouping is by connected components: two significant points of the same sign
join the same spot when they lie within the analysis band of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputMismatch, InvalidConfig
from .geo import PlanarPoint
from .reports import EsmReport, EventCategory, experience_score
from .stats import BIN_BY_MIN_CONF, GiResult, NeighborGraph

DEGENERATE_BUFFER_M = 10.0


@dataclass(frozen=True)
class Spot:
    """One connected group of same-sign significant points."""

    spot_id: int
    polarity: str  # "hot" or "cold"
    member_ids: tuple[int, ...]
    hull: tuple[PlanarPoint, ...]
    n_reports: int
    n_participants: int
    mean_experience: float
    event_profile: dict[EventCategory, float]  # percent of member reports
    participant_ids: tuple[str, ...]


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices in counter-clockwise order (monotone chain).

    Collinear points along an edge are dropped. Degenerate inputs return
    fewer than 3 vertices.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] <= 2:
        return pts
    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _ring_area(ring: np.ndarray) -> float:
    x = ring[:, 0]
    y = ring[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, 1)) - np.dot(y, np.roll(x, 1))))


def _spot_hull(coords: np.ndarray) -> tuple[PlanarPoint, ...]:
    """Convex hull of the member coordinates; single points, segments, and
    exactly-collinear sets are buffered into a real polygon."""
    hull = convex_hull(coords)
    if hull.shape[0] < 3 or _ring_area(hull) == 0.0:
        angles = np.arange(8) * (math.pi / 4)
        offsets = DEGENERATE_BUFFER_M * np.column_stack([np.cos(angles), np.sin(angles)])
        padded = (hull[:, None, :] + offsets[None, :, :]).reshape(-1, 2)
        hull = convex_hull(padded)
    return tuple(PlanarPoint(float(x), float(y)) for x, y in hull)


class _UnionFind:
    def __init__(self, ids):
        self.parent = {i: i for i in ids}

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def group_spots(
    results: list[GiResult],
    graph: NeighborGraph,
    points: np.ndarray,
    reports: list[EsmReport],
    min_conf: int = 90,
    min_size: int = 5,
) -> list[Spot]:
    """Connected components of significant points, profiled and numbered.

    A point is significant when |bin| meets ``min_conf`` (90/95/99 percent).
    Components smaller than ``min_size`` are discarded. Spots are numbered
    1..K by descending report count, hot and cold in one sequence.
    """
    if min_size < 1:
        raise InvalidConfig("min_size must be >= 1")
    if min_conf not in BIN_BY_MIN_CONF:
        raise InvalidConfig(f"min_conf must be one of {sorted(BIN_BY_MIN_CONF)}")
    coords = np.asarray(points, dtype=float)
    if not (len(results) == graph.n == len(reports) == coords.shape[0]):
        raise InputMismatch("results, graph, points, and reports must align")

    threshold = BIN_BY_MIN_CONF[min_conf]
    sign = {r.point_id: (1 if r.bin > 0 else -1) for r in results if abs(r.bin) >= threshold}
    uf = _UnionFind(sign)
    for i in sign:
        for j in graph.neighbors(i):
            j = int(j)
            if j != i and j in sign and sign[j] == sign[i]:
                uf.union(i, j)

    components: dict[int, list[int]] = {}
    for i in sign:
        components.setdefault(uf.find(i), []).append(i)
    groups = [sorted(members) for members in components.values() if len(members) >= min_size]
    groups.sort(key=lambda g: (-len(g), g[0]))

    spots = []
    for spot_id, members in enumerate(groups, start=1):
        member_reports = [reports[i] for i in members]
        participants = tuple(sorted({r.participant_id for r in member_reports}))
        n = len(members)
        profile = {
            cat: 100.0 * sum(1 for r in member_reports if cat in r.events) / n
            for cat in EventCategory
        }
        spots.append(
            Spot(
                spot_id=spot_id,
                polarity="hot" if sign[members[0]] > 0 else "cold",
                member_ids=tuple(members),
                hull=_spot_hull(coords[members]),
                n_reports=n,
                n_participants=len(participants),
                mean_experience=float(
                    np.mean([experience_score(r) for r in member_reports])
                ),
                event_profile=profile,
                participant_ids=participants,
            )
        )
    return spots


def spot_report(spots: list[Spot]) -> list[dict]:
    """Tabular summary: one row per spot plus an aggregate row per polarity.

    Aggregate event percentages and mean experience are report-weighted over
    the member union; aggregate participants are the distinct union.
    """
    rows = [
        {
            "spot_id": s.spot_id,
            "polarity": s.polarity,
            "n_reports": s.n_reports,
            "n_participants": s.n_participants,
            "mean_experience": s.mean_experience,
            **{cat.value: s.event_profile[cat] for cat in EventCategory},
        }
        for s in spots
    ]
    for polarity in ("hot", "cold"):
        group = [s for s in spots if s.polarity == polarity]
        if not group:
            continue
        total = sum(s.n_reports for s in group)
        rows.append(
            {
                "spot_id": f"all_{polarity}",
                "polarity": polarity,
                "n_reports": total,
                "n_participants": len(set().union(*[set(s.participant_ids) for s in group])),
                "mean_experience": sum(s.mean_experience * s.n_reports for s in group) / total,
                **{
                    cat.value: sum(s.event_profile[cat] * s.n_reports for s in group) / total
                    for cat in EventCategory
                },
            }
        )
    return rows
