"""Builtin two-scenario experiment: a crowded Denver walk and a sparse Aspen walk.

The Denver scenario is scripted as a meeting choreography: five agents live
on a 50 m ring and pairs repeatedly meet 3 m apart at one of two stages
100 m east and west of the ring center, returning home between meetings.
Every meeting is therefore one isolated proximity episode, and there are
exactly 55 of them. The geometry leaves ~45 m of margin, so sub-threshold
waypoint jitter (as applied by trial runs) cannot change the episode count.

The coordinates are representative city-center points; the walk paths are
synthetic.
"""

from __future__ import annotations

import math
from itertools import combinations

from .geo import GeoPoint, offset_point
from .lockdown import Region
from .simulator import AgentSpec, Scenario, Scripted, SparseWalk

DENVER_CENTER = GeoPoint(39.7392, -104.9903)
ASPEN_CENTER = GeoPoint(39.1911, -106.8175)

_AGENT_IDS = ("user-a", "user-b", "user-c", "user-d", "user-e")

_MEETINGS = 55
_HOME_RING_RADIUS_M = 50.0
_STAGE_OFFSET_M = 100.0
_MEETING_HALF_GAP_M = 1.5


def _bbox_around(center: GeoPoint, half_deg: float = 0.02):
    return (
        center.lat - half_deg,
        center.lon - half_deg,
        center.lat + half_deg,
        center.lon + half_deg,
    )


def build_denver_crowded() -> Scenario:
    region = Region(
        region_id="denver",
        name="Denver, CO",
        bounding_box=_bbox_around(DENVER_CENTER),
        k=2,
    )
    homes = [
        offset_point(
            DENVER_CENTER,
            _HOME_RING_RADIUS_M * math.sin(2.0 * math.pi * i / 5.0),
            _HOME_RING_RADIUS_M * math.cos(2.0 * math.pi * i / 5.0),
        )
        for i in range(5)
    ]
    stages = (
        offset_point(DENVER_CENTER, 0.0, -_STAGE_OFFSET_M),
        offset_point(DENVER_CENTER, 0.0, _STAGE_OFFSET_M),
    )
    pair_cycle = list(combinations(range(5), 2))

    ticks = 2 + 2 * _MEETINGS
    waypoints: list[list[GeoPoint]] = [[homes[i]] * ticks for i in range(5)]
    for meeting in range(_MEETINGS):
        first, second = pair_cycle[meeting % len(pair_cycle)]
        stage = stages[meeting % 2]
        tick = 1 + 2 * meeting
        waypoints[first][tick] = offset_point(stage, _MEETING_HALF_GAP_M, 0.0)
        waypoints[second][tick] = offset_point(stage, -_MEETING_HALF_GAP_M, 0.0)

    agents = tuple(
        AgentSpec(
            user_id=_AGENT_IDS[i],
            start=homes[i],
            movement=Scripted(waypoints=tuple(waypoints[i])),
        )
        for i in range(5)
    )
    return Scenario(
        name="denver_crowded",
        region=region,
        agents=agents,
        ticks=ticks,
        tick_seconds=5,
        rng_seed=0,
    )


def build_aspen_sparse() -> Scenario:
    region = Region(
        region_id="aspen",
        name="Aspen, CO",
        bounding_box=_bbox_around(ASPEN_CENTER),
        k=2,
    )
    agents = tuple(
        AgentSpec(
            user_id=_AGENT_IDS[i],
            start=offset_point(ASPEN_CENTER, 0.0, (i - 2) * 100.0),
            movement=SparseWalk(min_separation_m=50.0),
        )
        for i in range(5)
    )
    return Scenario(
        name="aspen_sparse",
        region=region,
        agents=agents,
        ticks=112,
        tick_seconds=5,
        rng_seed=0,
    )


BUILTIN_SCENARIOS = {
    "denver_crowded": build_denver_crowded,
    "aspen_sparse": build_aspen_sparse,
}


def builtin_scenario(name: str) -> Scenario | None:
    builder = BUILTIN_SCENARIOS.get(name)
    return builder() if builder else None
