"""Geodesic distance and proximity-episode detection over tracked position fixes.

Everything here is pure: functions take immutable values and return new ones,
so results are freely shareable between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import atan2, cos, radians, sin, sqrt
from pathlib import Path
from typing import Iterable

from .errors import ValidationError

EARTH_RADIUS_M = 6_371_000.0

# Length of one degree of latitude on the reference sphere, in meters.
METERS_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude out of range: {self.lat!r}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude out of range: {self.lon!r}")


@dataclass(frozen=True)
class PositionFix:
    """One time-stamped coordinate sample for one user.

    Ticks index a shared sampling grid; wall_time is seconds since epoch and
    is monotone with tick for any given user.
    """

    user_id: str
    point: GeoPoint
    tick: int
    wall_time: int

    def __post_init__(self) -> None:
        if self.tick < 0:
            raise ValidationError(f"tick must be non-negative, got {self.tick}")


@dataclass(frozen=True)
class ApproachEvent:
    """One below-threshold proximity episode between a pair of users.

    An episode is a maximal contiguous run of ticks during which the pair's
    distance stays below the detection threshold. Wall times are carried so
    contact-window queries can work in seconds rather than ticks.
    """

    pair: tuple[str, str]
    start_tick: int
    end_tick: int
    min_distance_m: float
    start_wall_time: int
    end_wall_time: int

    def __post_init__(self) -> None:
        if self.pair[0] == self.pair[1]:
            raise ValidationError(f"pair members must be distinct: {self.pair!r}")
        if self.start_tick > self.end_tick:
            raise ValidationError(
                f"episode runs backwards: {self.start_tick}..{self.end_tick}"
            )

    def involves(self, user_id: str) -> bool:
        return user_id in self.pair

    def other(self, user_id: str) -> str:
        if user_id == self.pair[0]:
            return self.pair[1]
        if user_id == self.pair[1]:
            return self.pair[0]
        raise ValueError(f"{user_id!r} is not part of {self.pair!r}")


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters on a sphere of radius 6,371,000 m."""
    lat1, lon1, lat2, lon2 = map(radians, (a.lat, a.lon, b.lat, b.lon))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = sin(dlat / 2) ** 2 + cos(lat1) * cos(lat2) * sin(dlon / 2) ** 2
    # atan2 keeps precision for near-antipodal points where asin(sqrt(h)) degrades
    return EARTH_RADIUS_M * 2.0 * atan2(sqrt(h), sqrt(1.0 - h))


def offset_point(origin: GeoPoint, north_m: float, east_m: float) -> GeoPoint:
    """Displace a point by meters using a local flat-earth approximation.

    Accurate to well under a centimeter at the sub-kilometer extents this
    package works with; intended for building scenarios and test geometry.
    """
    lat = origin.lat + north_m / METERS_PER_DEG_LAT
    lon = origin.lon + east_m / (METERS_PER_DEG_LAT * cos(radians(origin.lat)))
    return GeoPoint(lat, lon)


def detect_approach_events(
    fixes: Iterable[PositionFix], threshold_m: float = 5.0
) -> list[ApproachEvent]:
    """Find all proximity episodes in a time-aligned stream of fixes.

    For each unordered user pair there is one event per maximal contiguous
    run of ticks with pairwise distance below ``threshold_m``. A run is
    broken by a tick at or above the threshold and equally by a tick where
    either user has no fix: absence of data never extends an encounter.
    Events carry the minimum distance observed during the run.
    """
    if threshold_m <= 0:
        raise ValidationError(f"threshold_m must be positive, got {threshold_m!r}")

    by_user: dict[str, dict[int, PositionFix]] = {}
    for fix in fixes:
        slots = by_user.setdefault(fix.user_id, {})
        if fix.tick in slots:
            raise ValidationError(
                f"duplicate fix for user {fix.user_id!r} at tick {fix.tick}"
            )
        slots[fix.tick] = fix

    events: list[ApproachEvent] = []
    users = sorted(by_user)
    for i, user_a in enumerate(users):
        for user_b in users[i + 1 :]:
            events.extend(
                _pair_events(user_a, by_user[user_a], user_b, by_user[user_b], threshold_m)
            )
    events.sort(key=lambda e: (e.start_tick, e.pair))
    return events


def _pair_events(
    user_a: str,
    fixes_a: dict[int, PositionFix],
    user_b: str,
    fixes_b: dict[int, PositionFix],
    threshold_m: float,
) -> list[ApproachEvent]:
    pair = (user_a, user_b)
    shared = sorted(fixes_a.keys() & fixes_b.keys())
    out: list[ApproachEvent] = []

    start_tick: int | None = None
    end_tick = 0
    min_d = math.inf

    def close_run() -> None:
        nonlocal start_tick
        assert start_tick is not None
        out.append(
            ApproachEvent(
                pair=pair,
                start_tick=start_tick,
                end_tick=end_tick,
                min_distance_m=min_d,
                start_wall_time=min(
                    fixes_a[start_tick].wall_time, fixes_b[start_tick].wall_time
                ),
                end_wall_time=max(fixes_a[end_tick].wall_time, fixes_b[end_tick].wall_time),
            )
        )
        start_tick = None

    for tick in shared:
        # a gap in shared ticks means a missing fix terminated any open run
        if start_tick is not None and tick != end_tick + 1:
            close_run()
        d = haversine_distance(fixes_a[tick].point, fixes_b[tick].point)
        if d < threshold_m:
            if start_tick is None:
                start_tick = tick
                min_d = d
            else:
                min_d = min(min_d, d)
            end_tick = tick
        elif start_tick is not None:
            close_run()
    if start_tick is not None:
        close_run()
    return out


# --- JSON Lines trace files -------------------------------------------------

TRACE_FIELDS = ("user_id", "lat", "lon", "tick", "wall_time")


def fix_to_record(fix: PositionFix) -> dict:
    return {
        "user_id": fix.user_id,
        "lat": fix.point.lat,
        "lon": fix.point.lon,
        "tick": fix.tick,
        "wall_time": fix.wall_time,
    }


def fix_from_record(record: dict) -> PositionFix:
    try:
        return PositionFix(
            user_id=str(record["user_id"]),
            point=GeoPoint(float(record["lat"]), float(record["lon"])),
            tick=int(record["tick"]),
            wall_time=int(record["wall_time"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed trace record: {record!r}") from exc


def write_trace(path: str | Path, fixes: Iterable[PositionFix]) -> None:
    """Write fixes as JSON Lines, one fix per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for fix in fixes:
            fh.write(json.dumps(fix_to_record(fix)) + "\n")


def read_trace(path: str | Path) -> list[PositionFix]:
    """Read a JSON Lines trace file."""
    fixes = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                fixes.append(fix_from_record(json.loads(line)))
    return fixes
