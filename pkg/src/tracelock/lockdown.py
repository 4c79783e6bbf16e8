"""Per-region approach-event totals and the lockdown verdict.

A region is assessed by clustering all tracked positions inside it, counting
proximity episodes, attributing each episode to the cluster nearest its pair
midpoint, and comparing the total against the crowding threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .clustering import ClusterModel, kmeans
from .errors import ValidationError
from .geo import GeoPoint, PositionFix, detect_approach_events, haversine_distance


class Verdict(str, Enum):
    LOCKDOWN = "LOCKDOWN"
    NO_LOCKDOWN = "NO_LOCKDOWN"


@dataclass(frozen=True)
class Region:
    """A named assessment area with its cluster count.

    bounding_box is (min_lat, min_lon, max_lat, max_lon).
    """

    region_id: str
    name: str
    bounding_box: tuple[float, float, float, float]
    k: int = 1

    def __post_init__(self) -> None:
        min_lat, min_lon, max_lat, max_lon = self.bounding_box
        GeoPoint(min_lat, min_lon)
        GeoPoint(max_lat, max_lon)
        if not (min_lat < max_lat and min_lon < max_lon):
            raise ValidationError(
                f"degenerate bounding box for region {self.region_id!r}: "
                f"{self.bounding_box!r}"
            )
        if self.k < 1:
            raise ValidationError(f"region {self.region_id!r} needs k >= 1, got {self.k}")

    def contains(self, point: GeoPoint) -> bool:
        min_lat, min_lon, max_lat, max_lon = self.bounding_box
        return min_lat <= point.lat <= max_lat and min_lon <= point.lon <= max_lon

    def to_dict(self) -> dict:
        return {
            "region_id": self.region_id,
            "name": self.name,
            "bounding_box": list(self.bounding_box),
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Region":
        return cls(
            region_id=str(data["region_id"]),
            name=str(data.get("name", data["region_id"])),
            bounding_box=tuple(float(v) for v in data["bounding_box"]),
            k=int(data.get("k", 1)),
        )


@dataclass(frozen=True)
class LockdownAssessment:
    """Approach-event totals and the resulting verdict for one region.

    ``assessed_at`` is the wall time of the newest fix considered (0 when the
    region had no fixes), so identical data always yields an identical
    assessment regardless of when or where it is computed.
    """

    region_id: str
    aeo_total: int
    aeo_per_cluster: dict[int, int]
    threshold: int
    verdict: Verdict
    clusters: ClusterModel | None
    assessed_at: int

    def to_dict(self) -> dict:
        return {
            "region_id": self.region_id,
            "aeo_total": self.aeo_total,
            "aeo_per_cluster": {str(i): n for i, n in sorted(self.aeo_per_cluster.items())},
            "threshold": self.threshold,
            "verdict": self.verdict.value,
            "clusters": self.clusters.to_dict() if self.clusters else None,
            "assessed_at": self.assessed_at,
        }


def decide_verdict(aeo_total: int, aeo_threshold: int) -> Verdict:
    """LOCKDOWN iff the approach-event total strictly exceeds the threshold."""
    return Verdict.LOCKDOWN if aeo_total > aeo_threshold else Verdict.NO_LOCKDOWN


def assess_region(
    region: Region,
    fixes: Sequence[PositionFix],
    threshold_m: float = 5.0,
    aeo_threshold: int = 10,
    rng_seed: int = 0,
) -> LockdownAssessment:
    """Cluster a region's tracked positions and issue its lockdown verdict.

    An empty fix stream is not an error: it assesses to zero events and
    NO_LOCKDOWN. When fewer positions than the configured cluster count are
    available, the cluster count is clamped to what the data supports.
    """
    fixes = list(fixes)
    for fix in fixes:
        if not region.contains(fix.point):
            raise ValidationError(
                f"fix for {fix.user_id!r} at tick {fix.tick} lies outside "
                f"region {region.region_id!r}"
            )

    if not fixes:
        return LockdownAssessment(
            region_id=region.region_id,
            aeo_total=0,
            aeo_per_cluster={},
            threshold=aeo_threshold,
            verdict=Verdict.NO_LOCKDOWN,
            clusters=None,
            assessed_at=0,
        )

    positions = [fix.point for fix in fixes]
    k = min(region.k, len(positions))
    model = kmeans(positions, k, rng_seed)

    events = detect_approach_events(fixes, threshold_m)
    located = {(fix.user_id, fix.tick): fix.point for fix in fixes}
    aeo_per_cluster = {j: 0 for j in range(k)}
    for event in events:
        a = located[(event.pair[0], event.start_tick)]
        b = located[(event.pair[1], event.start_tick)]
        midpoint = GeoPoint((a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0)
        aeo_per_cluster[_nearest_centroid(midpoint, model.centroids)] += 1

    aeo_total = len(events)
    return LockdownAssessment(
        region_id=region.region_id,
        aeo_total=aeo_total,
        aeo_per_cluster=aeo_per_cluster,
        threshold=aeo_threshold,
        verdict=decide_verdict(aeo_total, aeo_threshold),
        clusters=model,
        assessed_at=max(fix.wall_time for fix in fixes),
    )


def _nearest_centroid(point: GeoPoint, centroids: Sequence[GeoPoint]) -> int:
    best_j = 0
    best_d = haversine_distance(point, centroids[0])
    for j in range(1, len(centroids)):
        d = haversine_distance(point, centroids[j])
        if d < best_d:
            best_d = d
            best_j = j
    return best_j


def rank_regions(assessments: Iterable[LockdownAssessment]) -> list[LockdownAssessment]:
    """Order assessments for triage: highest event total first, ties by id."""
    return sorted(assessments, key=lambda a: (-a.aeo_total, a.region_id))
