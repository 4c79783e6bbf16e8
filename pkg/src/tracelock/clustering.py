"""K-means over geographic positions with squared-distance-weighted seeding.

Centroids of geographic points are arithmetic means in degree space, which is
adequate for the sub-degree regions this package clusters; regions spanning
the antimeridian are rejected upstream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ValidationError
from .geo import GeoPoint, haversine_distance


@dataclass(frozen=True)
class ClusterModel:
    """Result of one clustering run.

    ``assignments`` maps position index to cluster index, every position is
    assigned to its nearest centroid (ties to the lowest centroid index), and
    ``inertia`` is the sum of squared member-to-centroid distances in m².
    ``inertia_history`` records the inertia seen at each assignment step, so
    callers can check that Lloyd iteration never made things worse.
    """

    k: int
    centroids: tuple[GeoPoint, ...]
    assignments: dict[int, int]
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]

    def members(self, cluster_index: int) -> list[int]:
        return [i for i, c in self.assignments.items() if c == cluster_index]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "centroids": [{"lat": c.lat, "lon": c.lon} for c in self.centroids],
            "assignments": {str(i): c for i, c in sorted(self.assignments.items())},
            "inertia": self.inertia,
            "iterations": self.iterations,
        }


def _distinct(positions: list[GeoPoint]) -> list[GeoPoint]:
    seen: dict[tuple[float, float], GeoPoint] = {}
    for p in positions:
        seen.setdefault((p.lat, p.lon), p)
    return list(seen.values())


def seed_centroids(positions: list[GeoPoint], k: int, rng_seed: int) -> list[GeoPoint]:
    """Pick k starting centroids by squared-distance-weighted sampling.

    The first centroid is drawn uniformly from the distinct positions; each
    further one is drawn with probability proportional to its squared
    distance to the nearest centroid chosen so far. Deterministic for a
    fixed seed.
    """
    distinct = _distinct(positions)
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    if k > len(distinct):
        raise ValidationError(
            f"k={k} exceeds the {len(distinct)} distinct positions available"
        )
    rng = random.Random(rng_seed)
    chosen = [distinct[rng.randrange(len(distinct))]]
    while len(chosen) < k:
        weights = [
            min(haversine_distance(p, c) for c in chosen) ** 2 for p in distinct
        ]
        total = sum(weights)
        pick = rng.random() * total
        acc = 0.0
        index = len(distinct) - 1
        for i, w in enumerate(weights):
            acc += w
            if pick < acc:
                index = i
                break
        chosen.append(distinct[index])
    return chosen


def kmeans(
    positions: list[GeoPoint],
    k: int,
    rng_seed: int,
    max_iters: int = 100,
    tol_m: float = 0.001,
) -> ClusterModel:
    """Lloyd iteration: assign to nearest centroid, recompute means, repeat.

    Stops when every centroid moves less than ``tol_m`` meters or after
    ``max_iters`` iterations. A cluster left empty by an assignment step is
    reseeded to the position farthest from its current centroid, which keeps
    the cluster count stable. Degenerate inputs where the distinct-position
    count falls below k are tolerated: seeding pads with repeats and the
    surplus clusters simply end up empty with zero inertia.
    """
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    if k > len(positions):
        raise ValidationError(f"k={k} exceeds the {len(positions)} positions given")

    distinct_count = len(_distinct(positions))
    seeds = seed_centroids(positions, min(k, distinct_count), rng_seed)
    while len(seeds) < k:
        seeds.append(seeds[len(seeds) % distinct_count])

    centroids = list(seeds)
    history: list[float] = []
    iterations = 0
    while iterations < max_iters:
        iterations += 1
        assignments, inertia = _assign(positions, centroids)
        history.append(inertia)
        new_centroids = _update(positions, assignments, centroids, k)
        movement = max(
            haversine_distance(old, new) for old, new in zip(centroids, new_centroids)
        )
        centroids = new_centroids
        if movement < tol_m:
            break

    assignments, inertia = _assign(positions, centroids)
    history.append(inertia)
    return ClusterModel(
        k=k,
        centroids=tuple(centroids),
        assignments=assignments,
        inertia=inertia,
        iterations=iterations,
        inertia_history=tuple(history),
    )


def _assign(
    positions: list[GeoPoint], centroids: list[GeoPoint]
) -> tuple[dict[int, int], float]:
    assignments: dict[int, int] = {}
    inertia = 0.0
    for i, p in enumerate(positions):
        best_j = 0
        best_d = haversine_distance(p, centroids[0])
        for j in range(1, len(centroids)):
            d = haversine_distance(p, centroids[j])
            if d < best_d:
                best_d = d
                best_j = j
        assignments[i] = best_j
        inertia += best_d * best_d
    return assignments, inertia


def _update(
    positions: list[GeoPoint],
    assignments: dict[int, int],
    centroids: list[GeoPoint],
    k: int,
) -> list[GeoPoint]:
    new_centroids: list[GeoPoint] = []
    for j in range(k):
        members = [positions[i] for i in range(len(positions)) if assignments[i] == j]
        if members:
            lat = sum(p.lat for p in members) / len(members)
            lon = sum(p.lon for p in members) / len(members)
            new_centroids.append(GeoPoint(lat, lon))
        else:
            new_centroids.append(_farthest_from(positions, centroids[j]))
    return new_centroids


def _farthest_from(positions: list[GeoPoint], centroid: GeoPoint) -> GeoPoint:
    best = positions[0]
    best_d = -1.0
    for p in positions:
        d = haversine_distance(p, centroid)
        if d > best_d:
            best_d = d
            best = p
    return best
