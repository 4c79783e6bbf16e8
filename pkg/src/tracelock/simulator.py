"""Deterministic agent-based mobility generation and scenario running.

Simulated agents stand in for real smartphones: a scenario generates one fix
per agent per tick, and a run feeds the trace either through an in-process
service core or a live HTTP service, then collects the region's verdict.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import httpx

from .config import ServiceConfig, Thresholds
from .errors import InfeasibleScenarioError, TransportError, ValidationError
from .exposure import Status, parse_status
from .geo import GeoPoint, PositionFix, haversine_distance, offset_point
from .lockdown import Region
from .server import TracingService


@dataclass(frozen=True)
class Scripted:
    """Replay an explicit waypoint list, one waypoint per tick.

    A shorter list than the tick count holds the final waypoint.
    """

    waypoints: tuple[GeoPoint, ...]


@dataclass(frozen=True)
class CrowdedWalk:
    """Correlated random walk pulled toward a shared roaming group center."""

    attraction_radius_m: float


@dataclass(frozen=True)
class SparseWalk:
    """Random walk that keeps every pair of sparse agents separated."""

    min_separation_m: float


MovementSpec = Union[Scripted, CrowdedWalk, SparseWalk]


@dataclass(frozen=True)
class AgentSpec:
    user_id: str
    start: GeoPoint
    movement: MovementSpec
    status: Status = Status.NEGATIVE


@dataclass(frozen=True)
class Scenario:
    name: str
    region: Region
    agents: tuple[AgentSpec, ...]
    ticks: int
    tick_seconds: int = 5
    rng_seed: int = 0
    jitter_m: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "region": self.region.to_dict(),
            "agents": [_agent_to_dict(a) for a in self.agents],
            "ticks": self.ticks,
            "tick_seconds": self.tick_seconds,
            "rng_seed": self.rng_seed,
            "jitter_m": self.jitter_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            name=str(data["name"]),
            region=Region.from_dict(data["region"]),
            agents=tuple(_agent_from_dict(a) for a in data["agents"]),
            ticks=int(data["ticks"]),
            tick_seconds=int(data.get("tick_seconds", 5)),
            rng_seed=int(data.get("rng_seed", 0)),
            jitter_m=float(data.get("jitter_m", 0.0)),
        )

    def to_file(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_file(cls, path: str | Path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _agent_to_dict(agent: AgentSpec) -> dict:
    movement: dict
    if isinstance(agent.movement, Scripted):
        movement = {
            "kind": "SCRIPTED",
            "waypoints": [[p.lat, p.lon] for p in agent.movement.waypoints],
        }
    elif isinstance(agent.movement, CrowdedWalk):
        movement = {
            "kind": "CROWDED_WALK",
            "attraction_radius_m": agent.movement.attraction_radius_m,
        }
    else:
        movement = {
            "kind": "SPARSE_WALK",
            "min_separation_m": agent.movement.min_separation_m,
        }
    return {
        "user_id": agent.user_id,
        "start": [agent.start.lat, agent.start.lon],
        "movement": movement,
        "status": agent.status.value,
    }


def _agent_from_dict(data: dict) -> AgentSpec:
    spec = data["movement"]
    kind = spec.get("kind")
    movement: MovementSpec
    if kind == "SCRIPTED":
        movement = Scripted(
            waypoints=tuple(GeoPoint(lat, lon) for lat, lon in spec["waypoints"])
        )
    elif kind == "CROWDED_WALK":
        movement = CrowdedWalk(attraction_radius_m=float(spec["attraction_radius_m"]))
    elif kind == "SPARSE_WALK":
        movement = SparseWalk(min_separation_m=float(spec["min_separation_m"]))
    else:
        raise ValidationError(f"unknown movement kind {kind!r}")
    return AgentSpec(
        user_id=str(data["user_id"]),
        start=GeoPoint(*data["start"]),
        movement=movement,
        status=parse_status(data.get("status", "NEGATIVE")),
    )


# --- trace generation ---------------------------------------------------

_SPARSE_STEP_M = 2.0
_SPARSE_TRIES = 50
_CROWD_STEP_SIGMA_M = 1.8
_CROWD_CENTER_SIGMA_M = 1.2


def _validate_scenario(scenario: Scenario) -> None:
    if scenario.ticks < 0:
        raise ValidationError(f"ticks must be non-negative, got {scenario.ticks}")
    if scenario.tick_seconds < 1:
        raise ValidationError(f"tick_seconds must be >= 1, got {scenario.tick_seconds}")
    if scenario.jitter_m < 0:
        raise ValidationError(f"jitter_m must be non-negative, got {scenario.jitter_m}")
    seen_ids = set()
    region = scenario.region
    for agent in scenario.agents:
        if agent.user_id in seen_ids:
            raise ValidationError(f"duplicate agent id {agent.user_id!r}")
        seen_ids.add(agent.user_id)
        if isinstance(agent.movement, Scripted):
            if not agent.movement.waypoints:
                raise ValidationError(f"agent {agent.user_id!r} has no waypoints")
            for p in agent.movement.waypoints:
                if not region.contains(p):
                    raise ValidationError(
                        f"waypoint {p} of agent {agent.user_id!r} is outside the region"
                    )
        elif not region.contains(agent.start):
            raise ValidationError(
                f"start of agent {agent.user_id!r} is outside the region"
            )

    sparse = [a for a in scenario.agents if isinstance(a.movement, SparseWalk)]
    for i, a in enumerate(sparse):
        for b in sparse[i + 1 :]:
            required = max(a.movement.min_separation_m, b.movement.min_separation_m)
            if haversine_distance(a.start, b.start) < required:
                raise InfeasibleScenarioError(
                    f"agents {a.user_id!r} and {b.user_id!r} start closer than "
                    f"{required} m; separation cannot be enforced in this region"
                )


def _clamp(point: GeoPoint, region: Region) -> GeoPoint:
    min_lat, min_lon, max_lat, max_lon = region.bounding_box
    return GeoPoint(
        min(max(point.lat, min_lat), max_lat),
        min(max(point.lon, min_lon), max_lon),
    )


def _jitter(point: GeoPoint, amplitude_m: float, rng: random.Random) -> GeoPoint:
    # uniform over the disk, so displacement never exceeds the amplitude
    r = amplitude_m * math.sqrt(rng.random())
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return offset_point(point, r * math.sin(theta), r * math.cos(theta))


def generate_trace(
    scenario: Scenario, *, seed: int | None = None, jitter_m: float | None = None
) -> list[PositionFix]:
    """Generate one fix per agent per tick; byte-identical for a fixed seed.

    ``seed`` and ``jitter_m`` override the scenario's own values, which the
    trials runner uses to perturb scripted waypoints below the proximity
    threshold's sensitivity.
    """
    scenario = _with_overrides(scenario, seed, jitter_m)
    _validate_scenario(scenario)
    rng = random.Random(scenario.rng_seed)
    region = scenario.region
    agents = scenario.agents

    positions = [a.start for a in agents]
    sparse_indexes = [
        i for i, a in enumerate(agents) if isinstance(a.movement, SparseWalk)
    ]
    crowd_indexes = [
        i for i, a in enumerate(agents) if isinstance(a.movement, CrowdedWalk)
    ]
    crowd_center: GeoPoint | None = None
    if crowd_indexes:
        crowd_center = GeoPoint(
            sum(positions[i].lat for i in crowd_indexes) / len(crowd_indexes),
            sum(positions[i].lon for i in crowd_indexes) / len(crowd_indexes),
        )

    fixes: list[PositionFix] = []
    for tick in range(scenario.ticks):
        if tick > 0 and crowd_indexes:
            crowd_center = _clamp(
                offset_point(
                    crowd_center,
                    rng.gauss(0.0, _CROWD_CENTER_SIGMA_M),
                    rng.gauss(0.0, _CROWD_CENTER_SIGMA_M),
                ),
                region,
            )
        for i, agent in enumerate(agents):
            movement = agent.movement
            if isinstance(movement, Scripted):
                wp = movement.waypoints
                pos = wp[min(tick, len(wp) - 1)]
                if scenario.jitter_m > 0:
                    pos = _jitter(pos, scenario.jitter_m, rng)
                pos = _clamp(pos, region)
            elif isinstance(movement, CrowdedWalk):
                pos = positions[i]
                if tick > 0:
                    pull = (
                        0.25
                        if haversine_distance(pos, crowd_center)
                        > movement.attraction_radius_m
                        else 0.08
                    )
                    pos = GeoPoint(
                        pos.lat + pull * (crowd_center.lat - pos.lat),
                        pos.lon + pull * (crowd_center.lon - pos.lon),
                    )
                    pos = _clamp(
                        offset_point(
                            pos,
                            rng.gauss(0.0, _CROWD_STEP_SIGMA_M),
                            rng.gauss(0.0, _CROWD_STEP_SIGMA_M),
                        ),
                        region,
                    )
            else:
                pos = positions[i]
                if tick > 0:
                    pos = _sparse_step(
                        i, positions, movement, region, sparse_indexes, rng
                    )
            positions[i] = pos
            fixes.append(
                PositionFix(
                    user_id=agent.user_id,
                    point=pos,
                    tick=tick,
                    wall_time=tick * scenario.tick_seconds,
                )
            )
    return fixes


def _sparse_step(
    index: int,
    positions: list[GeoPoint],
    movement: SparseWalk,
    region: Region,
    sparse_indexes: list[int],
    rng: random.Random,
) -> GeoPoint:
    current = positions[index]
    for _ in range(_SPARSE_TRIES):
        candidate = offset_point(
            current,
            rng.uniform(-_SPARSE_STEP_M, _SPARSE_STEP_M),
            rng.uniform(-_SPARSE_STEP_M, _SPARSE_STEP_M),
        )
        if not region.contains(candidate):
            continue
        if all(
            haversine_distance(candidate, positions[j]) >= movement.min_separation_m
            for j in sparse_indexes
            if j != index
        ):
            return candidate
    return current  # standing still never violates the separation invariant


def _with_overrides(
    scenario: Scenario, seed: int | None, jitter_m: float | None
) -> Scenario:
    if seed is None and jitter_m is None:
        return scenario
    return Scenario(
        name=scenario.name,
        region=scenario.region,
        agents=scenario.agents,
        ticks=scenario.ticks,
        tick_seconds=scenario.tick_seconds,
        rng_seed=scenario.rng_seed if seed is None else seed,
        jitter_m=scenario.jitter_m if jitter_m is None else jitter_m,
    )


# --- scenario running -----------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    scenario: str
    region_id: str
    seed: int
    aeo_total: int
    verdict: str
    aeo_per_cluster: dict[str, int]
    notification_counts: dict[str, int]
    assessment: dict
    fix_count: int
    runtime_s: float

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "region_id": self.region_id,
            "seed": self.seed,
            "aeo_total": self.aeo_total,
            "verdict": self.verdict,
            "aeo_per_cluster": self.aeo_per_cluster,
            "notification_counts": self.notification_counts,
            "assessment": self.assessment,
            "fix_count": self.fix_count,
            "runtime_s": self.runtime_s,
        }


def registration_form(scenario_name: str, agent: AgentSpec) -> dict:
    """Synthesize a deterministic registration form for a simulated agent."""
    digest = hashlib.sha256(f"{scenario_name}:{agent.user_id}".encode()).hexdigest()
    mac = ":".join(digest[i : i + 2] for i in range(0, 12, 2)).upper()
    return {
        "name": f"Agent {agent.user_id}",
        "phone": "555" + str(int(digest[12:20], 16) % 10_000_000).zfill(7),
        "postcode": "80" + str(int(digest[20:24], 16) % 1000).zfill(3),
        "age": 20 + int(digest[24:26], 16) % 60,
        "gender": "UNDISCLOSED",
        "bt_mac": mac,
        "status": agent.status.value,
    }


def run_scenario(
    scenario: Scenario,
    service_url: str | None = None,
    *,
    seed: int | None = None,
    jitter_m: float | None = None,
) -> RunReport:
    """Generate a trace, feed it through ingestion, and collect the verdict.

    With no ``service_url`` everything runs in-process against a fresh
    service core; otherwise fixes are POSTed to a live service, which must
    be freshly started (simulated agents register on every run).
    """
    started = time.perf_counter()
    effective_seed = scenario.rng_seed if seed is None else seed
    trace = generate_trace(scenario, seed=seed, jitter_m=jitter_m)
    if service_url is None:
        aeo_total, verdict, per_cluster, assessment, counts = _feed_in_process(
            scenario, trace
        )
    else:
        aeo_total, verdict, per_cluster, assessment, counts = _feed_service(
            scenario, trace, service_url
        )
    return RunReport(
        scenario=scenario.name,
        region_id=scenario.region.region_id,
        seed=effective_seed,
        aeo_total=aeo_total,
        verdict=verdict,
        aeo_per_cluster=per_cluster,
        notification_counts=counts,
        assessment=assessment,
        fix_count=len(trace),
        runtime_s=time.perf_counter() - started,
    )


def _feed_in_process(scenario: Scenario, trace: list[PositionFix]):
    config = ServiceConfig(
        regions=(scenario.region,),
        thresholds=Thresholds(tick_seconds=scenario.tick_seconds),
    )
    service = TracingService(config)
    ids = {
        agent.user_id: service.register_user(
            registration_form(scenario.name, agent)
        ).user_id
        for agent in scenario.agents
    }
    for fix in trace:
        service.ingest_fix(ids[fix.user_id], fix.point.lat, fix.point.lon, fix.wall_time)
    assessment = service.get_assessment(scenario.region.region_id, force=True)
    counts = service.notifications.counts_by_kind()
    exported = assessment.to_dict()
    return (
        assessment.aeo_total,
        assessment.verdict.value,
        exported["aeo_per_cluster"],
        exported,
        counts,
    )


def _feed_service(scenario: Scenario, trace: list[PositionFix], service_url: str):
    sent = 0
    try:
        with httpx.Client(base_url=service_url, timeout=30.0) as client:
            ids: dict[str, str] = {}
            for agent in scenario.agents:
                response = client.post(
                    "/api/users", json=registration_form(scenario.name, agent)
                )
                if response.status_code == 409:
                    raise TransportError(
                        "agents are already registered on this service; "
                        "point the run at a freshly started service"
                    )
                response.raise_for_status()
                ids[agent.user_id] = response.json()["user_id"]
            for fix in trace:
                response = client.post(
                    "/api/fixes",
                    json={
                        "user_id": ids[fix.user_id],
                        "lat": fix.point.lat,
                        "lon": fix.point.lon,
                        "wall_time": fix.wall_time,
                    },
                )
                response.raise_for_status()
                sent += 1
            response = client.get(
                f"/api/regions/{scenario.region.region_id}/assessment",
                params={"force": "true"},
            )
            response.raise_for_status()
            assessment = response.json()
            counts: dict[str, int] = {}
            for server_id in ids.values():
                response = client.get(f"/api/users/{server_id}/notifications")
                response.raise_for_status()
                for notification in response.json():
                    kind = notification["kind"]
                    counts[kind] = counts.get(kind, 0) + 1
    except httpx.HTTPError as exc:
        raise TransportError(
            f"service run failed after {sent}/{len(trace)} fixes: {exc}"
        ) from exc
    verdict = assessment["verdict"]
    return (
        int(assessment["aeo_total"]),
        verdict,
        assessment["aeo_per_cluster"],
        assessment,
        counts,
    )


@dataclass(frozen=True)
class TrialsReport:
    scenario: str
    seeds: tuple[int, ...]
    verdicts: tuple[str, ...]
    aeo_totals: tuple[int, ...]

    @property
    def consistent(self) -> bool:
        return len(set(self.verdicts)) <= 1

    @property
    def unanimous_verdict(self) -> str | None:
        return self.verdicts[0] if self.verdicts and self.consistent else None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seeds": list(self.seeds),
            "verdicts": list(self.verdicts),
            "aeo_totals": list(self.aeo_totals),
            "consistent": self.consistent,
            "unanimous_verdict": self.unanimous_verdict,
        }


def run_trials(
    scenario: Scenario,
    count: int = 10,
    *,
    jitter_m: float | None = None,
) -> TrialsReport:
    """Repeat a scenario over seeds 0..count-1 and compare the verdicts.

    Trials always run in-process: each gets its own isolated service core,
    which a shared live service could not provide (agents would re-register
    and earlier trials' fixes would pollute later counts).
    """
    seeds = tuple(range(count))
    reports = [run_scenario(scenario, seed=s, jitter_m=jitter_m) for s in seeds]
    return TrialsReport(
        scenario=scenario.name,
        seeds=seeds,
        verdicts=tuple(r.verdict for r in reports),
        aeo_totals=tuple(r.aeo_total for r in reports),
    )
