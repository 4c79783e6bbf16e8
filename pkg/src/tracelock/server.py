"""The central service core: ingestion, queries, and assessment scheduling.

All writes are serialized through one lock and appended to the event log
before they are acknowledged; restarting a service on the same data
directory replays the log back to the exact pre-crash state.
"""

from __future__ import annotations

import hashlib
import math
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .clustering import ClusterModel
from .config import ServiceConfig
from .errors import (
    DuplicateFixError,
    OutOfOrderFixError,
    StartupError,
    UnknownRegionError,
    UnknownUserError,
    ValidationError,
)
from .eventlog import EventKind, EventLog
from .exposure import (
    AREA_ALERT_MESSAGE,
    BT_ALERT_MESSAGE,
    BluetoothScanResult,
    Notification,
    NotificationKind,
    NotificationQueue,
    Registry,
    Status,
    UserRecord,
    bluetooth_match,
    contact_query,
    fan_out_notifications,
    parse_gender,
    parse_status,
    positive_episode_ordinal,
)
from .geo import GeoPoint, PositionFix, fix_to_record, fix_from_record, haversine_distance
from .lockdown import LockdownAssessment, Region, Verdict, assess_region

LOG_FILE_NAME = "events.jsonl"


@dataclass(frozen=True)
class ClusterStats:
    """Per-cluster geometry computed when an assessment runs."""

    index: int
    member_count: int
    rms_radius_m: float
    aeo: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "member_count": self.member_count,
            "rms_radius_m": self.rms_radius_m,
            "aeo": self.aeo,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterStats":
        return cls(
            index=int(data["index"]),
            member_count=int(data["member_count"]),
            rms_radius_m=float(data["rms_radius_m"]),
            aeo=int(data["aeo"]),
        )


@dataclass
class _CachedAssessment:
    assessment: LockdownAssessment
    cluster_stats: list[ClusterStats]
    fetched_at: float


def _assessment_from_dict(data: dict) -> LockdownAssessment:
    clusters = data.get("clusters")
    model = None
    if clusters is not None:
        model = ClusterModel(
            k=int(clusters["k"]),
            centroids=tuple(
                GeoPoint(c["lat"], c["lon"]) for c in clusters["centroids"]
            ),
            assignments={int(i): int(c) for i, c in clusters["assignments"].items()},
            inertia=float(clusters["inertia"]),
            iterations=int(clusters["iterations"]),
            inertia_history=(),
        )
    return LockdownAssessment(
        region_id=str(data["region_id"]),
        aeo_total=int(data["aeo_total"]),
        aeo_per_cluster={int(i): int(n) for i, n in data["aeo_per_cluster"].items()},
        threshold=int(data["threshold"]),
        verdict=Verdict(data["verdict"]),
        clusters=model,
        assessed_at=int(data["assessed_at"]),
    )


class TracingService:
    """The in-process application behind the HTTP API.

    In-process simulator runs drive this object directly; the HTTP layer is
    a thin adapter, so both transports share every behavior.
    """

    def __init__(
        self, config: ServiceConfig, *, clock: Callable[[], float] = time.time
    ) -> None:
        self.config = config
        self.clock = clock
        self._lock = threading.RLock()

        log_path = None
        if config.data_dir is not None:
            data_dir = Path(config.data_dir)
            try:
                data_dir.mkdir(parents=True, exist_ok=True)
                probe = data_dir / LOG_FILE_NAME
                with open(probe, "a", encoding="utf-8"):
                    pass
            except OSError as exc:
                raise StartupError(f"data directory {data_dir} is unusable: {exc}") from exc
            log_path = data_dir / LOG_FILE_NAME

        self.registry = Registry()
        self.notifications = NotificationQueue()
        self._fixes: list[PositionFix] = []
        self._last_fix: dict[str, PositionFix] = {}
        self._assessments: dict[str, _CachedAssessment] = {}
        self._log = EventLog(log_path, fsync=config.fsync)
        for entry in self._log.recovered:
            self._apply_replayed(entry)

    # --- replay ---------------------------------------------------------

    def _apply_replayed(self, entry) -> None:
        payload = entry.payload
        if entry.kind is EventKind.REGISTRATION:
            record = UserRecord(
                user_id=payload["user_id"],
                name=payload["name"],
                phone=payload["phone"],
                postcode=payload["postcode"],
                age=int(payload["age"]),
                gender=parse_gender(payload["gender"]),
                bt_mac=payload["bt_mac"],
                status=parse_status(payload["status"]),
                status_updated_at=int(payload["status_updated_at"]),
            )
            self.registry.restore(
                record, [(record.status, record.status_updated_at)]
            )
        elif entry.kind is EventKind.FIX:
            fix = fix_from_record(payload)
            self._store_fix(fix)
        elif entry.kind is EventKind.STATUS:
            self.registry.update_status(
                payload["user_id"], payload["status"], int(payload["at"])
            )
        elif entry.kind is EventKind.NOTIFICATION:
            self.notifications.restore(
                Notification(
                    notification_id=int(payload["notification_id"]),
                    recipient=payload["recipient"],
                    kind=NotificationKind(payload["kind"]),
                    created_at=int(payload["created_at"]),
                    message=payload["message"],
                    source_event=payload["source_event"],
                )
            )
        elif entry.kind is EventKind.ASSESSMENT:
            cached = _CachedAssessment(
                assessment=_assessment_from_dict(payload["assessment"]),
                cluster_stats=[
                    ClusterStats.from_dict(s) for s in payload["cluster_stats"]
                ],
                fetched_at=float(entry.appended_at),
            )
            self._assessments[cached.assessment.region_id] = cached

    # --- operations -----------------------------------------------------

    def register_user(self, form: dict) -> UserRecord:
        with self._lock:
            try:
                record = self.registry.register(
                    name=form["name"],
                    phone=form["phone"],
                    postcode=form["postcode"],
                    age=form["age"],
                    gender=form["gender"],
                    bt_mac=form["bt_mac"],
                    status=form["status"],
                    at=int(self.clock()),
                )
            except KeyError as exc:
                raise ValidationError(f"registration form missing field {exc}") from None
            self._append(EventKind.REGISTRATION, record.to_dict())
            return record

    def update_status(self, user_id: str, new_status: str) -> tuple[UserRecord, list[Notification]]:
        with self._lock:
            status = parse_status(new_status)
            at = int(self.clock())
            record = self.registry.update_status(user_id, status, at)
            self._append(
                EventKind.STATUS,
                {"user_id": user_id, "status": status.value, "at": at},
            )
            notified: list[Notification] = []
            if status is Status.POSITIVE:
                contacts = contact_query(
                    self.registry,
                    self._fixes,
                    user_id,
                    as_of=at,
                    window_days=self.config.thresholds.window_days,
                    threshold_m=self.config.thresholds.proximity_m,
                )
                episode = positive_episode_ordinal(self.registry.history(user_id))
                notified = fan_out_notifications(
                    self.notifications,
                    contacts,
                    source_event=f"status:{user_id}:pos{episode}",
                    at=at,
                )
                for notification in notified:
                    self._append(EventKind.NOTIFICATION, notification.to_dict())
            return record, notified

    def ingest_fix(self, user_id: str, lat: float, lon: float, wall_time: float) -> PositionFix:
        with self._lock:
            if user_id not in self.registry:
                raise UnknownUserError(f"unknown user {user_id!r}")
            point = GeoPoint(float(lat), float(lon))
            wall = int(math.floor(float(wall_time)))
            if wall < 0:
                raise ValidationError(f"wall_time must be non-negative, got {wall}")
            tick = wall // self.config.thresholds.tick_seconds
            last = self._last_fix.get(user_id)
            if last is not None:
                if wall < last.wall_time:
                    raise OutOfOrderFixError(
                        f"fix at wall_time {wall} precedes user's last at {last.wall_time}"
                    )
                if tick == last.tick:
                    raise DuplicateFixError(
                        f"user {user_id!r} already has a fix for tick {tick}"
                    )
            fix = PositionFix(user_id=user_id, point=point, tick=tick, wall_time=wall)
            self._store_fix(fix)
            self._append(EventKind.FIX, fix_to_record(fix))
            return fix

    def _store_fix(self, fix: PositionFix) -> None:
        self._fixes.append(fix)
        self._last_fix[fix.user_id] = fix

    def poll_notifications(self, user_id: str, after: int | None = None) -> list[Notification]:
        with self._lock:
            self.registry.get(user_id)
            return self.notifications.poll(user_id, after)

    def regions(self) -> list[Region]:
        return list(self.config.regions)

    def get_assessment(self, region_id: str, force: bool = False) -> LockdownAssessment:
        with self._lock:
            return self._assess(region_id, force).assessment

    def get_clusters(self, region_id: str) -> dict:
        with self._lock:
            cached = self._assess(region_id, force=False)
            region = self.config.region(region_id)
            assessment = cached.assessment
            model = assessment.clusters
            clusters = []
            for stats in cached.cluster_stats:
                centroid = model.centroids[stats.index] if model else None
                clusters.append(
                    {
                        "index": stats.index,
                        "centroid": (
                            {"lat": centroid.lat, "lon": centroid.lon} if centroid else None
                        ),
                        "member_count": stats.member_count,
                        "aeo": stats.aeo,
                        "rms_radius_m": stats.rms_radius_m,
                    }
                )
            latest = [
                fix_to_record(fix)
                for user_id, fix in sorted(self._last_fix.items())
                if region.contains(fix.point)
            ]
            return {
                "region_id": region_id,
                "verdict": assessment.verdict.value,
                "aeo_total": assessment.aeo_total,
                "assessed_at": assessment.assessed_at,
                "clusters": clusters,
                "latest_positions": latest,
            }

    def bluetooth_scan(
        self, macs: list, scanner_user_id: str | None = None
    ) -> BluetoothScanResult:
        with self._lock:
            result = bluetooth_match(macs, self.registry)
            if scanner_user_id is not None:
                self.registry.get(scanner_user_id)
                if result.matches:
                    digest = hashlib.sha256(
                        ",".join(sorted(uid for uid, _ in result.matches)).encode()
                    ).hexdigest()[:16]
                    notification = self.notifications.push(
                        recipient=scanner_user_id,
                        kind=NotificationKind.BT_PROXIMITY,
                        message=BT_ALERT_MESSAGE,
                        source_event=f"bt:{scanner_user_id}:{digest}",
                        at=int(self.clock()),
                    )
                    if notification is not None:
                        self._append(EventKind.NOTIFICATION, notification.to_dict())
            return result

    def assess_all_regions(self, force: bool = False) -> list[LockdownAssessment]:
        return [self.get_assessment(r.region_id, force) for r in self.config.regions]

    # --- assessment internals --------------------------------------------

    def _assess(self, region_id: str, force: bool) -> _CachedAssessment:
        region = self.config.region(region_id)
        if region is None:
            raise UnknownRegionError(f"unknown region {region_id!r}")
        cached = self._assessments.get(region_id)
        now = self.clock()
        if (
            not force
            and cached is not None
            and now - cached.fetched_at <= self.config.assessment_cadence_s
        ):
            return cached

        fixes = self._region_window_fixes(region)
        assessment = assess_region(
            region,
            fixes,
            threshold_m=self.config.thresholds.proximity_m,
            aeo_threshold=self.config.thresholds.aeo_threshold,
            rng_seed=self.config.assessment_seed,
        )
        stats = self._cluster_stats(assessment, [f.point for f in fixes])
        cached = _CachedAssessment(
            assessment=assessment, cluster_stats=stats, fetched_at=now
        )
        self._assessments[region_id] = cached
        self._append(
            EventKind.ASSESSMENT,
            {
                "assessment": assessment.to_dict(),
                "cluster_stats": [s.to_dict() for s in stats],
            },
        )
        if assessment.verdict is Verdict.LOCKDOWN:
            self._raise_area_alerts(region_id, assessment, stats)
        return cached

    def _region_window_fixes(self, region: Region) -> list[PositionFix]:
        """Fixes inside the region, restricted to the trailing window.

        The window is anchored at the newest fix wall time seen in the
        region (data time, not server time), so replayed traces stay
        assessable no matter when they were recorded.
        """
        inside = [f for f in self._fixes if region.contains(f.point)]
        if not inside:
            return inside
        anchor = max(f.wall_time for f in inside)
        cutoff = anchor - self.config.assessment_window_s
        return [f for f in inside if f.wall_time >= cutoff]

    def _cluster_stats(
        self, assessment: LockdownAssessment, positions: list[GeoPoint]
    ) -> list[ClusterStats]:
        model = assessment.clusters
        if model is None:
            return []
        totals: dict[int, tuple[int, float]] = {}
        for i, cluster_index in model.assignments.items():
            d = haversine_distance(positions[i], model.centroids[cluster_index])
            count, acc = totals.get(cluster_index, (0, 0.0))
            totals[cluster_index] = (count + 1, acc + d * d)
        stats = []
        for j in range(model.k):
            count, acc = totals.get(j, (0, 0.0))
            rms = math.sqrt(acc / count) if count else 0.0
            stats.append(
                ClusterStats(
                    index=j,
                    member_count=count,
                    rms_radius_m=rms,
                    aeo=assessment.aeo_per_cluster.get(j, 0),
                )
            )
        return stats

    def _raise_area_alerts(
        self,
        region_id: str,
        assessment: LockdownAssessment,
        stats: list[ClusterStats],
    ) -> None:
        """Alert users whose latest fix sits inside a locked-down cluster.

        "Inside" means within twice the cluster's RMS radius of its centroid.
        """
        model = assessment.clusters
        if model is None:
            return
        at = int(self.clock())
        source = f"area:{region_id}:{assessment.assessed_at}"
        for record in self.registry.users():
            fix = self._last_fix.get(record.user_id)
            if fix is None:
                continue
            for cluster in stats:
                if cluster.member_count == 0:
                    continue
                centroid = model.centroids[cluster.index]
                if haversine_distance(fix.point, centroid) <= 2.0 * cluster.rms_radius_m:
                    notification = self.notifications.push(
                        recipient=record.user_id,
                        kind=NotificationKind.NEAR_INFECTED_AREA,
                        message=AREA_ALERT_MESSAGE,
                        source_event=source,
                        at=at,
                    )
                    if notification is not None:
                        self._append(EventKind.NOTIFICATION, notification.to_dict())
                    break

    # --- bookkeeping ------------------------------------------------------

    def _append(self, kind: EventKind, payload: dict):
        return self._log.append(kind, payload, int(self.clock()))

    def stats(self) -> dict:
        with self._lock:
            return {
                "users": len(self.registry),
                "fixes": len(self._fixes),
                "notifications": self.notifications.total(),
            }

    def snapshot_state(self) -> dict:
        """Full logical state, used to compare replayed and twin instances."""
        with self._lock:
            return {
                "users": {
                    r.user_id: r.to_dict() for r in self.registry.users()
                },
                "history": {
                    r.user_id: [
                        [status.value, at] for status, at in self.registry.history(r.user_id)
                    ]
                    for r in self.registry.users()
                },
                "fixes": [fix_to_record(f) for f in self._fixes],
                "notifications": {
                    r.user_id: [n.to_dict() for n in self.notifications.poll(r.user_id)]
                    for r in self.registry.users()
                },
                "assessments": {
                    region_id: {
                        "assessment": cached.assessment.to_dict(),
                        "cluster_stats": [s.to_dict() for s in cached.cluster_stats],
                        "fetched_at": cached.fetched_at,
                    }
                    for region_id, cached in sorted(self._assessments.items())
                },
            }

    def close(self) -> None:
        self._log.close()
