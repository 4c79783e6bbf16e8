"""Contact-tracing telemetry, proximity clustering, and lockdown decision support."""

from .clustering import ClusterModel, kmeans, seed_centroids
from .config import ServiceConfig, Thresholds
from .errors import TraceLockError
from .exposure import (
    Notification,
    NotificationKind,
    Registry,
    Status,
    UserRecord,
    bluetooth_match,
    contact_query,
    fan_out_notifications,
)
from .geo import (
    ApproachEvent,
    GeoPoint,
    PositionFix,
    detect_approach_events,
    haversine_distance,
    offset_point,
    read_trace,
    write_trace,
)
from .lockdown import (
    LockdownAssessment,
    Region,
    Verdict,
    assess_region,
    decide_verdict,
    rank_regions,
)
from .server import TracingService
from .simulator import (
    AgentSpec,
    CrowdedWalk,
    RunReport,
    Scenario,
    Scripted,
    SparseWalk,
    TrialsReport,
    generate_trace,
    run_scenario,
    run_trials,
)

__all__ = [
    "AgentSpec",
    "ApproachEvent",
    "ClusterModel",
    "CrowdedWalk",
    "GeoPoint",
    "LockdownAssessment",
    "Notification",
    "NotificationKind",
    "PositionFix",
    "Region",
    "Registry",
    "RunReport",
    "Scenario",
    "Scripted",
    "ServiceConfig",
    "SparseWalk",
    "Status",
    "Thresholds",
    "TraceLockError",
    "TracingService",
    "TrialsReport",
    "UserRecord",
    "Verdict",
    "assess_region",
    "bluetooth_match",
    "contact_query",
    "decide_verdict",
    "detect_approach_events",
    "fan_out_notifications",
    "generate_trace",
    "haversine_distance",
    "kmeans",
    "offset_point",
    "read_trace",
    "rank_regions",
    "run_scenario",
    "run_trials",
    "seed_centroids",
    "write_trace",
]

__version__ = "0.1.0"
