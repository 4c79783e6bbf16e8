"""Service configuration: regions, thresholds, bind address, data directory."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .lockdown import Region


@dataclass(frozen=True)
class Thresholds:
    proximity_m: float = 5.0
    aeo_threshold: int = 10
    window_days: int = 14
    tick_seconds: int = 5

    def __post_init__(self) -> None:
        if self.proximity_m <= 0:
            raise ValidationError(f"proximity_m must be positive, got {self.proximity_m}")
        if self.tick_seconds < 1:
            raise ValidationError(f"tick_seconds must be >= 1, got {self.tick_seconds}")

    def to_dict(self) -> dict:
        return {
            "proximity_m": self.proximity_m,
            "aeo_threshold": self.aeo_threshold,
            "window_days": self.window_days,
            "tick_seconds": self.tick_seconds,
        }


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the central service needs to come up.

    ``data_dir=None`` runs fully in memory with no persistence, used by
    in-process simulator runs and most tests.
    """

    regions: tuple[Region, ...]
    thresholds: Thresholds = field(default_factory=Thresholds)
    bind_host: str = "127.0.0.1"
    bind_port: int = 8000
    data_dir: Path | None = None
    assessment_cadence_s: float = 60.0
    assessment_window_s: int = 24 * 3600
    assessment_seed: int = 0
    fsync: bool = False

    def region(self, region_id: str) -> Region | None:
        for region in self.regions:
            if region.region_id == region_id:
                return region
        return None

    def to_dict(self) -> dict:
        return {
            "regions": [r.to_dict() for r in self.regions],
            "thresholds": self.thresholds.to_dict(),
            "bind_host": self.bind_host,
            "bind_port": self.bind_port,
            "data_dir": str(self.data_dir) if self.data_dir else None,
            "assessment_cadence_s": self.assessment_cadence_s,
            "assessment_window_s": self.assessment_window_s,
            "assessment_seed": self.assessment_seed,
            "fsync": self.fsync,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceConfig":
        try:
            regions = tuple(Region.from_dict(r) for r in data["regions"])
        except KeyError:
            raise ValidationError("config needs a 'regions' list") from None
        thresholds = Thresholds(**data.get("thresholds", {}))
        data_dir = data.get("data_dir")
        return cls(
            regions=regions,
            thresholds=thresholds,
            bind_host=str(data.get("bind_host", "127.0.0.1")),
            bind_port=int(data.get("bind_port", 8000)),
            data_dir=Path(data_dir) if data_dir else None,
            assessment_cadence_s=float(data.get("assessment_cadence_s", 60.0)),
            assessment_window_s=int(data.get("assessment_window_s", 24 * 3600)),
            assessment_seed=int(data.get("assessment_seed", 0)),
            fsync=bool(data.get("fsync", False)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
