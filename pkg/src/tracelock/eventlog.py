"""Append-only JSON Lines event log with replay and trailing-corruption repair.

One entry per line. Sequences are gapless and strictly increasing; entries
are immutable once written. On open, the log is scanned from the start and
truncated at the first line that is incomplete, unparseable, or out of
sequence; everything before that point is recovered intact.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    REGISTRATION = "REGISTRATION"
    FIX = "FIX"
    STATUS = "STATUS"
    ASSESSMENT = "ASSESSMENT"
    NOTIFICATION = "NOTIFICATION"


@dataclass(frozen=True)
class EventLogEntry:
    sequence: int
    kind: EventKind
    payload: dict
    appended_at: int


class EventLog:
    """Single-writer append-only log backing the service's state.

    ``path=None`` keeps the log purely in memory (nothing is persisted),
    which in-process simulator runs use. Appends are flushed per entry;
    fsync per entry is available for callers that want durability across
    power loss rather than just process death.
    """

    def __init__(self, path: str | Path | None, *, fsync: bool = False) -> None:
        self.path = Path(path) if path is not None else None
        self._fsync = fsync
        self._fh = None
        self.recovered: list[EventLogEntry] = []
        self._next_sequence = 1
        if self.path is not None:
            self.recovered = self._recover()
            self._next_sequence = (
                self.recovered[-1].sequence + 1 if self.recovered else 1
            )
            self._fh = open(self.path, "a", encoding="utf-8")

    def _recover(self) -> list[EventLogEntry]:
        if not self.path.exists():
            return []
        entries: list[EventLogEntry] = []
        good_offset = 0
        with open(self.path, "rb") as fh:
            expected = 1
            for raw in fh:
                entry = None
                if raw.endswith(b"\n"):
                    entry = self._parse_line(raw, expected)
                if entry is None:
                    break
                entries.append(entry)
                good_offset += len(raw)
                expected += 1
        size = self.path.stat().st_size
        if good_offset < size:
            logger.warning(
                "event log %s: truncating %d corrupt trailing byte(s) after entry %d",
                self.path,
                size - good_offset,
                entries[-1].sequence if entries else 0,
            )
            with open(self.path, "r+b") as fh:
                fh.truncate(good_offset)
        return entries

    @staticmethod
    def _parse_line(raw: bytes, expected_sequence: int) -> EventLogEntry | None:
        try:
            data = json.loads(raw.decode("utf-8"))
            entry = EventLogEntry(
                sequence=int(data["sequence"]),
                kind=EventKind(data["kind"]),
                payload=data["payload"],
                appended_at=int(data["appended_at"]),
            )
        except (ValueError, KeyError, TypeError):
            return None
        if entry.sequence != expected_sequence or not isinstance(entry.payload, dict):
            return None
        return entry

    def append(self, kind: EventKind, payload: dict, appended_at: int) -> EventLogEntry:
        entry = EventLogEntry(
            sequence=self._next_sequence,
            kind=kind,
            payload=payload,
            appended_at=int(appended_at),
        )
        self._next_sequence += 1
        if self._fh is not None:
            line = json.dumps(
                {
                    "sequence": entry.sequence,
                    "kind": entry.kind.value,
                    "payload": entry.payload,
                    "appended_at": entry.appended_at,
                }
            )
            self._fh.write(line + "\n")
            self._fh.flush()
            if self._fsync:
                os.fsync(self._fh.fileno())
        return entry

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
