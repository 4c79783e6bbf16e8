"""Registration, health-status tracking, contact queries, and notifications.

Only the server-assigned pseudonymous id ever circulates in downstream data;
alert messages are fixed templates that carry nothing about the index case.
"""

from __future__ import annotations

import re
import time
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import DuplicateMacError, MacValidationError, UnknownUserError, ValidationError
from .geo import ApproachEvent, PositionFix, detect_approach_events

SECONDS_PER_DAY = 86_400

_ID_NAMESPACE = uuid.UUID("6ba7b810-9dad-11d1-80b4-00c04fd430c8")


class Status(str, Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"
    RECOVERED = "RECOVERED"


# registration forms may use the consumer-facing wording for each status
_STATUS_ALIASES = {
    "positive": Status.POSITIVE,
    "covid-19": Status.POSITIVE,
    "negative": Status.NEGATIVE,
    "none covid-19": Status.NEGATIVE,
    "none": Status.NEGATIVE,
    "recovered": Status.RECOVERED,
}


def parse_status(value: object) -> Status:
    if isinstance(value, Status):
        return value
    key = str(value).strip().lower()
    if key in _STATUS_ALIASES:
        return _STATUS_ALIASES[key]
    raise ValidationError(f"unknown status {value!r}")


class Gender(str, Enum):
    FEMALE = "FEMALE"
    MALE = "MALE"
    OTHER = "OTHER"
    UNDISCLOSED = "UNDISCLOSED"


def parse_gender(value: object) -> Gender:
    if isinstance(value, Gender):
        return value
    key = str(value).strip().upper()
    try:
        return Gender[key]
    except KeyError:
        raise ValidationError(f"unknown gender {value!r}") from None


class NotificationKind(str, Enum):
    CONTACT_WITH_POSITIVE = "CONTACT_WITH_POSITIVE"
    NEAR_INFECTED_AREA = "NEAR_INFECTED_AREA"
    BT_PROXIMITY = "BT_PROXIMITY"


# Fixed alert templates. Nothing about the index case is ever interpolated.
CONTACT_ALERT_MESSAGE = (
    "You were recently in close proximity to a person who has since reported "
    "a positive test. Please self-isolate and arrange a test."
)
AREA_ALERT_MESSAGE = (
    "An area you recently visited is now under a lockdown advisory. "
    "Avoid the area and follow local guidance."
)
BT_ALERT_MESSAGE = (
    "Your latest scan detected a device registered to an active or recovered "
    "case. Keep your distance and monitor for symptoms."
)

_MAC_RE = re.compile(r"^[0-9A-F]{12}$")


def normalize_mac(raw: object) -> str:
    """Normalize a 48-bit MAC to uppercase colon-separated form."""
    if not isinstance(raw, str):
        raise MacValidationError(f"MAC must be a string, got {raw!r}")
    digits = re.sub(r"[:\-. ]", "", raw).upper()
    if not _MAC_RE.match(digits):
        raise MacValidationError(f"invalid MAC address {raw!r}")
    return ":".join(digits[i : i + 2] for i in range(0, 12, 2))


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    name: str
    phone: str
    postcode: str
    age: int
    gender: Gender
    bt_mac: str
    status: Status
    status_updated_at: int

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "name": self.name,
            "phone": self.phone,
            "postcode": self.postcode,
            "age": self.age,
            "gender": self.gender.value,
            "bt_mac": self.bt_mac,
            "status": self.status.value,
            "status_updated_at": self.status_updated_at,
        }


@dataclass(frozen=True)
class Notification:
    notification_id: int
    recipient: str
    kind: NotificationKind
    created_at: int
    message: str
    source_event: str

    def to_dict(self) -> dict:
        return {
            "notification_id": self.notification_id,
            "recipient": self.recipient,
            "kind": self.kind.value,
            "created_at": self.created_at,
            "message": self.message,
            "source_event": self.source_event,
        }


def _default_id_factory() -> Callable[[], str]:
    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return uuid.uuid5(_ID_NAMESPACE, f"tracelock-user-{counter}").hex[:12]

    return next_id


class Registry:
    """Registered participants, keyed by pseudonymous id, with status history."""

    def __init__(self, id_factory: Callable[[], str] | None = None) -> None:
        self._id_factory = id_factory or _default_id_factory()
        self._users: dict[str, UserRecord] = {}
        self._mac_index: dict[str, str] = {}
        self._history: dict[str, list[tuple[Status, int]]] = {}

    def __contains__(self, user_id: str) -> bool:
        return user_id in self._users

    def __len__(self) -> int:
        return len(self._users)

    def get(self, user_id: str) -> UserRecord:
        try:
            return self._users[user_id]
        except KeyError:
            raise UnknownUserError(f"unknown user {user_id!r}") from None

    def users(self) -> list[UserRecord]:
        return list(self._users.values())

    def history(self, user_id: str) -> list[tuple[Status, int]]:
        self.get(user_id)
        return list(self._history[user_id])

    def register(
        self,
        *,
        name: str,
        phone: str,
        postcode: str,
        age: int,
        gender: Gender | str,
        bt_mac: str,
        status: Status | str,
        at: int,
    ) -> UserRecord:
        """Persist a new participant and hand back their pseudonymous record.

        The Bluetooth MAC must be syntactically valid and not registered yet.
        """
        mac = normalize_mac(bt_mac)
        if mac in self._mac_index:
            raise DuplicateMacError(f"MAC {mac} is already registered")
        age = int(age)
        if not 0 <= age <= 150:
            raise ValidationError(f"age out of range: {age}")
        record = UserRecord(
            user_id=self._id_factory(),
            name=str(name),
            phone=str(phone),
            postcode=str(postcode),
            age=age,
            gender=parse_gender(gender),
            bt_mac=mac,
            status=parse_status(status),
            status_updated_at=int(at),
        )
        self._insert(record)
        return record

    def restore(self, record: UserRecord, history: list[tuple[Status, int]]) -> None:
        """Reinstate a record during log replay, bypassing id assignment."""
        self._insert(record)
        self._history[record.user_id] = list(history)
        self._id_factory()  # keep the id sequence aligned with live operation

    def _insert(self, record: UserRecord) -> None:
        self._users[record.user_id] = record
        self._mac_index[record.bt_mac] = record.user_id
        self._history[record.user_id] = [(record.status, record.status_updated_at)]

    def update_status(self, user_id: str, new_status: Status | str, at: int) -> UserRecord:
        """Append a status transition; history is append-only."""
        record = self.get(user_id)
        status = parse_status(new_status)
        updated = replace(record, status=status, status_updated_at=int(at))
        self._users[user_id] = updated
        self._history[user_id].append((status, int(at)))
        return updated

    def owner_of_mac(self, mac: str) -> UserRecord | None:
        user_id = self._mac_index.get(mac)
        return self._users[user_id] if user_id else None


@dataclass(frozen=True)
class BluetoothScanResult:
    matches: list[tuple[str, Status]]
    skipped: int

    def to_dict(self) -> dict:
        return {
            "matches": [
                {"user_id": user_id, "status": status.value}
                for user_id, status in self.matches
            ],
            "skipped": self.skipped,
        }


def bluetooth_match(scanned_macs: Iterable[object], registry: Registry) -> BluetoothScanResult:
    """Match scanned MACs against the registry.

    Only registered MACs whose owner is POSITIVE or RECOVERED are returned;
    negative matches and unknown MACs are dropped. Malformed entries are
    skipped and counted rather than failing the scan.
    """
    matches: list[tuple[str, Status]] = []
    skipped = 0
    for raw in scanned_macs:
        try:
            mac = normalize_mac(raw)
        except MacValidationError:
            skipped += 1
            continue
        owner = registry.owner_of_mac(mac)
        if owner and owner.status in (Status.POSITIVE, Status.RECOVERED):
            matches.append((owner.user_id, owner.status))
    return BluetoothScanResult(matches=matches, skipped=skipped)


class NotificationQueue:
    """Per-user notification queues with at-most-once delivery per source event."""

    def __init__(self) -> None:
        self._by_user: dict[str, list[Notification]] = {}
        self._seen: set[tuple[str, str]] = set()
        self._next_id = 1

    def push(
        self,
        recipient: str,
        kind: NotificationKind,
        message: str,
        source_event: str,
        at: int,
    ) -> Notification | None:
        """Queue a notification, or return None if this source event already fired."""
        key = (recipient, source_event)
        if key in self._seen:
            return None
        notification = Notification(
            notification_id=self._next_id,
            recipient=recipient,
            kind=kind,
            created_at=int(at),
            message=message,
            source_event=source_event,
        )
        self._next_id += 1
        self._seen.add(key)
        self._by_user.setdefault(recipient, []).append(notification)
        return notification

    def restore(self, notification: Notification) -> None:
        """Reinstate a notification during log replay."""
        self._seen.add((notification.recipient, notification.source_event))
        self._by_user.setdefault(notification.recipient, []).append(notification)
        self._next_id = max(self._next_id, notification.notification_id + 1)

    def poll(self, user_id: str, after: int | None = None) -> list[Notification]:
        """Notifications for a user with id greater than ``after``, oldest first."""
        pending = self._by_user.get(user_id, [])
        if after is None:
            return list(pending)
        return [n for n in pending if n.notification_id > after]

    def total(self) -> int:
        return sum(len(v) for v in self._by_user.values())

    def counts_by_kind(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for pending in self._by_user.values():
            for n in pending:
                counts[n.kind.value] = counts.get(n.kind.value, 0) + 1
        return counts


def positive_episode_ordinal(history: Sequence[tuple[Status, int]]) -> int:
    """Count the transitions into POSITIVE across a status history.

    Re-reporting POSITIVE while already positive belongs to the same episode;
    only POSITIVE entries following a non-positive state open a new one.
    """
    ordinal = 0
    previous: Status | None = None
    for status, _ in history:
        if status is Status.POSITIVE and previous is not Status.POSITIVE:
            ordinal += 1
        previous = status
    return ordinal


def contact_query(
    registry: Registry,
    fixes: Sequence[PositionFix],
    index_user: str,
    as_of: int,
    window_days: int = 14,
    threshold_m: float = 5.0,
) -> list[tuple[str, ApproachEvent]]:
    """All users who shared a proximity episode with the index user recently.

    An episode qualifies when it overlaps [as_of - window, as_of] in wall
    time, window start inclusive. Each contact appears once, with their most
    recent qualifying episode.
    """
    registry.get(index_user)
    window_start = as_of - window_days * SECONDS_PER_DAY
    best: dict[str, ApproachEvent] = {}
    for event in detect_approach_events(fixes, threshold_m):
        if not event.involves(index_user):
            continue
        if event.start_wall_time > as_of or event.end_wall_time < window_start:
            continue
        other = event.other(index_user)
        current = best.get(other)
        if current is None or (event.end_wall_time, event.start_wall_time) > (
            current.end_wall_time,
            current.start_wall_time,
        ):
            best[other] = event
    return sorted(best.items())


def fan_out_notifications(
    queue: NotificationQueue,
    contacts: Sequence[tuple[str, ApproachEvent]],
    source_event: str,
    at: int,
) -> list[Notification]:
    """One anonymized contact alert per contact for this source event.

    Repeating the fan-out for the same source event creates nothing new.
    """
    created = []
    for contact_id, _event in contacts:
        notification = queue.push(
            recipient=contact_id,
            kind=NotificationKind.CONTACT_WITH_POSITIVE,
            message=CONTACT_ALERT_MESSAGE,
            source_event=source_event,
            at=at,
        )
        if notification is not None:
            created.append(notification)
    return created


def handle_status_update(
    registry: Registry,
    queue: NotificationQueue,
    fixes: Sequence[PositionFix],
    user_id: str,
    new_status: Status | str,
    at: int | None = None,
    window_days: int = 14,
    threshold_m: float = 5.0,
    source_event: str | None = None,
) -> tuple[UserRecord, list[Notification]]:
    """Apply a status change; a transition to POSITIVE fans out contact alerts.

    The fan-out's source event is the positive episode itself, so repeating
    the update while the user is still positive creates nothing new.
    """
    at = int(time.time()) if at is None else int(at)
    record = registry.update_status(user_id, new_status, at)
    if record.status is not Status.POSITIVE:
        return record, []
    if source_event is None:
        ordinal = positive_episode_ordinal(registry.history(user_id))
        source_event = f"status:{user_id}:pos{ordinal}"
    contacts = contact_query(registry, fixes, user_id, at, window_days, threshold_m)
    return record, fan_out_notifications(queue, contacts, source_event, at)
