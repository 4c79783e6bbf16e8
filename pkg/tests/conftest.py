import socket
import threading

import pytest
import uvicorn

from tracelock.geo import GeoPoint, PositionFix, offset_point
from tracelock.scenarios import DENVER_CENTER


class ManualClock:
    """A clock the test advances by hand, for reproducible timestamps."""

    def __init__(self, start: int = 1_000_000):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: int = 1) -> int:
        self.now += seconds
        return self.now


@pytest.fixture
def manual_clock():
    return ManualClock()


def free_port() -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class ServerThread:
    """Run a FastAPI app under uvicorn in a background thread."""

    def __init__(self, app, port: int):
        self.port = port
        config = uvicorn.Config(
            app, host="127.0.0.1", port=port, log_level="warning", access_log=False
        )
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self):
        self.thread.start()
        for _ in range(400):
            if self.server.started:
                return self
            self.thread.join(0.025)
        raise RuntimeError("server did not start in time")

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(10)


def meeting_trace(meetings: int, tick_seconds: int = 5) -> list[PositionFix]:
    """Two users meeting 3 m apart `meetings` times, 40 m apart in between.

    Each meeting is one isolated proximity episode at the default 5 m
    threshold, so the trace carries exactly `meetings` approach events.
    """
    home_a = DENVER_CENTER
    home_b = offset_point(DENVER_CENTER, 0.0, 40.0)
    meet_a = offset_point(DENVER_CENTER, 20.0, 18.5)
    meet_b = offset_point(DENVER_CENTER, 20.0, 21.5)
    fixes = []
    ticks = 2 * meetings + 1
    for tick in range(ticks):
        meeting = tick % 2 == 1
        pos_a = meet_a if meeting else home_a
        pos_b = meet_b if meeting else home_b
        wall = tick * tick_seconds
        fixes.append(PositionFix("user-a", pos_a, tick, wall))
        fixes.append(PositionFix("user-b", pos_b, tick, wall))
    return fixes


def random_point(rng, center: GeoPoint = DENVER_CENTER, spread_m: float = 500.0) -> GeoPoint:
    return offset_point(
        center, rng.uniform(-spread_m, spread_m), rng.uniform(-spread_m, spread_m)
    )
