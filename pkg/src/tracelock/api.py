"""HTTP adapter over the service core, plus the blocking serve() entrypoint."""

from __future__ import annotations

import logging
import socket
import threading

import uvicorn
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .config import ServiceConfig
from .errors import (
    DuplicateFixError,
    DuplicateMacError,
    OutOfOrderFixError,
    StartupError,
    TraceLockError,
    UnknownRegionError,
    UnknownUserError,
    ValidationError,
)
from .server import TracingService

logger = logging.getLogger(__name__)

_STATUS_CODES = [
    (UnknownUserError, 404),
    (UnknownRegionError, 404),
    (DuplicateMacError, 409),
    (DuplicateFixError, 409),
    (OutOfOrderFixError, 409),
    (ValidationError, 400),
]


def _status_code(exc: TraceLockError) -> int:
    for exc_type, code in _STATUS_CODES:
        if isinstance(exc, exc_type):
            return code
    return 500


def create_app(service: TracingService) -> FastAPI:
    app = FastAPI(title="tracelock service")
    app.state.service = service
    # the dashboard is served from its own origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"])

    @app.exception_handler(TraceLockError)
    async def _handle(request: Request, exc: TraceLockError):
        return JSONResponse(status_code=_status_code(exc), content={"detail": str(exc)})

    @app.post("/api/users", status_code=201)
    async def register(request: Request):
        form = await request.json()
        if not isinstance(form, dict):
            raise ValidationError("registration body must be a JSON object")
        return service.register_user(form).to_dict()

    @app.post("/api/users/{user_id}/status")
    async def update_status(user_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "status" not in body:
            raise ValidationError("body must be a JSON object with a 'status' field")
        record, notified = service.update_status(user_id, body["status"])
        return {"user": record.to_dict(), "notified": len(notified)}

    @app.post("/api/fixes", status_code=201)
    async def ingest_fix(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise ValidationError("fix body must be a JSON object")
        try:
            fix = service.ingest_fix(
                user_id=body["user_id"],
                lat=body["lat"],
                lon=body["lon"],
                wall_time=body["wall_time"],
            )
        except KeyError as exc:
            raise ValidationError(f"fix body missing field {exc}") from None
        return {"user_id": fix.user_id, "tick": fix.tick, "wall_time": fix.wall_time}

    @app.get("/api/users/{user_id}/notifications")
    async def poll_notifications(user_id: str, after: int | None = None):
        return [n.to_dict() for n in service.poll_notifications(user_id, after)]

    @app.get("/api/regions")
    async def regions():
        return [r.to_dict() for r in service.regions()]

    @app.get("/api/regions/{region_id}/assessment")
    async def assessment(region_id: str, force: bool = False):
        return service.get_assessment(region_id, force=force).to_dict()

    @app.get("/api/regions/{region_id}/clusters")
    async def clusters(region_id: str):
        return service.get_clusters(region_id)

    @app.post("/api/bluetooth/scan")
    async def bluetooth_scan(request: Request):
        body = await request.json()
        if isinstance(body, list):
            macs, scanner = body, None
        elif isinstance(body, dict):
            macs = body.get("macs", [])
            scanner = body.get("user_id")
        else:
            raise ValidationError("scan body must be a list of MACs or an object")
        return service.bluetooth_scan(macs, scanner_user_id=scanner).to_dict()

    return app


class PeriodicAssessor(threading.Thread):
    """Re-assesses every region on a fixed cadence, off the request path."""

    def __init__(self, service: TracingService, interval_s: float) -> None:
        super().__init__(name="tracelock-assessor", daemon=True)
        self._service = service
        self._interval = interval_s
        self._halt = threading.Event()  # not named _stop: Thread.join calls self._stop()

    def run(self) -> None:
        while not self._halt.wait(self._interval):
            try:
                self._service.assess_all_regions(force=True)
            except TraceLockError:
                logger.exception("periodic assessment failed")

    def stop(self) -> None:
        self._halt.set()


def serve(config: ServiceConfig, *, periodic_assessments: bool = True) -> None:
    """Start the service and block until interrupted.

    Raises StartupError when the data directory is unusable or the bind
    address is already taken.
    """
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.bind_host, config.bind_port))
    except OSError as exc:
        raise StartupError(
            f"cannot bind {config.bind_host}:{config.bind_port}: {exc}"
        ) from exc
    finally:
        probe.close()

    service = TracingService(config)
    app = create_app(service)
    assessor = None
    if periodic_assessments:
        assessor = PeriodicAssessor(service, config.assessment_cadence_s)
        assessor.start()
    try:
        uvicorn.run(app, host=config.bind_host, port=config.bind_port, log_level="info")
    finally:
        if assessor is not None:
            assessor.stop()
        service.close()
