import socket

import pytest
from fastapi.testclient import TestClient

from tracelock.api import PeriodicAssessor, create_app, serve
from tracelock.config import ServiceConfig
from tracelock.errors import StartupError
from tracelock.scenarios import build_denver_crowded
from tracelock.server import TracingService

from conftest import meeting_trace

DENVER_REGION = build_denver_crowded().region


@pytest.fixture
def client(manual_clock):
    service = TracingService(
        ServiceConfig(regions=(DENVER_REGION,)), clock=manual_clock
    )
    with TestClient(create_app(service)) as test_client:
        yield test_client


def register_body(n=0, **overrides):
    body = {
        "name": f"Person {n}",
        "phone": f"30355501{n:02d}",
        "postcode": "80202",
        "age": 31,
        "gender": "female",
        "bt_mac": f"00:1B:44:11:3A:{n:02X}",
        "status": "negative",
    }
    body.update(overrides)
    return body


class TestUsers:
    def test_register_created(self, client):
        response = client.post("/api/users", json=register_body(1))
        assert response.status_code == 201
        body = response.json()
        assert body["user_id"]
        assert body["status"] == "NEGATIVE"
        assert body["bt_mac"] == "00:1B:44:11:3A:01"

    def test_register_read_your_writes(self, client):
        user_id = client.post("/api/users", json=register_body(1)).json()["user_id"]
        response = client.get(f"/api/users/{user_id}/notifications")
        assert response.status_code == 200
        assert response.json() == []

    def test_duplicate_mac_conflict(self, client):
        assert client.post("/api/users", json=register_body(1)).status_code == 201
        response = client.post("/api/users", json=register_body(2, bt_mac="00:1B:44:11:3A:01"))
        assert response.status_code == 409

    def test_malformed_mac_bad_request(self, client):
        response = client.post("/api/users", json=register_body(1, bt_mac="nope"))
        assert response.status_code == 400

    def test_missing_field_bad_request(self, client):
        body = register_body(1)
        del body["phone"]
        assert client.post("/api/users", json=body).status_code == 400

    def test_status_update_unknown_user(self, client):
        response = client.post("/api/users/ghost/status", json={"status": "positive"})
        assert response.status_code == 404


class TestFixes:
    def test_ingest_and_ack(self, client):
        user_id = client.post("/api/users", json=register_body(1)).json()["user_id"]
        response = client.post(
            "/api/fixes",
            json={"user_id": user_id, "lat": 39.73, "lon": -104.99, "wall_time": 12},
        )
        assert response.status_code == 201
        assert response.json() == {"user_id": user_id, "tick": 2, "wall_time": 12}

    def test_unknown_user_not_found(self, client):
        response = client.post(
            "/api/fixes",
            json={"user_id": "ghost", "lat": 39.73, "lon": -104.99, "wall_time": 0},
        )
        assert response.status_code == 404

    def test_duplicate_tick_conflict(self, client):
        user_id = client.post("/api/users", json=register_body(1)).json()["user_id"]
        fix = {"user_id": user_id, "lat": 39.73, "lon": -104.99, "wall_time": 11}
        assert client.post("/api/fixes", json=fix).status_code == 201
        fix["wall_time"] = 13  # same 5 s tick
        assert client.post("/api/fixes", json=fix).status_code == 409

    def test_out_of_order_conflict(self, client):
        user_id = client.post("/api/users", json=register_body(1)).json()["user_id"]
        fix = {"user_id": user_id, "lat": 39.73, "lon": -104.99, "wall_time": 50}
        assert client.post("/api/fixes", json=fix).status_code == 201
        fix["wall_time"] = 40
        assert client.post("/api/fixes", json=fix).status_code == 409

    def test_invalid_coordinates_bad_request(self, client):
        user_id = client.post("/api/users", json=register_body(1)).json()["user_id"]
        response = client.post(
            "/api/fixes",
            json={"user_id": user_id, "lat": 95.0, "lon": 0.0, "wall_time": 0},
        )
        assert response.status_code == 400


class TestRegionEndpoints:
    def test_regions_listed(self, client):
        response = client.get("/api/regions")
        assert response.status_code == 200
        [region] = response.json()
        assert region["region_id"] == "denver"
        assert region["k"] == 2

    def test_assessment_for_empty_region(self, client):
        response = client.get("/api/regions/denver/assessment")
        assert response.status_code == 200
        body = response.json()
        assert body["aeo_total"] == 0
        assert body["verdict"] == "NO_LOCKDOWN"
        assert body["clusters"] is None

    def test_unknown_region_not_found(self, client):
        assert client.get("/api/regions/atlantis/assessment").status_code == 404
        assert client.get("/api/regions/atlantis/clusters").status_code == 404

    def test_clusters_for_empty_region(self, client):
        body = client.get("/api/regions/denver/clusters").json()
        assert body["clusters"] == []
        assert body["latest_positions"] == []
        assert body["verdict"] == "NO_LOCKDOWN"

    def test_assessment_after_meetings(self, client, manual_clock):
        ids = {}
        for n, label in ((1, "user-a"), (2, "user-b")):
            ids[label] = client.post("/api/users", json=register_body(n)).json()["user_id"]
        for fix in meeting_trace(11):
            assert client.post(
                "/api/fixes",
                json={
                    "user_id": ids[fix.user_id],
                    "lat": fix.point.lat,
                    "lon": fix.point.lon,
                    "wall_time": fix.wall_time,
                },
            ).status_code == 201
        body = client.get("/api/regions/denver/assessment", params={"force": True}).json()
        assert body["aeo_total"] == 11
        assert body["verdict"] == "LOCKDOWN"
        assert sum(body["aeo_per_cluster"].values()) == 11

        detail = client.get("/api/regions/denver/clusters").json()
        assert detail["verdict"] == "LOCKDOWN"
        assert len(detail["latest_positions"]) == 2

    def test_force_query_parameter_recomputes(self, client, manual_clock):
        first = client.get("/api/regions/denver/assessment").json()
        ids = client.post("/api/users", json=register_body(1)).json()["user_id"]
        client.post(
            "/api/fixes",
            json={"user_id": ids, "lat": 39.7392, "lon": -104.9903, "wall_time": 10},
        )
        cached = client.get("/api/regions/denver/assessment").json()
        assert cached == first
        forced = client.get(
            "/api/regions/denver/assessment", params={"force": True}
        ).json()
        assert forced["assessed_at"] == 10


class TestNotificationEndpoints:
    def test_flow_through_status_flip(self, client, manual_clock):
        manual_clock.now = 30 * 86_400
        ids = {}
        for n, label in ((1, "user-a"), (2, "user-b")):
            ids[label] = client.post("/api/users", json=register_body(n)).json()["user_id"]
        base = manual_clock.now
        for fix in meeting_trace(1):
            client.post(
                "/api/fixes",
                json={
                    "user_id": ids[fix.user_id],
                    "lat": fix.point.lat,
                    "lon": fix.point.lon,
                    "wall_time": base + fix.wall_time,
                },
            )
        manual_clock.advance(3600)  # the positive report comes in after the encounter
        response = client.post(
            f"/api/users/{ids['user-a']}/status", json={"status": "positive"}
        )
        assert response.status_code == 200
        assert response.json()["notified"] == 1

        pending = client.get(f"/api/users/{ids['user-b']}/notifications").json()
        assert len(pending) == 1
        assert pending[0]["kind"] == "CONTACT_WITH_POSITIVE"
        after = pending[0]["notification_id"]
        assert client.get(
            f"/api/users/{ids['user-b']}/notifications", params={"after": after}
        ).json() == []


class TestServe:
    def test_port_in_use_fails_with_diagnostic(self):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        try:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            config = ServiceConfig(
                regions=(DENVER_REGION,), bind_host="127.0.0.1", bind_port=port
            )
            with pytest.raises(StartupError, match="cannot bind"):
                serve(config)
        finally:
            blocker.close()

    def test_periodic_assessor_recomputes_off_the_request_path(self):
        service = TracingService(ServiceConfig(regions=(DENVER_REGION,)))
        assessor = PeriodicAssessor(service, interval_s=0.02)
        assessor.start()
        try:
            deadline = 100
            while "denver" not in service._assessments and deadline > 0:
                assessor.join(0.02)
                deadline -= 1
            assert "denver" in service._assessments
        finally:
            assessor.stop()
            assessor.join(2)


class TestBluetoothEndpoint:
    def test_bare_list_body(self, client):
        carrier = client.post(
            "/api/users", json=register_body(1, status="positive")
        ).json()
        response = client.post("/api/bluetooth/scan", json=[carrier["bt_mac"], "junk"])
        assert response.status_code == 200
        body = response.json()
        assert body["matches"] == [
            {"user_id": carrier["user_id"], "status": "POSITIVE"}
        ]
        assert body["skipped"] == 1

    def test_object_body_with_scanner(self, client):
        carrier = client.post(
            "/api/users", json=register_body(1, status="positive")
        ).json()
        scanner = client.post("/api/users", json=register_body(2)).json()
        response = client.post(
            "/api/bluetooth/scan",
            json={"macs": [carrier["bt_mac"]], "user_id": scanner["user_id"]},
        )
        assert response.status_code == 200
        pending = client.get(f"/api/users/{scanner['user_id']}/notifications").json()
        assert [n["kind"] for n in pending] == ["BT_PROXIMITY"]
