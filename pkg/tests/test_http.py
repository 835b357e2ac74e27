"""HTTP contract tests: all endpoints, error codes, and SSE event ordering."""

import json
import threading
import time

import httpx
import pytest

from telavatar.avatar.runner import AvatarRunner
from telavatar.avatar.sim import AvatarSim, KinematicParams
from telavatar.clock import WallClock
from telavatar.edge.core import EdgeCore
from telavatar.edge.http import EdgeServer, make_http_server
from telavatar.nav.geometry import Pose
from telavatar.nav.grid import OccupancyGrid
from telavatar.transport.impaired import ImpairedChannel, Impairment

GRID = OccupancyGrid.from_rows(
    ["." * 20 for _ in range(19)] + ["#" * 20], resolution=0.25, origin=(0.125, 0.125)
)
MAP_BYTES = json.dumps(GRID.to_json()).encode()
START = Pose(2.375, 2.375, 0.0)
FAST = KinematicParams(linear_speed=5.0, angular_speed_deg=720.0, odom_interval_ms=50.0)


class Rig:
    def __init__(self, with_avatar=True):
        clock = WallClock()
        channel = ImpairedChannel(Impairment(), clock=clock)
        edge_ep, avatar_ep = channel.pair()
        self.core = EdgeCore(GRID, clock, edge_ep.send)
        avatar = None
        if with_avatar:
            sim = AvatarSim(START, FAST, start_ms=clock.now())
            avatar = AvatarRunner(avatar_ep, sim, script=None, session_id=7)
        pump = (lambda now: avatar.run_once(now)) if avatar else None
        self.app = EdgeServer(self.core, edge_ep, clock, tick_ms=2.0, extra_pump=pump)
        self.httpd = make_http_server(self.app, ("127.0.0.1", 0), map_bytes=MAP_BYTES)
        self.port = self.httpd.server_address[1]
        self.app.start()
        self._http_thread = threading.Thread(target=self.httpd.serve_forever,
                                             kwargs={"poll_interval": 0.05}, daemon=True)
        self._http_thread.start()

    @property
    def base(self):
        return f"http://127.0.0.1:{self.port}"

    def wait_alive(self, timeout=5.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            if self.app.call(lambda: self.core.snapshot())["session"]["state"] == "alive":
                return True
            time.sleep(0.01)
        return False

    def wait_pose(self, timeout=5.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            if self.app.call(lambda: self.core.pose) is not None:
                return True
            time.sleep(0.01)
        return False

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()
        self.app.stop()


@pytest.fixture(scope="module")
def rig():
    r = Rig()
    assert r.wait_alive()
    assert r.wait_pose()
    yield r
    r.close()


@pytest.fixture(scope="module")
def client(rig):
    with httpx.Client(base_url=rig.base, timeout=5.0) as c:
        yield c


def set_mode(client, mode):
    response = client.put("/api/v1/mode", json={"mode": mode})
    assert response.status_code == 200
    return response.json()


def test_state_schema(rig, client):
    response = client.get("/api/v1/state")
    assert response.status_code == 200
    snap = response.json()
    assert set(snap) == {"mode", "session", "pose", "active", "queue", "speaker", "media"}
    assert snap["session"]["state"] == "alive"
    assert snap["media"] == "external"
    assert snap["pose"] is not None and snap["pose"]["age_ms"] >= 0


def test_map_served_verbatim(client):
    response = client.get("/api/v1/map")
    assert response.status_code == 200
    assert response.content == MAP_BYTES


def test_mode_roundtrip(client):
    body = set_mode(client, "auto")
    assert body["previous"] in ("manual", "auto")
    assert body["cancelled"] == 0
    body = set_mode(client, "manual")
    assert body["previous"] == "auto"


def test_mode_invalid_value_422(client):
    response = client.put("/api/v1/mode", json={"mode": "warp"})
    assert response.status_code == 422
    assert "mode" in response.json()["error"]


def test_command_lifecycle_and_event_order(rig, client):
    set_mode(client, "manual")
    events = []
    started = threading.Event()
    done = threading.Event()

    def consume():
        with client.stream("GET", "/api/v1/events") as stream:
            lines = stream.iter_lines()
            first = next(lines)
            assert first.startswith("retry:")
            started.set()
            name = None
            for line in lines:
                if line.startswith("event:"):
                    name = line.split(":", 1)[1].strip()
                elif line.startswith("data:") and name:
                    events.append((name, json.loads(line.split(":", 1)[1])))
                    if name == "command" and events[-1][1]["status"] in ("completed", "failed"):
                        done.set()
                        return

    thread = threading.Thread(target=consume, daemon=True)
    thread.start()
    assert started.wait(timeout=5.0)
    response = client.post("/api/v1/commands", json={"op": "turn-left", "deg": 15})
    assert response.status_code == 202
    rec_id = response.json()["id"]
    assert done.wait(timeout=10.0)
    statuses = [p["status"] for n, p in events if n == "command" and p["id"] == rec_id]
    assert statuses == ["queued", "dispatched", "delivered", "executing", "completed"]


def test_odom_events_flow(rig, client):
    got = []
    with client.stream("GET", "/api/v1/events") as stream:
        name = None
        for line in stream.iter_lines():
            if line.startswith("event:"):
                name = line.split(":", 1)[1].strip()
            elif line.startswith("data:") and name == "odom":
                got.append(json.loads(line.split(":", 1)[1]))
                if len(got) >= 2:
                    break
    assert all(set(o) == {"x", "y", "theta", "t"} for o in got)


def test_command_wrong_mode_409(client):
    set_mode(client, "auto")
    response = client.post("/api/v1/commands", json={"op": "park"})
    assert response.status_code == 409
    set_mode(client, "manual")


def test_command_malformed_422(client):
    set_mode(client, "manual")
    response = client.post("/api/v1/commands", json={"op": "turn-left"})
    assert response.status_code == 422
    response = client.post("/api/v1/commands", content=b"{not json")
    assert response.status_code == 422


def test_goal_contract(rig, client):
    set_mode(client, "auto")
    response = client.post("/api/v1/goal", json={"x": 4.375, "y": 2.375})
    assert response.status_code == 202
    body = response.json()
    assert body["count"] >= 1 and isinstance(body["id_first"], int)
    assert body["path"][-1] == [4.375, 2.375]
    # goal into the wall row
    response = client.post("/api/v1/goal", json={"x": 2.375, "y": 4.875})
    assert response.status_code == 422
    assert "occupied" in response.json()["error"]
    # wrong mode
    set_mode(client, "manual")
    response = client.post("/api/v1/goal", json={"x": 1.0, "y": 1.0})
    assert response.status_code == 409


def test_stop_contract(rig, client):
    response = client.post("/api/v1/stop")
    assert response.status_code == 202
    assert isinstance(response.json()["id"], int)


def test_unknown_route_404(client):
    assert client.get("/api/v1/nope").status_code == 404
    assert client.post("/api/v1/nope").status_code == 404


def test_dead_session_503():
    rig = Rig(with_avatar=False)
    try:
        with httpx.Client(base_url=rig.base, timeout=5.0) as client:
            assert client.get("/api/v1/state").json()["session"]["state"] == "dead"
            response = client.post("/api/v1/commands", json={"op": "park"})
            assert response.status_code == 503
            response = client.post("/api/v1/stop")
            assert response.status_code == 503
            response = client.put("/api/v1/mode", json={"mode": "auto"})
            assert response.status_code == 200  # mode changes allowed anytime
            response = client.post("/api/v1/goal", json={"x": 1.0, "y": 1.0})
            assert response.status_code == 503
    finally:
        rig.close()


def test_static_console_serving(tmp_path):
    (tmp_path / "index.html").write_text("<html><body>console</body></html>")
    clock = WallClock()
    channel = ImpairedChannel(Impairment(), clock=clock)
    edge_ep, _ = channel.pair()
    core = EdgeCore(GRID, clock, edge_ep.send)
    app = EdgeServer(core, edge_ep, clock)
    httpd = make_http_server(app, ("127.0.0.1", 0), static_dir=str(tmp_path))
    app.start()
    thread = threading.Thread(target=httpd.serve_forever, kwargs={"poll_interval": 0.05},
                              daemon=True)
    thread.start()
    try:
        with httpx.Client(base_url=f"http://127.0.0.1:{httpd.server_address[1]}") as client:
            response = client.get("/")
            assert response.status_code == 200
            assert "console" in response.text
            assert client.get("/../secret").status_code == 404
    finally:
        httpd.shutdown()
        httpd.server_close()
        app.stop()
