import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

from telavatar.cli import main
from telavatar.demo import ScenarioError, run_scenario

DATA = Path(__file__).parent.parent / "src" / "telavatar" / "data"
SCENARIOS = DATA / "scenarios"
MEETING_MAP = DATA / "maps" / "meeting_room.json"


def test_meeting_room_scenario_passes(tmp_path):
    code, failures = run_scenario(str(SCENARIOS / "meeting_room.json"),
                                  trace_path=str(tmp_path / "t.jsonl"))
    assert (code, failures) == (0, [])


def test_lossy_scenario_passes(tmp_path):
    code, failures = run_scenario(str(SCENARIOS / "meeting_room_lossy.json"),
                                  trace_path=str(tmp_path / "t.jsonl"))
    assert (code, failures) == (0, [])


def test_speaker_scenario_passes():
    code, failures = run_scenario(str(SCENARIOS / "speaker_attention.json"))
    assert (code, failures) == (0, [])


def test_failing_assertion_exits_1_with_trace(tmp_path):
    scenario = {
        "config": {"map": str(MEETING_MAP),
                   "start_pose": {"x": 0.875, "y": 0.875, "theta": 0}},
        "steps": [
            {"do": "wait_session"},
            {"do": "mode", "mode": "auto"},
            {"do": "wait_ms", "ms": 400},
            {"do": "goal", "x": 1.625, "y": 2.375},  # inside the inflated table
            {"do": "assert", "kind": "all_terminal"},
        ],
    }
    # goal into an occupied cell: cell (6..9, 8..11) block, pick its center
    scenario["steps"][3] = {"do": "goal", "x": 1.875, "y": 2.375}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(scenario))
    trace = tmp_path / "bad.trace.jsonl"
    code, failures = run_scenario(str(path), trace_path=str(trace))
    assert code == 1
    assert any("rejected" in f for f in failures)
    assert trace.exists()


def test_trace_reproducible(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        code, _ = run_scenario(str(SCENARIOS / "meeting_room_lossy.json"),
                               trace_path=str(out), seed=42)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_bytes()) > 0


def test_seed_changes_trace(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_scenario(str(SCENARIOS / "meeting_room_lossy.json"), trace_path=str(a), seed=1)
    run_scenario(str(SCENARIOS / "meeting_room_lossy.json"), trace_path=str(b), seed=2)
    assert a.read_bytes() != b.read_bytes()


def test_scenario_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"config": {"tick_ms": -5}, "steps": []}))
    with pytest.raises(ScenarioError, match="tick_ms"):
        run_scenario(str(path))


def test_demo_cli_exit_codes(tmp_path, capsys):
    code = main(["demo", str(SCENARIOS / "meeting_room.json"),
                 "--trace", str(tmp_path / "t.jsonl")])
    assert code == 0
    missing = main(["demo", str(tmp_path / "nope.json")])
    assert missing == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_plan_cli_prints_cost(tmp_path, capsys):
    map_path = tmp_path / "m.json"
    map_path.write_text(json.dumps(
        {"resolution": 1.0, "origin": {"x": 0, "y": 0},
         "rows": ["...", "...", "..."]}))
    code = main(["plan", str(map_path), "0", "0", "0", "2", "2",
                 "--inflation", "0", "--verify"])
    assert code == 0
    out = capsys.readouterr().out
    assert "2.828" in out
    assert "verified" in out


def test_plan_cli_goal_in_wall_exit_1(tmp_path, capsys):
    map_path = tmp_path / "m.json"
    map_path.write_text(json.dumps(
        {"resolution": 1.0, "origin": {"x": 0, "y": 0}, "rows": ["..", ".#"]}))
    code = main(["plan", str(map_path), "0", "0", "0", "1", "1", "--inflation", "0"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_edge_cli_missing_map_exit_2(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"map": "does_not_exist.json"}))
    code = main(["edge", "--config", str(config)])
    assert code == 2
    assert "does_not_exist.json" in capsys.readouterr().err


def test_edge_cli_port_in_use_exit_2(tmp_path, capsys):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "map": str(MEETING_MAP),
        "listen": {"proto": f"127.0.0.1:{port}", "http": "127.0.0.1:0"},
    }))
    try:
        code = main(["edge", "--config", str(config)])
        assert code == 2
        assert "bind" in capsys.readouterr().err
    finally:
        blocker.close()


def free_port(kind=socket.SOCK_STREAM):
    s = socket.socket(socket.AF_INET, kind)
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


def test_edge_and_avatar_over_real_udp(tmp_path):
    """Full wall-clock path: two processes, UDP frames, HTTP control."""
    http_port, proto_port = free_port(), free_port(socket.SOCK_DGRAM)
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "map": str(MEETING_MAP),
        "start_pose": {"x": 0.875, "y": 0.875, "theta": 0},
        "kinematics": {"linear_speed": 5.0, "angular_speed_deg": 720.0},
        "listen": {"http": f"127.0.0.1:{http_port}", "proto": f"127.0.0.1:{proto_port}"},
    }))
    env = dict(os.environ, PYTHONPATH=str(Path(__file__).parent.parent / "src"))
    edge = subprocess.Popen(
        [sys.executable, "-m", "telavatar.cli", "edge", "--config", str(config)],
        env=env, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
    avatar = None
    try:
        base = f"http://127.0.0.1:{http_port}"
        with httpx.Client(base_url=base, timeout=2.0) as client:
            deadline = time.time() + 5.0
            state = None
            while time.time() < deadline:
                try:
                    state = client.get("/api/v1/state").json()
                    break
                except httpx.TransportError:
                    time.sleep(0.05)
            assert state is not None, "edge HTTP did not come up"
            assert state["session"]["state"] == "dead"

            avatar = subprocess.Popen(
                [sys.executable, "-m", "telavatar.cli", "avatar",
                 "--config", str(config), "--edge", f"127.0.0.1:{proto_port}"],
                env=env, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)

            deadline = time.time() + 10.0
            while time.time() < deadline:
                state = client.get("/api/v1/state").json()
                if state["session"]["state"] == "alive" and state["pose"]:
                    break
                time.sleep(0.1)
            assert state["session"]["state"] == "alive"

            response = client.post("/api/v1/commands", json={"op": "turn-left", "deg": 30})
            assert response.status_code == 202
            rec_id = response.json()["id"]
            deadline = time.time() + 10.0
            status = None
            while time.time() < deadline:
                queue = client.get("/api/v1/state").json()["queue"]
                rec = next((r for r in queue if r["id"] == rec_id), None)
                if rec and rec["status"] in ("completed", "failed", "timed_out"):
                    status = rec["status"]
                    break
                time.sleep(0.1)
            assert status == "completed"
    finally:
        for proc in (avatar, edge):
            if proc is not None:
                proc.send_signal(signal.SIGINT)
        for proc in (avatar, edge):
            if proc is not None:
                try:
                    proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    proc.kill()
