"""Scenario runner: a scripted single-process demo on virtual time.

Scenario file: {"config": {...}, "steps": [...]} where each step is one of
    {"at_ms": T, "do": "mode"|"goal"|"command"|"stop", ...}
    {"do": "wait_session" | "wait_idle" | "wait_ms", ...}
    {"do": "assert", "kind": ..., ...}
Assertions are data so demo acceptance lives in the scenario file, not code.
"""

from __future__ import annotations

import json
import math
import os

from .config import AppConfig, ConfigError
from .edge.core import NoPose, SessionDead, WrongMode
from .harness import SimRig
from .nav.geometry import normalize_deg
from .nav.grid import MapError, load_map
from .nav.planner import PlanError
from .proto.commands import Command, MalformedCommand
from .transport.impaired import Impairment


class ScenarioError(Exception):
    pass


class StepFailure(Exception):
    pass


def load_scenario(path: str) -> tuple[AppConfig, list[dict]]:
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario {path} is not valid JSON: {e}") from e
    if not isinstance(obj, dict) or "steps" not in obj:
        raise ScenarioError("scenario must be an object with 'config' and 'steps'")
    base_dir = os.path.dirname(os.path.abspath(path))
    try:
        config = AppConfig.from_json(obj.get("config", {}), base_dir=base_dir)
    except ConfigError as e:
        raise ScenarioError(str(e)) from e
    steps = obj["steps"]
    if not isinstance(steps, list):
        raise ScenarioError("scenario 'steps' must be a list")
    return config, steps


def build_rig(config: AppConfig, seed: int | None = None,
              impairment: Impairment | None = None) -> SimRig:
    if config.map_path is None:
        raise ScenarioError("scenario config needs a 'map' key")
    try:
        grid = load_map(config.map_path)
    except MapError as e:
        raise ScenarioError(str(e)) from e
    imp = impairment if impairment is not None else config.impairment
    if seed is not None:
        imp = Impairment(imp.loss_prob, imp.dup_prob, imp.delay_mean_ms,
                         imp.delay_jitter_ms, imp.reorder_window, seed)
    return SimRig(
        grid,
        config.start_pose,
        params=config.edge,
        kinematics=config.kinematics,
        impairment=imp,
        script=config.script or None,
        tick_ms=config.tick_ms,
    )


def _run_step(rig: SimRig, step: dict) -> None:
    do = step.get("do", "assert" if "assert" in step else None)
    at_ms = step.get("at_ms")
    if at_ms is not None:
        while rig.clock.now() < float(at_ms):
            rig.step()
    if do is None:
        raise ScenarioError(f"step has no action: {step}")

    try:
        if do == "mode":
            rig.core.set_mode(step["mode"])
            return
        if do == "goal":
            rig.core.submit_goal(float(step["x"]), float(step["y"]))
            return
        if do == "command":
            rig.core.submit_manual(Command.from_payload(step["command"]))
            return
        if do == "stop":
            rig.core.emergency_stop()
            return
    except (WrongMode, SessionDead, NoPose, PlanError, MalformedCommand) as e:
        raise StepFailure(f"{do} rejected: {e}") from e
    if do == "wait_session":
        if not rig.wait_session_alive(float(step.get("timeout_ms", 10_000))):
            raise StepFailure("session did not come alive")
    elif do == "wait_idle":
        if not rig.wait_idle(float(step.get("timeout_ms", 300_000))):
            raise StepFailure("queue did not drain")
    elif do == "wait_ms":
        rig.run_for(float(step["ms"]))
    elif do == "assert":
        _check(rig, step)
    else:
        raise ScenarioError(f"unknown step action {do!r}")


def _check(rig: SimRig, step: dict) -> None:
    kind = step["kind"]
    if kind == "pose_near":
        pose = rig.sim.pose
        dx = math.hypot(pose.x - float(step["x"]), pose.y - float(step["y"]))
        if dx > float(step.get("tol_m", 0.05)):
            raise StepFailure(f"pose off by {dx:.4f} m (limit {step.get('tol_m', 0.05)})")
        if "theta_deg" in step:
            err = abs(normalize_deg(math.degrees(pose.theta) - float(step["theta_deg"])))
            if err > float(step.get("tol_deg", 2.0)):
                raise StepFailure(f"heading off by {err:.3f} deg")
    elif kind == "session":
        state = rig.core.snapshot()["session"]["state"]
        if state != step["state"]:
            raise StepFailure(f"session is {state}, expected {step['state']}")
    elif kind == "mode":
        if rig.core.mode != step["mode"]:
            raise StepFailure(f"mode is {rig.core.mode}")
    elif kind == "no_timeouts":
        timed_out = [r.id for r in rig.core.records if r.status == "timed_out"]
        if timed_out:
            raise StepFailure(f"records timed out: {timed_out}")
    elif kind == "all_terminal":
        pending = [r.id for r in rig.core.records if not r.terminal]
        if pending:
            raise StepFailure(f"records not terminal: {pending}")
    elif kind == "record_status":
        rec = next((r for r in rig.core.records if r.id == int(step["id"])), None)
        if rec is None or rec.status != step["status"]:
            raise StepFailure(
                f"record {step['id']} is {rec.status if rec else 'missing'}, "
                f"expected {step['status']}"
            )
    elif kind == "speaker_turns":
        count = sum(1 for r in rig.core.records if r.source == "speaker")
        if count != int(step["count"]):
            raise StepFailure(f"{count} speaker turns, expected {step['count']}")
    else:
        raise ScenarioError(f"unknown assert kind {kind!r}")


def run_scenario(path: str, trace_path: str | None = None, seed: int | None = None,
                 impairment: Impairment | None = None) -> tuple[int, list[str]]:
    """Execute a scenario. Returns (exit_code, failure messages)."""
    config, steps = load_scenario(path)
    rig = build_rig(config, seed=seed, impairment=impairment)
    failures: list[str] = []
    try:
        for idx, step in enumerate(steps):
            try:
                _run_step(rig, step)
            except StepFailure as e:
                failures.append(f"step {idx}: {e}")
            except (MalformedCommand, KeyError, TypeError, ValueError) as e:
                raise ScenarioError(f"step {idx} is malformed: {e}") from e
    finally:
        if trace_path:
            write_trace(rig, trace_path)
    return (1 if failures else 0), failures


def write_trace(rig: SimRig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for t, name, payload in rig.events:
            f.write(json.dumps({"t_ms": t, "event": name, "data": payload},
                               separators=(",", ":")) + "\n")
