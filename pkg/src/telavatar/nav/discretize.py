"""Waypoint-to-command discretization and its exact kinematic replay.

Each leg is decomposed as rotate-then-translate: in-place turns quantized to
`turn_quantum` degrees with one exact residual turn, then equal straight
drives of at most `max_drive` meters summing to the leg length. The
sequence always ends with park.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..proto.commands import Command
from .geometry import Pose, normalize_deg
from .planner import PlannedPath


class EmptyPath(Exception):
    pass


_EPS_M = 1e-9
_EPS_DEG = 1e-9


def _heading_error_deg(from_theta_rad: float, to_heading_deg: float) -> float:
    """Heading error in (-180, 180]; an exact U-turn goes left."""
    delta = normalize_deg(to_heading_deg - math.degrees(from_theta_rad))
    if delta <= -180.0:
        delta = 180.0
    return delta


def discretize(path: PlannedPath, start: Pose,
               max_drive: float = 0.5, turn_quantum: float = 15.0) -> list[Command]:
    if not path.waypoints:
        raise EmptyPath("path has no waypoints")
    if max_drive <= 0 or turn_quantum <= 0:
        raise ValueError("max_drive and turn_quantum must be > 0")

    cmds: list[Command] = []
    x, y, theta = start.x, start.y, start.theta
    for wx, wy in path.waypoints:
        dist = math.hypot(wx - x, wy - y)
        if dist <= _EPS_M:
            continue
        target_deg = math.degrees(math.atan2(wy - y, wx - x))
        delta = _heading_error_deg(theta, target_deg)
        if abs(delta) > _EPS_DEG:
            op = "turn-left" if delta > 0 else "turn-right"
            whole = int(math.floor(abs(delta) / turn_quantum))
            residual = abs(delta) - whole * turn_quantum
            cmds.extend(Command(op, deg=turn_quantum) for _ in range(whole))
            if residual > _EPS_DEG:
                cmds.append(Command(op, deg=residual))
            theta = math.radians(target_deg)
        n = max(1, int(math.ceil(dist / max_drive - 1e-12)))
        step = dist / n
        cmds.extend(Command("drive-forward", m=step) for _ in range(n))
        x, y = wx, wy
    cmds.append(Command("park"))
    return cmds


@dataclass(frozen=True)
class ReplayResult:
    final: Pose
    visited: tuple[tuple[float, float], ...]  # position after every command


def replay(cmds: list[Command], start: Pose) -> ReplayResult:
    """Exact closed-form execution of a command list from a start pose."""
    x, y, theta = start.x, start.y, start.theta
    visited = []
    for cmd in cmds:
        if cmd.op == "turn-left":
            theta += math.radians(cmd.deg)
        elif cmd.op == "turn-right":
            theta -= math.radians(cmd.deg)
        elif cmd.op == "drive-forward":
            x += cmd.m * math.cos(theta)
            y += cmd.m * math.sin(theta)
        elif cmd.op in ("park", "stop-drive"):
            pass
        else:
            raise ValueError(f"replay does not support {cmd.op}")
        visited.append((x, y))
    return ReplayResult(Pose(x, y, theta), tuple(visited))


def verify_discretization(path: PlannedPath, start: Pose, cmds: list[Command],
                          resolution: float,
                          pos_tol: float = 1e-6, ang_tol: float = 1e-6) -> None:
    """Raise AssertionError unless the replay hits every waypoint and the goal."""
    result = replay(cmds, start)
    gx, gy = path.waypoints[-1]
    fx, fy = result.final.x, result.final.y
    assert math.hypot(fx - gx, fy - gy) <= pos_tol, "replay missed the final waypoint"
    positions = [(start.x, start.y)] + list(result.visited)
    for wx, wy in path.waypoints:
        nearest = min(math.hypot(px - wx, py - wy) for px, py in positions)
        assert nearest <= resolution / 2.0 + pos_tol, f"waypoint ({wx},{wy}) missed by {nearest}"
