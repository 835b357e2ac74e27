"""Simulated robot: executes low-level commands with unicycle kinematics.

Straight drives and in-place turns integrate trivially; arc drives
("drive-left"/"drive-right") roll the robot along a circle of fixed radius
using the exact circle-rollout closed form, so stepping granularity never
introduces integration error. One terminal status (completed/failed) is
reported for every accepted command seq.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..nav.geometry import Pose, normalize_angle
from ..proto.commands import Command

_EPS = 1e-12


@dataclass(frozen=True)
class KinematicParams:
    linear_speed: float = 0.5        # m/s
    angular_speed_deg: float = 90.0  # deg/s
    arc_radius: float = 0.5          # m
    odom_interval_ms: float = 200.0
    odom_noise_std: float = 0.0      # m, optional gaussian noise on reports

    def __post_init__(self):
        if min(self.linear_speed, self.angular_speed_deg, self.arc_radius,
               self.odom_interval_ms) <= 0:
            raise ValueError("kinematic parameters must be positive")


@dataclass(frozen=True)
class StatusReport:
    seq: int
    phase: str  # executing | completed | failed
    detail: str = ""


@dataclass(frozen=True)
class OdometrySample:
    pose: Pose


AvatarEvent = StatusReport | OdometrySample

IDLE = "idle"
PARKED = "parked"
TURNING = "turning"
DRIVING = "driving"
ARCING = "arcing"


class AvatarSim:
    def __init__(self, start: Pose, params: KinematicParams | None = None,
                 start_ms: float = 0.0, noise_rng: random.Random | None = None):
        self.pose = start
        self.params = params or KinematicParams()
        self.motion = IDLE
        self.remaining = 0.0   # meters (driving/arcing) or radians (turning)
        self.sign = 1
        self.active_cmd_seq: int | None = None
        self.last_odom_ms = start_ms
        self._last_ms = start_ms
        self._noise = noise_rng or random.Random(0)

    @property
    def moving(self) -> bool:
        return self.motion in (TURNING, DRIVING, ARCING)

    def apply_command(self, cmd: Command, seq: int) -> list[AvatarEvent]:
        if cmd.op == "stop-drive":
            events: list[AvatarEvent] = []
            if self.moving and self.active_cmd_seq is not None:
                events.append(StatusReport(self.active_cmd_seq, "failed", "preempted"))
            self.motion = IDLE
            self.remaining = 0.0
            self.active_cmd_seq = None
            events.append(StatusReport(seq, "completed"))
            return events

        if self.moving:
            return [StatusReport(seq, "failed", "busy")]

        if cmd.op == "park":
            self.motion = PARKED
            self.active_cmd_seq = None
            return [StatusReport(seq, "completed")]

        if cmd.op in ("turn-left", "turn-right"):
            self.motion = TURNING
            self.remaining = math.radians(cmd.deg)
            self.sign = 1 if cmd.op == "turn-left" else -1
        elif cmd.op == "drive-forward":
            self.motion = DRIVING
            self.remaining = cmd.m
        else:  # drive-left / drive-right: forward arc
            self.motion = ARCING
            self.remaining = cmd.m
            self.sign = 1 if cmd.op == "drive-left" else -1
        self.active_cmd_seq = seq
        return [StatusReport(seq, "executing")]

    def advance_to(self, now_ms: float) -> list[AvatarEvent]:
        events: list[AvatarEvent] = []
        dt = (now_ms - self._last_ms) / 1000.0
        self._last_ms = now_ms
        if dt > 0 and self.moving:
            events.extend(self._advance_motion(dt))
        if now_ms - self.last_odom_ms >= self.params.odom_interval_ms:
            self.last_odom_ms = now_ms
            events.append(OdometrySample(self._reported_pose()))
        return events

    def _advance_motion(self, dt: float) -> list[AvatarEvent]:
        p = self.params
        x, y, theta = self.pose.x, self.pose.y, self.pose.theta
        if self.motion == TURNING:
            step = min(math.radians(p.angular_speed_deg) * dt, self.remaining)
            theta += self.sign * step
        elif self.motion == DRIVING:
            step = min(p.linear_speed * dt, self.remaining)
            x += step * math.cos(theta)
            y += step * math.sin(theta)
        else:  # ARCING: exact circle rollout, center offset sign*R to the left
            step = min(p.linear_speed * dt, self.remaining)
            r, sg = p.arc_radius, self.sign
            theta2 = theta + sg * step / r
            x += sg * r * (math.sin(theta2) - math.sin(theta))
            y -= sg * r * (math.cos(theta2) - math.cos(theta))
            theta = theta2
        self.remaining -= step
        self.pose = Pose(x, y, normalize_angle(theta))
        if self.remaining <= _EPS:
            seq = self.active_cmd_seq
            self.motion = IDLE
            self.remaining = 0.0
            self.active_cmd_seq = None
            return [StatusReport(seq, "completed")]
        return []

    def _reported_pose(self) -> Pose:
        if self.params.odom_noise_std <= 0:
            return self.pose
        std = self.params.odom_noise_std
        return Pose(
            self.pose.x + self._noise.gauss(0.0, std),
            self.pose.y + self._noise.gauss(0.0, std),
            self.pose.theta,
        )
