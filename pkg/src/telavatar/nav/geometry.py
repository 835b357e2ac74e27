"""World-frame pose and angle helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass


def normalize_angle(theta: float) -> float:
    """Wrap an angle in radians into [-pi, pi)."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped < 0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def normalize_deg(deg: float) -> float:
    """Wrap an angle in degrees into [-180, 180)."""
    wrapped = math.fmod(deg + 180.0, 360.0)
    if wrapped < 0:
        wrapped += 360.0
    return wrapped - 180.0


@dataclass(frozen=True)
class Pose:
    """Position in meters, heading in radians CCW from +x, kept in [-pi, pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def to_payload(self, t_ms: float) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta, "t": t_ms}

    @staticmethod
    def from_payload(obj: dict) -> "Pose":
        return Pose(float(obj["x"]), float(obj["y"]), float(obj["theta"]))
