"""Low-level actuation commands and their validation rules."""

from __future__ import annotations

from dataclasses import dataclass

MAX_TURN_DEG = 180.0
MAX_DRIVE_M = 5.0

TURN_OPS = frozenset({"turn-left", "turn-right"})
DRIVE_OPS = frozenset({"drive-forward", "drive-left", "drive-right"})
BARE_OPS = frozenset({"park", "stop-drive"})
ALL_OPS = TURN_OPS | DRIVE_OPS | BARE_OPS


class MalformedCommand(Exception):
    pass


@dataclass(frozen=True)
class Command:
    """One actuation instruction. `deg` only for turns, `m` only for drives."""

    op: str
    deg: float | None = None
    m: float | None = None

    def __post_init__(self):
        if self.op not in ALL_OPS:
            raise MalformedCommand(f"unknown op {self.op!r}")
        if self.op in TURN_OPS:
            if self.deg is None or self.m is not None:
                raise MalformedCommand(f"{self.op} takes exactly one parameter: deg")
            if not (0 < self.deg <= MAX_TURN_DEG):
                raise MalformedCommand(f"deg must be in (0, {MAX_TURN_DEG}], got {self.deg}")
        elif self.op in DRIVE_OPS:
            if self.m is None or self.deg is not None:
                raise MalformedCommand(f"{self.op} takes exactly one parameter: m")
            if not (0 < self.m <= MAX_DRIVE_M):
                raise MalformedCommand(f"m must be in (0, {MAX_DRIVE_M}], got {self.m}")
        else:
            if self.deg is not None or self.m is not None:
                raise MalformedCommand(f"{self.op} takes no parameters")

    def to_payload(self) -> dict:
        body: dict = {"op": self.op}
        if self.deg is not None:
            body["deg"] = self.deg
        if self.m is not None:
            body["m"] = self.m
        return body

    @staticmethod
    def from_payload(obj: dict) -> "Command":
        if not isinstance(obj, dict):
            raise MalformedCommand("command must be a JSON object")
        extra = set(obj) - {"op", "deg", "m"}
        if extra:
            raise MalformedCommand(f"unexpected fields: {sorted(extra)}")
        op = obj.get("op")
        if not isinstance(op, str):
            raise MalformedCommand("missing op")
        deg = obj.get("deg")
        m = obj.get("m")
        for name, val in (("deg", deg), ("m", m)):
            if val is not None and (isinstance(val, bool) or not isinstance(val, (int, float))):
                raise MalformedCommand(f"{name} must be a number")
        return Command(op, None if deg is None else float(deg), None if m is None else float(m))
