"""Scripted speaker activity replacing a physical microphone array.

Script file schema:
    {"entries": [{"start_ms": 5000, "duration_ms": 3000, "bearing_deg": 70}, ...]}
Bearings are world-frame; the runner converts them to robot-relative angles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class ScriptError(Exception):
    pass


@dataclass(frozen=True)
class SpeakerEntry:
    start_ms: float
    duration_ms: float
    bearing_deg: float


@dataclass(frozen=True)
class SpeakerScript:
    entries: tuple[SpeakerEntry, ...] = ()

    def __post_init__(self):
        prev_end = -1.0
        for e in self.entries:
            if e.duration_ms <= 0:
                raise ScriptError("entry duration must be > 0")
            if e.start_ms < prev_end:
                raise ScriptError("entries must be sorted and non-overlapping")
            prev_end = e.start_ms + e.duration_ms

    def active_bearing(self, now_ms: float) -> float | None:
        for e in self.entries:
            if e.start_ms <= now_ms < e.start_ms + e.duration_ms:
                return e.bearing_deg
        return None

    @staticmethod
    def from_json(obj: dict) -> "SpeakerScript":
        try:
            entries = tuple(
                SpeakerEntry(float(e["start_ms"]), float(e["duration_ms"]), float(e["bearing_deg"]))
                for e in obj.get("entries", [])
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ScriptError(f"bad speaker script: {e}") from e
        return SpeakerScript(entries)


def load_script(path: str) -> SpeakerScript:
    try:
        with open(path, encoding="utf-8") as f:
            return SpeakerScript.from_json(json.load(f))
    except OSError as e:
        raise ScriptError(f"cannot read speaker script {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ScriptError(f"speaker script {path} is not valid JSON: {e}") from e
