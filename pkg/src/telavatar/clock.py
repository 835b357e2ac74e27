"""Injectable clocks. All timestamps in the codebase are float milliseconds."""

from __future__ import annotations

import time


class VirtualClock:
    """Manually advanced clock for deterministic tests and demos."""

    def __init__(self, start_ms: float = 0.0):
        self._now = float(start_ms)

    def now(self) -> float:
        return self._now

    def advance(self, dt_ms: float) -> float:
        if dt_ms < 0:
            raise ValueError("clock cannot go backwards")
        self._now += dt_ms
        return self._now

    def advance_to(self, t_ms: float) -> float:
        if t_ms < self._now:
            raise ValueError("clock cannot go backwards")
        self._now = t_ms
        return self._now


class WallClock:
    """Monotonic wall clock in milliseconds."""

    def now(self) -> float:
        return time.monotonic() * 1000.0
