"""Command status queue records and their lifecycle automaton."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..proto.commands import Command

QUEUED = "queued"
DISPATCHED = "dispatched"
DELIVERED = "delivered"
EXECUTING = "executing"
COMPLETED = "completed"
FAILED = "failed"
TIMED_OUT = "timed_out"
CANCELLED = "cancelled"

TERMINAL = frozenset({COMPLETED, FAILED, TIMED_OUT, CANCELLED})
IN_FLIGHT = frozenset({DISPATCHED, DELIVERED, EXECUTING})

# terminal states are absorbing: no outgoing edges
LEGAL_TRANSITIONS: dict[str, frozenset[str]] = {
    QUEUED: frozenset({DISPATCHED, CANCELLED}),
    DISPATCHED: frozenset({DELIVERED, TIMED_OUT, FAILED}),
    DELIVERED: frozenset({EXECUTING, TIMED_OUT, FAILED}),
    EXECUTING: frozenset({COMPLETED, FAILED}),
    COMPLETED: frozenset(),
    FAILED: frozenset(),
    TIMED_OUT: frozenset(),
    CANCELLED: frozenset(),
}

SOURCES = ("master", "planner", "speaker", "emergency")


class IllegalTransition(Exception):
    pass


def check_transition(current: str, target: str) -> None:
    if target not in LEGAL_TRANSITIONS[current]:
        raise IllegalTransition(f"{current} -> {target}")


def accepts(sequence: list[str]) -> bool:
    """True iff a status sequence starts Queued and follows only legal edges."""
    if not sequence or sequence[0] != QUEUED:
        return False
    for a, b in zip(sequence, sequence[1:]):
        if b not in LEGAL_TRANSITIONS.get(a, frozenset()):
            return False
    return True


@dataclass(eq=False)  # identity semantics: records are unique stateful entries
class CommandRecord:
    id: int
    source: str
    command: Command
    seq: int | None = None
    status: str = QUEUED
    detail: str | None = None
    timestamps: dict[str, float] = field(default_factory=dict)

    def transition(self, target: str, now: float, detail: str | None = None) -> None:
        check_transition(self.status, target)
        self.status = target
        if detail is not None:
            self.detail = detail
        self.timestamps[target] = now

    @property
    def terminal(self) -> bool:
        return self.status in TERMINAL

    @property
    def in_flight(self) -> bool:
        return self.status in IN_FLIGHT

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "command": self.command.to_payload(),
            "seq": self.seq,
            "status": self.status,
            "detail": self.detail,
            "timestamps": dict(self.timestamps),
        }
