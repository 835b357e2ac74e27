"""Edge control core: mode, command queue, dispatch gate, speaker arbiter.

One logical owner drives this object (see edge.http for the threaded server
wiring and cli.run_demo for the single-stepped virtual-clock wiring). All
outbound frames go through the injected `transmit` callable; all inbound
datagrams and timer ticks are fed in explicitly.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from ..nav.discretize import discretize
from ..nav.geometry import Pose, normalize_deg
from ..nav.grid import OccupancyGrid, inflate
from ..nav.planner import PlannedPath, plan_cells, smooth
from ..proto.arq import (
    ArqConfig,
    ArqEngine,
    ChannelBusy,
    CommandDelivered,
    CommandStatus,
    CommandTimedOut,
    DeclareDead,
    DeclareDegraded,
    Deliver,
    Liveness,
    OdometryReceived,
    PongReceived,
    SessionEstablished,
    SpeakerAngle,
    Transmit,
)
from ..proto.commands import Command
from ..proto.frames import FrameError, decode_frame, encode_frame
from .records import (
    CANCELLED,
    COMPLETED,
    DELIVERED,
    DISPATCHED,
    EXECUTING,
    FAILED,
    QUEUED,
    TERMINAL,
    TIMED_OUT,
    CommandRecord,
)

log = logging.getLogger("telavatar.edge")

MANUAL = "manual"
AUTO = "auto"


class WrongMode(Exception):
    pass


class SessionDead(Exception):
    pass


class NoPose(Exception):
    pass


@dataclass(frozen=True)
class EdgeParams:
    arq: ArqConfig = field(default_factory=ArqConfig)
    inflation_radius_m: float = 0.30
    max_drive_m: float = 0.5
    turn_quantum_deg: float = 15.0
    deadband_deg: float = 10.0
    dwell_ms: float = 1000.0
    stability_deg: float = 10.0
    odom_relay_interval_ms: float = 200.0
    queue_snapshot_limit: int = 100


class EdgeCore:
    def __init__(self, grid: OccupancyGrid, clock, transmit, params: EdgeParams | None = None):
        self.params = params or EdgeParams()
        self.grid = grid
        self.inflated = inflate(grid, self.params.inflation_radius_m)
        self.clock = clock
        self.transmit = transmit
        self.engine = ArqEngine.edge(self.params.arq)

        self.mode = MANUAL
        self.records: list[CommandRecord] = []
        self._by_seq: dict[int, CommandRecord] = {}
        self._next_id = 1
        self._queued: deque[CommandRecord] = deque()
        self._queued_emergency: deque[CommandRecord] = deque()
        self._in_flight: set[CommandRecord] = set()

        self.pose: Pose | None = None
        self.pose_time: float | None = None
        self.speaker_angle: float | None = None
        self.speaker_time: float | None = None

        self._candidate_angle: float | None = None
        self._candidate_since: float | None = None

        self._last_session_state = Liveness.DEAD
        self._last_odom_relay: float | None = None
        self._sinks: list = []  # callables taking (name, payload)

    # -- event stream -----------------------------------------------------

    def add_sink(self, sink) -> None:
        self._sinks.append(sink)

    def remove_sink(self, sink) -> None:
        if sink in self._sinks:
            self._sinks.remove(sink)

    def _emit(self, name: str, payload: dict) -> None:
        for sink in list(self._sinks):
            sink(name, payload)

    # -- network plumbing ---------------------------------------------------

    def handle_datagram(self, data: bytes, now: float) -> None:
        try:
            frame = decode_frame(data)
        except FrameError as e:
            log.debug("dropping bad frame: %s", e)
            return
        self._perform(self.engine.handle_frame(frame, now), now)
        self._after_engine(now)

    def tick(self, now: float) -> None:
        self._perform(self.engine.tick(now), now)
        self._after_engine(now)

    def _perform(self, actions, now: float) -> None:
        for action in actions:
            if isinstance(action, Transmit):
                self.transmit(encode_frame(action.frame))
            elif isinstance(action, Deliver):
                self._on_event(action.event, now)
            elif isinstance(action, (DeclareDegraded, DeclareDead)):
                pass  # state change picked up by _after_engine

    def _after_engine(self, now: float) -> None:
        state = self.engine.peer_liveness
        if state is not self._last_session_state:
            self._last_session_state = state
            if state is Liveness.DEAD:
                self._fail_in_flight("session-dead", now)
            self._emit("session", self.session_json())
        self.dispatch_step(now)

    def _fail_in_flight(self, detail: str, now: float) -> None:
        for rec in list(self._in_flight):
            self._transition(rec, FAILED, now, detail)

    # -- protocol events ---------------------------------------------------

    def _on_event(self, event, now: float) -> None:
        if isinstance(event, CommandDelivered):
            rec = self._by_seq.get(event.seq)
            if rec is None or rec.terminal:
                log.info("delivery for unknown/terminal seq %s ignored", event.seq)
            elif rec.status == DISPATCHED:
                self._transition(rec, DELIVERED, now)
        elif isinstance(event, CommandStatus):
            self._on_status(event, now)
        elif isinstance(event, CommandTimedOut):
            rec = self._by_seq.get(event.seq)
            if rec is not None and not rec.terminal:
                self._transition(rec, TIMED_OUT, now)
        elif isinstance(event, OdometryReceived):
            self.pose = event.pose
            self.pose_time = now
            if (self._last_odom_relay is None
                    or now - self._last_odom_relay >= self.params.odom_relay_interval_ms):
                self._last_odom_relay = now
                self._emit("odom", {"x": event.pose.x, "y": event.pose.y,
                                    "theta": event.pose.theta, "t": event.t_ms})
        elif isinstance(event, SpeakerAngle):
            self.speaker_angle = event.angle_deg
            self.speaker_time = now
            self._emit("speaker", {"angle_deg": event.angle_deg})
            self._arbiter_step(event.angle_deg, now)
        elif isinstance(event, SessionEstablished):
            log.info("session %d established", event.session_id)
        elif isinstance(event, PongReceived):
            pass

    def _on_status(self, event: CommandStatus, now: float) -> None:
        rec = self._by_seq.get(event.cmd_seq)
        if rec is None or rec.terminal or rec.status == QUEUED:
            log.info("late/unknown status for seq %s ignored", event.cmd_seq)
            return
        if event.phase == "executing":
            if rec.status == DISPATCHED:
                self._transition(rec, DELIVERED, now)
            if rec.status == DELIVERED:
                self._transition(rec, EXECUTING, now)
        elif event.phase == "completed":
            # a lost "executing" status must not wedge the automaton
            if rec.status == DISPATCHED:
                self._transition(rec, DELIVERED, now)
            if rec.status == DELIVERED:
                self._transition(rec, EXECUTING, now)
            self._transition(rec, COMPLETED, now, event.detail or None)
        elif event.phase == "failed":
            self._transition(rec, FAILED, now, event.detail or "failed")
        else:
            log.warning("unknown status phase %r", event.phase)

    def _transition(self, rec: CommandRecord, target: str, now: float,
                    detail: str | None = None) -> None:
        rec.transition(target, now, detail)
        if target == DISPATCHED:
            self._in_flight.add(rec)
        elif target in TERMINAL:
            self._in_flight.discard(rec)
        self._emit("command", rec.to_json())

    # -- master operations ---------------------------------------------------

    def set_mode(self, mode: str) -> tuple[str, int]:
        if mode not in (MANUAL, AUTO):
            raise ValueError(f"unknown mode {mode!r}")
        now = self.clock.now()
        previous = self.mode
        self.mode = mode
        other_source = "planner" if mode == MANUAL else "master"
        cancelled = 0
        for rec in list(self._queued):
            if rec.status == QUEUED and rec.source == other_source:
                self._transition(rec, CANCELLED, now)
                cancelled += 1
        self._emit("mode", {"mode": mode})
        self.dispatch_step(self.clock.now())
        return previous, cancelled

    def submit_manual(self, cmd: Command) -> int:
        if self.mode != MANUAL:
            raise WrongMode("manual commands require manual mode")
        self._require_live_session()
        rec = self._enqueue("master", cmd)
        self.dispatch_step(self.clock.now())
        return rec.id

    def submit_goal(self, x: float, y: float) -> tuple[PlannedPath, int, int]:
        """Plan to (x, y) and enqueue the command sequence.

        Returns (smoothed path, first record id, command count).
        """
        if self.mode != AUTO:
            raise WrongMode("goals require auto mode")
        self._require_live_session()
        if self.pose is None:
            raise NoPose("no odometry received yet")
        now = self.clock.now()
        start = self.inflated.world_to_cell(self.pose.x, self.pose.y)
        goal = self.inflated.world_to_cell(x, y)
        cells, _cost = plan_cells(self.inflated, start, goal)
        path = smooth(self.inflated, cells)
        cmds = discretize(path, self.pose,
                          max_drive=self.params.max_drive_m,
                          turn_quantum=self.params.turn_quantum_deg)
        # a new goal supersedes the remainder of the previous one
        for rec in list(self._queued):
            if rec.status == QUEUED and rec.source == "planner":
                self._transition(rec, CANCELLED, now)
        first_id = self._next_id
        for cmd in cmds:
            self._enqueue("planner", cmd)
        self.dispatch_step(self.clock.now())  # fresh reading: planning takes time
        return path, first_id, len(cmds)

    def emergency_stop(self) -> int:
        """Halt the robot: preempt the active command and drop the queue."""
        self._require_live_session()
        now = self.clock.now()
        for rec in list(self._queued):
            if rec.status == QUEUED:
                self._transition(rec, CANCELLED, now)
        rec = self._enqueue("emergency", Command("stop-drive"))
        self.dispatch_step(self.clock.now())
        return rec.id

    def _require_live_session(self) -> None:
        if self.engine.peer_liveness is Liveness.DEAD:
            raise SessionDead("avatar session is dead")

    def _enqueue(self, source: str, cmd: Command) -> CommandRecord:
        rec = CommandRecord(self._next_id, source, cmd)
        rec.timestamps[QUEUED] = self.clock.now()
        self._next_id += 1
        self.records.append(rec)
        if source == "emergency":
            self._queued_emergency.append(rec)
        else:
            self._queued.append(rec)
        self._emit("command", rec.to_json())
        return rec

    # -- dispatch gate ---------------------------------------------------

    @staticmethod
    def _peek_queued(dq: deque) -> CommandRecord | None:
        while dq and dq[0].status != QUEUED:
            dq.popleft()  # cancelled while waiting
        return dq[0] if dq else None

    def has_pending(self) -> bool:
        return bool(self._in_flight
                    or self._peek_queued(self._queued)
                    or self._peek_queued(self._queued_emergency))

    def dispatch_step(self, now: float) -> None:
        while True:
            if self.engine.outstanding is not None:
                return
            if self.engine.peer_liveness is not Liveness.DEAD:
                emergency = self._peek_queued(self._queued_emergency)
                if emergency is not None:
                    if not self._dispatch(emergency, now):
                        return
                    self._queued_emergency.popleft()
                    continue
            if self.engine.peer_liveness is not Liveness.ALIVE:
                return
            if self._in_flight:
                return
            queued = self._peek_queued(self._queued)
            if queued is None:
                return
            if not self._dispatch(queued, now):
                return
            self._queued.popleft()

    def _dispatch(self, rec: CommandRecord, now: float) -> bool:
        try:
            seq, actions = self.engine.send_command(rec.command, now)
        except (ChannelBusy, SessionDead):
            return False
        rec.seq = seq
        self._by_seq[seq] = rec
        self._transition(rec, DISPATCHED, now)
        self._perform(actions, now)
        return True

    # -- speaker arbiter ---------------------------------------------------

    def _arbiter_step(self, angle_deg: float, now: float) -> None:
        p = self.params
        blocked = bool(self._in_flight) or any(
            rec.status == QUEUED and rec.source in ("master", "planner")
            for rec in self._queued
        )
        if blocked or abs(angle_deg) < p.deadband_deg:
            self._candidate_angle = None
            self._candidate_since = None
            return
        if (self._candidate_angle is None
                or abs(normalize_deg(angle_deg - self._candidate_angle)) > p.stability_deg):
            self._candidate_angle = angle_deg
            self._candidate_since = now
            return
        if now - self._candidate_since >= p.dwell_ms:
            mag = min(abs(angle_deg), 180.0)
            cmd = Command("turn-left" if angle_deg > 0 else "turn-right", deg=mag)
            self._candidate_angle = None
            self._candidate_since = None
            self._enqueue("speaker", cmd)
            self.dispatch_step(now)

    # -- snapshot ----------------------------------------------------------

    def session_json(self) -> dict:
        return {
            "state": self.engine.peer_liveness.value,
            "rtt_ms": self.engine.last_rtt_ms,
        }

    def snapshot(self) -> dict:
        now = self.clock.now()
        pose = None
        if self.pose is not None:
            pose = {"x": self.pose.x, "y": self.pose.y, "theta": self.pose.theta,
                    "age_ms": now - self.pose_time}
        speaker = None
        if self.speaker_angle is not None:
            speaker = {"angle_deg": self.speaker_angle, "age_ms": now - self.speaker_time}
        active = min(self._in_flight, key=lambda r: r.id) if self._in_flight else None
        return {
            "mode": self.mode,
            "session": self.session_json(),
            "pose": pose,
            "active": active.to_json() if active else None,
            "queue": [r.to_json() for r in self.records[-self.params.queue_snapshot_limit:]],
            "speaker": speaker,
            "media": "external",
        }
