"""Sans-IO reliability engine for the edge<->avatar link.

The engine owns no sockets and no timers. Callers feed it decoded frames
and clock readings; it returns an ordered list of actions (frames to
transmit, events to deliver, liveness declarations) and the caller performs
all I/O. Identical inputs always produce identical actions.

Reliability rules:
  * stop-and-wait for commands: at most one unacked CMD in flight, re-sent
    byte-identically every retry interval, given up after max_retries;
  * terminal command statuses (completed/failed) are re-sent by the avatar
    until the edge returns STATUS_ACK; "executing" statuses are best-effort;
  * duplicates are detected by seq and re-acked without re-delivery, so a
    command executes at most once no matter how the channel behaves;
  * when the link is idle the side that has heard nothing for a ping
    interval sends PING; unanswered pings degrade and then kill the session.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .commands import Command, MalformedCommand
from .frames import Frame, MalformedPayload, MsgType
from ..nav.geometry import Pose


class Role(Enum):
    EDGE = "edge"
    AVATAR = "avatar"


class Liveness(Enum):
    ALIVE = "alive"
    DEGRADED = "degraded"
    DEAD = "dead"


@dataclass(frozen=True)
class ArqConfig:
    retry_interval_ms: float = 300.0
    max_retries: int = 10
    ping_interval_ms: float = 1000.0
    missed_pong_limit: int = 3


# ---------------------------------------------------------------------------
# Events delivered to the application


@dataclass(frozen=True)
class CommandDelivered:
    """Edge side: the outstanding command was received by the avatar."""

    seq: int


@dataclass(frozen=True)
class CommandReceived:
    """Avatar side: a fresh command arrived and must be executed."""

    seq: int
    command: Command


@dataclass(frozen=True)
class CommandStatus:
    cmd_seq: int
    phase: str  # executing | completed | failed
    detail: str


@dataclass(frozen=True)
class CommandTimedOut:
    seq: int


@dataclass(frozen=True)
class OdometryReceived:
    pose: Pose
    seq: int
    t_ms: float


@dataclass(frozen=True)
class SpeakerAngle:
    angle_deg: float
    seq: int


@dataclass(frozen=True)
class SessionEstablished:
    session_id: int


@dataclass(frozen=True)
class PongReceived:
    rtt_ms: float


ProtocolEvent = (
    CommandDelivered
    | CommandReceived
    | CommandStatus
    | CommandTimedOut
    | OdometryReceived
    | SpeakerAngle
    | SessionEstablished
    | PongReceived
)


# ---------------------------------------------------------------------------
# Actions returned to the caller


@dataclass(frozen=True)
class Transmit:
    frame: Frame


@dataclass(frozen=True)
class Deliver:
    event: ProtocolEvent


@dataclass(frozen=True)
class DeclareDegraded:
    pass


@dataclass(frozen=True)
class DeclareDead:
    pass


ArqAction = Transmit | Deliver | DeclareDegraded | DeclareDead


class ChannelBusy(Exception):
    pass


class SessionDead(Exception):
    pass


@dataclass
class Outstanding:
    seq: int
    command: Command
    frame: Frame
    send_count: int
    last_send_ms: float


@dataclass
class PendingStatus:
    frame: Frame  # re-sent verbatim until acked
    cmd_seq: int
    phase: str
    last_send_ms: float


_TERMINAL_PHASES = frozenset({"completed", "failed"})


@dataclass
class ArqEngine:
    """Protocol state for one endpoint of one session.

    Mutable; drive it from a single logical event loop. Every method that
    takes `now` returns the ordered action list the caller must perform.
    """

    role: Role
    config: ArqConfig = field(default_factory=ArqConfig)
    session_id: int | None = None

    next_seq: int = 1
    outstanding: Outstanding | None = None
    pending_statuses: list[PendingStatus] = field(default_factory=list)
    last_executed_seq: int = 0
    peer_liveness: Liveness = Liveness.DEAD
    established: bool = False

    last_inbound_ms: float | None = None
    last_ping_ms: float | None = None
    pings_inflight: dict[int, float] = field(default_factory=dict)
    pings_since_inbound: int = 0
    last_pong_time: float | None = None
    last_rtt_ms: float | None = None

    last_seen_odom_seq: int = 0
    last_seen_speaker_seq: int = 0
    seen_status_seqs: set[int] = field(default_factory=set)
    wrong_session_count: int = 0
    malformed_count: int = 0

    _hello_frame: Frame | None = None
    _last_hello_ms: float | None = None

    @staticmethod
    def edge(config: ArqConfig | None = None) -> "ArqEngine":
        return ArqEngine(role=Role.EDGE, config=config or ArqConfig())

    @staticmethod
    def avatar(config: ArqConfig | None = None, session_id: int | None = None,
               rng: random.Random | None = None) -> "ArqEngine":
        if session_id is None:
            session_id = (rng or random).randrange(1, 2**32)
        return ArqEngine(role=Role.AVATAR, config=config or ArqConfig(), session_id=session_id)

    # -- seq allocation ------------------------------------------------

    def _take_seq(self) -> int:
        seq = self.next_seq
        if seq >= 2**32:
            raise SessionDead("sequence space exhausted")
        self.next_seq += 1
        return seq

    def _frame(self, msg_type: MsgType, body: dict | None = None) -> Frame:
        return Frame.make(msg_type, self._take_seq(), self.session_id or 0, body)

    # -- avatar: session bring-up --------------------------------------

    def start(self, now: float) -> list[ArqAction]:
        """Avatar: begin the HELLO handshake."""
        assert self.role is Role.AVATAR
        self._hello_frame = self._frame(MsgType.HELLO)
        self._last_hello_ms = now
        return [Transmit(self._hello_frame)]

    # -- edge: command dispatch ----------------------------------------

    def send_command(self, cmd: Command, now: float) -> tuple[int, list[ArqAction]]:
        """Edge: put one command in flight. Returns (assigned seq, actions)."""
        assert self.role is Role.EDGE
        if self.peer_liveness is Liveness.DEAD:
            raise SessionDead("no live session")
        if self.outstanding is not None:
            raise ChannelBusy(f"seq {self.outstanding.seq} still unacked")
        frame = self._frame(MsgType.CMD, cmd.to_payload())
        self.outstanding = Outstanding(frame.seq, cmd, frame, send_count=1, last_send_ms=now)
        return frame.seq, [Transmit(frame)]

    # -- avatar: outbound telemetry and statuses ------------------------

    def send_status(self, cmd_seq: int, phase: str, detail: str, now: float) -> list[ArqAction]:
        assert self.role is Role.AVATAR
        frame = self._frame(
            MsgType.CMD_STATUS, {"cmd_seq": cmd_seq, "phase": phase, "detail": detail}
        )
        if phase in _TERMINAL_PHASES:
            self.pending_statuses.append(PendingStatus(frame, cmd_seq, phase, now))
        return [Transmit(frame)]

    def send_odometry(self, pose: Pose, now: float) -> list[ArqAction]:
        assert self.role is Role.AVATAR
        return [Transmit(self._frame(MsgType.ODOM, pose.to_payload(now)))]

    def send_speaker_angle(self, angle_deg: float, now: float) -> list[ArqAction]:
        assert self.role is Role.AVATAR
        return [Transmit(self._frame(MsgType.SPEAKER_ANGLE, {"angle_deg": angle_deg}))]

    # -- inbound frames --------------------------------------------------

    def handle_frame(self, frame: Frame, now: float) -> list[ArqAction]:
        if frame.msg_type == MsgType.HELLO:
            return self._handle_hello(frame, now)
        if self.session_id is None or frame.session_id != self.session_id:
            self.wrong_session_count += 1
            return []

        self.last_inbound_ms = now
        self.pings_since_inbound = 0
        revived = self._revive()

        handler = {
            MsgType.HELLO_ACK: self._handle_hello_ack,
            MsgType.PING: self._handle_ping,
            MsgType.PONG: self._handle_pong,
            MsgType.CMD: self._handle_cmd,
            MsgType.CMD_ACK: self._handle_cmd_ack,
            MsgType.CMD_STATUS: self._handle_cmd_status,
            MsgType.STATUS_ACK: self._handle_status_ack,
            MsgType.ODOM: self._handle_odom,
            MsgType.SPEAKER_ANGLE: self._handle_speaker_angle,
        }.get(frame.msg_type)
        if handler is None:
            return revived  # unknown type: tolerated for forward extension
        try:
            return revived + handler(frame, now)
        except (KeyError, TypeError, ValueError, MalformedPayload):
            self.malformed_count += 1  # schema-invalid payload: drop the frame
            return revived

    def _revive(self) -> list[ArqAction]:
        if self.established and self.peer_liveness is not Liveness.ALIVE:
            self.peer_liveness = Liveness.ALIVE
        return []

    def _handle_hello(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.EDGE:
            return []
        self.last_inbound_ms = now
        self.pings_since_inbound = 0
        actions: list[ArqAction] = []
        if frame.session_id != self.session_id:
            # adopt the most recent HELLO as the single active session
            if self.outstanding is not None:
                actions.append(Deliver(CommandTimedOut(self.outstanding.seq)))
                self.outstanding = None
            self.session_id = frame.session_id
            self.next_seq = 1
            self.pings_inflight.clear()
            self.pings_since_inbound = 0
            self.seen_status_seqs.clear()
            self.last_seen_odom_seq = 0
            self.last_seen_speaker_seq = 0
            self.established = True
            self.peer_liveness = Liveness.ALIVE
            actions.append(Deliver(SessionEstablished(frame.session_id)))
        else:
            self.established = True
            self.peer_liveness = Liveness.ALIVE
        actions.append(Transmit(self._frame(MsgType.HELLO_ACK)))
        return actions

    def _handle_hello_ack(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.AVATAR:
            return []
        if self.established:
            return []
        self.established = True
        self.peer_liveness = Liveness.ALIVE
        return [Deliver(SessionEstablished(self.session_id))]

    def _handle_ping(self, frame: Frame, now: float) -> list[ArqAction]:
        # PONG echoes the PING's seq in its header
        return [Transmit(Frame.make(MsgType.PONG, frame.seq, self.session_id))]

    def _handle_pong(self, frame: Frame, now: float) -> list[ArqAction]:
        sent = self.pings_inflight.pop(frame.seq, None)
        if sent is None:
            return []
        self.last_pong_time = now
        self.last_rtt_ms = now - sent
        return [Deliver(PongReceived(self.last_rtt_ms))]

    def _handle_cmd(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.AVATAR:
            return []
        ack = Transmit(self._frame(MsgType.CMD_ACK, {"ack_seq": frame.seq}))
        if frame.seq <= self.last_executed_seq:
            return [ack]  # duplicate: re-ack, never re-deliver
        self.last_executed_seq = frame.seq
        try:
            cmd = Command.from_payload(frame.body())
        except MalformedCommand as e:
            return [ack] + self.send_status(frame.seq, "failed", f"malformed: {e}", now)
        return [ack, Deliver(CommandReceived(frame.seq, cmd))]

    def _handle_cmd_ack(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.EDGE or self.outstanding is None:
            return []
        if frame.body().get("ack_seq") != self.outstanding.seq:
            return []
        seq = self.outstanding.seq
        self.outstanding = None
        return [Deliver(CommandDelivered(seq))]

    def _handle_cmd_status(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.EDGE:
            return []
        ack = Transmit(self._frame(MsgType.STATUS_ACK, {"ack_seq": frame.seq}))
        if frame.seq in self.seen_status_seqs:
            return [ack]  # duplicate status: the avatar missed our earlier ack
        self.seen_status_seqs.add(frame.seq)
        self._prune_status_seqs()
        body = frame.body()
        cmd_seq, phase = int(body["cmd_seq"]), str(body["phase"])
        detail = str(body.get("detail", ""))
        actions: list[ArqAction] = [ack]
        if self.outstanding is not None and cmd_seq == self.outstanding.seq:
            # a status proves the command arrived even if every CMD_ACK was lost
            self.outstanding = None
            actions.append(Deliver(CommandDelivered(cmd_seq)))
        actions.append(Deliver(CommandStatus(cmd_seq, phase, detail)))
        return actions

    def _prune_status_seqs(self):
        if len(self.seen_status_seqs) > 8192:
            cutoff = max(self.seen_status_seqs) - 4096
            self.seen_status_seqs = {s for s in self.seen_status_seqs if s > cutoff}

    def _handle_status_ack(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.AVATAR:
            return []
        acked = frame.body().get("ack_seq")
        self.pending_statuses = [p for p in self.pending_statuses if p.frame.seq != acked]
        return []

    def _handle_odom(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.EDGE or frame.seq <= self.last_seen_odom_seq:
            return []
        self.last_seen_odom_seq = frame.seq
        body = frame.body()
        return [Deliver(OdometryReceived(Pose.from_payload(body), frame.seq, float(body.get("t", 0.0))))]

    def _handle_speaker_angle(self, frame: Frame, now: float) -> list[ArqAction]:
        if self.role is not Role.EDGE or frame.seq <= self.last_seen_speaker_seq:
            return []
        self.last_seen_speaker_seq = frame.seq
        return [Deliver(SpeakerAngle(float(frame.body()["angle_deg"]), frame.seq))]

    # -- timers ----------------------------------------------------------

    def tick(self, now: float) -> list[ArqAction]:
        actions: list[ArqAction] = []
        cfg = self.config

        if self.role is Role.AVATAR and not self.established:
            if self._hello_frame is not None and now - self._last_hello_ms >= cfg.ping_interval_ms:
                self._last_hello_ms = now
                actions.append(Transmit(self._hello_frame))
            return actions

        if self.outstanding is not None and now - self.outstanding.last_send_ms >= cfg.retry_interval_ms:
            if self.outstanding.send_count >= cfg.max_retries:
                seq = self.outstanding.seq
                self.outstanding = None
                actions.append(Deliver(CommandTimedOut(seq)))
                if self.peer_liveness is Liveness.ALIVE:
                    self.peer_liveness = Liveness.DEGRADED
                    actions.append(DeclareDegraded())
            else:
                self.outstanding.send_count += 1
                self.outstanding.last_send_ms = now
                actions.append(Transmit(self.outstanding.frame))

        for pending in self.pending_statuses:
            if now - pending.last_send_ms >= cfg.retry_interval_ms:
                pending.last_send_ms = now
                actions.append(Transmit(pending.frame))

        actions.extend(self._keepalive(now))
        return actions

    def _keepalive(self, now: float) -> list[ArqAction]:
        if not self.established or self.peer_liveness is Liveness.DEAD:
            return []
        cfg = self.config
        quiet_since = max(
            self.last_inbound_ms if self.last_inbound_ms is not None else -1e18,
            self.last_ping_ms if self.last_ping_ms is not None else -1e18,
        )
        if now - quiet_since < cfg.ping_interval_ms:
            return []
        actions: list[ArqAction] = []
        if self.pings_since_inbound >= cfg.missed_pong_limit:
            self.peer_liveness = Liveness.DEAD
            actions.append(DeclareDead())
            if self.role is Role.AVATAR:
                # fall back to the HELLO loop; a fresh HELLO_ACK revives us
                self.established = False
                self.pending_statuses.clear()
                self._last_hello_ms = now
                if self._hello_frame is not None:
                    actions.append(Transmit(self._hello_frame))
            return actions
        if self.pings_since_inbound >= 1 and self.peer_liveness is Liveness.ALIVE:
            self.peer_liveness = Liveness.DEGRADED
            actions.append(DeclareDegraded())
        ping = self._frame(MsgType.PING)
        self.pings_inflight[ping.seq] = now
        self.last_ping_ms = now
        self.pings_since_inbound += 1
        actions.append(Transmit(ping))
        return actions
