"""Avatar process loop: protocol engine + simulator + speaker source."""

from __future__ import annotations

import logging
import math

from ..nav.geometry import normalize_deg
from ..proto.arq import ArqConfig, ArqEngine, CommandReceived, Deliver, SessionEstablished, Transmit
from ..proto.frames import FrameError, decode_frame, encode_frame
from .script import SpeakerScript
from .sim import AvatarSim, OdometrySample, StatusReport

log = logging.getLogger("telavatar.avatar")

SPEAKER_PERIOD_MS = 250.0


class AvatarRunner:
    """Single event loop per avatar: network, timers, and simulation steps
    are serialized; call run_once() with a monotonically non-decreasing now."""

    def __init__(self, endpoint, sim: AvatarSim, config: ArqConfig | None = None,
                 script: SpeakerScript | None = None, session_id: int | None = None):
        self.endpoint = endpoint
        self.sim = sim
        self.engine = ArqEngine.avatar(config, session_id=session_id)
        self.script = script or SpeakerScript()
        self._last_speaker_ms: float | None = None
        self._started = False

    def start(self, now: float) -> None:
        self._perform(self.engine.start(now), now)
        self._started = True

    def run_once(self, now: float) -> None:
        if not self._started:
            self.start(now)
        for data, _src in self.endpoint.poll(now):
            try:
                frame = decode_frame(data)
            except FrameError as e:
                log.debug("dropping bad frame: %s", e)
                continue
            self._perform(self.engine.handle_frame(frame, now), now)
        self._perform(self.engine.tick(now), now)
        for event in self.sim.advance_to(now):
            self._emit_sim_event(event, now)
        self._speaker_step(now)

    def _perform(self, actions, now: float) -> None:
        for action in actions:
            if isinstance(action, Transmit):
                self.endpoint.send(encode_frame(action.frame))
            elif isinstance(action, Deliver):
                self._on_event(action.event, now)

    def _on_event(self, event, now: float) -> None:
        if isinstance(event, CommandReceived):
            for sim_event in self.sim.apply_command(event.command, event.seq):
                self._emit_sim_event(sim_event, now)
        elif isinstance(event, SessionEstablished):
            log.info("session %d established", event.session_id)

    def _emit_sim_event(self, event, now: float) -> None:
        if isinstance(event, StatusReport):
            self._perform(
                self.engine.send_status(event.seq, event.phase, event.detail, now), now
            )
        elif isinstance(event, OdometrySample) and self.engine.established:
            self._perform(self.engine.send_odometry(event.pose, now), now)

    def _speaker_step(self, now: float) -> None:
        if not self.engine.established:
            return
        bearing = self.script.active_bearing(now)
        if bearing is None:
            self._last_speaker_ms = None
            return
        if self._last_speaker_ms is not None and now - self._last_speaker_ms < SPEAKER_PERIOD_MS:
            return
        self._last_speaker_ms = now
        angle = normalize_deg(bearing - math.degrees(self.sim.pose.theta))
        self._perform(self.engine.send_speaker_angle(angle, now), now)
