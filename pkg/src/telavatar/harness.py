"""Single-process rig: edge core + simulated avatar over the impaired channel.

Everything runs on one virtual clock stepped deterministically, so demo runs
and protocol tests are bit-reproducible for a fixed seed and scenario.
"""

from __future__ import annotations

from .avatar.runner import AvatarRunner
from .avatar.script import SpeakerScript
from .avatar.sim import AvatarSim, KinematicParams
from .clock import VirtualClock
from .edge.core import EdgeCore, EdgeParams
from .nav.geometry import Pose
from .nav.grid import OccupancyGrid
from .transport.impaired import ImpairedChannel, Impairment


class SimRig:
    def __init__(
        self,
        grid: OccupancyGrid,
        start_pose: Pose,
        params: EdgeParams | None = None,
        kinematics: KinematicParams | None = None,
        impairment: Impairment | None = None,
        script: SpeakerScript | None = None,
        session_id: int = 1,
        tick_ms: float = 10.0,
    ):
        self.clock = VirtualClock()
        self.tick_ms = tick_ms
        self.channel = ImpairedChannel(impairment or Impairment(), clock=self.clock)
        self.edge_ep, self.avatar_ep = self.channel.pair()
        self.params = params or EdgeParams()
        self.core = EdgeCore(grid, self.clock, self.edge_ep.send, self.params)
        self.sim = AvatarSim(start_pose, kinematics or KinematicParams())
        self.avatar = AvatarRunner(self.avatar_ep, self.sim, self.params.arq,
                                   script=script, session_id=session_id)
        self.events: list[tuple[float, str, dict]] = []
        self.core.add_sink(self._record_event)

    def _record_event(self, name: str, payload: dict) -> None:
        self.events.append((self.clock.now(), name, payload))

    def step(self) -> None:
        now = self.clock.advance(self.tick_ms)
        for data, _src in self.edge_ep.poll(now):
            self.core.handle_datagram(data, now)
        self.core.tick(now)
        self.avatar.run_once(now)

    def run_for(self, duration_ms: float) -> None:
        end = self.clock.now() + duration_ms
        while self.clock.now() < end:
            self.step()

    def run_until(self, cond, timeout_ms: float = 120_000.0) -> bool:
        deadline = self.clock.now() + timeout_ms
        while self.clock.now() < deadline:
            if cond():
                return True
            self.step()
        return cond()

    # -- common wait conditions -----------------------------------------

    def wait_session_alive(self, timeout_ms: float = 10_000.0) -> bool:
        from .proto.arq import Liveness

        return self.run_until(
            lambda: self.core.engine.peer_liveness is Liveness.ALIVE, timeout_ms
        )

    def idle(self) -> bool:
        return not self.core.has_pending()

    def wait_idle(self, timeout_ms: float = 300_000.0) -> bool:
        # settle at least one tick so freshly submitted work is observed
        self.step()
        return self.run_until(self.idle, timeout_ms)
