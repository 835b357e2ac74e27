"""Deterministic in-process datagram channel with configurable impairment.

Models a best-effort link for tests and single-process demos: packets can
be lost, duplicated, delayed, and reordered, but never corrupted. All
randomness comes from one seeded RNG, so a fixed seed and send schedule
reproduce the exact same delivery trace.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

MAX_DATAGRAM = 1400


class OversizeDatagram(Exception):
    pass


class UnknownEndpoint(Exception):
    pass


@dataclass(frozen=True)
class Impairment:
    loss_prob: float = 0.0
    dup_prob: float = 0.0
    delay_mean_ms: float = 0.0
    delay_jitter_ms: float = 0.0
    reorder_window: int = 0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.loss_prob <= 1.0 and 0.0 <= self.dup_prob <= 1.0):
            raise ValueError("probabilities must be within [0, 1]")
        if self.delay_mean_ms < 0 or self.delay_jitter_ms < 0 or self.reorder_window < 0:
            raise ValueError("delays and reorder window must be non-negative")

    @staticmethod
    def from_json(obj: dict) -> "Impairment":
        return Impairment(
            loss_prob=float(obj.get("loss_prob", 0.0)),
            dup_prob=float(obj.get("dup_prob", 0.0)),
            delay_mean_ms=float(obj.get("delay_mean_ms", 0.0)),
            delay_jitter_ms=float(obj.get("delay_jitter_ms", 0.0)),
            reorder_window=int(obj.get("reorder_window", 0)),
            seed=int(obj.get("seed", 0)),
        )


BLACKHOLE = Impairment(loss_prob=1.0)


class Endpoint:
    """Handle for one mailbox; sends go to the named peer."""

    def __init__(self, channel: "ImpairedChannel", name: str, peer: str):
        self.channel = channel
        self.name = name
        self.peer = peer

    def send(self, data: bytes) -> None:
        self.channel.send(self.name, self.peer, data)

    def poll(self, now: float) -> list[tuple[bytes, str]]:
        return self.channel.poll_receive(self.name, now)


class ImpairedChannel:
    def __init__(self, impairment: Impairment | None = None, clock=None):
        self.impairment = impairment or Impairment()
        self.clock = clock
        self.rng = random.Random(self.impairment.seed)
        self._mailboxes: dict[str, list] = {}  # name -> heap of (deliver_at, order, data, src)
        self._order = 0
        self.dropped = 0

    def set_impairment(self, impairment: Impairment, reseed: bool = False) -> None:
        self.impairment = impairment
        if reseed:
            self.rng = random.Random(impairment.seed)

    def pair(self, a: str = "edge", b: str = "avatar") -> tuple[Endpoint, Endpoint]:
        self._mailboxes.setdefault(a, [])
        self._mailboxes.setdefault(b, [])
        return Endpoint(self, a, b), Endpoint(self, b, a)

    def send(self, src: str, dst: str, data: bytes, now: float | None = None) -> None:
        if len(data) > MAX_DATAGRAM:
            raise OversizeDatagram(f"{len(data)} bytes exceeds {MAX_DATAGRAM}")
        if dst not in self._mailboxes:
            raise UnknownEndpoint(dst)
        if now is None:
            now = self.clock.now()
        imp = self.impairment
        if self.rng.random() < imp.loss_prob:
            self.dropped += 1
            return
        copies = 2 if (imp.dup_prob > 0 and self.rng.random() < imp.dup_prob) else 1
        for _ in range(copies):
            self._enqueue(dst, data, src, now)

    def _enqueue(self, dst: str, data: bytes, src: str, now: float) -> None:
        imp = self.impairment
        delay = imp.delay_mean_ms
        if imp.delay_jitter_ms > 0:
            delay += self.rng.uniform(-imp.delay_jitter_ms, imp.delay_jitter_ms)
        deliver_at = now + max(0.0, delay)
        heap = self._mailboxes[dst]
        entry = [deliver_at, self._order, data, src]
        self._order += 1
        heapq.heappush(heap, entry)
        if imp.reorder_window > 0 and len(heap) > 1 and self.rng.random() < 0.5:
            # swap scheduled times with a recent pending packet
            pending = sorted(heap)[-min(len(heap), imp.reorder_window + 1):]
            other = pending[self.rng.randrange(len(pending))]
            if other is not entry:
                entry[0], other[0] = other[0], entry[0]
                heapq.heapify(heap)

    def poll_receive(self, name: str, now: float) -> list[tuple[bytes, str]]:
        if name not in self._mailboxes:
            raise UnknownEndpoint(name)
        heap = self._mailboxes[name]
        out: list[tuple[bytes, str]] = []
        while heap and heap[0][0] <= now:
            _, _, data, src = heapq.heappop(heap)
            out.append((data, src))
        return out

    def next_delivery_time(self) -> float | None:
        times = [heap[0][0] for heap in self._mailboxes.values() if heap]
        return min(times) if times else None
