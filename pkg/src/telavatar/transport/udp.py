"""Real UDP datagram endpoints, one frame per datagram."""

from __future__ import annotations

import socket

from .impaired import MAX_DATAGRAM, OversizeDatagram

Addr = tuple[str, int]


class UdpEndpoint:
    """Non-blocking UDP socket bound to one address."""

    def __init__(self, bind: Addr):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind(bind)
        self.sock.setblocking(False)
        self.addr: Addr = self.sock.getsockname()

    def send(self, data: bytes, dest: Addr) -> None:
        if len(data) > MAX_DATAGRAM:
            raise OversizeDatagram(f"{len(data)} bytes exceeds {MAX_DATAGRAM}")
        self.sock.sendto(data, dest)

    def poll(self) -> list[tuple[bytes, Addr]]:
        out: list[tuple[bytes, Addr]] = []
        while True:
            try:
                data, src = self.sock.recvfrom(2048)
            except BlockingIOError:
                return out
            except OSError:
                return out
            out.append((data, src))

    def close(self) -> None:
        self.sock.close()
