from .impaired import Impairment, ImpairedChannel, Endpoint, OversizeDatagram, UnknownEndpoint, BLACKHOLE
from .udp import UdpEndpoint

__all__ = [
    "Impairment", "ImpairedChannel", "Endpoint",
    "OversizeDatagram", "UnknownEndpoint", "BLACKHOLE", "UdpEndpoint",
]
