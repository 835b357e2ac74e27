"""Wire format of the edge<->avatar datagram protocol.

One frame per datagram, 14-byte big-endian header followed by a UTF-8 JSON
payload:

    bytes 0-1    magic 0x45 0x54
    byte  2      version 0x01
    byte  3      msg_type
    bytes 4-7    seq (u32)
    bytes 8-11   session_id (u32)
    bytes 12-13  payload_len (u16)
    bytes 14..   payload (UTF-8 JSON; empty for PING/PONG/HELLO/HELLO_ACK)

Total encoded size is capped at 1400 bytes so a frame always fits one
unfragmented datagram.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from enum import IntEnum

MAGIC = b"\x45\x54"
VERSION = 0x01
HEADER_LEN = 14
MAX_FRAME_LEN = 1400
MAX_PAYLOAD_LEN = MAX_FRAME_LEN - HEADER_LEN

_HEADER = struct.Struct(">2sBBIIH")


class MsgType(IntEnum):
    HELLO = 0x01
    HELLO_ACK = 0x02
    PING = 0x03
    PONG = 0x04
    CMD = 0x10
    CMD_ACK = 0x11
    CMD_STATUS = 0x12
    STATUS_ACK = 0x13
    ODOM = 0x20
    SPEAKER_ANGLE = 0x21


KNOWN_TYPES = frozenset(int(t) for t in MsgType)

# Known types whose payload must parse as a JSON object.
_JSON_TYPES = KNOWN_TYPES


class FrameError(Exception):
    pass


class PayloadTooLarge(FrameError):
    pass


class BadMagic(FrameError):
    pass


class UnsupportedVersion(FrameError):
    pass


class TruncatedFrame(FrameError):
    pass


class MalformedPayload(FrameError):
    pass


@dataclass(frozen=True)
class Frame:
    """One wire message. `payload` holds the exact payload bytes."""

    msg_type: int
    seq: int
    session_id: int
    payload: bytes = b""

    @staticmethod
    def make(msg_type: int, seq: int, session_id: int, body: dict | None = None) -> "Frame":
        payload = b"" if body is None else json.dumps(body, separators=(",", ":")).encode("utf-8")
        return Frame(int(msg_type), seq, session_id, payload)

    def body(self) -> dict:
        """Parse the JSON payload; an empty payload decodes to {}."""
        if not self.payload:
            return {}
        try:
            obj = json.loads(self.payload.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedPayload(str(e)) from e
        if not isinstance(obj, dict):
            raise MalformedPayload("payload is not a JSON object")
        return obj


def encode_frame(frame: Frame) -> bytes:
    if len(frame.payload) > MAX_PAYLOAD_LEN:
        raise PayloadTooLarge(
            f"payload {len(frame.payload)} bytes exceeds {MAX_PAYLOAD_LEN}"
        )
    header = _HEADER.pack(
        MAGIC, VERSION, frame.msg_type, frame.seq, frame.session_id, len(frame.payload)
    )
    return header + frame.payload


def decode_frame(data: bytes) -> Frame:
    if len(data) < HEADER_LEN:
        raise TruncatedFrame(f"{len(data)} bytes is shorter than the {HEADER_LEN}-byte header")
    magic, version, msg_type, seq, session_id, payload_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"version {version}")
    if len(data) != HEADER_LEN + payload_len:
        raise TruncatedFrame(
            f"header claims {payload_len} payload bytes, got {len(data) - HEADER_LEN}"
        )
    frame = Frame(msg_type, seq, session_id, data[HEADER_LEN:])
    if msg_type in _JSON_TYPES and frame.payload:
        frame.body()  # raises MalformedPayload on bad UTF-8/JSON
    # unknown msg_type: payload kept opaque for forward extension
    return frame
