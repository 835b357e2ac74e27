from .frames import Frame, MsgType, encode_frame, decode_frame
from .commands import Command, MalformedCommand
from .arq import ArqEngine, ArqConfig, Role, Liveness

__all__ = [
    "Frame", "MsgType", "encode_frame", "decode_frame",
    "Command", "MalformedCommand",
    "ArqEngine", "ArqConfig", "Role", "Liveness",
]
