from .core import EdgeCore, EdgeParams, WrongMode, SessionDead, NoPose, MANUAL, AUTO
from .records import CommandRecord, IllegalTransition, accepts, LEGAL_TRANSITIONS, TERMINAL, IN_FLIGHT

__all__ = [
    "EdgeCore", "EdgeParams", "WrongMode", "SessionDead", "NoPose", "MANUAL", "AUTO",
    "CommandRecord", "IllegalTransition", "accepts", "LEGAL_TRANSITIONS", "TERMINAL", "IN_FLIGHT",
]
