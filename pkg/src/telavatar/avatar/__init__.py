from .sim import AvatarSim, KinematicParams, StatusReport, OdometrySample
from .script import SpeakerScript, SpeakerEntry, ScriptError, load_script
from .runner import AvatarRunner

__all__ = [
    "AvatarSim", "KinematicParams", "StatusReport", "OdometrySample",
    "SpeakerScript", "SpeakerEntry", "ScriptError", "load_script",
    "AvatarRunner",
]
