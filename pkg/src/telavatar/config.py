"""Config file parsing shared by the edge, avatar, and demo entry points.

All sections are optional; defaults match the documented desk-scale values.
Errors name the offending key so launcher diagnostics stay greppable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .avatar.script import ScriptError, SpeakerScript, load_script
from .avatar.sim import KinematicParams
from .edge.core import EdgeParams
from .nav.geometry import Pose
from .proto.arq import ArqConfig
from .transport.impaired import Impairment


class ConfigError(Exception):
    pass


def _section(obj: dict, name: str) -> dict:
    sec = obj.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"config key '{name}' must be an object")
    return sec


def _build(cls, section: dict, prefix: str, **overrides):
    try:
        return cls(**{**section, **overrides})
    except TypeError as e:
        raise ConfigError(f"config section '{prefix}': {e}") from e
    except ValueError as e:
        raise ConfigError(f"config section '{prefix}': {e}") from e


def parse_addr(value: str, key: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigError(f"config key '{key}' must be HOST:PORT, got {value!r}")
    return host or "127.0.0.1", int(port)


@dataclass
class AppConfig:
    map_path: str | None = None
    start_pose: Pose = field(default_factory=lambda: Pose(0.0, 0.0, 0.0))
    arq: ArqConfig = field(default_factory=ArqConfig)
    kinematics: KinematicParams = field(default_factory=KinematicParams)
    edge: EdgeParams = field(default_factory=EdgeParams)
    impairment: Impairment = field(default_factory=Impairment)
    script: SpeakerScript = field(default_factory=SpeakerScript)
    listen_http: tuple[str, int] = ("127.0.0.1", 8080)
    listen_proto: tuple[str, int] = ("127.0.0.1", 9000)
    static_dir: str | None = None
    tick_ms: float = 10.0

    @staticmethod
    def from_json(obj: dict, base_dir: str = ".") -> "AppConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config root must be a JSON object")

        arq = _build(ArqConfig, _section(obj, "protocol"), "protocol")
        kinematics = _build(KinematicParams, _section(obj, "kinematics"), "kinematics")

        nav = _section(obj, "nav")
        arb = _section(obj, "arbiter")
        edge_kwargs = {}
        for key in ("inflation_radius_m", "max_drive_m", "turn_quantum_deg"):
            if key in nav:
                edge_kwargs[key] = nav[key]
        for key in ("deadband_deg", "dwell_ms", "stability_deg"):
            if key in arb:
                edge_kwargs[key] = arb[key]
        if "odom_relay_interval_ms" in obj:
            edge_kwargs["odom_relay_interval_ms"] = obj["odom_relay_interval_ms"]
        edge = _build(EdgeParams, edge_kwargs, "nav/arbiter", arq=arq)

        try:
            impairment = Impairment.from_json(_section(obj, "impairment"))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"config section 'impairment': {e}") from e

        pose_obj = _section(obj, "start_pose")
        try:
            start_pose = Pose(
                float(pose_obj.get("x", 0.0)),
                float(pose_obj.get("y", 0.0)),
                float(pose_obj.get("theta", 0.0)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"config section 'start_pose': {e}") from e

        script = SpeakerScript()
        raw_script = obj.get("speaker_script")
        if isinstance(raw_script, str):
            try:
                script = load_script(os.path.join(base_dir, raw_script))
            except ScriptError as e:
                raise ConfigError(f"config key 'speaker_script': {e}") from e
        elif isinstance(raw_script, dict):
            try:
                script = SpeakerScript.from_json(raw_script)
            except ScriptError as e:
                raise ConfigError(f"config key 'speaker_script': {e}") from e
        elif raw_script is not None:
            raise ConfigError("config key 'speaker_script' must be a path or object")

        listen = _section(obj, "listen")
        listen_http = parse_addr(str(listen.get("http", "127.0.0.1:8080")), "listen.http")
        listen_proto = parse_addr(str(listen.get("proto", "127.0.0.1:9000")), "listen.proto")

        map_path = obj.get("map")
        if map_path is not None:
            if not isinstance(map_path, str):
                raise ConfigError("config key 'map' must be a path string")
            map_path = os.path.join(base_dir, map_path)

        static_dir = obj.get("static_dir")
        if static_dir is not None:
            static_dir = os.path.join(base_dir, str(static_dir))

        tick_ms = obj.get("tick_ms", 10.0)
        if not isinstance(tick_ms, (int, float)) or tick_ms <= 0:
            raise ConfigError("config key 'tick_ms' must be a positive number")

        return AppConfig(
            map_path=map_path,
            start_pose=start_pose,
            arq=arq,
            kinematics=kinematics,
            edge=edge,
            impairment=impairment,
            script=script,
            listen_http=listen_http,
            listen_proto=listen_proto,
            static_dir=static_dir,
            tick_ms=float(tick_ms),
        )


def load_config(path: str) -> AppConfig:
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    return AppConfig.from_json(obj, base_dir=os.path.dirname(os.path.abspath(path)))
