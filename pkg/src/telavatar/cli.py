"""Command line entry points: edge server, avatar process, scripted demos,
and offline planning."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

from .avatar.runner import AvatarRunner
from .avatar.sim import AvatarSim
from .clock import WallClock
from .config import AppConfig, ConfigError, load_config, parse_addr
from .demo import ScenarioError, run_scenario
from .edge.core import EdgeCore
from .edge.http import EdgeServer, EdgeUdpLink, make_http_server
from .nav.discretize import discretize, replay, verify_discretization
from .nav.geometry import Pose
from .nav.grid import MapError, OccupancyGrid, inflate, load_map
from .nav.planner import PlanError, plan_cells, smooth
from .transport.udp import UdpEndpoint

log = logging.getLogger("telavatar")


def fail(code: int, reason: str) -> int:
    print(f"error: {reason}", file=sys.stderr)
    return code


class AvatarUdpLink:
    def __init__(self, udp: UdpEndpoint, edge_addr):
        self.udp = udp
        self.edge_addr = edge_addr

    def send(self, data: bytes) -> None:
        self.udp.send(data, self.edge_addr)

    def poll(self, now: float):
        return self.udp.poll()


def _load_config_arg(path: str | None) -> AppConfig:
    return load_config(path) if path else AppConfig()


def cmd_edge(args) -> int:
    try:
        config = _load_config_arg(args.config)
        if args.http:
            config.listen_http = parse_addr(args.http, "--http")
        if args.proto:
            config.listen_proto = parse_addr(args.proto, "--proto")
        if config.map_path is None:
            raise ConfigError("config key 'map' is required for the edge")
        grid = load_map(config.map_path)
        with open(config.map_path, "rb") as f:
            map_bytes = f.read()
    except (ConfigError, MapError) as e:
        return fail(2, str(e))

    try:
        udp = UdpEndpoint(config.listen_proto)
    except OSError as e:
        return fail(2, f"cannot bind protocol port {config.listen_proto}: {e}")
    link = EdgeUdpLink(udp)
    clock = WallClock()
    core = EdgeCore(grid, clock, link.send, config.edge)
    app = EdgeServer(core, link, clock, tick_ms=config.tick_ms)
    try:
        httpd = make_http_server(app, config.listen_http, map_bytes=map_bytes,
                                 static_dir=config.static_dir)
    except OSError as e:
        udp.close()
        return fail(2, f"cannot bind http port {config.listen_http}: {e}")

    app.start()
    host, port = config.listen_http
    log.info("edge up: http://%s:%d  proto udp %s:%d", host, port, *config.listen_proto)
    try:
        httpd.serve_forever(poll_interval=0.2)
    except KeyboardInterrupt:
        pass
    finally:
        httpd.shutdown()
        httpd.server_close()
        app.stop()
        udp.close()
    return 0


def cmd_avatar(args) -> int:
    try:
        config = _load_config_arg(args.config)
        edge_addr = parse_addr(args.edge, "--edge")
        bind = parse_addr(args.proto, "--proto") if args.proto else ("0.0.0.0", 0)
    except ConfigError as e:
        return fail(2, str(e))

    try:
        udp = UdpEndpoint(bind)
    except OSError as e:
        return fail(2, f"cannot bind avatar port {bind}: {e}")
    link = AvatarUdpLink(udp, edge_addr)
    clock = WallClock()
    sim = AvatarSim(config.start_pose, config.kinematics, start_ms=clock.now())
    runner = AvatarRunner(link, sim, config.arq, script=config.script)
    log.info("avatar up, edge at %s:%d", *edge_addr)
    try:
        while True:
            runner.run_once(clock.now())
            time.sleep(config.tick_ms / 1000.0)
    except KeyboardInterrupt:
        return 0
    finally:
        udp.close()


def cmd_demo(args) -> int:
    trace_path = args.trace
    if trace_path is None:
        trace_path = os.path.splitext(os.path.basename(args.scenario))[0] + ".trace.jsonl"
    try:
        code, failures = run_scenario(args.scenario, trace_path=trace_path, seed=args.seed)
    except ScenarioError as e:
        return fail(2, str(e))
    for message in failures:
        print(f"error: assertion failed: {message}", file=sys.stderr)
    print(f"trace written to {trace_path}")
    return code


def _render_ascii(grid: OccupancyGrid, inflated: OccupancyGrid,
                  cells: list, start, goal) -> str:
    path_cells = set(cells)
    lines = []
    for j in reversed(range(grid.height)):  # north up
        row = []
        for i in range(grid.width):
            cell = (i, j)
            if cell == start:
                row.append("S")
            elif cell == goal:
                row.append("G")
            elif cell in path_cells:
                row.append("*")
            elif grid.occupied(cell):
                row.append("#")
            elif inflated.occupied(cell):
                row.append("+")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines)


def cmd_plan(args) -> int:
    try:
        grid = load_map(args.map)
    except MapError as e:
        return fail(2, str(e))
    inflated = inflate(grid, args.inflation)
    start_pose = Pose(args.start_x, args.start_y, math.radians(args.start_theta_deg))
    start = inflated.world_to_cell(args.start_x, args.start_y)
    goal = inflated.world_to_cell(args.goal_x, args.goal_y)
    try:
        cells, cost = plan_cells(inflated, start, goal)
    except PlanError as e:
        return fail(1, str(e))
    path = smooth(inflated, cells)
    cmds = discretize(path, start_pose, max_drive=args.max_drive,
                      turn_quantum=args.turn_quantum)

    report = {
        "waypoints": [[x, y] for x, y in path.waypoints],
        "cost_m": cost,
        "smoothed_cost_m": path.cost,
        "commands": [c.to_payload() for c in cmds],
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"cell-path cost: {cost:.3f} m, smoothed: {path.cost:.3f} m")
        print("waypoints:", " -> ".join(f"({x:.3f},{y:.3f})" for x, y in path.waypoints))
        print(f"commands ({len(cmds)}):")
        for c in cmds:
            print(f"  {json.dumps(c.to_payload())}")
        print(_render_ascii(grid, inflated, cells, start, goal))
    if args.verify:
        try:
            verify_discretization(path, start_pose, cmds, grid.resolution)
        except AssertionError as e:
            return fail(1, f"replay verification failed: {e}")
        final = replay(cmds, start_pose).final
        print(f"verified: replay lands at ({final.x:.6f}, {final.y:.6f}), "
              f"theta {math.degrees(final.theta):.3f} deg")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telavatar",
                                     description="edge-centric telepresence stack")
    sub = parser.add_subparsers(dest="command", required=True)

    p_edge = sub.add_parser("edge", help="run the edge control server")
    p_edge.add_argument("--config", help="config file path")
    p_edge.add_argument("--http", help="HTTP listen HOST:PORT")
    p_edge.add_argument("--proto", help="protocol listen HOST:PORT")
    p_edge.set_defaults(fn=cmd_edge)

    p_avatar = sub.add_parser("avatar", help="run the simulated avatar")
    p_avatar.add_argument("--config", help="config file path")
    p_avatar.add_argument("--edge", required=True, help="edge protocol HOST:PORT")
    p_avatar.add_argument("--proto", help="local bind HOST:PORT (default ephemeral)")
    p_avatar.set_defaults(fn=cmd_avatar)

    p_demo = sub.add_parser("demo", help="run a scripted scenario on virtual time")
    p_demo.add_argument("scenario", help="scenario JSON path")
    p_demo.add_argument("--trace", help="trace output path (JSON lines)")
    p_demo.add_argument("--seed", type=int, help="impairment seed override")
    p_demo.set_defaults(fn=cmd_demo)

    p_plan = sub.add_parser("plan", help="offline planning report")
    p_plan.add_argument("map", help="map JSON path")
    p_plan.add_argument("start_x", type=float)
    p_plan.add_argument("start_y", type=float)
    p_plan.add_argument("start_theta_deg", type=float)
    p_plan.add_argument("goal_x", type=float)
    p_plan.add_argument("goal_y", type=float)
    p_plan.add_argument("--inflation", type=float, default=0.30)
    p_plan.add_argument("--max-drive", type=float, default=0.5)
    p_plan.add_argument("--turn-quantum", type=float, default=15.0)
    p_plan.add_argument("--verify", action="store_true",
                        help="replay the command list and check it reaches the goal")
    p_plan.add_argument("--json", action="store_true", help="machine-readable report")
    p_plan.set_defaults(fn=cmd_plan)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("TELAVATAR_LOG", "WARNING").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
