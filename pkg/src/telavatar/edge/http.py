"""HTTP master API and event stream for the edge.

One loop thread owns the EdgeCore (network, timers, all mutations); HTTP
handler threads submit closures to it via EdgeServer.call and get the result
back. SSE fan-out runs on the per-connection handler threads, fed by a
queue sink registered with the core.

Endpoints (JSON bodies):
    GET  /api/v1/state     EdgeSnapshot
    GET  /api/v1/map       map file verbatim
    PUT  /api/v1/mode      {"mode":"manual"|"auto"} -> {"previous","cancelled"}
    POST /api/v1/commands  Command JSON -> 202 {"id"} | 409 | 422 | 503
    POST /api/v1/goal      {"x","y"} -> 202 {"id_first","count","path"} | 409 | 422 | 503
    POST /api/v1/stop      -> 202 {"id"} | 503
    GET  /api/v1/events    SSE: odom, command, session, mode, speaker
"""

from __future__ import annotations

import concurrent.futures
import json
import logging
import mimetypes
import os
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..nav.planner import PlanError
from ..proto.commands import Command, MalformedCommand
from ..proto.frames import MAGIC
from .core import EdgeCore, NoPose, SessionDead, WrongMode

log = logging.getLogger("telavatar.http")


class EdgeUdpLink:
    """Routes edge frames to the avatar address learned from its HELLO."""

    def __init__(self, udp):
        self.udp = udp
        self.peer = None

    def send(self, data: bytes) -> None:
        if self.peer is not None:
            self.udp.send(data, self.peer)

    def poll(self, now: float):
        out = []
        for data, src in self.udp.poll():
            if len(data) >= 4 and data[:2] == MAGIC and data[3] == 0x01:
                self.peer = src
            out.append((data, src))
        return out


class EdgeServer:
    """Event loop thread that owns an EdgeCore and its transport link."""

    def __init__(self, core: EdgeCore, link, clock, tick_ms: float = 10.0,
                 extra_pump=None):
        self.core = core
        self.link = link
        self.clock = clock
        self.tick_s = tick_ms / 1000.0
        self.extra_pump = extra_pump
        self._calls: queue.Queue = queue.Queue()
        self._running = False
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._running = True
        self._thread = threading.Thread(target=self._loop, name="edge-loop", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._running = False
        if self._thread is not None:
            self._thread.join(timeout=5)

    def call(self, fn):
        if threading.current_thread() is self._thread:
            return fn()
        fut: concurrent.futures.Future = concurrent.futures.Future()
        self._calls.put((fn, fut))
        return fut.result(timeout=10)

    def _loop(self) -> None:
        while self._running:
            try:
                fn, fut = self._calls.get(timeout=self.tick_s)
            except queue.Empty:
                pass
            else:
                self._run_call(fn, fut)
                for _ in range(100):
                    try:
                        fn, fut = self._calls.get_nowait()
                    except queue.Empty:
                        break
                    self._run_call(fn, fut)
            now = self.clock.now()
            for data, _src in self.link.poll(now):
                self.core.handle_datagram(data, now)
            self.core.tick(now)
            if self.extra_pump is not None:
                self.extra_pump(now)

    @staticmethod
    def _run_call(fn, fut) -> None:
        try:
            fut.set_result(fn())
        except BaseException as e:  # propagated to the calling thread
            fut.set_exception(e)


def make_http_server(app: EdgeServer, listen: tuple[str, int],
                     map_bytes: bytes = b"{}", static_dir: str | None = None,
                     retry_hint_ms: int = 1000) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer(listen, _Handler)
    server.daemon_threads = True
    server.app = app
    server.map_bytes = map_bytes
    server.static_dir = os.path.realpath(static_dir) if static_dir else None
    server.retry_hint_ms = retry_hint_ms
    return server


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def app(self) -> EdgeServer:
        return self.server.app

    def log_message(self, fmt, *args):
        log.debug("%s " + fmt, self.client_address[0], *args)

    # -- helpers ---------------------------------------------------------

    def _json_body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedCommand(f"body is not valid JSON: {e}") from e
        if not isinstance(obj, dict):
            raise MalformedCommand("body must be a JSON object")
        return obj

    def _reply(self, code: int, obj: dict, content_type: str = "application/json") -> None:
        data = json.dumps(obj).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _reply_error(self, code: int, message: str) -> None:
        self._reply(code, {"error": message})

    def _guarded(self, fn) -> None:
        try:
            fn()
        except WrongMode as e:
            self._reply_error(409, str(e))
        except (MalformedCommand, NoPose, PlanError, ValueError) as e:
            self._reply_error(422, str(e))
        except SessionDead as e:
            self._reply_error(503, str(e))

    # -- routes -----------------------------------------------------------

    def do_GET(self):
        if self.path == "/api/v1/state":
            snapshot = self.app.call(self.app.core.snapshot)
            self._reply(200, snapshot)
        elif self.path == "/api/v1/map":
            data = self.server.map_bytes
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)
        elif self.path == "/api/v1/events":
            self._stream_events()
        else:
            self._serve_static()

    def do_PUT(self):
        if self.path != "/api/v1/mode":
            self._reply_error(404, "not found")
            return

        def handle():
            body = self._json_body()
            mode = body.get("mode")
            if mode not in ("manual", "auto"):
                raise ValueError(f"mode must be 'manual' or 'auto', got {mode!r}")
            previous, cancelled = self.app.call(lambda: self.app.core.set_mode(mode))
            self._reply(200, {"previous": previous, "cancelled": cancelled})

        self._guarded(handle)

    def do_POST(self):
        if self.path == "/api/v1/commands":
            def handle():
                cmd = Command.from_payload(self._json_body())
                rec_id = self.app.call(lambda: self.app.core.submit_manual(cmd))
                self._reply(202, {"id": rec_id})
            self._guarded(handle)
        elif self.path == "/api/v1/goal":
            def handle():
                body = self._json_body()
                try:
                    x, y = float(body["x"]), float(body["y"])
                except (KeyError, TypeError) as e:
                    raise ValueError(f"goal needs numeric x and y: {e}") from e
                path, first_id, count = self.app.call(lambda: self.app.core.submit_goal(x, y))
                self._reply(202, {
                    "id_first": first_id,
                    "count": count,
                    "path": [[px, py] for px, py in path.waypoints],
                })
            self._guarded(handle)
        elif self.path == "/api/v1/stop":
            def handle():
                rec_id = self.app.call(self.app.core.emergency_stop)
                self._reply(202, {"id": rec_id})
            self._guarded(handle)
        else:
            self._reply_error(404, "not found")

    # -- SSE ---------------------------------------------------------------

    def _stream_events(self):
        events: queue.Queue = queue.Queue()

        def sink(name, payload):
            events.put((name, payload))

        self.app.call(lambda: self.app.core.add_sink(sink))
        try:
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.end_headers()
            self.wfile.write(f"retry: {self.server.retry_hint_ms}\n\n".encode())
            self.wfile.flush()
            while True:
                try:
                    name, payload = events.get(timeout=1.0)
                except queue.Empty:
                    self.wfile.write(b": keepalive\n\n")
                    self.wfile.flush()
                    continue
                data = json.dumps(payload, separators=(",", ":"))
                self.wfile.write(f"event: {name}\ndata: {data}\n\n".encode())
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            self.app.call(lambda: self.app.core.remove_sink(sink))

    # -- static console assets ----------------------------------------------

    def _serve_static(self):
        root = self.server.static_dir
        if root is None:
            self._reply_error(404, "not found")
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(root, rel))
        if not full.startswith(root + os.sep) and full != root:
            self._reply_error(404, "not found")
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._reply_error(404, "not found")
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as f:
            data = f.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
