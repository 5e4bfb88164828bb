"""JSON-over-HTTP service mirroring the command-line outputs byte for byte.

Endpoints: POST /plan, POST /simulate, POST /render, GET /analyze.  Every
response body comes from the same emitter the CLI uses, so a fixture fed
to both produces identical bytes.  Requests are stateless; each builds its
own simulation objects.  Errors carry the CLI exit-code taxonomy in a
``code`` field.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Optional
from urllib.parse import parse_qs, urlsplit

from . import cli, files
from .errors import SchemaError


class _RequestError(Exception):
    def __init__(self, status: int, message: str, code: int):
        super().__init__(message)
        self.status = status
        self.code = code


def _single(params: dict[str, list[str]], key: str) -> Optional[str]:
    values = params.get(key)
    if not values:
        return None
    if len(values) > 1:
        raise _RequestError(400, f"duplicate query parameter {key!r}", cli.EXIT_PARSE)
    return values[0]


def _int_param(value: Optional[str], key: str) -> Optional[int]:
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        raise _RequestError(400, f"{key} must be an integer", cli.EXIT_PARSE) from None


_MECH_QUERY_KEYS = (
    "delta_mm",
    "h_mm",
    "l_mm",
    "Wp_gf",
    "Fsma_N",
    "strap_angle_deg",
    "sma_contraction",
)


class FoldchainHandler(BaseHTTPRequestHandler):
    server_version = "foldchain"
    protocol_version = "HTTP/1.1"

    # ------------------------------------------------------------- plumbing

    def log_message(self, format: str, *args) -> None:  # noqa: A002 - stdlib name
        pass  # keep test output clean

    def _read_body_json(self) -> Any:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise _RequestError(400, "request body required", cli.EXIT_PARSE)
        try:
            return files.loads_strict(raw)
        except SchemaError as ex:
            raise _RequestError(400, str(ex), cli.EXIT_PARSE) from ex

    def _respond(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _respond_error(self, status: int, message: str, code: int) -> None:
        body = files.dumps_canonical({"error": message, "code": code}).encode()
        self._respond(status, body, "application/json")

    def _run(self, handler) -> None:
        try:
            handler()
        except _RequestError as ex:
            self._respond_error(ex.status, str(ex), ex.code)
        except Exception as ex:  # domain errors map to the CLI taxonomy
            code = cli.exit_code_for(ex)
            if code is None:
                self._respond_error(500, "internal error", 1)
                raise
            self._respond_error(400, str(ex), code)

    # -------------------------------------------------------------- routes

    def do_POST(self) -> None:  # noqa: N802 - stdlib casing
        split = urlsplit(self.path)
        params = parse_qs(split.query)
        route = {
            "/plan": lambda: self._post_plan(params),
            "/simulate": lambda: self._post_simulate(params),
            "/render": lambda: self._post_render(params),
        }.get(split.path)
        if route is None:
            self._respond_error(404, f"no such endpoint {split.path}", cli.EXIT_PARSE)
            return
        self._run(route)

    def do_GET(self) -> None:  # noqa: N802 - stdlib casing
        split = urlsplit(self.path)
        if split.path != "/analyze":
            self._respond_error(404, f"no such endpoint {split.path}", cli.EXIT_PARSE)
            return
        self._run(lambda: self._get_analyze(parse_qs(split.query)))

    def _post_plan(self, params: dict[str, list[str]]) -> None:
        curve_obj = self._read_body_json()
        anchor = _single(params, "anchor") or "auto"
        chain = _int_param(_single(params, "chain"), "chain")
        data, _notes = cli.plan_bytes(curve_obj, anchor=anchor, chain=chain)
        self._respond(200, data, "application/json")

    def _post_simulate(self, params: dict[str, list[str]]) -> None:
        doc = self._read_body_json()
        options: dict[str, Any] = {}
        plan_obj = doc
        if isinstance(doc, dict) and "plan" in doc:
            plan_obj = doc["plan"]
            options = {k: v for k, v in doc.items() if k != "plan"}
            unknown = set(options) - {"timing", "group", "seed", "chain"}
            if unknown:
                raise _RequestError(
                    400, f"unknown simulate options: {sorted(unknown)}", cli.EXIT_PARSE
                )

        timing_sel = _single(params, "timing") or options.get("timing")
        if isinstance(timing_sel, dict):
            timing = files.timing_from_obj(timing_sel)
        else:
            timing = cli.resolve_timing(timing_sel, allow_file=False)

        group = _single(params, "group") or options.get("group") or "one"
        seed = _int_param(_single(params, "seed"), "seed")
        if seed is None:
            seed = options.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise _RequestError(400, "seed must be an integer", cli.EXIT_PARSE)
        chain = _int_param(_single(params, "chain"), "chain")
        if chain is None:
            chain = options.get("chain")
        if chain is not None and (not isinstance(chain, int) or isinstance(chain, bool)):
            raise _RequestError(400, "chain must be an integer", cli.EXIT_PARSE)

        data = cli.simulate_bytes(plan_obj, timing, group=group, seed=seed, chain=chain)
        self._respond(200, data, "text/plain; charset=utf-8")

    def _post_render(self, params: dict[str, list[str]]) -> None:
        doc = self._read_body_json()
        plan_obj, curve_obj = doc, None
        if isinstance(doc, dict) and "plan" in doc:
            unknown = set(doc) - {"plan", "curve"}
            if unknown:
                raise _RequestError(
                    400, f"unknown render options: {sorted(unknown)}", cli.EXIT_PARSE
                )
            plan_obj = doc["plan"]
            curve_obj = doc.get("curve")
        data = cli.render_bytes(plan_obj, curve_obj)
        self._respond(200, data, "image/svg+xml")

    def _get_analyze(self, params: dict[str, list[str]]) -> None:
        mech_obj: dict[str, float] = {}
        for key in _MECH_QUERY_KEYS:
            raw = _single(params, key)
            if raw is None:
                continue
            try:
                mech_obj[key] = float(raw)
            except ValueError:
                raise _RequestError(400, f"{key} must be a number", cli.EXIT_PARSE) from None
        n_range = _single(params, "N") or cli.DEFAULT_N_RANGE
        data = cli.analyze_bytes(mech_obj if mech_obj else None, n_range=n_range)
        self._respond(200, data, "application/json")


def create_server(host: str = "127.0.0.1", port: int = 8032) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), FoldchainHandler)


def start_background(host: str = "127.0.0.1", port: int = 0) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Server on its own thread, for tests and embedding; port 0 picks one."""
    server = create_server(host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


def serve(host: str = "127.0.0.1", port: int = 8032) -> None:
    server = create_server(host, port)
    address = f"http://{server.server_address[0]}:{server.server_address[1]}"
    print(f"serving on {address}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
