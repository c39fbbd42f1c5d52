from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

RED_2X2 = FIXTURES / "red_2x2.png"
CONTENT_PNG = FIXTURES / "content_64x48.png"
STYLE_PNG = FIXTURES / "style_32x32.png"


@pytest.fixture
def rng():
    return random.Random(0xBEEF)


class StubEndpoint:
    """Scripted local HTTP server standing in for the images endpoint.

    Responses are queued with ``queue``; each incoming request pops the next
    one.  Bodies may be dicts (sent as JSON), bytes, or str.  All requests
    are recorded for assertions.
    """

    def __init__(self):
        self.responses = []
        self.requests = []
        self._server = None
        self._thread = None

    def queue(self, status, body, headers=None):
        self.responses.append((status, body, headers or {}))

    @property
    def base_url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def start(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _serve(self):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                stub.requests.append(
                    {
                        "method": self.command,
                        "path": self.path,
                        "headers": dict(self.headers),
                        "body": body,
                    }
                )
                if not stub.responses:
                    status, payload, headers = 500, {"error": "no scripted response"}, {}
                else:
                    status, payload, headers = stub.responses.pop(0)
                if isinstance(payload, dict):
                    raw = json.dumps(payload).encode()
                    content_type = "application/json"
                elif isinstance(payload, str):
                    raw = payload.encode()
                    content_type = "text/plain"
                else:
                    raw = payload
                    content_type = "application/octet-stream"
                self.send_response(status)
                self.send_header("Content-Type", headers.pop("Content-Type", content_type))
                self.send_header("Content-Length", str(len(raw)))
                for key, value in headers.items():
                    self.send_header(key, value)
                self.end_headers()
                self.wfile.write(raw)

            do_GET = _serve
            do_POST = _serve

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def stop(self):
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._thread.join(timeout=5)


@pytest.fixture
def stub_endpoint():
    servers = []

    def make():
        server = StubEndpoint()
        server.start()
        servers.append(server)
        return server

    yield make
    for server in servers:
        server.stop()


@pytest.fixture
def echo_backend_cmd(tmp_path):
    """Subprocess test double that copies the content image to the output."""
    import shlex
    import sys

    script = tmp_path / "echo_backend.py"
    script.write_text("import shutil, sys\nshutil.copy(sys.argv[1], sys.argv[3])\n")
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(script))} {{content}} {{style}} {{out}}"
