"""Shared fixtures: synthetic bundles and a configurable stub HTTP server."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from demoselect import SyntheticSpec, generate_synthetic, write_synthetic


@pytest.fixture(scope="session")
def small_bundle():
    """Tiny deterministic bundle for fast harness tests."""
    return generate_synthetic(
        SyntheticSpec(n_pool=40, n_test=10, noise_rate=0.3, dim=6, seed=11)
    )


@pytest.fixture(scope="session")
def small_bundle_dir(small_bundle, tmp_path_factory):
    out = tmp_path_factory.mktemp("small_bundle")
    paths = write_synthetic(small_bundle, str(out))
    return paths


class _StubHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # keep test output clean
        pass

    def do_POST(self):
        server = self.server
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length)) if length else {}
        with server.lock:
            server.calls.append((self.path, payload))
            route_count = sum(1 for p, _ in server.calls if p == self.path)
        if route_count <= server.behavior.get("fail_first", 0):
            self.send_response(503)
            self.end_headers()
            return
        fail_after = server.behavior.get("fail_after")
        if fail_after is not None and route_count > fail_after:
            self.send_response(404)
            self.end_headers()
            return
        handler = server.behavior.get(self.path)
        if handler is None:
            self.send_response(404)
            self.end_headers()
            return
        body = json.dumps(handler(payload)).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class StubServer:
    def __init__(self, behavior: dict):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self.server.behavior = behavior
        self.server.calls = []
        self.server.lock = threading.Lock()
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    @property
    def calls(self):
        return self.server.calls

    def stop(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_server():
    servers = []

    def start(behavior: dict) -> StubServer:
        server = StubServer(behavior)
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.stop()
