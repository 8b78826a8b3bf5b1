"""HTTP server implementing the engine's /classify and /embed protocol.

Fine-tunes the classifier at startup (same 80/20 split as batch export),
then answers ``POST /classify`` with ``{"texts": [...]}`` ->
``{"distributions": [[...], ...]}`` and ``POST /embed`` ->
``{"vectors": [[...], ...]}``, one row per input text, in input order.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .backends import make_encoder, make_slm, sanitize_row
from .corpus_io import load_corpus, load_label_names, split_indices
from .export import ExportJob


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length)) if length else {}
            texts = payload.get("texts")
            if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
                self._reply(400, {"error": "body must carry a 'texts' list of strings"})
                return
            if self.path == "/classify":
                probs = self.server.slm.predict_proba(texts) if texts else []
                self._reply(200, {"distributions": [sanitize_row(row) for row in probs]})
            elif self.path == "/embed":
                vectors = self.server.encoder.encode(texts) if texts else []
                self._reply(200, {"vectors": [[float(v) for v in row] for row in vectors]})
            else:
                self._reply(404, {"error": f"unknown route {self.path}"})
        except Exception as exc:  # surface the cause to the client
            self._reply(500, {"error": str(exc)})


class ExporterServer:
    """In-process server handle; ``endpoint`` is ready once constructed."""

    def __init__(self, job: ExportJob, host: str = "127.0.0.1", port: int = 0):
        label_names = load_label_names(job.label_map)
        pool = load_corpus(job.pool_corpus, label_names)
        train_idx, _ = split_indices(len(pool), job.train_fraction, job.seed)
        slm = make_slm(job.slm_backend, seed=job.seed, epochs=job.epochs, learning_rate=job.learning_rate)
        slm.fit(
            [pool.texts[i] for i in train_idx],
            [pool.labels[i] for i in train_idx],
            pool.num_classes,
        )
        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.slm = slm
        self._server.encoder = make_encoder(job.encoder_backend, dim=job.encoder_dim)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()


def serve(job: ExportJob, host: str = "127.0.0.1", port: int = 0) -> ExporterServer:
    return ExporterServer(job, host=host, port=port)
