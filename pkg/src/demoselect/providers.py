"""Sources of embeddings and label distributions: files, HTTP services, oracles.

This module is the single sanitization boundary of the engine.  Raw
probability vectors from any source are clamped to ``[PROB_FLOOR, 1]`` and
renormalized here, so the divergence core never sees a zero where a log
would blow up.  Stores are immutable after construction.

Wire formats
------------
* label distributions: JSON lines, ``{"id": str, "probs": [float, ...]}``
* embeddings:          JSON lines, ``{"id": str, "vector": [float, ...]}``
* remote protocol:     ``POST <endpoint>/classify`` with ``{"texts": [...]}``
  returning ``{"distributions": [[...], ...]}``, and ``POST <endpoint>/embed``
  returning ``{"vectors": [[...], ...]}``; UTF-8 JSON throughout.
"""

from __future__ import annotations

import json
import math
import time
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from ._jsonl import iter_jsonl
from .corpus import Corpus
from .divergence import LabelDistribution
from .errors import (
    FormatError,
    ProtocolError,
    RequestError,
    ValidationError,
)
from .validation import check_choice, check_positive_int

PROB_FLOOR = 1e-12
_SANITIZED_SUM_TOL = 1e-9

PROVIDER_KINDS = ("file", "remote", "one_hot_oracle", "uniform")
ORACLE_MODES = ("faithful", "reversed", "arbitrary")

# Retry schedule for transient remote failures: 250 ms, then doubling.
_BACKOFF_BASE_S = 0.25
_TRANSIENT_STATUSES = frozenset({429, 500, 502, 503, 504})


def sanitize_probs(probs: Sequence[float]) -> tuple[float, ...]:
    """Clamp entries to [1e-12, 1] and renormalize to sum 1.

    Vectors that already satisfy the sanitized invariants are returned
    unchanged, which makes the function exactly idempotent and lets valid
    files round-trip bit-for-bit.
    """
    vals = []
    for v in probs:
        f = float(v)
        if not math.isfinite(f):
            raise ValidationError(f"probability vector contains non-finite value {v!r}")
        vals.append(f)
    if len(vals) < 2:
        raise ValidationError(f"probability vector needs at least 2 entries, got {len(vals)}")
    if all(PROB_FLOOR <= v <= 1.0 for v in vals) and abs(math.fsum(vals) - 1.0) <= _SANITIZED_SUM_TOL:
        return tuple(vals)
    clamped = [min(max(v, PROB_FLOOR), 1.0) for v in vals]
    total = math.fsum(clamped)
    scaled = [v / total for v in clamped]
    # Renormalization can push a floor entry a few ulp below the floor when
    # total > 1; lift it back without rescaling (deficit is ~1e-24 per entry).
    return tuple(v if v >= PROB_FLOOR else PROB_FLOOR for v in scaled)


class LabelDistributionStore:
    """Immutable id -> LabelDistribution map with one shared class count."""

    def __init__(self, entries: Mapping[str, LabelDistribution]):
        if not entries:
            raise ValidationError("label distribution store must not be empty")
        num_classes = None
        items: dict[str, LabelDistribution] = {}
        for eid, dist in entries.items():
            if num_classes is None:
                num_classes = dist.num_classes
            elif dist.num_classes != num_classes:
                raise ValidationError(
                    f"distribution {eid!r} has {dist.num_classes} classes, expected {num_classes}"
                )
            items[eid] = dist
        self._entries = items
        self._num_classes = int(num_classes)

    @property
    def num_classes(self) -> int:
        return self._num_classes

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, eid: str) -> bool:
        return eid in self._entries

    def get(self, eid: str) -> LabelDistribution:
        try:
            return self._entries[eid]
        except KeyError:
            raise ValidationError(f"unknown distribution id {eid!r}") from None

    def subset(self, ids: Iterable[str]) -> dict[str, LabelDistribution]:
        return {eid: self.get(eid) for eid in ids}


@dataclass(frozen=True)
class ProviderConfig:
    """Where one kind of per-example data comes from.

    ``file`` requires ``path``; ``remote`` requires ``endpoint``;
    ``one_hot_oracle`` takes a ``mode`` and derives distributions from corpus
    gold labels; ``uniform`` is the null model (every class equiprobable).
    """

    kind: str
    path: str | None = None
    endpoint: str | None = None
    timeout_ms: int = 10_000
    max_retries: int = 3
    mode: str = "faithful"

    def __post_init__(self):
        check_choice(self.kind, PROVIDER_KINDS, "provider kind")
        check_positive_int(self.timeout_ms, "timeout_ms")
        if not isinstance(self.max_retries, int) or self.max_retries < 0:
            raise ValidationError(f"max_retries must be a non-negative integer, got {self.max_retries!r}")
        if self.kind == "file" and not self.path:
            raise ValidationError("provider kind 'file' requires a path")
        if self.kind == "remote" and not self.endpoint:
            raise ValidationError("provider kind 'remote' requires an endpoint")
        if self.kind == "one_hot_oracle":
            check_choice(self.mode, ORACLE_MODES, "oracle mode")


def load_label_distributions(path: str, num_classes: int) -> LabelDistributionStore:
    """Load and sanitize a JSON-lines distribution file."""
    check_positive_int(num_classes, "num_classes")
    if num_classes < 2:
        raise ValidationError(f"num_classes must be >= 2, got {num_classes}")
    entries: dict[str, LabelDistribution] = {}
    for line_no, record in iter_jsonl(path):
        eid = record.get("id")
        probs = record.get("probs")
        if not isinstance(eid, str) or not eid:
            raise FormatError("missing or invalid 'id'", path=path, line=line_no)
        if not isinstance(probs, list):
            raise FormatError("missing or invalid 'probs'", path=path, line=line_no)
        if len(probs) != num_classes:
            raise FormatError(
                f"expected {num_classes} probabilities, got {len(probs)}",
                path=path,
                line=line_no,
            )
        if eid in entries:
            raise FormatError(f"duplicate id {eid!r}", path=path, line=line_no)
        try:
            entries[eid] = LabelDistribution(sanitize_probs(probs))
        except ValidationError as exc:
            raise FormatError(str(exc), path=path, line=line_no) from None
    if not entries:
        raise FormatError("no records in distribution file", path=path)
    return LabelDistributionStore(entries)


def save_label_distributions(store: LabelDistributionStore, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for eid in store.ids:
            fh.write(json.dumps({"id": eid, "probs": list(store.get(eid).probs)}))
            fh.write("\n")


def load_embeddings(path: str):
    """Load a JSON-lines embedding file into an EmbeddingStore."""
    from .embeddings import EmbeddingStore

    pairs = []
    seen = set()
    dim = None
    for line_no, record in iter_jsonl(path):
        eid = record.get("id")
        vector = record.get("vector")
        if not isinstance(eid, str) or not eid:
            raise FormatError("missing or invalid 'id'", path=path, line=line_no)
        if not isinstance(vector, list) or not vector:
            raise FormatError("missing or invalid 'vector'", path=path, line=line_no)
        if eid in seen:
            raise FormatError(f"duplicate id {eid!r}", path=path, line=line_no)
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise FormatError(
                f"embedding {eid!r} has dim {len(vector)}, expected {dim}",
                path=path,
                line=line_no,
            )
        seen.add(eid)
        pairs.append((eid, vector))
    if not pairs:
        raise FormatError("no records in embedding file", path=path)
    try:
        return EmbeddingStore.from_pairs(pairs)
    except ValidationError as exc:
        raise FormatError(str(exc), path=path) from None


def save_embeddings(store, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for eid in store.ids:
            fh.write(json.dumps({"id": eid, "vector": list(store.vector(eid).values)}))
            fh.write("\n")


def _post_with_retries(
    url: str,
    payload: dict,
    timeout_ms: int,
    max_retries: int,
) -> dict:
    attempt = 0
    while True:
        status = None
        body = ""
        try:
            resp = requests.post(url, json=payload, timeout=timeout_ms / 1000.0)
            status = resp.status_code
            body = resp.text
            if status == 200:
                try:
                    data = resp.json()
                except ValueError:
                    raise ProtocolError(f"non-JSON response from {url}")
                if not isinstance(data, dict):
                    raise ProtocolError(f"response from {url} is not a JSON object")
                return data
            transient = status in _TRANSIENT_STATUSES
        except ProtocolError:
            raise
        except requests.RequestException as exc:
            transient = True
            body = str(exc)
        if not transient or attempt >= max_retries:
            raise RequestError(f"request to {url} failed", status=status, body_excerpt=body)
        time.sleep(_BACKOFF_BASE_S * (2**attempt))
        attempt += 1


def remote_classify(
    endpoint: str,
    texts: Sequence[str],
    num_classes: int,
    *,
    timeout_ms: int = 10_000,
    max_retries: int = 3,
    batch_size: int = 32,
    max_inflight: int = 8,
) -> list[LabelDistribution]:
    """Classify texts via the remote protocol, preserving input order.

    Texts are shipped in batches with at most ``max_inflight`` concurrent
    requests; transient failures (connection errors, timeouts, 5xx, 429) are
    retried with exponential backoff starting at 250 ms.
    """
    check_positive_int(num_classes, "num_classes")
    check_positive_int(batch_size, "batch_size")
    check_positive_int(max_inflight, "max_inflight")
    if not texts:
        return []
    url = endpoint.rstrip("/") + "/classify"
    batches = [list(texts[i : i + batch_size]) for i in range(0, len(texts), batch_size)]

    def fetch(batch: list[str]) -> list[LabelDistribution]:
        data = _post_with_retries(url, {"texts": batch}, timeout_ms, max_retries)
        dists = data.get("distributions")
        if not isinstance(dists, list):
            raise ProtocolError("response lacks a 'distributions' list")
        if len(dists) != len(batch):
            raise ProtocolError(
                f"got {len(dists)} distributions for {len(batch)} texts"
            )
        out = []
        for row in dists:
            if not isinstance(row, list) or len(row) != num_classes:
                raise ProtocolError(
                    f"expected {num_classes} probabilities per distribution, got "
                    f"{len(row) if isinstance(row, list) else type(row).__name__}"
                )
            out.append(LabelDistribution(sanitize_probs(row)))
        return out

    with ThreadPoolExecutor(max_workers=min(max_inflight, len(batches))) as pool:
        results = list(pool.map(fetch, batches))
    return [dist for batch in results for dist in batch]


def remote_embed(
    endpoint: str,
    texts: Sequence[str],
    *,
    timeout_ms: int = 10_000,
    max_retries: int = 3,
    batch_size: int = 32,
    max_inflight: int = 8,
) -> list[tuple[float, ...]]:
    """Embed texts via the remote protocol, preserving input order."""
    check_positive_int(batch_size, "batch_size")
    check_positive_int(max_inflight, "max_inflight")
    if not texts:
        return []
    url = endpoint.rstrip("/") + "/embed"
    batches = [list(texts[i : i + batch_size]) for i in range(0, len(texts), batch_size)]

    def fetch(batch: list[str]) -> list[tuple[float, ...]]:
        data = _post_with_retries(url, {"texts": batch}, timeout_ms, max_retries)
        vectors = data.get("vectors")
        if not isinstance(vectors, list):
            raise ProtocolError("response lacks a 'vectors' list")
        if len(vectors) != len(batch):
            raise ProtocolError(f"got {len(vectors)} vectors for {len(batch)} texts")
        out = []
        for row in vectors:
            if not isinstance(row, list) or not row:
                raise ProtocolError("embedding rows must be non-empty lists")
            out.append(tuple(float(v) for v in row))
        return out

    with ThreadPoolExecutor(max_workers=min(max_inflight, len(batches))) as pool:
        results = list(pool.map(fetch, batches))
    flat = [vec for batch in results for vec in batch]
    dims = {len(v) for v in flat}
    if len(dims) > 1:
        raise ProtocolError(f"inconsistent embedding dims in response: {sorted(dims)}")
    return flat


def one_hot_oracle(corpus: Corpus, mode: str = "faithful") -> LabelDistributionStore:
    """Gold-label one-hot distributions for every example in a corpus.

    ``faithful`` puts the mass on the gold label, ``reversed`` (binary only)
    on the flipped label.  ``arbitrary`` keeps the faithful geometry; the
    matching verbalizer swap is a corpus perturbation
    (:func:`demoselect.corpus.perturb_labels`) because rendering, not
    probability mass, is what changes.
    """
    check_choice(mode, ORACLE_MODES, "mode")
    k = corpus.num_classes
    if mode == "reversed" and k != 2:
        raise ValidationError(f"reversed mode requires exactly 2 classes, corpus has {k}")
    entries = {}
    for ex in corpus.examples:
        idx = ex.label
        if mode == "reversed":
            idx = 1 - idx
        raw = [0.0] * k
        raw[idx] = 1.0
        entries[ex.id] = LabelDistribution(sanitize_probs(raw))
    return LabelDistributionStore(entries)


def uniform_distributions(ids: Iterable[str], num_classes: int) -> LabelDistributionStore:
    """Null-model store: every id gets the uniform distribution."""
    dist = LabelDistribution.uniform(num_classes)
    entries = {eid: dist for eid in ids}
    return LabelDistributionStore(entries)
