"""Batch export: fine-tune, predict, embed, write engine-format files.

The classifier is fitted on an 80/20 train/validation split of the pool
corpus (``epochs`` and ``learning_rate`` map onto each backend's closest
training scalars), then predicts label distributions for every pool and
test example; the encoder embeds all texts. Output rows are sanitized with
the engine's own clamp-and-renormalize rule before writing, so the engine
loads them unchanged, and every file is written atomically (temp + rename).
A ``metrics.json`` sidecar records the classifier's standalone accuracy.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .backends import ENCODER_BACKENDS, SLM_BACKENDS, make_encoder, make_slm, sanitize_row
from .corpus_io import load_corpus, load_label_names, split_indices


class ExporterError(Exception):
    """Invalid export job or corpus input."""


@dataclass(frozen=True)
class ExportJob:
    pool_corpus: str
    test_corpus: str
    label_map: str
    output_dir: str
    slm_backend: str = "tfidf_logistic"
    encoder_backend: str = "hashing"
    seed: int = 0
    epochs: int = 200
    learning_rate: float = 1.0
    train_fraction: float = 0.8
    encoder_dim: int = 256

    def __post_init__(self):
        if self.slm_backend not in SLM_BACKENDS:
            raise ExporterError(f"unknown slm backend {self.slm_backend!r}")
        if self.encoder_backend not in ENCODER_BACKENDS:
            raise ExporterError(f"unknown encoder backend {self.encoder_backend!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ExporterError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _write_jsonl_atomic(path: str, records) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record))
            fh.write("\n")
    os.replace(tmp, path)


def _write_json_atomic(path: str, data: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def export(job: ExportJob) -> dict[str, str]:
    """Run the full job; returns the paths of the five written files."""
    label_names = load_label_names(job.label_map)
    pool = load_corpus(job.pool_corpus, label_names)
    test = load_corpus(job.test_corpus, label_names)

    train_idx, val_idx = split_indices(len(pool), job.train_fraction, job.seed)
    train_texts = [pool.texts[i] for i in train_idx]
    train_labels = [pool.labels[i] for i in train_idx]
    val_texts = [pool.texts[i] for i in val_idx]
    val_labels = [pool.labels[i] for i in val_idx]

    slm = make_slm(job.slm_backend, seed=job.seed, epochs=job.epochs, learning_rate=job.learning_rate)
    loss_trace = slm.fit(train_texts, train_labels, pool.num_classes)

    pool_probs = slm.predict_proba(list(pool.texts))
    test_probs = slm.predict_proba(list(test.texts))
    val_probs = slm.predict_proba(val_texts)

    encoder = make_encoder(job.encoder_backend, dim=job.encoder_dim)
    pool_vectors = encoder.encode(list(pool.texts))
    test_vectors = encoder.encode(list(test.texts))

    os.makedirs(job.output_dir, exist_ok=True)
    paths = {
        "pool_embeddings": os.path.join(job.output_dir, "pool_embeddings.jsonl"),
        "test_embeddings": os.path.join(job.output_dir, "test_embeddings.jsonl"),
        "pool_distributions": os.path.join(job.output_dir, "pool_distributions.jsonl"),
        "test_distributions": os.path.join(job.output_dir, "test_distributions.jsonl"),
        "metrics": os.path.join(job.output_dir, "metrics.json"),
    }
    _write_jsonl_atomic(
        paths["pool_embeddings"],
        ({"id": eid, "vector": [float(v) for v in row]} for eid, row in zip(pool.ids, pool_vectors)),
    )
    _write_jsonl_atomic(
        paths["test_embeddings"],
        ({"id": eid, "vector": [float(v) for v in row]} for eid, row in zip(test.ids, test_vectors)),
    )
    _write_jsonl_atomic(
        paths["pool_distributions"],
        ({"id": eid, "probs": sanitize_row(row)} for eid, row in zip(pool.ids, pool_probs)),
    )
    _write_jsonl_atomic(
        paths["test_distributions"],
        ({"id": eid, "probs": sanitize_row(row)} for eid, row in zip(test.ids, test_probs)),
    )

    def accuracy(probs: np.ndarray, labels) -> float | None:
        if len(labels) == 0:
            return None
        return float(np.mean(np.argmax(probs, axis=1) == np.asarray(labels)))

    train_probs = slm.predict_proba(train_texts)
    metrics = {
        "slm_backend": job.slm_backend,
        "encoder_backend": job.encoder_backend,
        "seed": job.seed,
        "num_classes": pool.num_classes,
        "embedding_dim": int(pool_vectors.shape[1]),
        "train_size": len(train_idx),
        "val_size": len(val_idx),
        "loss_trace": loss_trace,
        "train_accuracy": accuracy(train_probs, train_labels),
        "val_accuracy": accuracy(val_probs, val_labels),
        "test_accuracy": accuracy(test_probs, list(test.labels)),
    }
    _write_json_atomic(paths["metrics"], metrics)
    return paths
