"""Minimal readers for the engine's corpus and label-map file formats.

The exporter talks to the selection engine only through files and HTTP, so
it carries its own small parser for the documented JSON-lines schema
rather than importing the engine.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass


class CorpusFormatError(Exception):
    """A corpus or label-map file does not match the documented schema."""


@dataclass(frozen=True)
class LoadedCorpus:
    ids: tuple[str, ...]
    texts: tuple[str, ...]
    labels: tuple[int, ...]
    num_classes: int

    def __len__(self) -> int:
        return len(self.ids)


def load_label_names(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    classes = data.get("classes") if isinstance(data, dict) else None
    if not isinstance(classes, list) or len(classes) < 2:
        raise CorpusFormatError(f"{path}: label map needs a 'classes' list of >= 2 entries")
    names = []
    for entry in classes:
        if not isinstance(entry, dict) or not entry.get("name"):
            raise CorpusFormatError(f"{path}: each class needs a 'name'")
        names.append(entry["name"])
    return names


def load_corpus(path: str, label_names: list[str]) -> LoadedCorpus:
    ids: list[str] = []
    texts: list[str] = []
    labels: list[int] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{line_no}: malformed JSON: {exc.msg}") from None
            eid = record.get("id")
            text = record.get("text")
            label = record.get("label")
            if not isinstance(eid, str) or not eid or eid in seen:
                raise CorpusFormatError(f"{path}:{line_no}: missing or duplicate id")
            if not isinstance(text, str) or not text:
                raise CorpusFormatError(f"{path}:{line_no}: missing or empty text")
            if isinstance(label, str):
                if label not in label_names:
                    raise CorpusFormatError(f"{path}:{line_no}: unknown label {label!r}")
                label = label_names.index(label)
            if not isinstance(label, int) or isinstance(label, bool) or not 0 <= label < len(label_names):
                raise CorpusFormatError(f"{path}:{line_no}: label out of range")
            seen.add(eid)
            ids.append(eid)
            texts.append(text)
            labels.append(label)
    if not ids:
        raise CorpusFormatError(f"{path}: corpus file is empty")
    return LoadedCorpus(
        ids=tuple(ids),
        texts=tuple(texts),
        labels=tuple(labels),
        num_classes=len(label_names),
    )


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    """Seeded shuffle split; the first part gets round(train_fraction * n)."""
    if n < 2:
        raise CorpusFormatError(f"need at least 2 examples to split, got {n}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_train = int(math.floor(train_fraction * n + 0.5))
    n_train = min(max(n_train, 1), n - 1)
    return order[:n_train], order[n_train:]
