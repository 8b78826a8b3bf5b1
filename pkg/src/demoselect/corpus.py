"""Labeled corpora: ingestion, label maps, splits, perturbations, OOD pairing.

Corpus files are JSON lines: ``{"id": str, "text": str, "label": int|str,
"meta": object?}``.  Labels may be given as class indices or class names.
Label map files are JSON objects with an ordered ``classes`` list of
``{"name": str, "verbalizer": str}``.

All operations return fresh corpora; nothing mutates in place.
"""

from __future__ import annotations

import json
import math
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace

from ._jsonl import iter_jsonl
from .errors import ClassCountError, FormatError, ValidationError
from .validation import check_choice, check_nonempty_str

ROLES = ("pool", "test", "validation")

# Fixed symbol list for the arbitrary-label perturbation; stable across runs
# so perturbed experiments are reproducible.
ARBITRARY_SYMBOLS = ("foo", "bar", "baz", "qux")

# Separator recorded for tasks whose input is a joined sentence pair.
PAIR_SEPARATOR = " [SEP] "


@dataclass(frozen=True)
class LabelClass:
    index: int
    name: str
    verbalizer: str


@dataclass(frozen=True)
class LabelMap:
    """Ordered class list mapping indices to names and prompt verbalizers."""

    classes: tuple[LabelClass, ...]

    def __post_init__(self):
        if len(self.classes) < 2:
            raise ValidationError(f"label map needs at least 2 classes, got {len(self.classes)}")
        names = set()
        verbalizers = set()
        for i, cls in enumerate(self.classes):
            if cls.index != i:
                raise ValidationError(
                    f"class indices must be contiguous from 0; position {i} has index {cls.index}"
                )
            check_nonempty_str(cls.name, "class name")
            check_nonempty_str(cls.verbalizer, "class verbalizer")
            if cls.name in names:
                raise ValidationError(f"duplicate class name {cls.name!r}")
            if cls.verbalizer in verbalizers:
                raise ValidationError(f"duplicate verbalizer {cls.verbalizer!r}")
            names.add(cls.name)
            verbalizers.add(cls.verbalizer)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    @property
    def verbalizers(self) -> tuple[str, ...]:
        return tuple(c.verbalizer for c in self.classes)

    def verbalizer(self, index: int) -> str:
        return self.classes[index].verbalizer

    def index_of(self, name: str) -> int | None:
        for cls in self.classes:
            if cls.name == name:
                return cls.index
        return None

    def with_verbalizers(self, verbalizers: Sequence[str]) -> "LabelMap":
        if len(verbalizers) != self.num_classes:
            raise ValidationError(
                f"need {self.num_classes} verbalizers, got {len(verbalizers)}"
            )
        return LabelMap(
            tuple(
                LabelClass(c.index, c.name, v)
                for c, v in zip(self.classes, verbalizers)
            )
        )

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]]) -> "LabelMap":
        return cls(tuple(LabelClass(i, n, v) for i, (n, v) in enumerate(pairs)))


def load_label_map(path: str) -> LabelMap:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot open label map: {exc}", path=path) from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc.msg}", path=path) from None
    classes = data.get("classes") if isinstance(data, dict) else None
    if not isinstance(classes, list):
        raise FormatError("label map must be an object with a 'classes' list", path=path)
    pairs = []
    for entry in classes:
        if not isinstance(entry, dict) or "name" not in entry:
            raise FormatError("each class needs at least a 'name'", path=path)
        name = entry["name"]
        pairs.append((name, entry.get("verbalizer", name)))
    try:
        return LabelMap.from_pairs(pairs)
    except ValidationError as exc:
        raise FormatError(str(exc), path=path) from None


def save_label_map(label_map: LabelMap, path: str) -> None:
    data = {
        "classes": [
            {"name": c.name, "verbalizer": c.verbalizer} for c in label_map.classes
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class Example:
    """One labeled text; sentence pairs arrive pre-joined by the separator."""

    id: str
    text: str
    label: int
    meta: Mapping[str, object] | None = None

    def __post_init__(self):
        check_nonempty_str(self.id, "example id")
        check_nonempty_str(self.text, "example text")
        if not isinstance(self.label, int) or isinstance(self.label, bool) or self.label < 0:
            raise ValidationError(f"label must be a non-negative class index, got {self.label!r}")


@dataclass(frozen=True)
class Corpus:
    name: str
    label_map: LabelMap
    examples: tuple[Example, ...]
    role: str = "pool"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        check_nonempty_str(self.name, "corpus name")
        check_choice(self.role, ROLES, "role")
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise ValidationError(f"duplicate example id {ex.id!r} in corpus {self.name!r}")
            seen.add(ex.id)
            if ex.label >= self.label_map.num_classes:
                raise ValidationError(
                    f"example {ex.id!r} has label {ex.label}, but corpus has "
                    f"{self.label_map.num_classes} classes"
                )

    @property
    def num_classes(self) -> int:
        return self.label_map.num_classes

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(ex.id for ex in self.examples)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(ex.text for ex in self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    def example(self, eid: str) -> Example:
        for ex in self.examples:
            if ex.id == eid:
                return ex
        raise ValidationError(f"unknown example id {eid!r} in corpus {self.name!r}")


def load_corpus(
    path: str,
    label_map: LabelMap,
    name: str | None = None,
    role: str = "pool",
) -> Corpus:
    """Read a JSON-lines corpus, resolving labels by index or class name.

    Example order equals file order.  An empty file yields a valid empty
    corpus carrying one warning.
    """
    examples = []
    seen: set[str] = set()
    for line_no, record in iter_jsonl(path):
        eid = record.get("id")
        text = record.get("text")
        label = record.get("label")
        if not isinstance(eid, str) or not eid:
            raise FormatError("missing or invalid 'id'", path=path, line=line_no)
        if not isinstance(text, str) or not text:
            raise FormatError("missing or empty 'text'", path=path, line=line_no)
        if eid in seen:
            raise FormatError(f"duplicate id {eid!r}", path=path, line=line_no)
        if isinstance(label, bool) or not isinstance(label, (int, str)):
            raise FormatError("label must be an integer index or class name", path=path, line=line_no)
        if isinstance(label, str):
            idx = label_map.index_of(label)
            if idx is None:
                raise FormatError(f"unknown label {label!r}", path=path, line=line_no)
        else:
            idx = label
            if not 0 <= idx < label_map.num_classes:
                raise FormatError(
                    f"label index {idx} out of range for {label_map.num_classes} classes",
                    path=path,
                    line=line_no,
                )
        meta = record.get("meta")
        if meta is not None and not isinstance(meta, dict):
            raise FormatError("'meta' must be an object when present", path=path, line=line_no)
        seen.add(eid)
        examples.append(Example(id=eid, text=text, label=idx, meta=meta))
    warnings = () if examples else ("corpus file contains no records",)
    return Corpus(
        name=name or path,
        label_map=label_map,
        examples=tuple(examples),
        role=role,
        warnings=warnings,
    )


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in corpus.examples:
            record: dict[str, object] = {"id": ex.id, "text": ex.text, "label": ex.label}
            if ex.meta is not None:
                record["meta"] = ex.meta
            fh.write(json.dumps(record))
            fh.write("\n")


def split_corpus(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Deterministic seeded shuffle-split into (train, heldout) parts.

    The first part gets round(train_fraction * N) examples (half up).  A
    fraction that would leave either part empty is rejected.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError(f"train_fraction must be in (0, 1), got {train_fraction!r}")
    n = len(corpus)
    if n < 2:
        raise ValidationError(f"corpus {corpus.name!r} needs at least 2 examples to split, has {n}")
    n_train = int(math.floor(train_fraction * n + 0.5))
    if n_train == 0 or n_train == n:
        raise ValidationError(
            f"train_fraction {train_fraction} on {n} examples leaves an empty part"
        )
    order = list(range(n))
    random.Random(seed).shuffle(order)
    train = tuple(corpus.examples[i] for i in order[:n_train])
    heldout = tuple(corpus.examples[i] for i in order[n_train:])
    return (
        replace(corpus, name=f"{corpus.name}#train", examples=train),
        replace(corpus, name=f"{corpus.name}#heldout", examples=heldout),
    )


def perturb_labels(
    corpus: Corpus,
    mode: str,
    seed: int = 0,
    shuffle_symbols: bool = False,
) -> Corpus:
    """Return a perturbed copy of the corpus; the input stays untouched.

    ``reversed`` flips every label (binary corpora only) and is its own
    inverse.  ``arbitrary`` keeps label indices and replaces the verbalizers
    with fixed symbols, optionally shuffled per ``seed`` when
    ``shuffle_symbols`` is set, so prompt rendering changes while the label
    geometry does not.
    """
    check_choice(mode, ("reversed", "arbitrary"), "mode")
    if mode == "reversed":
        if corpus.num_classes != 2:
            raise ValidationError(
                f"reversed mode requires a binary label map, corpus has {corpus.num_classes} classes"
            )
        flipped = tuple(replace(ex, label=1 - ex.label) for ex in corpus.examples)
        return replace(corpus, examples=flipped)
    k = corpus.num_classes
    if k > len(ARBITRARY_SYMBOLS):
        raise ValidationError(
            f"arbitrary mode supports up to {len(ARBITRARY_SYMBOLS)} classes, corpus has {k}"
        )
    symbols = list(ARBITRARY_SYMBOLS[:k])
    if shuffle_symbols:
        random.Random(seed).shuffle(symbols)
    return replace(corpus, label_map=corpus.label_map.with_verbalizers(symbols))


@dataclass(frozen=True)
class OodPair:
    """A validated pool-from-A, test-on-B run descriptor."""

    pool: Corpus
    test: Corpus
    alignment: tuple[tuple[int, int], ...]  # (pool class index, test class index)


def make_ood_pair(
    pool_corpus: Corpus,
    test_corpus: Corpus,
    alignment: Mapping[str, str] | None = None,
) -> OodPair:
    """Bind a demonstration pool from one dataset to a test set from another.

    Classes are aligned by name; pass ``alignment`` (pool class name ->
    test class name) when the two label maps use different naming.  The
    degenerate A == B pairing is valid and equals the in-domain setup.
    """
    if pool_corpus.num_classes != test_corpus.num_classes:
        raise ClassCountError(
            f"class counts differ: pool {pool_corpus.num_classes} vs test {test_corpus.num_classes}"
        )
    pairs = []
    used_test = set()
    for cls in pool_corpus.label_map.classes:
        target_name = alignment.get(cls.name, cls.name) if alignment else cls.name
        idx = test_corpus.label_map.index_of(target_name)
        if idx is None:
            raise ValidationError(
                f"no alignment for pool class {cls.name!r} in test corpus {test_corpus.name!r}"
            )
        if idx in used_test:
            raise ValidationError(f"test class {target_name!r} aligned twice")
        used_test.add(idx)
        pairs.append((cls.index, idx))
    return OodPair(pool=pool_corpus, test=test_corpus, alignment=tuple(pairs))
