"""Deterministic synthetic corpora for desk-scale evaluation.

Examples live in Gaussian clusters in embedding space, one cluster per
class.  A controllable fraction of labels is flipped away from the cluster's
class, which plants label-contradictory semantic neighbors: the regime where
similarity-only selection picks demonstrations whose labels disagree with
the test input.  Texts are built from cluster-specific word lists so they
are also separable by a bag-of-words classifier when the noise rate is zero.

Everything is driven by one seeded generator, so equal specs produce
byte-identical corpora and embedding stores.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Example, LabelMap, save_corpus, save_label_map
from .embeddings import EmbeddingStore
from .errors import ValidationError
from .providers import save_embeddings
from .validation import check_positive_int

_CLUSTER_WORDS = (
    ("crimson", "ember", "copper", "amber", "rust", "maroon", "sunset", "brick"),
    ("azure", "cobalt", "teal", "indigo", "navy", "cerulean", "tide", "glacier"),
    ("moss", "fern", "olive", "jade", "sage", "meadow", "clover", "grove"),
    ("ivory", "chalk", "pearl", "bone", "frost", "dove", "cloud", "linen"),
)
_FILLER_WORDS = ("signal", "report", "note", "case", "entry", "record", "trace", "sample")


@dataclass(frozen=True)
class SyntheticSpec:
    n_pool: int = 500
    n_test: int = 200
    num_classes: int = 2
    noise_rate: float = 0.3
    dim: int = 8
    cluster_spread: float = 0.35
    seed: int = 42

    def __post_init__(self):
        check_positive_int(self.n_pool, "n_pool")
        check_positive_int(self.n_test, "n_test")
        if not 2 <= self.num_classes <= len(_CLUSTER_WORDS):
            raise ValidationError(
                f"num_classes must be in [2, {len(_CLUSTER_WORDS)}], got {self.num_classes}"
            )
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValidationError(f"noise_rate must be in [0, 1), got {self.noise_rate}")
        if self.dim < self.num_classes:
            raise ValidationError("dim must be at least num_classes")
        if self.cluster_spread <= 0.0:
            raise ValidationError("cluster_spread must be positive")


@dataclass(frozen=True)
class SyntheticBundle:
    pool: Corpus
    test: Corpus
    pool_embeddings: EmbeddingStore
    test_embeddings: EmbeddingStore
    label_map: LabelMap


def _make_label_map(num_classes: int) -> LabelMap:
    pairs = [(f"class{i}", f"label{i}") for i in range(num_classes)]
    return LabelMap.from_pairs(pairs)


def _make_text(rng: np.random.Generator, cluster: int) -> str:
    themed = rng.choice(_CLUSTER_WORDS[cluster], size=4, replace=True)
    filler = rng.choice(_FILLER_WORDS, size=2, replace=True)
    words = list(themed) + list(filler)
    rng.shuffle(words)
    return " ".join(words)


def _generate_part(
    rng: np.random.Generator,
    spec: SyntheticSpec,
    count: int,
    prefix: str,
    label_map: LabelMap,
    name: str,
    role: str,
) -> tuple[Corpus, EmbeddingStore]:
    k = spec.num_classes
    centers = np.eye(spec.dim)[:k]
    examples = []
    vectors = {}
    width = len(str(max(count - 1, 1)))
    for i in range(count):
        cluster = int(rng.integers(k))
        point = centers[cluster] + spec.cluster_spread * rng.standard_normal(spec.dim)
        label = cluster
        if rng.random() < spec.noise_rate:
            label = int((cluster + 1 + rng.integers(k - 1)) % k) if k > 2 else 1 - cluster
        eid = f"{prefix}{i:0{width}d}"
        examples.append(
            Example(
                id=eid,
                text=_make_text(rng, cluster),
                label=label,
                meta={"cluster": cluster},
            )
        )
        vectors[eid] = tuple(float(v) for v in point)
    corpus = Corpus(name=name, label_map=label_map, examples=tuple(examples), role=role)
    return corpus, EmbeddingStore(vectors)


def generate_synthetic(spec: SyntheticSpec) -> SyntheticBundle:
    """Generate a pool corpus, a test corpus, and their embedding stores."""
    rng = np.random.default_rng(spec.seed)
    label_map = _make_label_map(spec.num_classes)
    pool, pool_emb = _generate_part(
        rng, spec, spec.n_pool, "p", label_map, "synthetic-pool", "pool"
    )
    test, test_emb = _generate_part(
        rng, spec, spec.n_test, "t", label_map, "synthetic-test", "test"
    )
    return SyntheticBundle(
        pool=pool,
        test=test,
        pool_embeddings=pool_emb,
        test_embeddings=test_emb,
        label_map=label_map,
    )


def write_synthetic(bundle: SyntheticBundle, out_dir: str) -> dict[str, str]:
    """Write the bundle's five files into ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "pool_corpus": os.path.join(out_dir, "pool.jsonl"),
        "test_corpus": os.path.join(out_dir, "test.jsonl"),
        "pool_embeddings": os.path.join(out_dir, "pool_embeddings.jsonl"),
        "test_embeddings": os.path.join(out_dir, "test_embeddings.jsonl"),
        "label_map": os.path.join(out_dir, "label_map.json"),
    }
    save_corpus(bundle.pool, paths["pool_corpus"])
    save_corpus(bundle.test, paths["test_corpus"])
    save_embeddings(bundle.pool_embeddings, paths["pool_embeddings"])
    save_embeddings(bundle.test_embeddings, paths["test_embeddings"])
    save_label_map(bundle.label_map, paths["label_map"])
    return paths
