"""Exact cosine-similarity TopK retrieval over an in-memory embedding store.

Search is brute force on purpose: pools at the scale this engine targets fit
comfortably in memory, and exact scores keep every downstream ranking test
deterministic.  Ties on similarity are broken by ascending id so repeated
runs produce byte-identical candidate pools.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ClassCountError, ValidationError
from .validation import check_finite_floats, check_nonempty_str, check_positive_int


@dataclass(frozen=True)
class EmbeddingVector:
    """A dense embedding for one text; zero vectors are rejected."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = check_finite_floats(self.values, "values")
        object.__setattr__(self, "values", values)
        if not values:
            raise ValidationError("embedding must have at least one dimension")
        if all(v == 0.0 for v in values):
            raise ValidationError("embedding has zero norm")

    @property
    def dim(self) -> int:
        return len(self.values)


class EmbeddingStore:
    """Immutable id -> embedding map with a shared dimensionality.

    Internally keeps a dense float64 matrix plus per-row norms so retrieval
    is a single matrix-vector product.
    """

    def __init__(self, entries: Mapping[str, Sequence[float]]):
        if not entries:
            raise ValidationError("embedding store must not be empty")
        ids = []
        rows = []
        dim = None
        for eid, values in entries.items():
            check_nonempty_str(eid, "embedding id")
            vec = EmbeddingVector(tuple(values))
            if dim is None:
                dim = vec.dim
            elif vec.dim != dim:
                raise ValidationError(
                    f"embedding {eid!r} has dim {vec.dim}, expected {dim}"
                )
            ids.append(eid)
            rows.append(vec.values)
        self._ids: tuple[str, ...] = tuple(ids)
        self._index = {eid: i for i, eid in enumerate(ids)}
        self._matrix = np.asarray(rows, dtype=np.float64)
        self._norms = np.linalg.norm(self._matrix, axis=1)
        self._dim = int(dim)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[float]]]) -> "EmbeddingStore":
        """Build from (id, vector) pairs, rejecting duplicate ids."""
        entries: dict[str, Sequence[float]] = {}
        for eid, values in pairs:
            if eid in entries:
                raise ValidationError(f"duplicate embedding id {eid!r}")
            entries[eid] = values
        return cls(entries)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def ids(self) -> tuple[str, ...]:
        return self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, eid: str) -> bool:
        return eid in self._index

    def vector(self, eid: str) -> EmbeddingVector:
        try:
            row = self._matrix[self._index[eid]]
        except KeyError:
            raise ValidationError(f"unknown embedding id {eid!r}") from None
        return EmbeddingVector(tuple(float(v) for v in row))


@dataclass(frozen=True)
class CandidatePool:
    """TopK retrieval result for one test input.

    ``entries`` holds (train_id, s_text) sorted by similarity descending,
    ties broken by ascending train_id, with no repeated ids.
    """

    test_id: str
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen = set()
        prev = None
        for tid, s in self.entries:
            if tid in seen:
                raise ValidationError(f"candidate pool repeats train_id {tid!r}")
            seen.add(tid)
            if prev is not None:
                ps, pid = prev
                if s > ps or (s == ps and tid < pid):
                    raise ValidationError("candidate pool is not in ranked order")
            prev = (s, tid)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(tid for tid, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine of the angle between two embeddings, clamped to [-1, 1]."""
    if a.dim != b.dim:
        raise ClassCountError(f"embedding dims differ: {a.dim} vs {b.dim}")
    va = np.asarray(a.values)
    vb = np.asarray(b.values)
    value = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
    return min(1.0, max(-1.0, value))


def retrieve_topk(
    query_id: str,
    query: EmbeddingVector,
    store: EmbeddingStore,
    k: int,
) -> CandidatePool:
    """Exact top-k candidates for ``query`` by cosine similarity.

    Returns min(k, len(store)) entries.  No ids are excluded here; callers
    that evaluate a corpus against itself drop the query's own id themselves.
    """
    check_positive_int(k, "k")
    if query.dim != store.dim:
        raise ClassCountError(f"query dim {query.dim} does not match store dim {store.dim}")
    q = np.asarray(query.values)
    sims = (store._matrix @ q) / (store._norms * np.linalg.norm(q))
    np.clip(sims, -1.0, 1.0, out=sims)
    order = sorted(range(len(store)), key=lambda i: (-sims[i], store.ids[i]))
    top = order[: min(k, len(store))]
    return CandidatePool(
        test_id=query_id,
        entries=tuple((store.ids[i], float(sims[i])) for i in top),
    )
