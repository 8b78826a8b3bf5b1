"""Provider boundary: sanitization, file loading, oracles, round trips."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demoselect import (
    Corpus,
    Example,
    FormatError,
    LabelDistribution,
    LabelDistributionStore,
    LabelMap,
    PROB_FLOOR,
    ProviderConfig,
    ValidationError,
    js_divergence,
    label_match_score,
    load_embeddings,
    load_label_distributions,
    one_hot_oracle,
    sanitize_probs,
    save_embeddings,
    save_label_distributions,
    uniform_distributions,
)
from demoselect.embeddings import EmbeddingStore


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def binary_corpus(labels, name="c"):
    label_map = LabelMap.from_pairs([("negative", "negative"), ("positive", "positive")])
    examples = tuple(
        Example(id=f"e{i}", text=f"text {i}", label=l) for i, l in enumerate(labels)
    )
    return Corpus(name=name, label_map=label_map, examples=examples)


class TestSanitizeProbs:
    def test_valid_vector_unchanged(self):
        v = (0.7, 0.3)
        assert sanitize_probs(v) == v

    def test_low_sum_renormalized(self):
        got = sanitize_probs((0.7, 0.2))
        assert got == pytest.approx((7 / 9, 2 / 9), abs=1e-15)

    def test_one_hot_clamped(self):
        got = sanitize_probs((1.0, 0.0))
        assert got[1] >= PROB_FLOOR
        assert got[0] == pytest.approx(1.0, abs=1e-9)
        assert math.fsum(got) == pytest.approx(1.0, abs=1e-9)

    def test_idempotent_exact(self):
        cases = [
            (1.0, 0.0),
            (0.0, 1.0, 0.0),
            (0.5, 0.4),
            (2.0, 1.0),
            (0.25, 0.25, 0.25, 0.25),
            (1e-15, 1.0),
        ]
        for raw in cases:
            once = sanitize_probs(raw)
            assert sanitize_probs(once) == once

    @given(st.lists(st.floats(0.0, 2.0, allow_nan=False), min_size=2, max_size=8))
    @settings(max_examples=200)
    def test_idempotent_and_valid(self, raw):
        if math.fsum(raw) == 0.0:
            raw = [v + 0.1 for v in raw]
        once = sanitize_probs(raw)
        assert sanitize_probs(once) == once
        LabelDistribution(once)  # must validate
        assert all(v >= PROB_FLOOR for v in once)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            sanitize_probs((float("inf"), 0.5))

    def test_too_short_rejected(self):
        with pytest.raises(ValidationError):
            sanitize_probs((1.0,))


class TestDistributionFiles:
    def test_load_valid(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "t1", "probs": [0.7, 0.3]}, {"id": "t2", "probs": [0.5, 0.5]}])
        store = load_label_distributions(str(path), 2)
        assert store.get("t1").probs == (0.7, 0.3)
        assert len(store) == 2

    def test_load_renormalizes_low_sum(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "t1", "probs": [0.7, 0.2]}])
        store = load_label_distributions(str(path), 2)
        assert store.get("t1").probs == pytest.approx((7 / 9, 2 / 9), abs=1e-15)

    def test_wrong_class_count_names_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "t1", "probs": [0.7, 0.3]}, {"id": "t2", "probs": [0.5, 0.3, 0.2]}])
        with pytest.raises(FormatError, match=":2"):
            load_label_distributions(str(path), 2)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [{"id": "t1", "probs": [0.7, 0.3]}, {"id": "t1", "probs": [0.5, 0.5]}])
        with pytest.raises(FormatError, match="duplicate"):
            load_label_distributions(str(path), 2)

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "t1", "probs": [0.7, 0.3]}\n{oops\n', encoding="utf-8")
        with pytest.raises(FormatError, match=":2"):
            load_label_distributions(str(path), 2)

    def test_round_trip_bit_exact(self, tmp_path):
        path1 = tmp_path / "a.jsonl"
        path2 = tmp_path / "b.jsonl"
        write_jsonl(
            path1,
            [
                {"id": "t1", "probs": [0.123456789012345, 0.876543210987655]},
                {"id": "t2", "probs": list(sanitize_probs((1.0, 0.0)))},
            ],
        )
        store = load_label_distributions(str(path1), 2)
        save_label_distributions(store, str(path2))
        reloaded = load_label_distributions(str(path2), 2)
        for eid in store.ids:
            assert reloaded.get(eid).probs == store.get(eid).probs

    def test_write_load_write_byte_identical(self, tmp_path):
        raw = {"x": LabelDistribution(sanitize_probs((0.9, 0.1))), "y": LabelDistribution(sanitize_probs((1.0, 0.0)))}
        store = LabelDistributionStore(raw)
        p1, p2 = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        save_label_distributions(store, str(p1))
        save_label_distributions(load_label_distributions(str(p1), 2), str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestEmbeddingFiles:
    def test_load_valid(self, tmp_path):
        path = tmp_path / "e.jsonl"
        write_jsonl(path, [{"id": "a", "vector": [1.0, 2.0, 3.0]}, {"id": "b", "vector": [0.5, 0.1, -1.0]}])
        store = load_embeddings(str(path))
        assert len(store) == 2
        assert store.dim == 3

    def test_inconsistent_dim_names_id(self, tmp_path):
        path = tmp_path / "e.jsonl"
        write_jsonl(path, [{"id": "a", "vector": [1.0, 2.0, 3.0]}, {"id": "b", "vector": [1.0, 2.0]}])
        with pytest.raises(FormatError, match="'b'"):
            load_embeddings(str(path))

    def test_zero_vector_rejected(self, tmp_path):
        path = tmp_path / "e.jsonl"
        write_jsonl(path, [{"id": "a", "vector": [0.0, 0.0]}])
        with pytest.raises(FormatError):
            load_embeddings(str(path))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "e.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(FormatError, match="no records"):
            load_embeddings(str(path))

    def test_write_load_write_byte_identical(self, tmp_path):
        store = EmbeddingStore({"a": (0.1234567890123, -2.5), "b": (1e-7, 3.25)})
        p1, p2 = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        save_embeddings(store, str(p1))
        save_embeddings(load_embeddings(str(p1)), str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestProviderConfig:
    def test_file_requires_path(self):
        with pytest.raises(ValidationError):
            ProviderConfig(kind="file")

    def test_remote_requires_endpoint(self):
        with pytest.raises(ValidationError):
            ProviderConfig(kind="remote")

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            ProviderConfig(kind="magic")


class TestOneHotOracle:
    def test_faithful_near_one_hot(self):
        corpus = binary_corpus([0, 1])
        store = one_hot_oracle(corpus, "faithful")
        d0, d1 = store.get("e0"), store.get("e1")
        assert d0[0] > 0.999999 and d0[1] <= PROB_FLOOR * 1.001
        assert d1[1] > 0.999999 and d1[0] <= PROB_FLOOR * 1.001

    def test_reversed_flips(self):
        corpus = binary_corpus([0, 1])
        faithful = one_hot_oracle(corpus, "faithful")
        reversed_ = one_hot_oracle(corpus, "reversed")
        assert reversed_.get("e0").probs == faithful.get("e1").probs
        assert reversed_.get("e1").probs == faithful.get("e0").probs

    def test_reversed_requires_binary(self):
        label_map = LabelMap.from_pairs([("a", "a"), ("b", "b"), ("c", "c")])
        corpus = Corpus(
            name="tri",
            label_map=label_map,
            examples=(Example(id="e0", text="x", label=2),),
        )
        with pytest.raises(ValidationError):
            one_hot_oracle(corpus, "reversed")

    def test_arbitrary_keeps_geometry(self):
        corpus = binary_corpus([0, 1, 1])
        assert one_hot_oracle(corpus, "arbitrary")._entries == one_hot_oracle(corpus, "faithful")._entries

    def test_label_match_separation(self):
        # the mechanism that lets reranking reject label-contradictory neighbors
        corpus = binary_corpus([0, 0, 1])
        store = one_hot_oracle(corpus, "faithful")
        same = label_match_score(store.get("e0"), store.get("e1"))
        different = label_match_score(store.get("e0"), store.get("e2"))
        assert same == 1.0
        assert abs(different - 0.0) <= 1e-9
        assert js_divergence(store.get("e0"), store.get("e2")) >= 1.0 - 1e-9


class TestUniformProvider:
    def test_all_uniform(self):
        store = uniform_distributions(["a", "b"], 4)
        assert store.get("a").probs == (0.25, 0.25, 0.25, 0.25)
        assert store.num_classes == 4

    def test_match_score_constant_one(self):
        store = uniform_distributions(["a", "b"], 3)
        assert label_match_score(store.get("a"), store.get("b")) == 1.0
