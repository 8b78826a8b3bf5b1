"""Hybrid scoring and reranking: degenerate alphas, tie-breaks, permutation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demoselect import (
    CandidatePool,
    LabelDistribution,
    SelectionConfig,
    ValidationError,
    hybrid_score,
    label_match_score,
    rerank,
    select_demonstrations,
)


def dist(*probs):
    return LabelDistribution(tuple(probs))


def make_pool(entries):
    return CandidatePool(test_id="q", entries=tuple(entries))


def random_case(rng, n=12, k_classes=3):
    sims = np.sort(rng.uniform(-0.2, 1.0, n))[::-1]
    ids = [f"d{i:02d}" for i in range(n)]
    pool = make_pool(list(zip(ids, (float(s) for s in sims))))
    def rand_dist():
        raw = rng.random(k_classes) + 1e-6
        raw /= raw.sum()
        return LabelDistribution(tuple(float(v) for v in raw))
    dists = {eid: rand_dist() for eid in ids}
    return pool, rand_dist(), dists


class TestHybridScore:
    def test_midpoint_mix(self):
        assert hybrid_score(0.9, 0.7, 0.5) == pytest.approx(0.8)

    def test_alpha_one_is_similarity(self):
        assert hybrid_score(0.9, 0.7, 1.0) == 0.9

    def test_alpha_zero_is_label(self):
        assert hybrid_score(0.9, 0.7, 0.0) == 0.7

    def test_alpha_out_of_range(self):
        with pytest.raises(ValidationError):
            hybrid_score(0.5, 0.5, 1.5)

    def test_s_label_out_of_range(self):
        with pytest.raises(ValidationError):
            hybrid_score(0.5, 1.5, 0.5)

    @given(
        st.floats(-1.0, 1.0, allow_nan=False),
        st.floats(0.0, 1.0, allow_nan=False),
    )
    @settings(max_examples=100)
    def test_linearity_at_five_alphas(self, s_text, s_label):
        for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
            assert hybrid_score(s_text, s_label, alpha) == alpha * s_text + (1.0 - alpha) * s_label


class TestSelectionConfig:
    def test_defaults(self):
        cfg = SelectionConfig()
        assert (cfg.alpha, cfg.k_candidates, cfg.n_shot) == (0.5, 30, 8)

    def test_n_shot_exceeds_candidates(self):
        with pytest.raises(ValidationError):
            SelectionConfig(n_shot=31, k_candidates=30)

    def test_alpha_range(self):
        with pytest.raises(ValidationError):
            SelectionConfig(alpha=-0.1)

    def test_unknown_policy(self):
        with pytest.raises(ValidationError):
            SelectionConfig(order_policy="shuffled")


class TestRerank:
    def test_spec_example_order(self):
        pool = make_pool([("c1", 0.95), ("c2", 0.90), ("c3", 0.85)])
        p_test = dist(1.0, 0.0)
        dists = {
            "c1": dist(0.0, 1.0),   # s_label 0.0 -> hybrid 0.475
            "c2": dist(1.0, 0.0),   # s_label 1.0 -> hybrid 0.95
            "c3": dist(1.0, 0.0),   # s_label 1.0 -> hybrid 0.925
        }
        ranked = rerank(pool, p_test, dists, SelectionConfig(alpha=0.5, k_candidates=3, n_shot=2))
        assert [c.train_id for c in ranked] == ["c2", "c3", "c1"]
        assert ranked[0].s_hybrid == pytest.approx(0.95)
        assert ranked[1].s_hybrid == pytest.approx(0.925)
        assert ranked[2].s_hybrid == pytest.approx(0.475)

    def test_alpha_one_reproduces_pool_order_exactly(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            pool, p_test, dists = random_case(rng)
            cfg = SelectionConfig(alpha=1.0, k_candidates=12, n_shot=4)
            ranked = rerank(pool, p_test, dists, cfg)
            assert [c.train_id for c in ranked] == list(pool.ids)
            for cand, (_, s_text) in zip(ranked, pool.entries):
                assert cand.s_hybrid == s_text

    def test_alpha_zero_sorts_by_label_match(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            pool, p_test, dists = random_case(rng)
            cfg = SelectionConfig(alpha=0.0, k_candidates=12, n_shot=4)
            ranked = rerank(pool, p_test, dists, cfg)
            expected = sorted(
                pool.entries,
                key=lambda e: (-label_match_score(p_test, dists[e[0]]), -e[1], e[0]),
            )
            assert [c.train_id for c in ranked] == [eid for eid, _ in expected]

    def test_missing_distribution_names_id(self):
        pool = make_pool([("a", 0.9), ("b", 0.8)])
        with pytest.raises(ValidationError, match="'b'"):
            rerank(pool, dist(0.5, 0.5), {"a": dist(0.5, 0.5)}, SelectionConfig(k_candidates=2, n_shot=1))

    def test_permutation_preserved(self):
        rng = np.random.default_rng(8)
        pool, p_test, dists = random_case(rng)
        ranked = rerank(pool, p_test, dists, SelectionConfig(k_candidates=12, n_shot=4))
        assert sorted(c.train_id for c in ranked) == sorted(pool.ids)

    def test_rank_order_changes_at_most_once_per_pair(self):
        # affine scores cross at most once, so a dominated/dominating pair
        # can swap relative order at exactly one alpha crossover
        rng = np.random.default_rng(13)
        pool, p_test, dists = random_case(rng, n=8)
        alphas = [i / 20 for i in range(21)]
        pairs = {}
        for alpha in alphas:
            cfg = SelectionConfig(alpha=alpha, k_candidates=8, n_shot=2)
            order = [c.train_id for c in rerank(pool, p_test, dists, cfg)]
            position = {tid: i for i, tid in enumerate(order)}
            for i, a in enumerate(pool.ids):
                for b in pool.ids[i + 1 :]:
                    key = (a, b)
                    state = position[a] < position[b]
                    pairs.setdefault(key, []).append(state)
        for states in pairs.values():
            flips = sum(1 for x, y in zip(states, states[1:]) if x != y)
            assert flips <= 1

    def test_determinism(self):
        rng = np.random.default_rng(21)
        pool, p_test, dists = random_case(rng)
        cfg = SelectionConfig(k_candidates=12, n_shot=4)
        a = rerank(pool, p_test, dists, cfg)
        b = rerank(pool, p_test, dists, cfg)
        assert a == b


class TestSelectDemonstrations:
    def test_descending_prefix(self):
        from demoselect import Candidate

        ranked = [Candidate(t, 0.9, 1.0, 0.95) for t in "abcd"]
        cfg = SelectionConfig(n_shot=2, k_candidates=4, order_policy="score_descending")
        assert select_demonstrations(ranked, cfg) == ["a", "b"]

    def test_best_last_reverses(self):
        from demoselect import Candidate

        ranked = [Candidate(t, 0.9, 1.0, 0.95) for t in "abcd"]
        cfg = SelectionConfig(n_shot=2, k_candidates=4, order_policy="score_ascending_best_last")
        assert select_demonstrations(ranked, cfg) == ["b", "a"]

    def test_full_length_permutation(self):
        from demoselect import Candidate

        ranked = [Candidate(t, 0.9, 1.0, 0.95) for t in "abcd"]
        cfg = SelectionConfig(n_shot=4, k_candidates=4, order_policy="score_ascending_best_last")
        assert select_demonstrations(ranked, cfg) == ["d", "c", "b", "a"]

    def test_n_shot_too_large(self):
        from demoselect import Candidate

        ranked = [Candidate("a", 0.9, 1.0, 0.95)]
        cfg = SelectionConfig(n_shot=2, k_candidates=4)
        with pytest.raises(ValidationError):
            select_demonstrations(ranked, cfg)

    def test_empty_rejected(self):
        cfg = SelectionConfig(n_shot=1, k_candidates=4)
        with pytest.raises(ValidationError):
            select_demonstrations([], cfg)
