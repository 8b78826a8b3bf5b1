"""The sklearn-style DemonstrationSelector estimator."""

import numpy as np
import pytest

from demoselect import (
    ConfigError,
    DemonstrationSelector,
    EmbeddingStore,
    EmbeddingVector,
    LabelDistribution,
    LabelDistributionStore,
    ValidationError,
    one_hot_oracle,
)


@pytest.fixture
def fitted():
    rng = np.random.default_rng(2)
    store = EmbeddingStore({f"d{i}": tuple(rng.standard_normal(4)) for i in range(20)})
    dists = LabelDistributionStore(
        {
            eid: LabelDistribution((0.9, 0.1) if i % 2 else (0.1, 0.9))
            for i, eid in enumerate(store.ids)
        }
    )
    selector = DemonstrationSelector(alpha=0.5, k_candidates=10, n_shot=4)
    return selector.fit(store, dists), store


class TestEstimatorContract:
    def test_get_params(self):
        selector = DemonstrationSelector(alpha=0.3, k_candidates=12, n_shot=2)
        params = selector.get_params()
        assert params["alpha"] == 0.3
        assert params["k_candidates"] == 12
        assert params["n_shot"] == 2
        assert params["order_policy"] == "score_ascending_best_last"

    def test_set_params_round_trip(self):
        selector = DemonstrationSelector().set_params(alpha=0.9, n_shot=3)
        assert selector.alpha == 0.9
        assert selector.n_shot == 3

    def test_fit_returns_self(self, fitted):
        selector, _ = fitted
        assert isinstance(selector, DemonstrationSelector)
        assert hasattr(selector, "store_")

    def test_unfitted_raises(self):
        selector = DemonstrationSelector()
        with pytest.raises(ConfigError):
            selector.rank(EmbeddingVector((1.0, 0.0, 0.0, 0.0)))

    def test_clone_compatible(self):
        from sklearn.base import clone

        selector = DemonstrationSelector(alpha=0.7)
        cloned = clone(selector)
        assert cloned.alpha == 0.7


class TestSelection:
    def test_rank_returns_full_pool(self, fitted):
        selector, _ = fitted
        ranked = selector.rank(
            EmbeddingVector((1.0, 0.2, -0.3, 0.5)),
            LabelDistribution((0.1, 0.9)),
        )
        assert len(ranked) == 10
        scores = [c.s_hybrid for c in ranked]
        assert scores == sorted(scores, reverse=True)

    def test_select_returns_n_shot(self, fitted):
        selector, _ = fitted
        ids = selector.select(
            EmbeddingVector((1.0, 0.2, -0.3, 0.5)),
            LabelDistribution((0.1, 0.9)),
        )
        assert len(ids) == 4

    def test_exclude_id_removed(self, fitted):
        selector, store = fitted
        target = store.ids[0]
        ranked = selector.rank(
            store.vector(target),
            LabelDistribution((0.5, 0.5)),
            exclude_id=target,
        )
        assert target not in [c.train_id for c in ranked]
        assert len(ranked) == 10

    def test_alpha_one_needs_no_distributions(self):
        rng = np.random.default_rng(4)
        store = EmbeddingStore({f"d{i}": tuple(rng.standard_normal(3)) for i in range(6)})
        selector = DemonstrationSelector(alpha=1.0, k_candidates=5, n_shot=2).fit(store)
        ids = selector.select(EmbeddingVector((0.5, 0.5, 0.5)))
        assert len(ids) == 2

    def test_alpha_below_one_requires_distributions_at_fit(self):
        rng = np.random.default_rng(4)
        store = EmbeddingStore({f"d{i}": tuple(rng.standard_normal(3)) for i in range(6)})
        with pytest.raises(ConfigError):
            DemonstrationSelector(alpha=0.5).fit(store)

    def test_missing_pool_distribution_at_fit(self):
        store = EmbeddingStore({"a": (1.0, 0.0), "b": (0.0, 1.0)})
        dists = {"a": LabelDistribution((0.5, 0.5))}
        with pytest.raises(ValidationError, match="'b'"):
            DemonstrationSelector(k_candidates=2, n_shot=1).fit(store, dists)

    def test_label_alignment_dominates_at_half_alpha(self, small_bundle):
        store = small_bundle.pool_embeddings
        dists = one_hot_oracle(small_bundle.pool, "faithful")
        selector = DemonstrationSelector(alpha=0.5, k_candidates=10, n_shot=2).fit(store, dists)
        test_dists = one_hot_oracle(small_bundle.test, "faithful")
        for ex in small_bundle.test.examples:
            ranked = selector.rank(
                small_bundle.test_embeddings.vector(ex.id), test_dists.get(ex.id), query_id=ex.id
            )
            by_id = {e.id: e for e in small_bundle.pool.examples}
            same = [c for c in ranked if by_id[c.train_id].label == ex.label]
            # any same-label candidate outranks a different-label one whose
            # similarity advantage is below the 0.5 label-score gap
            for cand in ranked:
                if by_id[cand.train_id].label != ex.label and same:
                    best_same = same[0]
                    if cand.s_text - best_same.s_text < 0.5 * (best_same.s_label - cand.s_label) - 1e-12:
                        assert best_same.s_hybrid > cand.s_hybrid
