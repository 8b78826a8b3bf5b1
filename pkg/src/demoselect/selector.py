"""scikit-learn style estimator wrapping retrieval plus reranking.

``DemonstrationSelector`` follows the usual estimator contract: constructor
stores hyperparameters untouched, ``fit`` binds the demonstration pool and
validates it, learned state lives in trailing-underscore attributes, and
``get_params`` / ``set_params`` come from ``BaseEstimator`` so the selector
slots into pipelines and grid searches.
"""

from __future__ import annotations

from collections.abc import Mapping

from sklearn.base import BaseEstimator

from .divergence import LabelDistribution
from .embeddings import EmbeddingStore, EmbeddingVector, retrieve_topk
from .errors import ConfigError, ValidationError
from .providers import LabelDistributionStore
from .reranker import Candidate, SelectionConfig, rerank, select_demonstrations


class DemonstrationSelector(BaseEstimator):
    """Select in-context demonstrations by similarity and label alignment.

    Parameters mirror :class:`demoselect.reranker.SelectionConfig`.  With
    ``alpha=1`` the selector never touches label distributions and can be
    fitted without them.
    """

    def __init__(
        self,
        alpha: float = 0.5,
        k_candidates: int = 30,
        n_shot: int = 8,
        order_policy: str = "score_ascending_best_last",
    ):
        self.alpha = alpha
        self.k_candidates = k_candidates
        self.n_shot = n_shot
        self.order_policy = order_policy

    def _config(self) -> SelectionConfig:
        return SelectionConfig(
            alpha=self.alpha,
            k_candidates=self.k_candidates,
            n_shot=self.n_shot,
            order_policy=self.order_policy,
        )

    def fit(
        self,
        embeddings: EmbeddingStore,
        distributions: LabelDistributionStore | Mapping[str, LabelDistribution] | None = None,
    ) -> "DemonstrationSelector":
        """Bind the demonstration pool.

        ``embeddings`` maps pool ids to vectors; ``distributions`` maps the
        same ids to label distributions and may be omitted only when
        ``alpha == 1``.
        """
        config = self._config()  # validates hyperparameters
        if not isinstance(embeddings, EmbeddingStore):
            raise ValidationError("embeddings must be an EmbeddingStore")
        if distributions is not None:
            lookup = (
                distributions
                if isinstance(distributions, LabelDistributionStore)
                else dict(distributions)
            )
            for eid in embeddings.ids:
                if eid not in lookup:
                    raise ValidationError(f"no label distribution for pool id {eid!r}")
        elif config.alpha != 1.0:
            raise ConfigError("distributions are required unless alpha == 1")
        else:
            lookup = None
        self.store_ = embeddings
        self.distributions_ = lookup
        return self

    def _check_fitted(self):
        if not hasattr(self, "store_"):
            raise ConfigError("selector is not fitted; call fit() first")

    def rank(
        self,
        query: EmbeddingVector,
        query_distribution: LabelDistribution | None = None,
        query_id: str = "query",
        exclude_id: str | None = None,
    ) -> list[Candidate]:
        """Retrieve and rerank the candidate pool for one query."""
        self._check_fitted()
        config = self._config()
        k = config.k_candidates + (1 if exclude_id is not None else 0)
        pool = retrieve_topk(query_id, query, self.store_, k)
        entries = tuple(e for e in pool.entries if e[0] != exclude_id)[: config.k_candidates]
        pool = type(pool)(test_id=pool.test_id, entries=entries)
        if config.alpha == 1.0 and query_distribution is None:
            return [
                Candidate(train_id=tid, s_text=s, s_label=0.0, s_hybrid=s)
                for tid, s in pool.entries
            ]
        if query_distribution is None:
            raise ConfigError("query_distribution is required unless alpha == 1")
        if self.distributions_ is None:
            raise ConfigError("selector was fitted without distributions")
        dists = (
            self.distributions_.subset(pool.ids)
            if isinstance(self.distributions_, LabelDistributionStore)
            else self.distributions_
        )
        return rerank(pool, query_distribution, dists, config)

    def select(
        self,
        query: EmbeddingVector,
        query_distribution: LabelDistribution | None = None,
        query_id: str = "query",
        exclude_id: str | None = None,
    ) -> list[str]:
        """Return the n_shot demonstration ids in prompt order."""
        ranked = self.rank(query, query_distribution, query_id, exclude_id)
        return select_demonstrations(ranked, self._config())
