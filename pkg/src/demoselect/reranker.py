"""Hybrid reranking: mix semantic similarity with label-distribution match.

The hybrid score is the affine combination ``alpha * s_text +
(1 - alpha) * s_label``.  ``alpha=1`` degenerates to the retrieval order
(similarity only), ``alpha=0`` to pure label-distribution consistency over
the retrieved candidates.  Sorting uses the full tie-break chain
(s_hybrid desc, s_text desc, train_id asc) so the output is a total order.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .divergence import LabelDistribution, label_match_score
from .embeddings import CandidatePool
from .errors import ValidationError
from .validation import check_choice, check_positive_int, check_unit_interval

ORDER_POLICIES = ("score_descending", "score_ascending_best_last")


@dataclass(frozen=True)
class SelectionConfig:
    """Knobs for candidate retrieval and final demonstration selection.

    ``order_policy`` controls in-prompt order: ``score_descending`` puts the
    strongest demonstration first, ``score_ascending_best_last`` (default)
    puts it last, adjacent to the test input.
    """

    alpha: float = 0.5
    k_candidates: int = 30
    n_shot: int = 8
    order_policy: str = "score_ascending_best_last"

    def __post_init__(self):
        check_unit_interval(self.alpha, "alpha")
        check_positive_int(self.k_candidates, "k_candidates")
        check_positive_int(self.n_shot, "n_shot")
        check_choice(self.order_policy, ORDER_POLICIES, "order_policy")
        if self.n_shot > self.k_candidates:
            raise ValidationError(
                f"n_shot ({self.n_shot}) must not exceed k_candidates ({self.k_candidates})"
            )


@dataclass(frozen=True)
class Candidate:
    """A retrieved training example with all three scores attached."""

    train_id: str
    s_text: float
    s_label: float
    s_hybrid: float


def hybrid_score(s_text: float, s_label: float, alpha: float) -> float:
    """Affine mix of similarity and label match; linear in ``alpha``."""
    check_unit_interval(alpha, "alpha")
    check_unit_interval(s_label, "s_label")
    return alpha * s_text + (1.0 - alpha) * s_label


def rerank(
    pool: CandidatePool,
    p_test: LabelDistribution,
    pool_dists: Mapping[str, LabelDistribution],
    config: SelectionConfig,
) -> list[Candidate]:
    """Score every pooled candidate and sort by hybrid score.

    The result is a permutation of the pool.  At ``alpha=1`` the order equals
    the pool's similarity order exactly; at ``alpha=0`` it is descending
    label match.
    """
    candidates = []
    for train_id, s_text in pool.entries:
        dist = pool_dists.get(train_id)
        if dist is None:
            raise ValidationError(f"no label distribution for pool id {train_id!r}")
        s_label = label_match_score(p_test, dist)
        candidates.append(
            Candidate(
                train_id=train_id,
                s_text=s_text,
                s_label=s_label,
                s_hybrid=hybrid_score(s_text, s_label, config.alpha),
            )
        )
    candidates.sort(key=lambda c: (-c.s_hybrid, -c.s_text, c.train_id))
    return candidates


def select_demonstrations(ranked: Sequence[Candidate], config: SelectionConfig) -> list[str]:
    """Pick the top n_shot ids and order them for the prompt.

    ``score_descending`` emits best-first; ``score_ascending_best_last``
    reverses the prefix so the top candidate sits next to the test input.
    """
    if not ranked:
        raise ValidationError("ranked candidate list is empty")
    if config.n_shot > len(ranked):
        raise ValidationError(
            f"n_shot ({config.n_shot}) exceeds the number of candidates ({len(ranked)})"
        )
    ids = [c.train_id for c in ranked[: config.n_shot]]
    if config.order_policy == "score_ascending_best_last":
        ids.reverse()
    return ids
