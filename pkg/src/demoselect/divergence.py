"""Probability-distribution arithmetic for label alignment scoring.

All divergences here use base-2 logarithms, so the Jensen-Shannon divergence
of any two distributions lies in [0, 1] and the matching score ``1 - JSD``
needs no further normalization before it is mixed with cosine similarities.

Inputs are assumed to be valid distributions; cleanup of raw model output
(clamping, renormalization) happens once, at the provider boundary in
:mod:`demoselect.providers`, never here.  Every function is pure and safe to
call from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AbsoluteContinuityError, ClassCountError, ValidationError
from .validation import check_finite_floats

# Absolute tolerance on sum(probs) == 1 for a vector to count as a distribution.
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LabelDistribution:
    """A probability vector over the task's class indices.

    Entries must be non-negative and sum to 1 within ``SUM_TOLERANCE``; at
    least two classes are required.  Instances are immutable and hashable.
    """

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = check_finite_floats(self.probs, "probs")
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise ValidationError(f"a distribution needs at least 2 classes, got {len(probs)}")
        for c, v in enumerate(probs):
            if v < 0.0:
                raise ValidationError(f"probs[{c}] is negative ({v!r})")
        total = math.fsum(probs)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"probs must sum to 1 within {SUM_TOLERANCE}, got {total!r}")

    @property
    def num_classes(self) -> int:
        return len(self.probs)

    def __getitem__(self, c: int) -> float:
        return self.probs[c]

    @classmethod
    def uniform(cls, num_classes: int) -> "LabelDistribution":
        if num_classes < 2:
            raise ValidationError(f"num_classes must be >= 2, got {num_classes}")
        return cls(tuple(1.0 / num_classes for _ in range(num_classes)))


def _check_same_classes(p: LabelDistribution, q: LabelDistribution) -> None:
    if p.num_classes != q.num_classes:
        raise ClassCountError(
            f"class counts differ: {p.num_classes} vs {q.num_classes}"
        )


def midpoint(p: LabelDistribution, q: LabelDistribution) -> LabelDistribution:
    """Elementwise average of two distributions over the same classes."""
    _check_same_classes(p, q)
    return LabelDistribution(tuple((a + b) / 2.0 for a, b in zip(p.probs, q.probs)))


def kl_divergence(p: LabelDistribution, m: LabelDistribution) -> float:
    """KL divergence ``sum_c p[c] * log2(p[c] / m[c])`` in bits.

    Terms with ``p[c] == 0`` contribute zero by convention.  A positive
    ``p[c]`` over ``m[c] == 0`` has no finite value and is rejected; this
    cannot happen when ``m`` is a midpoint involving ``p``.
    """
    _check_same_classes(p, m)
    total = 0.0
    for c, (a, b) in enumerate(zip(p.probs, m.probs)):
        if a == 0.0:
            continue
        if b == 0.0:
            raise AbsoluteContinuityError(
                f"kl_divergence undefined: p[{c}] > 0 but reference[{c}] == 0"
            )
        total += a * math.log2(a / b)
    # Non-negative by Gibbs' inequality; guard against rounding of cancelling terms.
    return total if total > 0.0 else 0.0


def js_divergence(p: LabelDistribution, q: LabelDistribution) -> float:
    """Jensen-Shannon divergence in bits, symmetric and bounded to [0, 1].

    Computed as the average of the two KL divergences to the midpoint
    distribution, which removes the directional bias of plain KL.
    """
    m = midpoint(p, q)
    value = 0.5 * (kl_divergence(p, m) + kl_divergence(q, m))
    # The mathematical value is in [0, 1] with base-2 logs; clamp the at most
    # 1-2 ulp of rounding excess so the documented bound always holds.
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def label_match_score(p: LabelDistribution, q: LabelDistribution) -> float:
    """Label distribution matching score ``1 - JSD`` in [0, 1].

    1 means perfect alignment (zero divergence), 0 means maximally disjoint
    distributions.  The complement identity ``score + jsd == 1`` holds
    exactly in IEEE double precision for any jsd in [0, 1].
    """
    return 1.0 - js_divergence(p, q)
