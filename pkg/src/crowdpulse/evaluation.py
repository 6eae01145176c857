"""Evaluation metrics: Hamming loss, mean F-measure, mean average precision.

Single-label (target, sentiment) predictions are bridged into the
multi-label world by encoding each pair as a two-element label set, so
one metric implementation serves both classifier families.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .classifiers import JointCategory
from .errors import DataError
from .multilabel import LabelSet, LabelSpace, joint_to_labelset


def to_multilabel(pred: JointCategory, space: LabelSpace) -> LabelSet:
    """Encode a joint category as the {target, sentiment} label set."""
    if pred.target not in space.participants:
        raise DataError(f"target {pred.target!r} is not in the label space")
    return joint_to_labelset(pred, space)


def hamming_loss(
    truth: Sequence[LabelSet], pred: Sequence[LabelSet], space: LabelSpace
) -> float:
    """Mean symmetric-difference size, normalized by the label count."""
    if len(truth) != len(pred):
        raise DataError("truth and prediction lists differ in length")
    if not truth:
        raise DataError("cannot score an empty evaluation set")
    total = sum(t.difference_size(p) for t, p in zip(truth, pred))
    return total / (len(truth) * len(space))


@dataclass(frozen=True)
class PrfCounts:
    """Per-query precision and recall, as already-computed ratios."""

    precision: float
    recall: float

    def __post_init__(self):
        for name, v in (("precision", self.precision), ("recall", self.recall)):
            if not 0.0 <= v <= 1.0:
                raise DataError(f"{name} must be in [0, 1], got {v}")

    @property
    def f1(self) -> float:
        if self.precision + self.recall == 0.0:
            return 0.0
        return 2.0 * self.precision * self.recall / (self.precision + self.recall)


def mean_f1(queries: Sequence[PrfCounts]) -> float:
    """Average F-measure over queries; a P=R=0 query contributes 0."""
    if not queries:
        raise DataError("cannot average over zero queries")
    return sum(q.f1 for q in queries) / len(queries)


def pair_counts(
    truth: Sequence[LabelSet], pred: Sequence[LabelSet]
) -> list[PrfCounts]:
    """Build per-example precision/recall from label sets.

    Empty predictions have precision 1 by convention (no false claims);
    empty truths likewise give recall 1.
    """
    if len(truth) != len(pred):
        raise DataError("truth and prediction lists differ in length")
    out = []
    for t, p in zip(truth, pred):
        hit = len(t.intersect(p))
        precision = hit / len(p) if len(p) else 1.0
        recall = hit / len(t) if len(t) else 1.0
        out.append(PrfCounts(precision, recall))
    return out


@dataclass(frozen=True)
class RankedList:
    """One retrieval query: ranked predictions plus the relevant set."""

    query_id: str
    predicted: tuple[str, ...]
    relevant: frozenset[str]

    def __post_init__(self):
        if len(self.predicted) != len(set(self.predicted)):
            raise DataError(f"query {self.query_id!r} repeats a predicted item")


def average_precision(query: RankedList) -> float:
    """Precision-at-k averaged over the relevant items."""
    if not query.relevant:
        raise DataError(f"query {query.query_id!r} has an empty relevant set")
    hits = 0
    total = 0.0
    for k, item in enumerate(query.predicted, start=1):
        if item in query.relevant:
            hits += 1
            total += hits / k
    return total / len(query.relevant)


def mean_average_precision(queries: Sequence[RankedList]) -> float:
    if not queries:
        raise DataError("cannot average over zero queries")
    return sum(average_precision(q) for q in queries) / len(queries)
