"""Multi-label classification by an ensemble of label powerset members.

The label universe is the event's participants plus the two sentiment
labels. Each ensemble member owns a random k-subset of that universe,
projects every gold label set onto its subset, and trains an ordinary
single-label classifier whose categories are the observed projections.
At prediction time members vote on the labels they cover and a label is
emitted when its positive-vote ratio strictly exceeds the threshold.

With k equal to the full label count and a single member this reduces to
the plain label powerset method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .classifiers import (
    JointCategory,
    NaiveBayesModel,
    SvmOvrModel,
    predict,
    stack_vectors,
    train_naive_bayes,
    train_svm_ovr,
)
from .corpus import EventRegistry, Sentiment
from .errors import DataError
from .features import SparseVector

POSITIVE_LABEL = "positive"
NEGATIVE_LABEL = "negative"


@dataclass(frozen=True)
class LabelSpace:
    """Ordered label universe: participants first, then the sentiments."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != len(set(self.labels)):
            raise DataError("label space contains duplicate labels")
        if len(self.labels) < 3:
            raise DataError("label space needs at least one participant and both sentiments")
        if self.labels[-2:] != (POSITIVE_LABEL, NEGATIVE_LABEL):
            raise DataError("label space must end with the positive/negative pair")

    @classmethod
    def for_registry(cls, registry: EventRegistry) -> "LabelSpace":
        overlap = {POSITIVE_LABEL, NEGATIVE_LABEL} & set(registry.participants)
        if overlap:
            raise DataError(f"participant names collide with sentiment labels: {sorted(overlap)}")
        return cls(registry.participants + (POSITIVE_LABEL, NEGATIVE_LABEL))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def participants(self) -> tuple[str, ...]:
        return self.labels[:-2]

    @property
    def positive_index(self) -> int:
        return len(self.labels) - 2

    @property
    def negative_index(self) -> int:
        return len(self.labels) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DataError(f"label {label!r} is not in the label space") from None


@dataclass(frozen=True)
class LabelSet:
    """Subset of the label universe as a bitmask over label indices."""

    mask: int = 0

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "LabelSet":
        mask = 0
        for i in indices:
            if i < 0:
                raise DataError("label indices must be non-negative")
            mask |= 1 << i
        return cls(mask)

    @classmethod
    def from_labels(cls, space: LabelSpace, names: Iterable[str]) -> "LabelSet":
        return cls.from_indices(space.index(n) for n in names)

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def indices(self) -> tuple[int, ...]:
        out = []
        mask, i = self.mask, 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return tuple(out)

    def names(self, space: LabelSpace) -> tuple[str, ...]:
        return tuple(space.labels[i] for i in self.indices())

    def intersect(self, other: "LabelSet") -> "LabelSet":
        return LabelSet(self.mask & other.mask)

    def difference_size(self, other: "LabelSet") -> int:
        return (self.mask ^ other.mask).bit_count()


def joint_to_labelset(cat: JointCategory, space: LabelSpace) -> LabelSet:
    sent_idx = (
        space.positive_index if cat.sentiment is Sentiment.POSITIVE else space.negative_index
    )
    return LabelSet.from_indices((space.index(cat.target), sent_idx))


def sample_labelsets(
    n_labels: int, k: int, m: int, seed: int = 1
) -> tuple[tuple[int, ...], ...]:
    """Draw m distinct k-subsets of range(n_labels), reproducibly.

    When m equals the number of possible subsets the draw is exhaustive.
    """
    if not 1 <= k <= n_labels:
        raise DataError(f"labelset size k={k} must be in [1, {n_labels}]")
    total = math.comb(n_labels, k)
    if not 1 <= m <= total:
        raise DataError(f"member count m={m} must be in [1, {total}]")
    if m == total:
        from itertools import combinations

        return tuple(combinations(range(n_labels), k))
    rng = np.random.default_rng(seed)
    chosen: list[tuple[int, ...]] = []
    seen = set()
    while len(chosen) < m:
        subset = tuple(sorted(int(i) for i in rng.choice(n_labels, size=k, replace=False)))
        if subset not in seen:
            seen.add(subset)
            chosen.append(subset)
    return tuple(chosen)


def default_member_count(n_labels: int, k: int) -> int:
    return min(2 * n_labels, math.comb(n_labels, k))


@dataclass
class RakelConfig:
    k: int = 3
    m: int | None = None          # defaults to min(2|L|, C(|L|,k))
    threshold: float = 0.5
    base: str = "svm"             # "svm" or "nb"
    seed: int = 1
    svm_c: float = 1.0
    svm_tol: float = 1e-3
    svm_max_passes: int = 10
    nb_smoothing: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.threshold < 1.0:
            raise DataError("vote threshold must be in [0, 1)")
        if self.base not in ("svm", "nb"):
            raise DataError(f"unknown base classifier {self.base!r}")


@dataclass
class _ConstantModel:
    """Degenerate member whose training projections were all identical."""

    categories: tuple


@dataclass
class LpMember:
    labelset: tuple[int, ...]
    labelset_mask: int
    base: NaiveBayesModel | SvmOvrModel | _ConstantModel

    def predict_mask(self, x: SparseVector) -> int:
        if isinstance(self.base, _ConstantModel):
            return self.base.categories[0]
        cat, _ = predict(self.base, x)
        return cat


@dataclass
class RakelModel:
    space: LabelSpace
    members: list[LpMember]
    threshold: float
    config: RakelConfig
    dimension: int
    coverage: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.zeros(len(self.space), dtype=np.int64)
        for member in self.members:
            for i in member.labelset:
                cov[i] += 1
        self.coverage = cov


def _validate_gold(gold: LabelSet, space: LabelSpace) -> None:
    if len(gold) != 2:
        raise DataError(
            f"gold label set must contain exactly one participant and one "
            f"sentiment, got {len(gold)} labels"
        )
    idx = gold.indices()
    participant = [i for i in idx if i < space.positive_index]
    sentiment = [i for i in idx if i >= space.positive_index]
    if len(participant) != 1 or len(sentiment) != 1:
        raise DataError(
            "gold label set must pair one participant with one sentiment, "
            f"got labels {gold.names(space)}"
        )


def train_rakel(
    data: Sequence[tuple[SparseVector, LabelSet]],
    space: LabelSpace,
    config: RakelConfig | None = None,
) -> RakelModel:
    """Fit the ensemble: sample labelsets, project, train one base each."""
    if not data:
        raise DataError("cannot train on empty data")
    cfg = config or RakelConfig()
    for _, gold in data:
        _validate_gold(gold, space)
    n_labels = len(space)
    m = cfg.m if cfg.m is not None else default_member_count(n_labels, cfg.k)
    labelsets = sample_labelsets(n_labels, cfg.k, m, cfg.seed)
    xs = [x for x, _ in data]
    gram = None
    if cfg.base == "svm":
        X = stack_vectors(xs)
        gram = np.asarray((X @ X.T).todense(), dtype=np.float64)
    members = []
    for member_idx, labelset in enumerate(labelsets):
        ls_mask = 0
        for i in labelset:
            ls_mask |= 1 << i
        projected = [(x, gold.mask & ls_mask) for x, gold in data]
        cats = tuple(sorted({c for _, c in projected}))
        if len(cats) == 1:
            base: NaiveBayesModel | SvmOvrModel | _ConstantModel = _ConstantModel(cats)
        elif cfg.base == "nb":
            base = train_naive_bayes(projected, smoothing=cfg.nb_smoothing, categories=cats)
        else:
            base = train_svm_ovr(
                projected,
                C=cfg.svm_c,
                tol=cfg.svm_tol,
                max_passes=cfg.svm_max_passes,
                seed=(cfg.seed, member_idx),
                categories=cats,
                gram=gram,
            )
        members.append(LpMember(labelset=labelset, labelset_mask=ls_mask, base=base))
    return RakelModel(
        space=space,
        members=members,
        threshold=cfg.threshold,
        config=cfg,
        dimension=data[0][0].dimension,
    )


def predict_rakel(model: RakelModel, x: SparseVector) -> tuple[LabelSet, np.ndarray]:
    """Vote the members; returns (label set, per-label vote ratio).

    A label's ratio is positive votes over the number of members covering
    it, and 0 when nothing covers it. Inclusion requires ratio strictly
    above the threshold.
    """
    votes = np.zeros(len(model.space), dtype=np.int64)
    for member in model.members:
        mask = member.predict_mask(x)
        for i in member.labelset:
            if mask >> i & 1:
                votes[i] += 1
    ratios = np.divide(
        votes,
        model.coverage,
        out=np.zeros(len(model.space), dtype=np.float64),
        where=model.coverage > 0,
    )
    selected = LabelSet.from_indices(
        i for i in range(len(model.space)) if ratios[i] > model.threshold
    )
    return selected, ratios


def to_pair(
    pred: LabelSet, ratios: np.ndarray, space: LabelSpace
) -> JointCategory:
    """Collapse a multi-label prediction to one (target, sentiment) pair.

    The target is the participant with the highest vote ratio and the
    sentiment is the better supported of the two sentiment labels; ties
    resolve to the earlier label in the space ordering.
    """
    if len(ratios) != len(space):
        raise DataError("ratio vector length does not match the label space")
    participant_ratios = ratios[: space.positive_index]
    target_idx = int(np.argmax(participant_ratios))
    sentiment = (
        Sentiment.POSITIVE
        if ratios[space.positive_index] >= ratios[space.negative_index]
        else Sentiment.NEGATIVE
    )
    return JointCategory(space.labels[target_idx], sentiment)
