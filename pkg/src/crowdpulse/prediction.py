"""Turning per-post sentiment into event-level outcome signals.

Predicted (target, sentiment) pairs are tallied per participant; a
participant's score is its share of positive mentions. Scores rank the
field, min-max normalized for display, and the same tallies bucketed
over time give trend series and a before/after announcement split.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .classifiers import JointCategory
from .corpus import EventRegistry, Sentiment
from .errors import DataError

SECONDS = {"hour": 3600, "day": 86400}

Prediction = tuple[JointCategory, int]  # (pair, unix timestamp)


@dataclass
class SentimentTally:
    """Positive/negative mention counts keyed by target."""

    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def add(self, target: str, sentiment: Sentiment) -> None:
        pos, neg = self.counts.get(target, (0, 0))
        if sentiment is Sentiment.POSITIVE:
            pos += 1
        else:
            neg += 1
        self.counts[target] = (pos, neg)

    def mentions(self, target: str) -> int:
        pos, neg = self.counts.get(target, (0, 0))
        return pos + neg

    def raw_score(self, target: str) -> float:
        pos, neg = self.counts.get(target, (0, 0))
        if pos + neg == 0:
            return 0.0
        return pos / (pos + neg)


def aggregate(predictions: Sequence[Prediction]) -> SentimentTally:
    tally = SentimentTally()
    for pair, _ in predictions:
        tally.add(pair.target, pair.sentiment)
    return tally


@dataclass(frozen=True)
class OutcomeEntry:
    target: str
    raw: float
    normalized: float
    positive: int
    negative: int


@dataclass
class RankedOutcome:
    entries: list[OutcomeEntry]   # best first
    k: int                        # how many count as selected

    @property
    def selected(self) -> tuple[str, ...]:
        return tuple(e.target for e in self.entries[: self.k])


def rank_outcome(
    tally: SentimentTally,
    registry: EventRegistry,
    mode: str = "half_list",
    top_n: int | None = None,
) -> RankedOutcome:
    """Rank every registry participant by positive-mention share.

    Ties keep registry order. ``half_list`` selects the top half of the
    field (at least one); ``top_n`` selects a fixed cut. Normalized
    scores are min-max over the field, all zero when the field is flat.
    """
    if not any(tally.mentions(p) for p in registry.participants):
        raise DataError("tally has no mentions of any registry participant")
    raws = {p: tally.raw_score(p) for p in registry.participants}
    lo, hi = min(raws.values()), max(raws.values())
    spread = hi - lo
    order = sorted(
        registry.participants,
        key=lambda p: (-raws[p], registry.participants.index(p)),
    )
    entries = []
    for p in order:
        pos, neg = tally.counts.get(p, (0, 0))
        norm = 0.0 if spread == 0.0 else (raws[p] - lo) / spread
        entries.append(OutcomeEntry(p, raws[p], norm, pos, neg))
    n = len(registry.participants)
    if mode == "half_list":
        k = max(1, n // 2)
    elif mode == "top_n":
        if top_n is None or top_n < 1:
            raise DataError("top_n mode needs a positive cut size")
        k = min(n, top_n)
    else:
        raise DataError(f"unknown ranking mode {mode!r}")
    return RankedOutcome(entries=entries, k=k)


@dataclass(frozen=True)
class TrendCell:
    positive: int
    negative: int

    @property
    def score(self) -> float | None:
        total = self.positive + self.negative
        if total == 0:
            return None
        return self.positive / total


@dataclass(frozen=True)
class TrendBucket:
    key: str
    start: int
    end: int                       # exclusive; -1 for an open final bucket
    volume: int
    cells: dict[str, TrendCell]    # keyed by target


@dataclass
class TrendSeries:
    bucketing: str
    targets: tuple[str, ...]
    buckets: list[TrendBucket]


def _fixed_buckets(
    predictions: Sequence[Prediction], width: int, targets: tuple[str, ...], name: str
) -> TrendSeries:
    if not predictions:
        return TrendSeries(bucketing=name, targets=targets, buckets=[])
    stamps = [ts for _, ts in predictions]
    first = min(stamps) // width
    last = max(stamps) // width
    grouped: dict[int, list[JointCategory]] = {b: [] for b in range(first, last + 1)}
    for pair, ts in predictions:
        grouped[ts // width].append(pair)
    buckets = []
    for b in range(first, last + 1):
        tallies = {t: [0, 0] for t in targets}
        for pair in grouped[b]:
            slot = tallies.setdefault(pair.target, [0, 0])
            slot[0 if pair.sentiment is Sentiment.POSITIVE else 1] += 1
        buckets.append(
            TrendBucket(
                key=str(b * width),
                start=b * width,
                end=(b + 1) * width,
                volume=len(grouped[b]),
                cells={t: TrendCell(pos, neg) for t, (pos, neg) in tallies.items()},
            )
        )
    return TrendSeries(bucketing=name, targets=targets, buckets=buckets)


def trend_series(
    predictions: Sequence[Prediction],
    bucketing: str,
    registries: EventRegistry | Sequence[EventRegistry],
) -> TrendSeries:
    """Bucket predictions over time.

    ``hour`` and ``day`` use fixed UTC-aligned windows spanning the data
    (interior empty buckets included); ``event`` uses event start times
    as boundaries, predictions before the first event joining the first
    bucket and the last bucket open-ended.
    """
    if isinstance(registries, EventRegistry):
        registries = [registries]
    if not registries:
        raise DataError("trend bucketing needs at least one event registry")
    targets = tuple(dict.fromkeys(p for r in registries for p in r.participants))
    if bucketing in SECONDS:
        return _fixed_buckets(predictions, SECONDS[bucketing], targets, bucketing)
    if bucketing != "event":
        raise DataError(f"unknown bucketing {bucketing!r}")
    events = sorted(registries, key=lambda r: r.event_time)
    starts = [r.event_time for r in events]
    if len(set(starts)) != len(starts):
        raise DataError("event bucketing needs distinct event start times")
    grouped: dict[int, list[JointCategory]] = {i: [] for i in range(len(events))}
    for pair, ts in predictions:
        idx = 0
        for i, s in enumerate(starts):
            if ts >= s:
                idx = i
        grouped[idx].append(pair)
    buckets = []
    for i, reg in enumerate(events):
        tallies = {t: [0, 0] for t in targets}
        for pair in grouped[i]:
            slot = tallies.setdefault(pair.target, [0, 0])
            slot[0 if pair.sentiment is Sentiment.POSITIVE else 1] += 1
        end = starts[i + 1] if i + 1 < len(events) else -1
        buckets.append(
            TrendBucket(
                key=reg.event_id,
                start=starts[i],
                end=end,
                volume=len(grouped[i]),
                cells={t: TrendCell(pos, neg) for t, (pos, neg) in tallies.items()},
            )
        )
    return TrendSeries(bucketing="event", targets=targets, buckets=buckets)


@dataclass(frozen=True)
class InfluenceEntry:
    target: str
    before: float | None          # None when a side has no mentions
    after: float | None
    delta: float | None

    @property
    def defined(self) -> bool:
        return self.delta is not None


def expert_influence(
    predictions: Sequence[Prediction], registry: EventRegistry
) -> dict[str, InfluenceEntry]:
    """Split positive-share per target at the expert announcement time.

    Posts strictly before the announcement form the before side; the
    announcement instant itself counts as after. Sides with no mentions
    leave the corresponding score and the delta undefined.
    """
    if registry.expert_announcement_time is None:
        raise DataError(
            f"registry {registry.event_id!r} has no expert announcement time"
        )
    split = registry.expert_announcement_time
    before = aggregate([p for p in predictions if p[1] < split])
    after = aggregate([p for p in predictions if p[1] >= split])
    out = {}
    for target in registry.participants:
        b = before.raw_score(target) if before.mentions(target) else None
        a = after.raw_score(target) if after.mentions(target) else None
        delta = (a - b) if a is not None and b is not None else None
        out[target] = InfluenceEntry(target, b, a, delta)
    return out
