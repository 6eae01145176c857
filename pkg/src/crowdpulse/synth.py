"""Synthetic annotated corpora with planted, recoverable structure.

Each participant gets a positive-mention rate, a small signature
vocabulary, and a share of per-bucket volume. Texts mix signature words
with sentiment words matching the drawn polarity, so feature-based
classifiers can recover the labels and the aggregate positive shares
converge to the planted rates. An optional shock shifts one
participant's rate from a given timestamp onward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import AnnotatedTweet, EventRegistry, Sentiment, Tweet
from .errors import DataError

_POSITIVE_WORDS = (
    "great", "win", "strong", "love", "best", "brilliant", "favorite", "cheer",
)
_NEGATIVE_WORDS = (
    "bad", "lose", "weak", "hate", "worst", "awful", "boring", "doubt",
)
_NOISE_WORDS = (
    "the", "a", "tonight", "really", "just", "watch", "show", "this", "so", "now",
)


@dataclass(frozen=True)
class Shock:
    target: str
    time: int
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise DataError("shock rate must be in [0, 1]")


@dataclass
class SynthSpec:
    participants: tuple[str, ...]
    positive_rates: tuple[float, ...]
    volumes: tuple[int, ...]                      # per bucket
    signature_words: tuple[tuple[str, ...], ...]  # per participant
    bucket_seconds: int = 3600
    start_time: int = 0
    shock: Shock | None = None
    seed: int = 1
    event_id: str = "synth"
    positive_words: tuple[str, ...] = _POSITIVE_WORDS
    negative_words: tuple[str, ...] = _NEGATIVE_WORDS
    noise_words: tuple[str, ...] = _NOISE_WORDS
    signature_per_tweet: int = 2
    sentiment_per_tweet: int = 2
    noise_range: tuple[int, int] = (1, 2)         # inclusive draw bounds

    def __post_init__(self):
        if not self.participants:
            raise DataError("need at least one participant")
        if len(self.positive_rates) != len(self.participants):
            raise DataError("one positive rate per participant required")
        if len(self.signature_words) != len(self.participants):
            raise DataError("one signature word list per participant required")
        for r in self.positive_rates:
            if not 0.0 <= r <= 1.0:
                raise DataError(f"positive rate {r} outside [0, 1]")
        for words in self.signature_words:
            if not words:
                raise DataError("signature word lists must be non-empty")
        if any(v < 0 for v in self.volumes):
            raise DataError("bucket volumes must be non-negative")
        if self.bucket_seconds < 1:
            raise DataError("bucket width must be at least one second")
        if self.shock is not None and self.shock.target not in self.participants:
            raise DataError(f"shock target {self.shock.target!r} is not a participant")
        if self.signature_per_tweet < 1 or self.sentiment_per_tweet < 1:
            raise DataError("each tweet needs at least one signature and one sentiment word")
        lo, hi = self.noise_range
        if not 0 <= lo <= hi:
            raise DataError(f"noise range {self.noise_range} must satisfy 0 <= lo <= hi")

    def registry(self) -> EventRegistry:
        return EventRegistry(
            event_id=self.event_id,
            participants=self.participants,
            event_time=self.start_time,
            expert_announcement_time=self.shock.time if self.shock else None,
        )


def load_synth_spec(path: str | Path) -> SynthSpec:
    """Read a spec from JSON; signature words keyed by participant name."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read synthetic spec {path}: {exc}") from exc
    try:
        participants = tuple(payload["participants"])
        sig_map = payload["signature_words"]
        spec = SynthSpec(
            participants=participants,
            positive_rates=tuple(payload["positive_rates"]),
            volumes=tuple(payload["volumes"]),
            signature_words=tuple(tuple(sig_map[p]) for p in participants),
            bucket_seconds=payload.get("bucket_seconds", 3600),
            start_time=payload.get("start_time", 0),
            shock=Shock(**payload["shock"]) if payload.get("shock") else None,
            seed=payload.get("seed", 1),
            event_id=payload.get("event_id", "synth"),
            signature_per_tweet=payload.get("signature_per_tweet", 2),
            sentiment_per_tweet=payload.get("sentiment_per_tweet", 2),
            noise_range=tuple(payload.get("noise_range", (1, 2))),
        )
    except KeyError as exc:
        raise DataError(f"synthetic spec missing field {exc}") from exc
    return spec


def generate_synthetic(spec: SynthSpec) -> list[AnnotatedTweet]:
    """Draw the corpus; same spec and seed give identical output.

    Bucket b holds exactly ``volumes[b]`` posts with timestamps inside
    [start + b*width, start + (b+1)*width).
    """
    rng = np.random.default_rng(spec.seed)
    out: list[AnnotatedTweet] = []
    serial = 0
    n = len(spec.participants)
    for b, volume in enumerate(spec.volumes):
        bucket_start = spec.start_time + b * spec.bucket_seconds
        for _ in range(volume):
            idx = int(rng.integers(n))
            target = spec.participants[idx]
            ts = bucket_start + int(rng.integers(spec.bucket_seconds))
            rate = spec.positive_rates[idx]
            if spec.shock and target == spec.shock.target and ts >= spec.shock.time:
                rate = spec.shock.rate
            positive = bool(rng.random() < rate)
            sentiment = Sentiment.POSITIVE if positive else Sentiment.NEGATIVE
            bank = spec.positive_words if positive else spec.negative_words
            sig = spec.signature_words[idx]
            words = [
                sig[int(rng.integers(len(sig)))]
                for _ in range(spec.signature_per_tweet)
            ]
            words += [
                bank[int(rng.integers(len(bank)))]
                for _ in range(spec.sentiment_per_tweet)
            ]
            lo, hi = spec.noise_range
            for _ in range(int(rng.integers(lo, hi + 1)) if hi else 0):
                words.append(spec.noise_words[int(rng.integers(len(spec.noise_words)))])
            perm = rng.permutation(len(words))
            text = " ".join(words[i] for i in perm)
            out.append(
                AnnotatedTweet(
                    tweet=Tweet(id=f"synth-{serial:06d}", timestamp=ts, text=text),
                    target=target,
                    sentiment=sentiment,
                )
            )
            serial += 1
    return out
