"""Corpus ingestion, preprocessing filters, and annotation validation.

The text filters applied here, in order:

1. usernames: every ``@mention`` becomes the token ``USER``
2. hyperlinks: every ``http(s)://...`` run becomes the token ``URL``
3. repeated letters: a letter repeated more than twice in a row is
   collapsed to exactly three occurrences ("looooool" -> "loool"), so
   exaggerated spellings stay distinguishable from regular ones
4. multi-sentiment tweets: an id annotated with conflicting
   (target, sentiment) pairs is dropped entirely
5. retweets: texts starting with "RT " (or records flagged as retweets)
   are dropped
6. duplicates: byte-identical texts are dropped, keeping the first
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

from .errors import DataError

# Mention pattern: "@" + Twitter's documented username charset, at most 15
# chars. The lookbehind forbids a preceding word char or "@" so that
# replacement is idempotent ("a@b.com" and "@@x" are left alone).
_MENTION_RE = re.compile(r"(?<![A-Za-z0-9_@])@[A-Za-z0-9_]{1,15}")
_URL_RE = re.compile(r"https?://\S+")
# Unicode letters only, case-sensitive; digit/punctuation runs are kept
# because they carry their own feature signal.
_ELONG_RE = re.compile(r"([^\W\d_])\1{2,}")


class Sentiment(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def parse(cls, value: str) -> "Sentiment":
        v = value.strip().lower()
        if v in ("pos", "positive", "+"):
            return cls.POSITIVE
        if v in ("neg", "negative", "-"):
            return cls.NEGATIVE
        raise DataError(f"unknown sentiment value: {value!r}")

    @property
    def short(self) -> str:
        return "pos" if self is Sentiment.POSITIVE else "neg"


@dataclass(frozen=True)
class Tweet:
    id: str
    timestamp: int
    text: str
    is_retweet: bool = False


@dataclass(frozen=True)
class AnnotatedTweet:
    tweet: Tweet
    target: str
    sentiment: Sentiment


@dataclass(frozen=True)
class EventRegistry:
    """Participants and timing of one event (a debate, an award, a game)."""

    event_id: str
    participants: tuple[str, ...]
    event_time: int
    expert_announcement_time: int | None = None

    def __post_init__(self):
        if not self.participants:
            raise DataError(f"event {self.event_id!r} has no participants")
        if len(set(self.participants)) != len(self.participants):
            raise DataError(f"event {self.event_id!r} has duplicate participants")

    def __contains__(self, target: str) -> bool:
        return target in self.participants


@dataclass
class CleanReport:
    """Per-filter tallies from one preprocessing run."""

    mentions_replaced: int = 0
    urls_replaced: int = 0
    elongations_collapsed: int = 0
    empty_dropped: int = 0
    retweets_dropped: int = 0
    duplicates_dropped: int = 0
    # conflicted ids vs. the annotation records they carried; record-level
    # accounting keeps output size + drops = input size
    multi_sentiment_dropped: int = 0
    multi_sentiment_records_dropped: int = 0

    @property
    def total_dropped(self) -> int:
        return (
            self.empty_dropped
            + self.retweets_dropped
            + self.duplicates_dropped
            + self.multi_sentiment_records_dropped
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "mentions_replaced": self.mentions_replaced,
            "urls_replaced": self.urls_replaced,
            "elongations_collapsed": self.elongations_collapsed,
            "empty_dropped": self.empty_dropped,
            "retweets_dropped": self.retweets_dropped,
            "duplicates_dropped": self.duplicates_dropped,
            "multi_sentiment_dropped": self.multi_sentiment_dropped,
            "multi_sentiment_records_dropped": self.multi_sentiment_records_dropped,
        }


def clean_tweet(text: str, report: CleanReport | None = None) -> str:
    """Apply the username / URL / repeated-letter filters to one text.

    Total and idempotent: any string in, the filtered string out.
    """
    if report is not None:
        report.mentions_replaced += len(_MENTION_RE.findall(text))
        report.urls_replaced += len(_URL_RE.findall(text))
    text = _MENTION_RE.sub("USER", text)
    text = _URL_RE.sub("URL", text)
    if report is not None:
        report.elongations_collapsed += sum(
            1 for m in _ELONG_RE.finditer(text) if len(m.group(0)) > 3
        )
    text = _ELONG_RE.sub(r"\1\1\1", text)
    return text


def _is_retweet(t: Tweet) -> bool:
    return t.is_retweet or t.text.startswith("RT ")


def filter_corpus(
    tweets: list[AnnotatedTweet],
) -> tuple[list[AnnotatedTweet], CleanReport]:
    """Drop multi-sentiment ids, retweets, and duplicate texts.

    Survivors keep their input order; duplicate detection keeps the first
    occurrence of each exact text.
    """
    report = CleanReport()

    sentiments_by_id: dict[str, set[Sentiment]] = {}
    for a in tweets:
        sentiments_by_id.setdefault(a.tweet.id, set()).add(a.sentiment)
    conflicted = {tid for tid, seen in sentiments_by_id.items() if len(seen) > 1}

    survivors: list[AnnotatedTweet] = []
    seen_texts: set[str] = set()
    dropped_ids: set[str] = set()
    for a in tweets:
        if a.tweet.id in conflicted:
            report.multi_sentiment_records_dropped += 1
            if a.tweet.id not in dropped_ids:
                dropped_ids.add(a.tweet.id)
                report.multi_sentiment_dropped += 1
            continue
        if _is_retweet(a.tweet):
            report.retweets_dropped += 1
            continue
        if a.tweet.text in seen_texts:
            report.duplicates_dropped += 1
            continue
        seen_texts.add(a.tweet.text)
        survivors.append(a)
    return survivors, report


def clean_corpus(
    tweets: list[AnnotatedTweet],
) -> tuple[list[AnnotatedTweet], CleanReport]:
    """Run all six filters: text transforms first, then the drop filters."""
    report = CleanReport()
    cleaned: list[AnnotatedTweet] = []
    for a in tweets:
        text = clean_tweet(a.tweet.text, report)
        if not text.strip():
            report.empty_dropped += 1
            continue
        cleaned.append(
            AnnotatedTweet(
                tweet=Tweet(a.tweet.id, a.tweet.timestamp, text, a.tweet.is_retweet),
                target=a.target,
                sentiment=a.sentiment,
            )
        )
    survivors, drop_report = filter_corpus(cleaned)
    report.retweets_dropped = drop_report.retweets_dropped
    report.duplicates_dropped = drop_report.duplicates_dropped
    report.multi_sentiment_dropped = drop_report.multi_sentiment_dropped
    report.multi_sentiment_records_dropped = drop_report.multi_sentiment_records_dropped
    return survivors, report


def _record_from_dict(
    obj: dict, lineno: int, schema: str, registry: EventRegistry | None
) -> Union[Tweet, AnnotatedTweet]:
    try:
        tid = str(obj["id"])
        ts = int(obj["ts"])
        text = str(obj["text"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"line {lineno}: missing or invalid field ({exc})") from None
    if not tid:
        raise DataError(f"line {lineno}: empty tweet id")
    if not text:
        raise DataError(f"line {lineno}: empty tweet text")
    rt = bool(obj.get("rt", False))
    tweet = Tweet(id=tid, timestamp=ts, text=text, is_retweet=rt)
    if schema == "raw":
        return tweet
    try:
        target = str(obj["target"])
        sentiment = Sentiment.parse(str(obj["sentiment"]))
    except KeyError as exc:
        raise DataError(f"line {lineno}: annotated record missing {exc}") from None
    except DataError as exc:
        raise DataError(f"line {lineno}: {exc}") from None
    if registry is not None and target not in registry:
        raise DataError(
            f"line {lineno}: unknown target {target!r} "
            f"(not a participant of event {registry.event_id!r})"
        )
    return AnnotatedTweet(tweet=tweet, target=target, sentiment=sentiment)


def _parse_bool(s: str) -> bool:
    return s.strip().lower() in ("1", "true", "yes", "rt")


def load_corpus(
    path: str | Path,
    schema: str = "annotated",
    registry: EventRegistry | None = None,
) -> list:
    """Load a JSONL or CSV corpus file, validating each record.

    ``schema`` is "raw" (id/ts/text) or "annotated" (adds target and
    sentiment, checked against ``registry`` when given). File order is
    preserved. Malformed lines raise :class:`DataError` naming the line.
    """
    if schema not in ("raw", "annotated"):
        raise DataError(f"unknown corpus schema: {schema!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    raw = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return _load_csv(raw, schema, registry)
    records = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DataError(f"line {lineno}: expected a JSON object")
        records.append(_record_from_dict(obj, lineno, schema, registry))
    return records


def _load_csv(raw: str, schema: str, registry: EventRegistry | None) -> list:
    reader = csv.DictReader(io.StringIO(raw))
    if reader.fieldnames is None or "id" not in reader.fieldnames:
        raise DataError("CSV corpus must have a header including 'id'")
    records = []
    for lineno, row in enumerate(reader, start=2):
        obj: dict = {
            "id": row.get("id", ""),
            "ts": row.get("ts", ""),
            "text": row.get("text", ""),
        }
        try:
            obj["ts"] = int(obj["ts"])
        except (TypeError, ValueError):
            raise DataError(f"line {lineno}: invalid ts {row.get('ts')!r}") from None
        if row.get("rt"):
            obj["rt"] = _parse_bool(row["rt"])
        if schema == "annotated":
            obj["target"] = row.get("target") or ""
            obj["sentiment"] = row.get("sentiment") or ""
            if not obj["target"]:
                raise DataError(f"line {lineno}: annotated record missing target")
        records.append(_record_from_dict(obj, lineno, schema, registry))
    return records


def load_registry(path: str | Path) -> EventRegistry:
    """Load an event registry JSON file."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"registry file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"registry {path}: invalid JSON ({exc.msg})") from None
    try:
        return EventRegistry(
            event_id=str(obj["event_id"]),
            participants=tuple(str(p) for p in obj["participants"]),
            event_time=int(obj["event_time"]),
            expert_announcement_time=(
                int(obj["expert_announcement_time"])
                if obj.get("expert_announcement_time") is not None
                else None
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"registry {path}: missing or invalid field ({exc})") from None


def dump_corpus(records: list, path: str | Path) -> None:
    """Write tweets or annotated tweets back out as JSONL."""
    lines = []
    for r in records:
        if isinstance(r, AnnotatedTweet):
            obj = {
                "id": r.tweet.id,
                "ts": r.tweet.timestamp,
                "text": r.tweet.text,
                "rt": r.tweet.is_retweet,
                "target": r.target,
                "sentiment": r.sentiment.short,
            }
        else:
            obj = {"id": r.id, "ts": r.timestamp, "text": r.text, "rt": r.is_retweet}
        lines.append(json.dumps(obj, sort_keys=True, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
