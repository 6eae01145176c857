"""Shared builders for the test suite."""

from __future__ import annotations

from pathlib import Path

import pytest

from crowdpulse.corpus import AnnotatedTweet, EventRegistry, Sentiment, Tweet

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def make_tweet(tid, text, ts=0, rt=False):
    return Tweet(id=tid, timestamp=ts, text=text, is_retweet=rt)


def make_annotated(tid, text, target, sentiment, ts=0, rt=False):
    return AnnotatedTweet(
        tweet=make_tweet(tid, text, ts, rt),
        target=target,
        sentiment=Sentiment.parse(sentiment),
    )


@pytest.fixture
def registry():
    return EventRegistry(
        event_id="demo-final",
        participants=("alice", "bob", "carol", "dan"),
        event_time=1_000_000,
        expert_announcement_time=500_000,
    )


@pytest.fixture
def two_party_registry():
    return EventRegistry(
        event_id="duel",
        participants=("red", "blue"),
        event_time=10_000,
        expert_announcement_time=5_000,
    )
