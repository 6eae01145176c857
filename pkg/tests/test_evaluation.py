"""Hamming loss, F-measure, MAP, and the single-to-multi-label bridge."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdpulse.classifiers import JointCategory
from crowdpulse.corpus import Sentiment
from crowdpulse.errors import DataError
from crowdpulse.evaluation import (
    PrfCounts,
    RankedList,
    average_precision,
    hamming_loss,
    mean_average_precision,
    mean_f1,
    pair_counts,
    to_multilabel,
)
from crowdpulse.multilabel import LabelSet, LabelSpace, to_pair


def _space():
    return LabelSpace(("alice", "bob", "carol", "positive", "negative"))


def _sets(space, *name_lists):
    return [LabelSet.from_labels(space, names) for names in name_lists]


class TestBridge:
    def test_encodes_target_and_sentiment_bits(self):
        space = _space()
        s = to_multilabel(JointCategory("alice", Sentiment.POSITIVE), space)
        assert s.names(space) == ("alice", "positive")
        s = to_multilabel(JointCategory("carol", Sentiment.NEGATIVE), space)
        assert s.names(space) == ("carol", "negative")
        assert len(s) == 2

    def test_unknown_target_rejected(self):
        with pytest.raises(DataError, match="not in the label space"):
            to_multilabel(JointCategory("zeke", Sentiment.POSITIVE), _space())

    def test_round_trip_through_pair_collapse(self):
        # encode, then decode with the bitset itself as the vote ratios
        space = _space()
        for target in space.participants:
            for sentiment in (Sentiment.POSITIVE, Sentiment.NEGATIVE):
                pair = JointCategory(target, sentiment)
                s = to_multilabel(pair, space)
                ratios = np.zeros(len(space))
                for i in s.indices():
                    ratios[i] = 1.0
                assert to_pair(s, ratios, space) == pair


class TestHammingLoss:
    def test_perfect_prediction_is_zero(self):
        space = _space()
        truth = _sets(space, ["alice", "positive"], ["bob", "negative"])
        assert hamming_loss(truth, truth, space) == 0.0

    def test_complement_prediction_is_one(self):
        space = _space()
        truth = [LabelSet.from_indices(range(len(space)))]
        pred = [LabelSet(0)]
        assert hamming_loss(truth, pred, space) == 1.0

    def test_hand_computed_half_case(self):
        # [DERIVED] |L| = 4: one exact match plus one single-bit slip
        # gives (0/4 + 1/4) / 2 = 0.125
        space = LabelSpace(("alice", "bob", "positive", "negative"))
        truth = _sets(space, ["alice", "positive"], ["bob", "positive"])
        pred = _sets(space, ["alice", "positive"], ["bob", "positive"])
        pred[1] = LabelSet.from_labels(space, ["bob", "positive", "negative"])
        assert hamming_loss(truth, pred, space) == pytest.approx(0.125, abs=1e-12)

    def test_symmetric(self):
        space = _space()
        a = _sets(space, ["alice", "positive"], ["carol", "negative"])
        b = _sets(space, ["bob", "positive"], ["carol", "positive"])
        assert hamming_loss(a, b, space) == hamming_loss(b, a, space)

    def test_perfect_example_never_raises_the_loss(self):
        space = _space()
        truth = _sets(space, ["alice", "positive"], ["bob", "negative"])
        pred = _sets(space, ["alice", "negative"], ["bob", "negative"])
        before = hamming_loss(truth, pred, space)
        extra = LabelSet.from_labels(space, ["carol", "positive"])
        after = hamming_loss(truth + [extra], pred + [extra], space)
        assert after <= before

    def test_length_mismatch_and_empty_rejected(self):
        space = _space()
        one = _sets(space, ["alice", "positive"])
        with pytest.raises(DataError, match="length"):
            hamming_loss(one, one + one, space)
        with pytest.raises(DataError, match="empty"):
            hamming_loss([], [], space)

    @given(st.data())
    @settings(max_examples=1000, deadline=None)
    def test_zero_iff_equal(self, data):
        space = _space()
        n = data.draw(st.integers(min_value=1, max_value=6))
        masks_t = [data.draw(st.integers(0, 2 ** len(space) - 1)) for _ in range(n)]
        masks_p = [data.draw(st.integers(0, 2 ** len(space) - 1)) for _ in range(n)]
        truth = [LabelSet(m) for m in masks_t]
        pred = [LabelSet(m) for m in masks_p]
        loss = hamming_loss(truth, pred, space)
        assert 0.0 <= loss <= 1.0
        assert (loss == 0.0) == (masks_t == masks_p)


class TestMeanF1:
    def test_perfect_query(self):
        assert mean_f1([PrfCounts(1.0, 1.0)]) == 1.0

    def test_hand_computed_harmonic_mean(self):
        # [DERIVED] 2 * 0.5 * 1.0 / 1.5 = 2/3
        assert mean_f1([PrfCounts(0.5, 1.0)]) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_zero_zero_query_contributes_zero(self):
        assert mean_f1([PrfCounts(0.0, 0.0)]) == 0.0
        assert mean_f1([PrfCounts(1.0, 1.0), PrfCounts(0.0, 0.0)]) == pytest.approx(0.5)

    def test_out_of_range_rejected(self):
        with pytest.raises(DataError):
            PrfCounts(1.2, 0.0)
        with pytest.raises(DataError):
            PrfCounts(0.0, -0.1)

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            mean_f1([])


class TestPairCounts:
    def test_counts_from_label_sets(self):
        space = _space()
        truth = _sets(space, ["alice", "positive"])
        pred = [LabelSet.from_labels(space, ["alice", "negative"])]
        [q] = pair_counts(truth, pred)
        assert q.precision == pytest.approx(0.5)
        assert q.recall == pytest.approx(0.5)
        assert q.f1 == pytest.approx(0.5)

    def test_empty_prediction_has_perfect_precision(self):
        space = _space()
        truth = _sets(space, ["alice", "positive"])
        [q] = pair_counts(truth, [LabelSet(0)])
        assert q.precision == 1.0
        assert q.recall == 0.0
        assert q.f1 == 0.0

    def test_empty_truth_has_perfect_recall(self):
        space = _space()
        pred = _sets(space, ["alice", "positive"])
        [q] = pair_counts([LabelSet(0)], pred)
        assert q.recall == 1.0
        assert q.precision == 0.0


class TestAveragePrecision:
    def test_perfect_ranking(self):
        q = RankedList("q", ("a", "b"), frozenset({"a", "b"}))
        assert average_precision(q) == 1.0

    def test_hand_computed_interleaved(self):
        # [DERIVED] relevant at ranks 2 and 4: (1/2 + 2/4) / 2 = 0.5
        q = RankedList("q", ("x", "a", "y", "b"), frozenset({"a", "b"}))
        assert average_precision(q) == pytest.approx(0.5, abs=1e-12)

    def test_missing_relevant_item_scores_zero(self):
        q = RankedList("q", ("x", "y"), frozenset({"a"}))
        assert average_precision(q) == 0.0

    def test_unreturned_relevant_items_still_divide(self):
        # one hit at rank 1 but two relevant: (1/1) / 2
        q = RankedList("q", ("a",), frozenset({"a", "b"}))
        assert average_precision(q) == pytest.approx(0.5)

    def test_empty_relevant_set_rejected(self):
        q = RankedList("q", ("a",), frozenset())
        with pytest.raises(DataError, match="empty relevant"):
            average_precision(q)

    def test_duplicate_predictions_rejected(self):
        with pytest.raises(DataError, match="repeats"):
            RankedList("q", ("a", "a"), frozenset({"a"}))

    def test_map_is_the_mean(self):
        qs = [
            RankedList("q1", ("a", "b"), frozenset({"a", "b"})),
            RankedList("q2", ("x", "a", "y", "b"), frozenset({"a", "b"})),
        ]
        assert mean_average_precision(qs) == pytest.approx(0.75, abs=1e-12)

    def test_map_empty_rejected(self):
        with pytest.raises(DataError):
            mean_average_precision([])

    def test_invariant_to_permutation_below_last_hit(self):
        base = RankedList("q", ("a", "x", "b", "y", "z"), frozenset({"a", "b"}))
        swapped = RankedList("q", ("a", "x", "b", "z", "y"), frozenset({"a", "b"}))
        assert average_precision(base) == average_precision(swapped)

    @given(st.data())
    @settings(max_examples=300, deadline=None)
    def test_bounded_in_unit_interval(self, data):
        items = [f"i{j}" for j in range(8)]
        n = data.draw(st.integers(0, 8))
        predicted = tuple(data.draw(st.permutations(items))[:n])
        relevant = frozenset(
            data.draw(st.sets(st.sampled_from(items), min_size=1, max_size=8))
        )
        ap = average_precision(RankedList("q", predicted, relevant))
        assert 0.0 <= ap <= 1.0
