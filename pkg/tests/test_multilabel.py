"""Label spaces, labelset sampling, and the label-powerset ensemble."""

import math

import numpy as np
import pytest

from crowdpulse.classifiers import JointCategory
from crowdpulse.corpus import EventRegistry, Sentiment
from crowdpulse.errors import DataError
from crowdpulse.features import SparseVector
from crowdpulse.multilabel import (
    LabelSet,
    LabelSpace,
    LpMember,
    RakelConfig,
    RakelModel,
    _ConstantModel,
    default_member_count,
    joint_to_labelset,
    predict_rakel,
    sample_labelsets,
    to_pair,
    train_rakel,
)


def vec(*values):
    return SparseVector.from_dense(np.array(values, dtype=np.float64))


def _space():
    return LabelSpace(("alice", "bob", "positive", "negative"))


class TestLabelSpace:
    def test_for_registry_layout(self):
        reg = EventRegistry(event_id="e", participants=("alice", "bob"), event_time=0)
        space = LabelSpace.for_registry(reg)
        assert space.labels == ("alice", "bob", "positive", "negative")
        assert space.participants == ("alice", "bob")
        assert space.positive_index == 2
        assert space.negative_index == 3
        assert len(space) == 4

    def test_sentiments_must_close_the_space(self):
        with pytest.raises(DataError, match="positive/negative"):
            LabelSpace(("positive", "negative", "alice"))

    def test_minimum_size(self):
        with pytest.raises(DataError, match="at least one participant"):
            LabelSpace(("positive", "negative"))

    def test_duplicate_labels_rejected(self):
        with pytest.raises(DataError, match="duplicate"):
            LabelSpace(("a", "a", "positive", "negative"))

    def test_participant_name_collision_rejected(self):
        reg = EventRegistry(event_id="e", participants=("positive", "x"), event_time=0)
        with pytest.raises(DataError, match="collide"):
            LabelSpace.for_registry(reg)

    def test_unknown_label_index(self):
        with pytest.raises(DataError, match="not in the label space"):
            _space().index("zeke")


class TestLabelSet:
    def test_bitmask_round_trip(self):
        s = LabelSet.from_indices([3, 0])
        assert s.mask == 0b1001
        assert s.indices() == (0, 3)
        assert len(s) == 2
        assert 0 in s and 3 in s and 1 not in s

    def test_from_labels_and_names(self):
        space = _space()
        s = LabelSet.from_labels(space, ["bob", "negative"])
        assert s.names(space) == ("bob", "negative")

    def test_set_algebra(self):
        a = LabelSet.from_indices([0, 1, 2])
        b = LabelSet.from_indices([1, 2, 3])
        assert a.intersect(b).indices() == (1, 2)
        assert a.difference_size(b) == 2
        assert a.difference_size(a) == 0

    def test_negative_index_rejected(self):
        with pytest.raises(DataError):
            LabelSet.from_indices([-1])

    def test_joint_category_encoding(self):
        space = _space()
        s = joint_to_labelset(JointCategory("bob", Sentiment.NEGATIVE), space)
        assert s.names(space) == ("bob", "negative")
        s = joint_to_labelset(JointCategory("alice", Sentiment.POSITIVE), space)
        assert s.names(space) == ("alice", "positive")


class TestLabelsetSampling:
    def test_exhaustive_when_m_equals_total(self):
        sets = sample_labelsets(4, 2, 6)
        assert sets == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def test_sampled_subsets_are_distinct_sorted_k_sized(self):
        sets = sample_labelsets(8, 3, 12, seed=5)
        assert len(sets) == 12
        assert len(set(sets)) == 12
        for s in sets:
            assert len(s) == 3
            assert list(s) == sorted(s)
            assert all(0 <= i < 8 for i in s)

    def test_reproducible(self):
        assert sample_labelsets(8, 3, 10, seed=2) == sample_labelsets(8, 3, 10, seed=2)

    def test_bounds_validated(self):
        with pytest.raises(DataError, match="k="):
            sample_labelsets(4, 5, 1)
        with pytest.raises(DataError, match="m="):
            sample_labelsets(4, 2, 7)

    def test_default_member_count(self):
        # [TRIVIAL] min(2n, C(n,k))
        assert default_member_count(4, 2) == 6       # C(4,2)=6 < 8
        assert default_member_count(10, 3) == 20     # 2n=20 < C(10,3)=120
        assert default_member_count(5, 3) == min(10, math.comb(5, 3))


class TestRakelConfig:
    def test_threshold_range(self):
        RakelConfig(threshold=0.0)
        RakelConfig(threshold=0.99)
        with pytest.raises(DataError):
            RakelConfig(threshold=1.0)
        with pytest.raises(DataError):
            RakelConfig(threshold=-0.1)

    def test_base_name_checked(self):
        with pytest.raises(DataError, match="base classifier"):
            RakelConfig(base="forest")


def _pair_data(space):
    """Separable two-participant data: feature j fires for label pattern j."""
    rows = [
        (vec(3.0, 0.0, 1.0, 0.0), ("alice", "positive")),
        (vec(3.0, 0.0, 0.0, 1.0), ("alice", "negative")),
        (vec(0.0, 3.0, 1.0, 0.0), ("bob", "positive")),
        (vec(0.0, 3.0, 0.0, 1.0), ("bob", "negative")),
    ] * 3
    return [(x, LabelSet.from_labels(space, names)) for x, names in rows]


class TestTrainRakel:
    def test_gold_validation(self):
        space = _space()
        bad = [(vec(1.0), LabelSet.from_labels(space, ["alice"]))]
        with pytest.raises(DataError, match="exactly one participant"):
            train_rakel(bad, space)
        bad = [(vec(1.0), LabelSet.from_labels(space, ["alice", "bob"]))]
        with pytest.raises(DataError, match="one participant with one sentiment"):
            train_rakel(bad, space)

    def test_empty_data_rejected(self):
        with pytest.raises(DataError):
            train_rakel([], _space())

    def test_member_count_and_coverage(self):
        space = _space()
        model = train_rakel(_pair_data(space), space, RakelConfig(k=2, base="nb", seed=1))
        assert len(model.members) == default_member_count(4, 2) == 6
        # exhaustive k=2 draw covers each of the 4 labels exactly 3 times
        assert model.coverage.tolist() == [3, 3, 3, 3]

    def test_single_projection_member_becomes_constant(self):
        space = _space()
        data = [
            (vec(1.0, 0.0), LabelSet.from_labels(space, ["alice", "positive"])),
            (vec(0.0, 1.0), LabelSet.from_labels(space, ["alice", "positive"])),
        ]
        model = train_rakel(data, space, RakelConfig(k=2, base="nb", seed=1))
        # every projection of a single repeated gold pair is constant
        assert all(isinstance(m.base, _ConstantModel) for m in model.members)
        pred, ratios = predict_rakel(model, vec(9.0, 9.0))
        assert pred.names(space) == ("alice", "positive")

    def test_training_points_recovered_with_nb_base(self):
        space = _space()
        data = _pair_data(space)
        model = train_rakel(data, space, RakelConfig(k=2, base="nb", seed=1))
        for x, gold in data:
            pred, ratios = predict_rakel(model, x)
            assert pred.mask == gold.mask, (pred.names(space), gold.names(space))

    def test_training_points_recovered_with_svm_base(self):
        space = _space()
        data = _pair_data(space)
        model = train_rakel(
            data, space, RakelConfig(k=2, base="svm", svm_c=10.0, seed=1)
        )
        for x, gold in data:
            pred, _ = predict_rakel(model, x)
            assert pred.mask == gold.mask

    def test_deterministic_for_fixed_seed(self):
        space = _space()
        data = _pair_data(space)
        m1 = train_rakel(data, space, RakelConfig(k=2, base="nb", seed=4))
        m2 = train_rakel(data, space, RakelConfig(k=2, base="nb", seed=4))
        assert [m.labelset for m in m1.members] == [m.labelset for m in m2.members]
        x = vec(3.0, 0.0, 1.0, 0.0)
        assert predict_rakel(m1, x)[1].tolist() == predict_rakel(m2, x)[1].tolist()


class TestSingleMemberEquivalence:
    """k = |L| with one member is exactly the label-powerset classifier."""

    def test_predictions_match_the_lone_base_model(self):
        space = _space()
        data = _pair_data(space)
        model = train_rakel(data, space, RakelConfig(k=4, m=1, base="nb", seed=1))
        assert len(model.members) == 1
        member = model.members[0]
        assert member.labelset == (0, 1, 2, 3)
        for x, gold in data:
            lp_mask = member.predict_mask(x)
            pred, ratios = predict_rakel(model, x)
            assert pred.mask == lp_mask
            # single-member ratios are exactly 0 or 1
            assert set(ratios.tolist()) <= {0.0, 1.0}


class TestVoting:
    def _manual_model(self, threshold=0.5):
        space = _space()
        members = [
            LpMember(labelset=(0, 1), labelset_mask=0b0011, base=_ConstantModel((0b0001,))),
            LpMember(labelset=(0, 2), labelset_mask=0b0101, base=_ConstantModel((0b0100,))),
            LpMember(labelset=(1, 2), labelset_mask=0b0110, base=_ConstantModel((0b0100,))),
        ]
        cfg = RakelConfig(k=2, m=3, threshold=threshold)
        return space, RakelModel(
            space=space, members=members, threshold=threshold, config=cfg, dimension=1
        )

    def test_vote_ratios_hand_computed(self):
        # [DERIVED] coverage (2,2,2,0); votes: label0 from the first
        # member only, label2 from both members that cover it
        space, model = self._manual_model()
        pred, ratios = predict_rakel(model, vec(1.0))
        assert ratios.tolist() == [0.5, 0.0, 1.0, 0.0]
        # 0.5 is not strictly above the 0.5 threshold
        assert pred.indices() == (2,)

    def test_uncovered_label_is_never_selected(self):
        space, model = self._manual_model(threshold=0.0)
        pred, ratios = predict_rakel(model, vec(1.0))
        assert ratios[3] == 0.0
        assert 3 not in pred

    def test_threshold_monotonicity(self):
        masks = []
        for threshold in (0.0, 0.4, 0.5, 0.9):
            _, model = self._manual_model(threshold=threshold)
            pred, _ = predict_rakel(model, vec(1.0))
            masks.append(pred.mask)
        for higher, lower in zip(masks[1:], masks):
            # raising the threshold can only remove labels
            assert higher & ~lower == 0

    def test_threshold_monotonicity_on_trained_model(self):
        space = _space()
        data = _pair_data(space)
        base = train_rakel(data, space, RakelConfig(k=2, base="nb", seed=1))
        x = vec(2.0, 1.0, 1.0, 0.5)
        previous_mask = None
        for threshold in (0.0, 0.25, 0.5, 0.75):
            model = train_rakel(
                data, space, RakelConfig(k=2, base="nb", seed=1, threshold=threshold)
            )
            pred, _ = predict_rakel(model, x)
            if previous_mask is not None:
                assert pred.mask & ~previous_mask == 0
            previous_mask = pred.mask
        del base


class TestToPair:
    def test_hand_computed_collapse(self):
        space = _space()
        ratios = np.array([0.5, 0.0, 1.0, 0.0])
        pair = to_pair(LabelSet.from_indices([2]), ratios, space)
        assert pair == JointCategory("alice", Sentiment.POSITIVE)

    def test_target_tie_resolves_to_earlier_participant(self):
        space = _space()
        ratios = np.array([0.7, 0.7, 0.2, 0.6])
        pair = to_pair(LabelSet(0), ratios, space)
        assert pair.target == "alice"
        assert pair.sentiment is Sentiment.NEGATIVE

    def test_sentiment_tie_resolves_positive(self):
        space = _space()
        ratios = np.array([0.1, 0.9, 0.4, 0.4])
        pair = to_pair(LabelSet(0), ratios, space)
        assert pair == JointCategory("bob", Sentiment.POSITIVE)

    def test_ratio_length_checked(self):
        with pytest.raises(DataError, match="label space"):
            to_pair(LabelSet(0), np.zeros(3), _space())
