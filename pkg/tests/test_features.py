"""Tokenizer, vocabulary registry, and the lexical feature bundles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdpulse.errors import DataError
from crowdpulse.features import (
    POS_TAGSET,
    PUNCT_CLASSES,
    PolarityLexicon,
    SparseVector,
    assemble_vector,
    dal_features,
    fit_vocabulary,
    iter_bigrams,
    load_lexicon,
    tag_pos,
    tokenize,
)

from conftest import FIXTURES


class TestTokenize:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Great game", ["great", "game"]),
            ("#Win tonight!!", ["#win", "tonight", "!!"]),
            ("don't stop", ["don't", "stop"]),
            ("USER said URL", ["user", "said", "url"]),
            ("so... what?!", ["so", "...", "what", "?!"]),
            ("", []),
            ("3-1 final", ["3", "-", "1", "final"]),
        ],
    )
    def test_examples(self, text, expected):
        assert tokenize(text) == expected

    def test_bigrams(self):
        assert list(iter_bigrams(["a", "b", "c"])) == ["a_b", "b_c"]
        assert list(iter_bigrams(["solo"])) == []


class TestSparseVector:
    def test_from_counts_sorts_indices(self):
        v = SparseVector.from_counts({5: 2.0, 1: 1.0}, 8)
        assert v.indices.tolist() == [1, 5]
        assert v.values.tolist() == [1.0, 2.0]

    def test_dense_round_trip(self):
        dense = np.array([0.0, 3.0, 0.0, -1.5])
        v = SparseVector.from_dense(dense)
        assert np.array_equal(v.to_dense(), dense)

    def test_dot_matches_dense_dot(self):
        a = SparseVector.from_counts({0: 1.0, 3: 2.0}, 5)
        b = SparseVector.from_counts({3: 4.0, 4: 1.0}, 5)
        assert a.dot(b) == pytest.approx(float(a.to_dense() @ b.to_dense()))

    def test_validate_rejects_out_of_range(self):
        v = SparseVector.from_counts({7: 1.0}, 4)
        with pytest.raises(DataError):
            v.validate()


class TestPosTagging:
    def test_rule_examples(self):
        tokens = ["the", "dog", "running", "quickly", "!", "#x", "3"]
        assert tag_pos(tokens) == ["DET", "NOUN", "VERB", "ADV", "PUNCT", "X", "NUM"]

    def test_every_tag_is_in_the_tagset(self):
        tokens = tokenize("she quickly gave 2 gifts... #nice to them and everyone!")
        for tag in tag_pos(tokens):
            assert tag in POS_TAGSET

    def test_custom_tagger_is_used_and_validated(self):
        tags = tag_pos(["a", "b"], tagger=lambda ts: ["X"] * len(ts))
        assert tags == ["X", "X"]
        with pytest.raises(DataError, match="wrong number"):
            tag_pos(["a", "b"], tagger=lambda ts: ["X"])


class TestLexicon:
    def test_load_and_normalize(self, tmp_path):
        p = tmp_path / "lex.tsv"
        p.write_text("Good\t2.9\nbad\t1.2\n\ngame\t2.0\n")
        lex = load_lexicon(p)
        assert lex.normalized("good") == pytest.approx(0.95)
        assert lex.normalized("bad") == pytest.approx(0.1)
        assert lex.normalized("game") == pytest.approx(0.5)
        assert lex.normalized("unknown") is None

    def test_synonym_fallback_uses_first_resolvable(self, tmp_path):
        lex_p = tmp_path / "lex.tsv"
        lex_p.write_text("joy\t2.8\n")
        syn_p = tmp_path / "syn.tsv"
        syn_p.write_text("delight\tmissing,joy\njoy\tdelight\n")
        lex = load_lexicon(lex_p, syn_p)
        # direct entries win over synonyms; fallback walks the list in order
        assert lex.normalized("joy") == pytest.approx(0.9)
        assert lex.normalized("delight") == pytest.approx(0.9)

    def test_score_outside_raw_scale_rejected(self):
        with pytest.raises(DataError, match="1-3"):
            PolarityLexicon(scores={"w": 3.5})

    def test_malformed_lines_rejected(self, tmp_path):
        p = tmp_path / "lex.tsv"
        p.write_text("word only\n")
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(p)
        p.write_text("word\tnotanumber\n")
        with pytest.raises(DataError, match="invalid score"):
            load_lexicon(p)

    def test_dal_triple_hand_example(self):
        # [DERIVED] good=0.95 counts positive (>0.8), bad=0.1 negative
        # (<0.5), game=0.5 is neither; sum covers all three
        lex = PolarityLexicon(scores={"good": 2.9, "bad": 1.2, "game": 2.0})
        pos, neg, total = dal_features(["good", "bad", "game", "oov"], lex)
        assert (pos, neg) == (1, 1)
        assert total == pytest.approx(0.95 + 0.1 + 0.5)

    def test_dal_without_lexicon_is_all_zero(self):
        assert dal_features(["anything"], None) == (0, 0, 0.0)

    def test_fixture_lexicon_loads(self):
        lex = load_lexicon(FIXTURES / "lexicon.tsv")
        assert lex.normalized("good") is not None


class TestVocabulary:
    CORPUS = [
        ["good", "game", "!", "#go", "user"],
        ["bad", "game", "url"],
    ]

    def test_fit_orders_terms_lexicographically(self):
        vocab = fit_vocabulary(self.CORPUS)
        assert vocab.unigrams == ("!", "#go", "bad", "game", "good", "url", "user")
        assert vocab.bigrams == (
            "!_#go", "#go_user", "bad_game", "game_!", "game_url", "good_game",
        )

    def test_fit_is_order_independent(self):
        a = fit_vocabulary(self.CORPUS)
        b = fit_vocabulary(list(reversed(self.CORPUS)))
        assert a.unigrams == b.unigrams
        assert a.bigrams == b.bigrams
        assert a.registry_hash() == b.registry_hash()

    def test_min_count_prunes_rare_terms(self):
        vocab = fit_vocabulary(self.CORPUS, min_count=2)
        assert vocab.unigrams == ("game",)
        assert vocab.bigrams == ()

    def test_bundle_dimensions(self):
        vocab = fit_vocabulary(self.CORPUS)
        assert vocab.dimension("f1") == 7
        assert vocab.dimension("f2") == 6
        assert vocab.dimension("f3") == 13
        # f3 + punct(7) + pos(12) + dal(3) + twitter(3)
        assert vocab.dimension("f4") == 13 + 7 + 12 + 3 + 3

    def test_block_offsets(self):
        vocab = fit_vocabulary(self.CORPUS)
        assert vocab.blocks_for("f4") == [
            ("unigram", 0, 7),
            ("bigram", 7, 6),
            ("punct", 13, 7),
            ("pos", 20, 12),
            ("dal", 32, 3),
            ("twitter", 35, 3),
        ]

    def test_unknown_bundle_rejected(self):
        vocab = fit_vocabulary(self.CORPUS)
        with pytest.raises(DataError, match="unknown feature bundle"):
            vocab.dimension("f9")

    def test_empty_corpus_rejected(self):
        with pytest.raises(DataError):
            fit_vocabulary([])

    def test_registry_hash_changes_with_vocabulary(self):
        a = fit_vocabulary(self.CORPUS)
        b = fit_vocabulary(self.CORPUS + [["extra"]])
        assert a.registry_hash() != b.registry_hash()


class TestAssembleVector:
    LEXICON = PolarityLexicon(scores={"good": 2.9, "bad": 1.2, "game": 2.0})

    def _vocab(self):
        return fit_vocabulary(TestVocabulary.CORPUS)

    def test_f1_counts(self):
        vocab = self._vocab()
        v = assemble_vector(["game", "game", "good", "oov"], vocab, "f1")
        assert v.dimension == 7
        assert v.indices.tolist() == [3, 4]      # game, good
        assert v.values.tolist() == [2.0, 1.0]

    def test_f2_counts(self):
        vocab = self._vocab()
        v = assemble_vector(["good", "game", "url"], vocab, "f2")
        assert v.indices.tolist() == [4, 5]      # game_url, good_game
        assert v.values.tolist() == [1.0, 1.0]

    def test_f3_is_f1_then_f2(self):
        vocab = self._vocab()
        tokens = ["good", "game", "url"]
        f1 = assemble_vector(tokens, vocab, "f1").to_dense()
        f2 = assemble_vector(tokens, vocab, "f2").to_dense()
        f3 = assemble_vector(tokens, vocab, "f3").to_dense()
        assert np.array_equal(f3, np.concatenate([f1, f2]))

    def test_f4_fully_hand_computed(self):
        # [DERIVED] every index of the 38-dim vector traced by hand:
        # unigrams 0-6, bigrams 7-12, punct 13-19, pos 20-31, dal 32-34,
        # twitter 35-37
        vocab = self._vocab()
        tokens = ["good", "game", "!", "#go", "user"]
        v = assemble_vector(tokens, vocab, "f4", lexicon=self.LEXICON)
        expected = {
            0: 1.0,     # unigram "!"
            1: 1.0,     # unigram "#go"
            3: 1.0,     # unigram "game"
            4: 1.0,     # unigram "good"
            6: 1.0,     # unigram "user"
            7: 1.0,     # bigram "!_#go"
            8: 1.0,     # bigram "#go_user"
            10: 1.0,    # bigram "game_!"
            12: 1.0,    # bigram "good_game"
            13: 1.0,    # punct: one "!" in the exclam class
            20: 3.0,    # pos NOUN: good, game, user
            30: 1.0,    # pos PUNCT: "!"
            31: 1.0,    # pos X: "#go"
            32: 1.0,    # dal positive-word count (good)
            34: pytest.approx(1.45),  # dal score sum 0.95 + 0.5
            35: 1.0,    # twitter hashtags: #go
            36: 1.0,    # twitter mentions: user
        }
        assert v.dimension == 38
        got = dict(zip(v.indices.tolist(), v.values.tolist()))
        assert got == expected

    def test_punctuation_classes(self):
        vocab = self._vocab()
        tokens = tokenize('what?! ok... "sure," she said;')
        v = assemble_vector(tokens, vocab, "f4", lexicon=None)
        offset = 13
        dense = v.to_dense()
        by_class = dict(zip(PUNCT_CLASSES, dense[offset : offset + 7].tolist()))
        assert by_class == {
            "exclam": 1.0, "question": 1.0, "period": 3.0, "comma": 1.0,
            "colon": 1.0, "quote": 2.0, "other": 0.0,
        }

    def test_twitter_count_block(self):
        vocab = self._vocab()
        tokens = tokenize("USER sent URL and URL #a #b")
        v = assemble_vector(tokens, vocab, "f4", lexicon=None)
        dense = v.to_dense()
        assert dense[35:38].tolist() == [2.0, 1.0, 2.0]

    def test_oov_only_tokens_give_zero_ngram_blocks(self):
        vocab = self._vocab()
        v = assemble_vector(["nothing", "matches"], vocab, "f1")
        assert v.indices.size == 0

    def test_zero_dimension_bundle_rejected(self):
        vocab = fit_vocabulary([["solo"]], min_count=1)
        with pytest.raises(DataError, match="dimension 0"):
            assemble_vector(["solo"], vocab, "f2")   # no bigrams exist

    @given(
        st.lists(
            st.lists(st.sampled_from(["a", "b", "c", "d", "!"]), min_size=1, max_size=6),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_dimension_is_constant_across_documents(self, corpus):
        vocab = fit_vocabulary(corpus)
        dims = {assemble_vector(doc, vocab, "f4").dimension for doc in corpus}
        assert len(dims) == 1
        for doc in corpus:
            v = assemble_vector(doc, vocab, "f4")
            v.validate()
            # unigram block total equals the in-vocabulary token count
            dense = v.to_dense()
            in_vocab = sum(1 for t in doc if t in vocab.unigram_index)
            assert dense[: len(vocab.unigrams)].sum() == in_vocab
