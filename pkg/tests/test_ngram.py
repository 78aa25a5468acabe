import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reviewgram.errors import UndefinedModelError, UnseenHistoryError
from reviewgram.ngram import (
    NgramTable,
    build_table,
    build_table_parallel,
    cond_prob_bigram,
    cond_prob_trigram,
    joint_prob,
    merge,
    prob_unigram,
    top_ngrams,
)

from oracles import naive_table_dict, rational_cond

corpora = st.lists(st.lists(st.sampled_from("abcd"), max_size=6), max_size=25)


def _as_dict(table):
    d = table.to_dict()
    return {
        "unigrams": {g: c for g, c in d["unigrams"]},
        "bigrams": {tuple(g): c for g, c in d["bigrams"]},
        "trigrams": {tuple(g): c for g, c in d["trigrams"]},
        "total_tokens": d["total_tokens"],
        "total_bigram_positions": d["total_bigram_positions"],
        "total_trigram_positions": d["total_trigram_positions"],
        "sentence_count": d["sentence_count"],
    }


class TestBuildTable:
    def test_two_identical_sentences(self):
        t = build_table([["a", "b"], ["a", "b"]])
        assert t.unigram_counts == {"a": 2, "b": 2}
        assert t.bigram_counts == {("a", "b"): 2}
        assert t.trigram_counts == {}
        assert t.total_tokens == 4

    def test_single_token(self):
        t = build_table([["x"]])
        assert t.unigram_counts == {"x": 1}
        assert t.total_bigram_positions == t.total_trigram_positions == 0

    def test_empty(self):
        assert build_table([]) == NgramTable()

    def test_no_cross_sentence_ngrams(self):
        t = build_table([["a", "b"], ["c"]])
        assert ("b", "c") not in t.bigram_counts

    def test_fixture_matches_naive_counter(self, fixture_sentences):
        assert _as_dict(build_table(fixture_sentences)) == naive_table_dict(fixture_sentences)

    @given(corpora, st.randoms(use_true_random=False))
    def test_order_independent(self, sents, rnd):
        shuffled = list(sents)
        rnd.shuffle(shuffled)
        assert build_table(sents) == build_table(shuffled)

    @given(corpora)
    def test_table_invariants(self, sents):
        t = build_table(sents)
        assert all(c >= 1 for d in (t.unigram_counts, t.bigram_counts, t.trigram_counts) for c in d.values())
        assert sum(t.unigram_counts.values()) == t.total_tokens
        assert sum(t.bigram_counts.values()) == t.total_bigram_positions == sum(max(len(s) - 1, 0) for s in sents)
        assert sum(t.trigram_counts.values()) == t.total_trigram_positions == sum(max(len(s) - 2, 0) for s in sents)
        enders = {s[-1] for s in sents if s}
        for w, c in t.unigram_counts.items():
            cont = t.continuation_total((w,))
            assert cont <= c
            if w not in enders:
                assert cont == c

    @given(corpora, st.lists(st.sampled_from("abcd"), max_size=6))
    def test_monotone_under_added_sentence(self, sents, extra):
        before, after = build_table(sents), build_table(sents + [extra])
        for n in (1, 2, 3):
            for g, c in before.counts(n).items():
                assert after.counts(n)[g] >= c


class TestMerge:
    @given(corpora)
    def test_identity(self, sents):
        t = build_table(sents)
        assert merge(t, NgramTable()) == t == merge(NgramTable(), t)

    @given(corpora, corpora)
    def test_commutative_and_homomorphic(self, s1, s2):
        a, b = build_table(s1), build_table(s2)
        assert merge(a, b) == merge(b, a) == build_table(s1 + s2)

    @given(corpora, corpora, corpora)
    def test_associative(self, s1, s2, s3):
        a, b, c = map(build_table, (s1, s2, s3))
        assert merge(merge(a, b), c) == merge(a, merge(b, c))

    def test_seven_shards_of_fixture(self, fixture_sentences):
        rnd = random.Random(11)
        cuts = sorted(rnd.sample(range(1, len(fixture_sentences)), 6))
        bounds = [0, *cuts, len(fixture_sentences)]
        shards = [fixture_sentences[i:j] for i, j in zip(bounds, bounds[1:])]
        folded = NgramTable()
        for shard in shards:
            folded = merge(folded, build_table(shard))
        assert folded == build_table(fixture_sentences)

    @pytest.mark.parametrize("workers", [1, 2, 8])
    @pytest.mark.parametrize("shards", [None, 3, 50])
    def test_parallel_build(self, fixture_sentences, workers, shards):
        assert build_table_parallel(fixture_sentences, workers, shards) == build_table(fixture_sentences)


class TestProbabilities:
    def test_unigram(self):
        t = build_table([["a", "b"], ["a", "b"]])
        assert prob_unigram(t, "a") == 0.5
        assert prob_unigram(t, "zzz") == 0.0

    def test_unigram_empty_table(self):
        with pytest.raises(UndefinedModelError):
            prob_unigram(NgramTable(), "a")

    def test_unigram_fixture(self, fixture_sentences):
        t = build_table(fixture_sentences)
        direct = sum(tok == "staff" for s in fixture_sentences for tok in s.tokens)
        assert prob_unigram(t, "staff") == direct / sum(len(s.tokens) for s in fixture_sentences)

    def test_bigram_examples(self):
        t = build_table([["great", "pilot"], ["great", "view"], ["great", "pilot"]])
        assert cond_prob_bigram(t, "great", "pilot") == pytest.approx(2 / 3, abs=1e-15)
        t = build_table([["a", "b"]])
        assert cond_prob_bigram(t, "a", "b") == 1.0
        assert cond_prob_bigram(t, "a", "z") == 0.0

    def test_unseen_history_is_an_error_not_zero(self):
        t = build_table([["a", "b"]])
        with pytest.raises(UnseenHistoryError) as exc:
            cond_prob_bigram(t, "b", "a")
        assert exc.value.history == ("b",)
        with pytest.raises(UnseenHistoryError):
            cond_prob_trigram(t, "a", "b", "c")

    def test_trigram_examples(self):
        assert cond_prob_trigram(build_table([["a", "b", "c"], ["a", "b", "d"]]), "a", "b", "c") == 0.5
        assert cond_prob_trigram(build_table([["a", "b", "c"]]), "a", "b", "c") == 1.0

    def test_trigram_fixture_against_recount(self, fixture_sentences):
        t = build_table(fixture_sentences)
        expected = rational_cond(fixture_sentences, ("friendli", "help"), "staff")
        assert 0 < expected < 1
        assert cond_prob_trigram(t, "friendli", "help", "staff") == float(expected)

    def test_denominator_counts_continuations_only(self):
        # "b" ends one sentence, so its continuation total is 1 rather than c(b) = 2
        t = build_table([["a", "b"], ["b", "c"]])
        assert cond_prob_bigram(t, "b", "c") == 1.0

    @given(corpora, st.sampled_from("abcd"), st.sampled_from("abcd"), st.sampled_from("abcd"))
    def test_matches_rational_oracle_and_in_range(self, sents, x, y, z):
        t = build_table(sents)
        cases = [
            ((x,), y, lambda: cond_prob_bigram(t, x, y)),
            ((x, y), z, lambda: cond_prob_trigram(t, x, y, z)),
        ]
        for history, w, query in cases:
            if t.continuation_total(history) == 0:
                with pytest.raises(UnseenHistoryError):
                    query()
                continue
            p = query()
            assert 0.0 <= p <= 1.0
            assert p == float(rational_cond(sents, history, w))


class TestJointProb:
    def test_single_word_is_unigram(self):
        t = build_table([["a", "b"], ["a", "c"]])
        assert joint_prob(t, ["a"]) == prob_unigram(t, "a")
        assert joint_prob(t, ["a"], order="trigram") == prob_unigram(t, "a")

    def test_bigram_chain(self):
        t = build_table([["a", "b"], ["a", "b"]])
        assert joint_prob(t, ["a", "b"], order="bigram") == 0.5

    def test_trigram_chain_uses_two_word_history(self):
        t = build_table([["a", "b", "c"], ["x", "b", "d"]])
        # bigram order: P(a) P(b|a) P(c|b) = 1/6 * 1 * 1/2; trigram order replaces the last factor with P(c|a,b) = 1
        assert joint_prob(t, ["a", "b", "c"], order="bigram") == pytest.approx(1 / 12)
        assert joint_prob(t, ["a", "b", "c"], order="trigram") == pytest.approx(1 / 6)

    def test_failing_position_reported(self):
        t = build_table([["a", "b"]])
        with pytest.raises(UnseenHistoryError) as exc:
            joint_prob(t, ["a", "b", "a"])
        assert exc.value.position == 2

    def test_bad_arguments(self):
        t = build_table([["a"]])
        with pytest.raises(ValueError):
            joint_prob(t, [])
        with pytest.raises(ValueError):
            joint_prob(t, ["a"], order="4gram")

    def test_telescoping_closed_corpus(self):
        # no tracked word ends a sentence, so every conditional denominator equals the prefix count
        sents = [["a", "b", "c", "z"], ["a", "b", "d", "z"], ["a", "e", "c", "z"], ["q", "z"]]
        t = build_table(sents)
        total = t.total_tokens
        for w in (("a", "b", "c"), ("a", "b", "d"), ("a", "e", "c")):
            exact = (
                Fraction(t.unigram_counts[w[0]], total)
                * rational_cond(sents, w[:1], w[1])
                * rational_cond(sents, w[:2], w[2])
            )
            assert exact == Fraction(t.trigram_counts[w], total)
            assert joint_prob(t, w, order="trigram") == pytest.approx(float(exact), abs=1e-12)


class TestTopNgrams:
    def test_simple(self):
        t = build_table([["a", "b"], ["a", "b"], ["c", "d"]])
        assert top_ngrams(t, 2, 1) == [(("a", "b"), 2)]

    def test_tie_break(self):
        t = build_table([["a", "c"], ["a", "b"], ["a", "c"], ["a", "b"]])
        assert top_ngrams(t, 2, 2) == [(("a", "b"), 2), (("a", "c"), 2)]

    def test_short_supply_and_min_count(self):
        t = build_table([["a", "b", "c"], ["a", "b"]])
        assert top_ngrams(t, 3, 10) == [(("a", "b", "c"), 1)]
        assert top_ngrams(t, 2, 10, min_count=2) == [(("a", "b"), 2)]

    def test_bad_arguments(self):
        t = build_table([["a", "b"]])
        for args in ((1, 5), (2, 0), (4, 1)):
            with pytest.raises(ValueError):
                top_ngrams(t, *args)


@settings(max_examples=100)
@given(corpora)
def test_canonical_json_roundtrip(sents):
    t = build_table(sents)
    text = t.to_json()
    assert NgramTable.from_json(text) == t
    assert NgramTable.from_json(text).to_json() == text
    assert build_table(list(reversed(sents))).to_json() == text
