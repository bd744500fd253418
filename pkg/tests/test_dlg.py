import math

import hypothesis.strategies as st
import pytest
from hypothesis import given

import oracles
from rxnjudge.dlg import (BOUNDARY, Corpus, Lexicon, build_lexicon, count_nonoverlapping,
                          description_length, dlg_score, ngram_counts, segment, segment_dp)
from rxnjudge.errors import CandidateAbsent, EmptyCorpus

ABAB = "abababab"
ABAB_REWRITTEN = 7.5097750043269365
ABAB_DLG = 0.49022499567306355
DISTINCT_DLG = -4.529325012980809


def test_description_length_frozen():
    corpus = Corpus([list(ABAB)])
    assert corpus.baseline_length() == pytest.approx(8.0, abs=1e-12)
    # four fresh symbols plus one spelled-out "a b"
    assert description_length({"r": 4, "a": 1, "b": 1}, 6) == pytest.approx(ABAB_REWRITTEN, abs=1e-12)


def test_dlg_frozen_values():
    assert dlg_score(Corpus([list(ABAB)]), ["a", "b"]) == pytest.approx(ABAB_DLG, abs=1e-12)
    assert dlg_score(Corpus([list("abcdefgh")]), ["a", "b"]) == pytest.approx(DISTINCT_DLG, abs=1e-12)


def test_single_symbol_corpus_has_zero_length():
    assert description_length({"a": 5}, 5) == 0.0


def test_empty_and_absent():
    with pytest.raises(EmptyCorpus):
        description_length({}, 0)
    with pytest.raises(EmptyCorpus):
        dlg_score(Corpus([]), ["a", "b"])
    with pytest.raises(CandidateAbsent):
        dlg_score(Corpus([list(ABAB)]), ["b", "b"])


def test_boundary_only_between_sequences():
    corpus = Corpus([["a", "b"], ["c"], ["a"]])
    assert corpus.stream == ["a", "b", BOUNDARY, "c", BOUNDARY, "a"]
    assert corpus.vocabulary == ["a", "b", "c"]


def test_nonoverlapping_counts():
    assert count_nonoverlapping(list("aaaa"), ["a", "a"]) == 2
    assert count_nonoverlapping(list("aaa"), ["a", "a"]) == 1
    assert count_nonoverlapping(list("abab"), ["b", "a"]) == 1


seqs = st.lists(st.lists(st.sampled_from("abcd"), min_size=1, max_size=12), min_size=1, max_size=5)


@given(seqs, st.data())
def test_dlg_matches_literal_rewrite(sequences, data):
    corpus = Corpus(sequences)
    src = data.draw(st.sampled_from(sequences))
    i = data.draw(st.integers(0, len(src) - 1))
    k = data.draw(st.integers(1, len(src) - i))
    cand = src[i:i + k]
    expected = oracles.dlg(corpus.stream, cand)
    assert dlg_score(corpus, cand) == pytest.approx(expected, abs=1e-9)


@given(seqs)
def test_ngram_counts_agree_with_scan(sequences):
    corpus = Corpus(sequences)
    for gram, n in ngram_counts(corpus, 4).items():
        assert BOUNDARY not in gram
        assert n == count_nonoverlapping(corpus.stream, gram)


def test_build_lexicon_finds_repeated_word():
    corpus = Corpus([list("xyzab"), list("abqab"), list("ab"), list("wab")])
    lex = build_lexicon(corpus, max_n=3, min_count=2)
    assert ("a", "b") in lex
    assert lex.score(["a", "b"]) > 0
    for sym in corpus.vocabulary:
        assert lex.score([sym]) == 0.0
    assert all(g > 0 for w, g in lex.multi_token_words().items())


def test_lexicon_save_load_roundtrip(tmp_path):
    lex = Lexicon({("C", "l"): 1.25, ("c", "1", "c"): 0.1 + 0.2, ("O",): 0.0})
    path = tmp_path / "lex.tsv"
    lex.save(path)
    back = Lexicon.load(path)
    assert back.entries == lex.entries
    assert [w for w, _ in back.ranked()][0] == ("C", "l")


def test_greedy_segment_picks_best_and_falls_back():
    lex = Lexicon({("a", "b"): 2.0, ("a", "b", "c"): 1.0, ("a",): 0.0, ("b",): 0.0})
    seg = segment(list("abcabz"), lex)
    assert seg.segments == (("a", "b"), ("c",), ("a", "b"), ("z",))
    assert seg.words == ["ab", "c", "ab", "z"]
    assert seg.total_goodness == 4.0


def test_greedy_ties_prefer_longer_then_lexicographic():
    lex = Lexicon({("a", "b"): 1.0, ("a", "b", "c"): 1.0})
    assert segment(list("abc"), lex).segments == (("a", "b", "c"),)


def test_dp_beats_greedy_when_greedy_is_myopic():
    lex = Lexicon({("a", "b"): 1.0, ("b", "c", "d"): 5.0})
    assert segment(list("abcd"), lex).total_goodness == 1.0
    dp = segment_dp(list("abcd"), lex)
    assert dp.segments == (("a",), ("b", "c", "d"))
    assert dp.total_goodness == 5.0


@given(st.lists(st.sampled_from("abc"), max_size=15))
def test_segmentations_cover_input(seq):
    lex = Lexicon({("a", "b"): 1.5, ("b", "c"): 0.7, ("a", "a", "a"): 2.0, ("c",): 0.0})
    for seg in (segment(seq, lex), segment_dp(seq, lex)):
        assert [t for w in seg.segments for t in w] == seq
    assert segment_dp(seq, lex).total_goodness >= segment(seq, lex).total_goodness - 1e-12


def test_dlg_sign_on_compressible_corpus():
    corpus = Corpus([list("CCO") for _ in range(20)])
    assert dlg_score(corpus, ["C", "C", "O"]) > 0
    assert math.isfinite(dlg_score(corpus, ["C"]))


def test_cyanophenol_lexicon_segmentation():
    lex = Lexicon({tuple("N#Cc"): 3.0, tuple("1cccc"): 2.0, tuple("c1"): 1.0})
    seg = segment("N # C c 1 c c c c c 1 O".split(), lex)
    assert seg.words == ["N#Cc", "1cccc", "c1", "O"]
    assert seg.total_goodness == 6.0


def test_empty_and_single_token_lexicons():
    lex = Lexicon({("a",): 0.0})
    assert segment([], lex).segments == ()
    assert segment([], lex).total_goodness == 0
    assert segment(list("abca"), lex).words == list("abca")


def test_repeated_molecule_yields_multi_token_words():
    from rxnjudge.smiles_text import tokenize_atomwise
    corpus = Corpus([tokenize_atomwise("N#Cc1ccccc1O")] * 30)
    lex = build_lexicon(corpus, max_n=8)
    assert lex.score(tuple("N#Cc")) > 0
    assert len(lex.multi_token_words()) > 0


def test_all_distinct_corpus_only_fallbacks():
    lex = build_lexicon(Corpus([list("abcdefgh")]), max_n=4, min_count=1)
    assert lex.multi_token_words() == {}
    assert len(lex) == 8


def test_abab_lexicon_entry():
    lex = build_lexicon(Corpus([list(ABAB)]), max_n=2, threshold=0.0)
    assert lex.score(("a", "b")) == pytest.approx(ABAB_DLG, abs=1e-12)


def test_whole_corpus_candidate_is_scored():
    corpus = Corpus([list("abc")])
    assert math.isfinite(dlg_score(corpus, list("abc")))


@given(seqs)
def test_description_length_nonnegative(sequences):
    corpus = Corpus(sequences)
    bits = corpus.baseline_length()
    assert bits >= 0
    assert (bits == 0) == (len(corpus.freq) == 1)
