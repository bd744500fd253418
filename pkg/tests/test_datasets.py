import logging
from collections import defaultdict

import pytest
from hypothesis import given
import hypothesis.strategies as st

from rxnjudge import datasets as ds
from rxnjudge.errors import TooFewRecords
from rxnjudge.smiles_text import parse_reaction
from rxnjudge.synthetic import uspto_like


def rec(text, label=1):
    return ds.parse_line(text, "positive" if label else "negative")


def test_load_corpus_counts_malformed(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("1\tCC>>CO\n0\tC.O>>CO\n1\tnot a reaction\n\n1\tCCl>>CO\n", encoding="utf-8")
    res = ds.load_corpus(p)
    assert len(res) == 3
    assert [lineno for lineno, _ in res.malformed] == [3]
    assert [r.label for r in res] == [1, 0, 1]


def test_load_corpus_fixed_labels(tmp_path):
    p = tmp_path / "pos.txt"
    p.write_text("CC>>CO\nC[CH2:1]O>>CCO\n", encoding="utf-8")
    res = ds.load_corpus(p, "negative", ds.REAL_FAILED)
    assert [(r.label, r.source, r.key) for r in res] == [(0, "real_failed", "CC>>CO"),
                                                        (0, "real_failed", "CCO>>CCO")]
    with pytest.raises(ValueError):
        ds.load_corpus(p, "sideways")


def test_bad_label_column():
    with pytest.raises(ds.MalformedReaction):
        ds.parse_line("2\tCC>>C")
    with pytest.raises(ds.MalformedReaction):
        ds.parse_line("CC>>C")


def test_write_and_reload_roundtrip(tmp_path):
    records = [rec("CC>>CO"), rec("O.C>>C", 0)]
    p = tmp_path / "out.tsv"
    assert ds.write_records(p, records) == 2
    assert p.read_text(encoding="utf-8") == "1\tCC>>CO\n0\tC.O>>C\n"
    assert list(ds.load_corpus(p)) == records


def test_deduplicate_rules(caplog):
    a, b = rec("O.C>>C"), rec("C.O>>C")
    assert ds.deduplicate([a, a]) == [a]
    assert ds.deduplicate([a, b]) == [a]
    with caplog.at_level(logging.WARNING):
        out = ds.deduplicate([rec("CC>>C"), rec("CC>>C", 0), rec("N>>N")])
    assert [(r.key, r.label) for r in out] == [("CC>>C", 0), ("N>>N", 1)]
    assert "conflict" in caplog.text


@given(st.lists(st.tuples(st.sampled_from(["C>>C", "CC>>C", "O.C>>C", "C.O>>C", "N>>C"]),
                          st.integers(0, 1))))
def test_deduplicate_matches_grouping_oracle(items):
    records = [rec(t, y) for t, y in items]
    groups = defaultdict(set)
    for r in records:
        groups[r.key].add(r.label)
    out = ds.deduplicate(records)
    assert {r.key: r.label for r in out} == {k: min(v) for k, v in groups.items()}
    assert len(out) == len(groups)


def make_records(n_pos, n_neg):
    texts = uspto_like(n_pos + n_neg, seed=5)
    return [rec(t, 1) for t in texts[:n_pos]] + [rec(t, 0) for t in texts[n_pos:]]


def test_split_stratified_and_deterministic():
    records = make_records(300, 40)
    s1 = ds.split(records, seed=7)
    s2 = ds.split(records, seed=7)
    assert s1 == s2
    assert ds.split(records, seed=8).test != s1.test
    counts = s1.counts()
    assert counts["test"] == {"positive": 30, "negative": 4}
    assert counts["dev"] == {"positive": 27, "negative": 4}
    assert counts["train"] == {"positive": 243, "negative": 32}
    keys = [r.key for part in (s1.train, s1.dev, s1.test) for r in part]
    assert sorted(keys) == sorted(r.key for r in records)


def test_split_ignores_input_order():
    records = make_records(50, 10)
    assert ds.split(records, 1) == ds.split(list(reversed(records)), 1)


def test_split_too_few():
    with pytest.raises(TooFewRecords):
        ds.split(make_records(10, 2))


def test_reactant_swap_and_drop():
    positives = [parse_reaction(t) for t in ["CCO.OC(=O)C>>CCOC(=O)C", "CCN.OC(=O)C>>CCNC(=O)C"]]
    swap = ds.ReactantSwap()
    swap.prepare(positives)
    cands = {c.render() for c in swap.candidates(positives[0])}
    assert "CCN.OC(=O)C>>CCOC(=O)C" in cands
    drops = {c.render() for c in ds.ReactantDrop().candidates(positives[0])}
    assert drops == {"OC(=O)C>>CCOC(=O)C", "CCO>>CCOC(=O)C"}


def test_token_rule_wildcards(tmp_path):
    rule = ds.TokenRule(("C", "*"), ("*", "N"))
    assert list(rule.rewrite(["C", "O", "C"])) == [["O", "N", "C"]]
    p = tmp_path / "rules.tsv"
    p.write_text("# comment\nC l\tB r\n", encoding="utf-8")
    assert ds.load_rules(p) == [ds.TokenRule(("C", "l"), ("B", "r"))]
    with pytest.raises(ValueError):
        ds.TokenRule(("C",), ("*",))


def test_generate_negatives_filter_and_cap():
    texts = uspto_like(200, seed=3)
    positives = [rec(t) for t in texts]
    index = ds.known_positive_index(positives)
    negs = ds.generate_negatives(positives, ds.default_rules(), index, cap=150)
    assert len(negs) == 150
    assert all(n.key not in index and n.label == 0 and n.source == ds.RULE_GENERATED for n in negs)
    assert len({n.key for n in negs}) == 150
    assert ds.generate_negatives(positives, ds.default_rules(), index, cap=0) == []
    again = ds.generate_negatives(positives, ds.default_rules(), index, cap=150)
    assert again == negs


def test_known_positive_candidate_filtered():
    positives = [rec("CC.O>>CCO"), rec("O>>CCO")]
    index = ds.known_positive_index(positives)
    negs = ds.generate_negatives(positives[:1], [ds.ReactantDrop()], index, cap=10)
    # dropping CC gives O>>CCO, which is a known positive
    assert [n.key for n in negs] == ["CC>>CCO"]


def test_incremental_mix_nested():
    base, pool = [1, 2], list(range(10, 20))
    assert ds.incremental_mix(base, pool, 0.0) == base
    assert ds.incremental_mix(base, pool, 1.0) == base + pool
    assert len(ds.incremental_mix(base, list(range(100)), 0.29)) == 2 + 29
    prev = base
    for k in range(11):
        cur = ds.incremental_mix(base, pool, k / 10)
        assert cur[:len(prev)] == prev
        prev = cur
    with pytest.raises(ValueError):
        ds.incremental_mix(base, pool, 1.5)
