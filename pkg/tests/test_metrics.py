import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ctr_recall_brute, ned_dp
from vtrkit.marked import strip_markers
from vtrkit.metrics import (
    DatasetEmptyError,
    DatasetError,
    EvalRecord,
    SchemaError,
    classify,
    ctr_metrics,
    evaluate,
    evaluate_dataset,
    load_label_pair,
    tsap_match,
    tsap_metrics,
)


def marked(n_bad: int, n_good: int = 1) -> str:
    return " ".join(["[[x]]"] * n_bad + ["ok"] * n_good)


def fixture_records():
    pairs = [(2, 2), (2, 5), (0, 1), (1, 0), (0, 0)]
    return [EvalRecord.from_texts(f"r{i}", marked(g), marked(p)) for i, (g, p) in enumerate(pairs)]


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


@pytest.mark.parametrize("g, p, expected", [(3, 3, True), (3, 5, False), (1, 2, False), (10, 7, True), (10, 6, False)])
def test_tsap_match(g, p, expected):
    assert tsap_match(g, p, 0.7) is expected


def test_tsap_match_requires_positive_gt():
    with pytest.raises(ValueError):
        tsap_match(0, 1, 0.7)


@given(st.integers(1, 10_000), st.floats(0.01, 1.0))
def test_tsap_match_reflexive(g, delta):
    assert tsap_match(g, g, delta)


def test_tsap_fixture():
    p, r, f1, c = tsap_metrics(fixture_records(), 0.7)
    assert (c.tp, c.fp, c.fn, c.tn, c.n_records) == (1, 2, 2, 1, 5)
    assert p == r == f1 == pytest.approx(1 / 3, abs=1e-15)


def test_tsap_degenerate_and_perfect():
    none = [EvalRecord.from_texts(str(i), "a b", "a b") for i in range(4)]
    p, r, f1, c = tsap_metrics(none)
    assert (p, r, f1, c.tn) == (0.0, 0.0, 0.0, 4)
    perfect = [EvalRecord.from_texts(str(g), marked(g), marked(g)) for g in range(4)]
    assert tsap_metrics(perfect)[:3] == (1.0, 1.0, 1.0)


@given(st.integers(0, 6), st.integers(0, 6))
def test_every_record_lands_in_a_bucket(g, p):
    c = classify(g, p)
    assert c.tp + c.fp + c.fn + c.tn >= 1
    if g > 0 and p > 0 and not tsap_match(g, p):
        assert (c.fp, c.fn, c.tp) == (1, 1, 0)


@pytest.mark.parametrize(
    "gt, pred, recall, ned",
    [
        ("hello world", "hello world", 1.0, 0.0),
        ("hello world", "hello word", 0.5, 1 / 11),
        ("abc", "", 0.0, 1.0),
        ("", "", 1.0, 0.0),
        ("", "x", 1.0, 1.0),
    ],
)
def test_ctr_examples(gt, pred, recall, ned):
    r, n = ctr_metrics([EvalRecord.from_texts("a", gt, pred)])
    assert r == pytest.approx(recall, abs=1e-12)
    assert n == pytest.approx(ned, abs=1e-12)


toks = st.lists(st.text("abx", min_size=1, max_size=3), max_size=4)


@settings(max_examples=60)
@given(st.lists(st.tuples(toks, toks), min_size=1, max_size=5))
def test_ctr_matches_brute_force(rows):
    records = [EvalRecord.from_texts(str(i), " ".join(g), " ".join(p)) for i, (g, p) in enumerate(rows)]
    recall, mean_ned = ctr_metrics(records)
    exp_r = sum(ctr_recall_brute(g, p) for g, p in rows) / len(rows)
    exp_n = sum(
        (1.0 if p else 0.0) if not g else ned_dp(" ".join(g), " ".join(p)) for g, p in rows
    ) / len(rows)
    assert recall == pytest.approx(exp_r, abs=1e-12)
    assert mean_ned == pytest.approx(exp_n, abs=1e-12)
    assert 0 <= recall <= 1 and 0 <= mean_ned <= 1


def test_ctr_is_marker_aware_zh():
    rec = EvalRecord.from_texts("z", "菜单", "菜[[单]]", language="zh")
    r, n = ctr_metrics([rec])
    assert r == 0.5 and n == pytest.approx(0.5)


def test_evaluate_dataset_fixture(tmp_path):
    pairs = [(2, 2), (2, 5), (0, 1), (1, 0), (0, 0)]
    path = tmp_path / "d.jsonl"
    write_jsonl(path, [
        {"id": f"r{i}", "level": "image", "language": "en", "gt": marked(g), "pred": {"text": marked(p), "language": "en"}}
        for i, (g, p) in enumerate(pairs)
    ])
    rep = evaluate_dataset(path, 0.7)
    assert rep.precision == rep.recall == rep.f1 == pytest.approx(1 / 3, abs=1e-15)
    recs = fixture_records()
    assert (rep.ctr_recall, rep.ctr_ned) == ctr_metrics(recs)
    d = rep.to_dict()
    assert d["tsap"]["f1"] == rep.f1 and d["counts"]["tp"] == 1
    assert "0.3333" in rep.to_table()


def test_evaluate_dataset_errors(tmp_path):
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    with pytest.raises(DatasetEmptyError):
        evaluate_dataset(empty)
    bad = tmp_path / "b.jsonl"
    bad.write_text('{"id":"a","level":"image","language":"en","gt":"x","pred":"x"}\n{oops\n')
    with pytest.raises(DatasetError) as exc:
        evaluate_dataset(bad)
    assert exc.value.line == 2 and "line 2" in str(exc.value)
    lvl = tmp_path / "l.jsonl"
    lvl.write_text('{"id":"a","level":"page","language":"en","gt":"x","pred":"x"}\n')
    with pytest.raises(SchemaError):
        evaluate_dataset(lvl)
    dup = tmp_path / "d.jsonl"
    dup.write_text('{"id":"a","level":"box","language":"en","gt":"x","pred":"x"}\n' * 2)
    with pytest.raises(SchemaError):
        evaluate_dataset(dup)
    parse = tmp_path / "p.jsonl"
    parse.write_text('{"id":"a","level":"box","language":"en","gt":"[[x","pred":"x"}\n')
    with pytest.raises(DatasetError) as exc:
        evaluate_dataset(parse)
    assert exc.value.line == 1


def test_level_filter(tmp_path):
    path = tmp_path / "d.jsonl"
    write_jsonl(path, [{"id": "a", "level": "image", "language": "en", "gt": "x", "pred": "x"}])
    assert evaluate_dataset(path, level="image").counts.n_records == 1
    with pytest.raises(DatasetEmptyError):
        evaluate_dataset(path, level="box")


@settings(max_examples=30)
@given(st.permutations(range(5)))
def test_evaluate_order_invariant(perm):
    recs = fixture_records()
    assert evaluate([recs[i] for i in perm]) == evaluate(recs)


def test_label_pair_join(tmp_path):
    gt = tmp_path / "gt.jsonl"
    pred = tmp_path / "pred.jsonl"
    write_jsonl(gt, [
        {"id": "1", "level": "box", "language": "zh", "text": "中[[国]]", "anomalous": 1, "total": 2},
        {"id": "2", "level": "box", "language": "zh", "text": "大小", "anomalous": 0, "total": 2},
    ])
    write_jsonl(pred, [{"id": "1", "text": "中[[国]]"}, {"id": "9", "text": "x"}])
    recs = load_label_pair(gt, pred)
    assert [r.id for r in recs] == ["1", "2"]
    assert strip_markers(recs[1].pred) == ""
    rep = evaluate(recs)
    assert rep.counts.tp == 1 and rep.counts.tn == 1
