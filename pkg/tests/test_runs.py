from __future__ import annotations

import random

import pytest

from expertsearch.errors import RecordFormatError
from expertsearch.runs import RankedRun, RunEntry, load_runs, save_runs


def test_from_scores_orders_and_ranks():
    run = RankedRun.from_scores("q1", {"b": 0.5, "a": 0.9, "c": 0.5})
    assert run.author_ids == ["a", "b", "c"]
    assert [e.rank for e in run.entries] == [1, 2, 3]
    run.validate()


def test_tie_breaks_by_author_id():
    run = RankedRun.from_scores("q1", {"z": 1.0, "a": 1.0, "m": 1.0})
    assert run.author_ids == ["a", "m", "z"]


def test_lookup_helpers():
    run = RankedRun.from_scores("q1", {"a": 0.9, "b": 0.5})
    assert run.score_of("b") == 0.5
    assert run.rank_of("b") == 2
    assert run.score_of("zz") is None
    assert run.rank_of("zz") is None
    assert [e.author_id for e in run.top(1)] == ["a"]


def test_validate_catches_bad_runs():
    bad = RankedRun("q1", (RunEntry("a", 0.5, 1), RunEntry("b", 0.9, 2)))
    with pytest.raises(AssertionError):
        bad.validate()
    bad_rank = RankedRun("q1", (RunEntry("a", 0.9, 1), RunEntry("b", 0.5, 3)))
    with pytest.raises(AssertionError):
        bad_rank.validate()


def test_round_trip_byte_identical(tmp_path):
    rng = random.Random(2)
    runs = {}
    for q in range(3):
        scores = {f"a{i}": rng.random() for i in range(6)}
        runs[f"q{q}"] = RankedRun.from_scores(f"q{q}", scores)
    path = tmp_path / "run.txt"
    save_runs(path, runs)
    loaded = load_runs(path)
    assert set(loaded) == set(runs)
    for qid in runs:
        assert loaded[qid] == runs[qid]
    save_runs(tmp_path / "run2.txt", loaded)
    assert (tmp_path / "run2.txt").read_bytes() == path.read_bytes()


def test_load_resorts_by_score(tmp_path):
    path = tmp_path / "run.txt"
    path.write_text("q1 Q0 a 1 0.2 t\nq1 Q0 b 2 0.9 t\n", encoding="utf-8")
    run = load_runs(path)["q1"]
    assert run.author_ids == ["b", "a"]
    assert [e.rank for e in run.entries] == [1, 2]


@pytest.mark.parametrize("text,fragment", [
    ("q1 Q0 a 1 0.5\n", "expected 6 fields"),
    ("q1 Q0 a 1 oops t\n", "bad score"),
    ("q1 Q0 a 1 0.5 t\nq1 Q0 a 2 0.4 t\n", "duplicate author"),
])
def test_load_errors(tmp_path, text, fragment):
    path = tmp_path / "run.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(RecordFormatError) as err:
        load_runs(path)
    assert fragment in str(err.value)
