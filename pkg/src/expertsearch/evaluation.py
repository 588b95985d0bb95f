"""Retrieval metrics over runs and relevance judgments, plus significance tests.

Conventions follow trec_eval: queries with no relevant author are excluded
from every mean; a judged query missing from a run scores zero.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from scipy import stats as _scipy_stats

from .errors import RecordFormatError
from .runs import RankedRun

METRICS = ("P@5", "P@10", "MAP", "MRR", "NDCG@100")


class Qrels:
    def __init__(self, grades: Mapping[tuple[str, str], int]):
        self._grades = dict(grades)
        for (qid, aid), grade in self._grades.items():
            if grade < 0:
                raise ValueError(f"negative grade for ({qid}, {aid})")
        self._relevant: dict[str, set[str]] = {}
        self._queries: set[str] = set()
        for (qid, aid), grade in self._grades.items():
            self._queries.add(qid)
            if grade > 0:
                self._relevant.setdefault(qid, set()).add(aid)

    @property
    def query_ids(self) -> list[str]:
        return sorted(self._queries)

    def grade(self, query_id: str, author_id: str) -> int:
        return self._grades.get((query_id, author_id), 0)

    def relevant_authors(self, query_id: str) -> set[str]:
        return self._relevant.get(query_id, set())

    def n_relevant(self, query_id: str) -> int:
        return len(self.relevant_authors(query_id))

    def grades_for(self, query_id: str) -> dict[str, int]:
        return {aid: g for (qid, aid), g in self._grades.items() if qid == query_id}

    @classmethod
    def from_file(cls, path: str | Path) -> "Qrels":
        grades: dict[tuple[str, str], int] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 4:
                    raise RecordFormatError(path, line_no, f"expected 4 fields, got {len(parts)}")
                qid, _, aid, grade_text = parts
                try:
                    grade = int(grade_text)
                except ValueError:
                    raise RecordFormatError(path, line_no, f"bad grade {grade_text!r}") from None
                if grade < 0:
                    raise RecordFormatError(path, line_no, f"negative grade {grade}")
                if (qid, aid) in grades:
                    raise RecordFormatError(path, line_no, f"duplicate judgment for ({qid}, {aid})")
                grades[(qid, aid)] = grade
        return cls(grades)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for (qid, aid) in sorted(self._grades):
                fh.write(f"{qid} 0 {aid} {self._grades[(qid, aid)]}\n")


def precision_at_k(run: RankedRun, qrels: Qrels, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    relevant = qrels.relevant_authors(run.query_id)
    hits = sum(1 for e in run.top(k) if e.author_id in relevant)
    return hits / k


def average_precision(run: RankedRun, qrels: Qrels) -> float | None:
    """None when the query has no relevant author (excluded from MAP)."""
    total_relevant = qrels.n_relevant(run.query_id)
    if total_relevant == 0:
        return None
    relevant = qrels.relevant_authors(run.query_id)
    hits = 0
    acc = 0.0
    for entry in run.entries:
        if entry.author_id in relevant:
            hits += 1
            acc += hits / entry.rank
    return acc / total_relevant


def reciprocal_rank(run: RankedRun, qrels: Qrels) -> float:
    relevant = qrels.relevant_authors(run.query_id)
    for entry in run.entries:
        if entry.author_id in relevant:
            return 1.0 / entry.rank
    return 0.0


def _dcg(grades: Sequence[int]) -> float:
    total = 0.0
    for i, grade in enumerate(grades, start=1):
        total += grade if i == 1 else grade / math.log2(i)
    return total


def ndcg_at_k(run: RankedRun, qrels: Qrels, k: int) -> float | None:
    """None when the query has no relevant author (excluded from the mean)."""
    if qrels.n_relevant(run.query_id) == 0:
        return None
    gained = [qrels.grade(run.query_id, e.author_id) for e in run.top(k)]
    ideal = sorted(qrels.grades_for(run.query_id).values(), reverse=True)[:k]
    return _dcg(gained) / _dcg(ideal)


@dataclass(frozen=True)
class MetricReport:
    per_query: dict[str, dict[str, float]]
    means: dict[str, float]
    evaluated_queries: tuple[str, ...]
    skipped_queries: tuple[str, ...]


def evaluate(runs: Mapping[str, RankedRun], qrels: Qrels) -> MetricReport:
    """Score every judged query; queries without relevant authors are skipped."""
    per_query: dict[str, dict[str, float]] = {}
    evaluated: list[str] = []
    skipped: list[str] = []
    for qid in qrels.query_ids:
        if qrels.n_relevant(qid) == 0:
            skipped.append(qid)
            continue
        run = runs.get(qid, RankedRun(qid, ()))
        per_query[qid] = {
            "P@5": precision_at_k(run, qrels, 5),
            "P@10": precision_at_k(run, qrels, 10),
            "MAP": average_precision(run, qrels),
            "MRR": reciprocal_rank(run, qrels),
            "NDCG@100": ndcg_at_k(run, qrels, 100),
        }
        evaluated.append(qid)
    if not evaluated:
        raise ValueError("no query in the qrels has a relevant author")
    means = {m: sum(per_query[q][m] for q in evaluated) / len(evaluated) for m in METRICS}
    return MetricReport(per_query, means, tuple(evaluated), tuple(skipped))


def report_text(report: MetricReport) -> str:
    lines = ["query\t" + "\t".join(METRICS)]
    for qid in report.evaluated_queries:
        row = report.per_query[qid]
        lines.append(qid + "\t" + "\t".join(f"{row[m]:.4f}" for m in METRICS))
    lines.append("all\t" + "\t".join(f"{report.means[m]:.4f}" for m in METRICS))
    return "\n".join(lines) + "\n"


def paired_t_test(sample_a: Sequence[float], sample_b: Sequence[float], tails: int = 2) -> float:
    """p-value of the paired t-test; one-tailed tests H1: mean(a) > mean(b).

    Zero-variance differences use the limiting convention: two-tailed p is 1
    for equal samples and 0 otherwise; one-tailed p is 0 when a is constantly
    ahead and 1 when level or constantly behind.
    """
    if len(sample_a) != len(sample_b):
        raise ValueError("samples must be paired (equal length)")
    n = len(sample_a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    if tails not in (1, 2):
        raise ValueError("tails must be 1 or 2")
    diffs = [a - b for a, b in zip(sample_a, sample_b)]
    mean = sum(diffs) / n
    sd = statistics.stdev(diffs)
    if sd == 0.0:
        if tails == 2:
            return 1.0 if mean == 0.0 else 0.0
        return 0.0 if mean > 0.0 else 1.0
    t = mean / (sd / math.sqrt(n))
    if tails == 1:
        return float(_scipy_stats.t.sf(t, n - 1))
    return float(2.0 * _scipy_stats.t.sf(abs(t), n - 1))
