"""Ranked author lists and TREC-format run files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import RecordFormatError


@dataclass(frozen=True)
class RunEntry:
    author_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedRun:
    query_id: str
    entries: tuple[RunEntry, ...]

    @classmethod
    def from_scores(cls, query_id: str, scores: Mapping[str, float]) -> "RankedRun":
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        entries = tuple(RunEntry(aid, float(score), rank)
                        for rank, (aid, score) in enumerate(ordered, start=1))
        return cls(query_id, entries)

    def validate(self) -> None:
        seen = set()
        for i, entry in enumerate(self.entries):
            assert entry.rank == i + 1, "ranks must be consecutive from 1"
            assert entry.author_id not in seen, "duplicate author in run"
            seen.add(entry.author_id)
            if i:
                prev = self.entries[i - 1]
                assert prev.score >= entry.score, "scores must be non-increasing"
                if prev.score == entry.score:
                    assert prev.author_id < entry.author_id, "ties must order by author_id"

    @property
    def author_ids(self) -> list[str]:
        return [e.author_id for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def score_of(self, author_id: str) -> float | None:
        for entry in self.entries:
            if entry.author_id == author_id:
                return entry.score
        return None

    def rank_of(self, author_id: str) -> int | None:
        for entry in self.entries:
            if entry.author_id == author_id:
                return entry.rank
        return None

    def top(self, limit: int) -> tuple[RunEntry, ...]:
        return self.entries[:limit]


def save_runs(path: str | Path, runs: Mapping[str, RankedRun], tag: str = "expertsearch") -> None:
    """Write runs as TREC lines `query_id Q0 author_id rank score tag`."""
    with open(path, "w", encoding="utf-8") as fh:
        for query_id in sorted(runs):
            for entry in runs[query_id].entries:
                fh.write(f"{query_id} Q0 {entry.author_id} {entry.rank} {repr(entry.score)} {tag}\n")


def load_runs(path: str | Path) -> dict[str, RankedRun]:
    """Read a TREC run file; entries are re-sorted by (score desc, author_id)."""
    scores: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 6:
                raise RecordFormatError(path, line_no, f"expected 6 fields, got {len(parts)}")
            query_id, _, author_id, _, score_text, _ = parts
            try:
                score = float(score_text)
            except ValueError:
                raise RecordFormatError(path, line_no, f"bad score {score_text!r}") from None
            per_query = scores.setdefault(query_id, {})
            if author_id in per_query:
                raise RecordFormatError(path, line_no,
                                        f"duplicate author {author_id} for query {query_id}")
            per_query[author_id] = score
    return {qid: RankedRun.from_scores(qid, per_query) for qid, per_query in scores.items()}
