"""Knowledge-graph snapshot and entity relatedness.

Relatedness follows Milne and Witten's in-link overlap measure. Scores are
memoized in an unbounded in-process cache keyed by unordered entity pair;
computation is pure, so racing writers store identical values.
"""

from __future__ import annotations

import math
import threading
from pathlib import Path
from typing import NamedTuple

from .errors import NotFoundError, RecordFormatError


class KnowledgeGraphSnapshot:
    """Immutable directed entity graph with per-entity in-link sets."""

    def __init__(self, entity_ids, links):
        self.entity_ids = frozenset(entity_ids)
        if not self.entity_ids:
            raise ValueError("snapshot must contain at least one entity")
        in_links: dict[str, set[str]] = {e: set() for e in self.entity_ids}
        out_links: dict[str, set[str]] = {e: set() for e in self.entity_ids}
        for src, dst in links:
            if src not in self.entity_ids or dst not in self.entity_ids:
                raise ValueError(f"link ({src}, {dst}) references an undeclared entity")
            out_links[src].add(dst)
            in_links[dst].add(src)
        self.in_links = {e: frozenset(s) for e, s in in_links.items()}
        self.out_links = {e: frozenset(s) for e, s in out_links.items()}

    @property
    def entity_count(self) -> int:
        return len(self.entity_ids)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entity_ids

    def in_links_of(self, entity_id: str) -> frozenset[str]:
        try:
            return self.in_links[entity_id]
        except KeyError:
            raise NotFoundError(f"unknown entity {entity_id!r}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "KnowledgeGraphSnapshot":
        declared = None
        entity_ids: list[str] = []
        links: list[tuple[str, str]] = []
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#entities"):
                    if declared is not None:
                        raise RecordFormatError(path, line_no, "duplicate #entities header")
                    try:
                        declared = int(line.split()[1])
                    except (IndexError, ValueError):
                        raise RecordFormatError(path, line_no, f"bad header {line!r}") from None
                    continue
                parts = line.split("\t")
                if parts[0] == "E" and len(parts) == 2:
                    if parts[1] in entity_ids:
                        raise RecordFormatError(path, line_no, f"duplicate entity {parts[1]}")
                    entity_ids.append(parts[1])
                elif parts[0] == "L" and len(parts) == 3:
                    links.append((parts[1], parts[2]))
                else:
                    raise RecordFormatError(path, line_no, f"unrecognized record {line!r}")
        if declared is None:
            raise RecordFormatError(path, 1, "missing #entities header")
        if declared != len(entity_ids):
            raise RecordFormatError(path, 1,
                                    f"header declares {declared} entities, file has {len(entity_ids)}")
        try:
            return cls(entity_ids, links)
        except ValueError as err:
            raise RecordFormatError(path, 1, str(err)) from None

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#entities {self.entity_count}\n")
            for e in sorted(self.entity_ids):
                fh.write(f"E\t{e}\n")
            for src in sorted(self.out_links):
                for dst in sorted(self.out_links[src]):
                    fh.write(f"L\t{src}\t{dst}\n")


def milne_witten(snapshot: KnowledgeGraphSnapshot, e1: str, e2: str) -> float:
    """In-link overlap relatedness, clamped to [0, 1]."""
    i1 = snapshot.in_links_of(e1)
    i2 = snapshot.in_links_of(e2)
    if not i1 or not i2:
        return 0.0
    inter = len(i1 & i2)
    if inter == 0:
        return 0.0
    small = min(len(i1), len(i2))
    if small == snapshot.entity_count:
        # log denominator vanishes; the formula's limit for overlapping sets
        return 1.0
    big = max(len(i1), len(i2))
    rel = 1.0 - (math.log(big) - math.log(inter)) / (math.log(snapshot.entity_count) - math.log(small))
    return min(1.0, max(0.0, rel))


class CacheStats(NamedTuple):
    hits: int
    misses: int
    entries: int


class KnowledgeBase:
    """Snapshot plus a memoizing relatedness scorer."""

    def __init__(self, snapshot: KnowledgeGraphSnapshot, scorer=milne_witten):
        self.snapshot = snapshot
        self._scorer = scorer
        self._cache: dict[tuple[str, str], float] = {}
        self._hits = 0
        self._misses = 0
        self._lock = threading.Lock()

    def relatedness(self, e1: str, e2: str) -> float:
        if e1 not in self.snapshot:
            raise NotFoundError(f"unknown entity {e1!r}")
        if e2 not in self.snapshot:
            raise NotFoundError(f"unknown entity {e2!r}")
        key = (e1, e2) if e1 <= e2 else (e2, e1)
        with self._lock:
            cached = self._cache.get(key)
            if cached is not None:
                self._hits += 1
                return cached
            self._misses += 1
        value = self._scorer(self.snapshot, e1, e2)
        with self._lock:
            self._cache[key] = value
        return value

    def cache_stats(self) -> CacheStats:
        with self._lock:
            return CacheStats(self._hits, self._misses, len(self._cache))
