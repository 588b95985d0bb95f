"""Entity annotation of documents and queries.

Ships a deterministic dictionary linker: greedy longest match over normalized
tokens, left to right, non-overlapping. The linker interface is the extension
point for richer annotators (e.g. a remote HTTP service).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import RecordFormatError
from .textutil import escape_field, token_spans, tokenize, unescape_field

log = logging.getLogger(__name__)

# entities whose best confidence never exceeds this are dropped from profiles
RHO_FILTER = 0.2


@dataclass(frozen=True)
class EntityAnnotation:
    entity_id: str
    surface: str
    rho: float
    start: int
    end: int

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho {self.rho} outside [0, 1]")


@dataclass(frozen=True)
class AuthorEntityEvidence:
    author_id: str
    entity_id: str
    rho_ae: float
    doc_ids: tuple[str, ...]

    @property
    def doc_count(self) -> int:
        return len(self.doc_ids)


class LinkerDictionary:
    """Surface form -> candidate entities with confidence scores."""

    def __init__(self, entries: Mapping[tuple[str, ...], list[tuple[str, float]]]):
        self._entries = {
            key: sorted(cands, key=lambda c: (-c[1], c[0]))
            for key, cands in entries.items()
        }
        self.max_surface_tokens = max((len(k) for k in self._entries), default=0)

    @classmethod
    def from_file(cls, path: str | Path) -> "LinkerDictionary":
        entries: dict[tuple[str, ...], list[tuple[str, float]]] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise RecordFormatError(path, line_no,
                                            f"expected 3 tab-separated fields, got {len(parts)}")
                surface, entity_id, score_text = parts
                key = tuple(tokenize(surface))
                if not key:
                    raise RecordFormatError(path, line_no, f"surface {surface!r} has no tokens")
                if not entity_id:
                    raise RecordFormatError(path, line_no, "empty entity_id")
                try:
                    score = float(score_text)
                except ValueError:
                    raise RecordFormatError(path, line_no, f"bad score {score_text!r}") from None
                if not 0.0 <= score <= 1.0:
                    raise RecordFormatError(path, line_no, f"score {score} outside [0, 1]")
                entries.setdefault(key, []).append((entity_id, score))
        return cls(entries)

    def candidates(self, key: tuple[str, ...]) -> list[tuple[str, float]]:
        return self._entries.get(key, [])

    def __contains__(self, key: tuple[str, ...]) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entity_ids(self) -> set[str]:
        return {eid for cands in self._entries.values() for eid, _ in cands}


class Linker:
    """Extension point; implementations annotate raw text with entities."""

    def annotate(self, text: str) -> list[EntityAnnotation]:
        raise NotImplementedError


class DictionaryLinker(Linker):
    def __init__(self, dictionary: LinkerDictionary):
        self.dictionary = dictionary

    def annotate(self, text: str) -> list[EntityAnnotation]:
        spans = token_spans(text)
        tokens = [t for t, _, _ in spans]
        out: list[EntityAnnotation] = []
        i = 0
        n = len(tokens)
        max_len = self.dictionary.max_surface_tokens
        while i < n:
            matched = False
            for length in range(min(max_len, n - i), 0, -1):
                key = tuple(tokens[i:i + length])
                cands = self.dictionary.candidates(key)
                if cands:
                    entity_id, score = cands[0]
                    start = spans[i][1]
                    end = spans[i + length - 1][2]
                    out.append(EntityAnnotation(entity_id, text[start:end], score, start, end))
                    i += length
                    matched = True
                    break
            if not matched:
                i += 1
        return out

    def annotate_query(self, query_text: str, rho_filter: float = RHO_FILTER) -> list[str]:
        """Distinct entity ids mentioned in the query, sorted, after the rho filter."""
        found: dict[str, float] = {}
        for ann in self.annotate(query_text):
            found[ann.entity_id] = max(found.get(ann.entity_id, 0.0), ann.rho)
        return sorted(eid for eid, rho in found.items() if rho > rho_filter)


def build_author_evidence(author_id, store, annotations_by_doc: Mapping[str, list[EntityAnnotation]],
                          rho_filter: float = RHO_FILTER) -> list[AuthorEntityEvidence]:
    """Evidence records for every entity kept in the author's profile.

    An entity survives only if its best confidence across the author's
    documents is strictly above `rho_filter`.
    """
    best_rho: dict[str, float] = {}
    doc_ids: dict[str, set[str]] = {}
    for doc in store.documents_of(author_id):
        for ann in annotations_by_doc.get(doc.doc_id, []):
            prev = best_rho.get(ann.entity_id)
            if prev is None or ann.rho > prev:
                best_rho[ann.entity_id] = ann.rho
            doc_ids.setdefault(ann.entity_id, set()).add(doc.doc_id)
    return [
        AuthorEntityEvidence(author_id, eid, best_rho[eid], tuple(sorted(doc_ids[eid])))
        for eid in sorted(best_rho)
        if best_rho[eid] > rho_filter
    ]


def save_annotations(path: str | Path, annotations_by_doc: Mapping[str, list[EntityAnnotation]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id in sorted(annotations_by_doc):
            for ann in annotations_by_doc[doc_id]:
                fh.write("\t".join([
                    doc_id, ann.entity_id, escape_field(ann.surface),
                    str(ann.start), str(ann.end), repr(ann.rho),
                ]) + "\n")


def load_annotations(path: str | Path) -> dict[str, list[EntityAnnotation]]:
    out: dict[str, list[EntityAnnotation]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise RecordFormatError(path, line_no,
                                        f"expected 6 tab-separated fields, got {len(parts)}")
            doc_id, entity_id, surface, start, end, rho = parts
            try:
                ann = EntityAnnotation(entity_id, unescape_field(surface),
                                       float(rho), int(start), int(end))
            except ValueError as err:
                raise RecordFormatError(path, line_no, str(err)) from None
            out.setdefault(doc_id, []).append(ann)
    return out


def entities_by_author(evidence: Iterable[AuthorEntityEvidence]) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for ev in evidence:
        out.setdefault(ev.author_id, set()).add(ev.entity_id)
    return out


def authors_by_entity(evidence: Iterable[AuthorEntityEvidence]) -> dict[str, set[str]]:
    """A_e: which authors mention each entity (transpose of E_a)."""
    out: dict[str, set[str]] = {}
    for ev in evidence:
        out.setdefault(ev.entity_id, set()).add(ev.author_id)
    return out
