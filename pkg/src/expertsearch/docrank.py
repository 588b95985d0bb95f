"""Full-text document retrieval and document-centric author ranking.

Four scoring schemes over one inverted index, then one of four techniques to
fold a ranked document list into per-author scores.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

from .corpus import CorpusStore
from .runs import RankedRun
from .textutil import tokenize

log = logging.getLogger(__name__)

SCHEMES = ("tfidf", "bm25", "lm_dirichlet", "lm_jm")
DOC_FUSIONS = ("meank", "max", "rr", "combnz")
MAX_DOCS = 1000
MEANK_K = 5


@dataclass(frozen=True)
class ScoringScheme:
    name: str = "bm25"
    k1: float = 1.2
    b: float = 0.75
    mu: float = 2000.0
    lam: float = 0.1

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise ValueError(f"unknown scheme {self.name!r}; choose from {', '.join(SCHEMES)}")
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must be in (0, 1)")


@dataclass(frozen=True)
class DocScore:
    doc_id: str
    score: float
    rank: int


class TextIndex:
    """In-memory inverted index; rebuilt from the store on load (cheap, exact)."""

    def __init__(self, store: CorpusStore):
        self.postings: dict[str, dict[str, int]] = {}
        self.doc_len: dict[str, int] = {}
        self.cf: dict[str, int] = {}
        for doc in store.iter_documents():
            tokens = tokenize(doc.title + " " + doc.body)
            self.doc_len[doc.doc_id] = len(tokens)
            for token in tokens:
                per_doc = self.postings.setdefault(token, {})
                per_doc[doc.doc_id] = per_doc.get(doc.doc_id, 0) + 1
                self.cf[token] = self.cf.get(token, 0) + 1
        self.n_docs = len(self.doc_len)
        self.total_tokens = sum(self.doc_len.values())
        self.avgdl = self.total_tokens / self.n_docs if self.n_docs else 0.0

    def df(self, token: str) -> int:
        return len(self.postings.get(token, {}))

    def tf(self, token: str, doc_id: str) -> int:
        return self.postings.get(token, {}).get(doc_id, 0)


def score_documents(index: TextIndex, query_text: str, scheme: ScoringScheme,
                    max_docs: int = MAX_DOCS) -> list[DocScore]:
    """Ranked candidate documents: those containing at least one query term.

    Query terms are consumed with multiplicity. Terms absent from the corpus
    are skipped (they carry no usable statistics under any scheme).
    """
    query_tokens = [t for t in tokenize(query_text) if index.cf.get(t, 0) > 0]
    if not query_tokens:
        return []
    candidates: set[str] = set()
    for token in set(query_tokens):
        candidates.update(index.postings[token])
    scores: dict[str, float] = {}
    for doc_id in candidates:
        scores[doc_id] = _score_doc(index, query_tokens, doc_id, scheme)
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:max_docs]
    return [DocScore(doc_id, score, rank)
            for rank, (doc_id, score) in enumerate(ordered, start=1)]


def _score_doc(index: TextIndex, query_tokens: list[str], doc_id: str,
               scheme: ScoringScheme) -> float:
    n = index.n_docs
    dl = index.doc_len[doc_id]
    total = 0.0
    if scheme.name == "tfidf":
        for t in query_tokens:
            tf = index.tf(t, doc_id)
            if tf:
                total += tf * math.log(1.0 + n / index.df(t))
    elif scheme.name == "bm25":
        for t in query_tokens:
            tf = index.tf(t, doc_id)
            if tf:
                df = index.df(t)
                idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
                norm = tf + scheme.k1 * (1.0 - scheme.b + scheme.b * dl / index.avgdl)
                total += idf * tf * (scheme.k1 + 1.0) / norm
    elif scheme.name == "lm_dirichlet":
        for t in query_tokens:
            p_c = index.cf[t] / index.total_tokens
            total += math.log((index.tf(t, doc_id) + scheme.mu * p_c) / (dl + scheme.mu))
    else:  # lm_jm
        for t in query_tokens:
            p_c = index.cf[t] / index.total_tokens
            total += math.log((1.0 - scheme.lam) * index.tf(t, doc_id) / dl + scheme.lam * p_c)
    return total


def fuse_doc_scores(doc_scores: list[DocScore], method: str, *, k: int = MEANK_K,
                    total_docs: int | None = None) -> float:
    """Author score fused from the author's retrieved documents.

    `doc_scores` must carry the documents' global ranks in the retrieved list.
    `total_docs` is the author's full document count, required by combnz.
    """
    if not doc_scores:
        raise ValueError("author has no retrieved documents")
    if method == "meank":
        if k <= 0:
            raise ValueError("meank requires k >= 1")
        top = sorted((d.score for d in doc_scores), reverse=True)[:min(k, len(doc_scores))]
        return sum(top) / k
    if method == "max":
        return max(d.score for d in doc_scores)
    if method == "rr":
        return sum(1.0 / d.rank for d in doc_scores)
    if method == "combnz":
        if total_docs is None or total_docs < 1:
            raise ValueError("combnz requires the author's total document count")
        return (len(doc_scores) / total_docs) * sum(d.score for d in doc_scores)
    raise ValueError(f"unknown fusion method {method!r}; choose from {', '.join(DOC_FUSIONS)}")


def rank_authors_doc_centric(query_id: str, query_text: str, store: CorpusStore,
                             index: TextIndex, scheme: ScoringScheme, method: str = "rr",
                             *, k: int = MEANK_K, max_docs: int = MAX_DOCS) -> RankedRun:
    ranked = score_documents(index, query_text, scheme, max_docs)
    by_author: dict[str, list[DocScore]] = {}
    for doc_score in ranked:
        for author_id in store.document(doc_score.doc_id).author_ids:
            by_author.setdefault(author_id, []).append(doc_score)
    scores = {
        author_id: fuse_doc_scores(docs, method, k=k,
                                   total_docs=len(store.documents_of(author_id)))
        for author_id, docs in by_author.items()
    }
    return RankedRun.from_scores(query_id, scores)
