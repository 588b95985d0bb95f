"""Profile-centric author ranking: exact-match and related-match scores.

Exact match rewards authors whose profiles contain the query entities
themselves; related match rewards semantic proximity via entity relatedness
or embedding similarity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .embeddings import EmbeddingModel, cosine
from .errors import NotFoundError
from .kb import KnowledgeBase
from .profiles import AuthorProfile, DoubleIndex
from .runs import RankedRun

log = logging.getLogger(__name__)

SCALINGS = {
    "identity": lambda r: r,
    "sigmoid": lambda r: 1.0 / (1.0 + math.exp(-r)),
    "sqrt": math.sqrt,
    "square": lambda r: r * r,
}

EXACT_METHODS = ("ec_iaf", "ef_iaf", "rec_iaf")
RELATED_METHODS = ("aer", "raer", "aes")
AGGREGATIONS = ("max", "mean")
TOP_FRACTION = 0.10
EMBED_K = 30


@dataclass(frozen=True)
class ExactMatchConfig:
    method: str = "rec_iaf"
    scaling: str = "sqrt"
    aggregation: str = "mean"

    def __post_init__(self):
        if self.method not in EXACT_METHODS:
            raise ValueError(f"unknown exact-match method {self.method!r}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"unknown aggregation {self.aggregation!r}")


@dataclass(frozen=True)
class RelatedMatchConfig:
    method: str = "aer"
    scaling: str = "sqrt"
    top_fraction: float = TOP_FRACTION
    embed_k: int = EMBED_K

    def __post_init__(self):
        if self.method not in RELATED_METHODS:
            raise ValueError(f"unknown related-match method {self.method!r}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ValueError("top_fraction must be in (0, 1]")
        if self.embed_k < 1:
            raise ValueError("embed_k must be >= 1")


def candidate_authors(query_entities, double_index: DoubleIndex) -> list[str]:
    """A^q: every author whose profile holds at least one query entity."""
    found: set[str] = set()
    for entity_id in query_entities:
        found.update(double_index.entity_authors.get(entity_id, ()))
    return sorted(found)


def iaf(entity_id: str, n_authors: int, double_index: DoubleIndex) -> float:
    """Inverse author frequency ln(|A| / |A_e|)."""
    mentioned_by = len(double_index.entity_authors.get(entity_id, ()))
    if mentioned_by == 0:
        raise NotFoundError(f"entity {entity_id!r} appears in no author profile")
    return math.log(n_authors / mentioned_by)


def exact_match_score(profile: AuthorProfile, query_entities, config: ExactMatchConfig,
                      iaf_values: Mapping[str, float], total_docs: int) -> float:
    """Exact-match aggregation over the query entities.

    `iaf_values` must cover every query entity present in at least one
    profile; entities absent from this author's profile score 0 but still
    count in the mean's denominator.
    """
    if not query_entities:
        return 0.0
    scale = SCALINGS[config.scaling]
    per_entity: list[float] = []
    for e in query_entities:
        if e not in profile.relevance:
            per_entity.append(0.0)
            continue
        term = profile.doc_count[e] * profile.rho[e] * iaf_values[e]
        if config.method == "ef_iaf":
            term = term / total_docs if total_docs else 0.0
        elif config.method == "rec_iaf":
            term *= scale(profile.relevance[e])
        per_entity.append(term)
    if config.aggregation == "max":
        return max(per_entity)
    return sum(per_entity) / len(query_entities)


def top_profile_entities(profile: AuthorProfile, top_fraction: float) -> tuple[str, ...]:
    if not profile.ordered_entities:
        return ()
    k = max(1, math.ceil(top_fraction * len(profile.ordered_entities)))
    return profile.ordered_entities[:k]


def related_match_score(profile: AuthorProfile, query_entities, config: RelatedMatchConfig,
                        kb: KnowledgeBase, embeddings: EmbeddingModel | None) -> float:
    if not query_entities:
        return 0.0
    if config.method == "aes":
        if embeddings is None:
            raise ValueError("aes scoring requires an embedding model")
        query_vec = np.zeros(len(profile.author_vector))
        for e in query_entities:
            query_vec = query_vec + embeddings.vector(e)
        return cosine(query_vec, profile.author_vector)
    top = top_profile_entities(profile, config.top_fraction)
    if not top:
        return 0.0
    scale = SCALINGS[config.scaling]
    total = 0.0
    for eq in query_entities:
        for ep in top:
            term = profile.rho[ep] * kb.relatedness(eq, ep)
            if config.method == "raer":
                term *= scale(profile.relevance[ep])
            total += term
    return total / (len(top) * len(query_entities))


def rank_authors_profile_centric(query_id: str, query_entities, profiles: Mapping[str, AuthorProfile],
                                 double_index: DoubleIndex, n_authors: int,
                                 doc_totals: Mapping[str, int], config, *,
                                 kb: KnowledgeBase | None = None,
                                 embeddings: EmbeddingModel | None = None) -> RankedRun:
    """Rank candidate authors with an exact-match or related-match config."""
    if not query_entities:
        log.info("query %s carries no linked entities; empty profile-centric run", query_id)
        return RankedRun(query_id, ())
    candidates = candidate_authors(query_entities, double_index)
    if not candidates:
        log.info("query %s entities match no author profile", query_id)
        return RankedRun(query_id, ())
    if isinstance(config, ExactMatchConfig):
        iaf_values = {
            e: iaf(e, n_authors, double_index)
            for e in query_entities if double_index.entity_authors.get(e)
        }
        scores = {
            aid: exact_match_score(profiles[aid], query_entities, config,
                                   iaf_values, doc_totals.get(aid, 0))
            for aid in candidates
        }
    else:
        if kb is None:
            raise ValueError("related match requires the knowledge base")
        scores = {
            aid: related_match_score(profiles[aid], query_entities, config, kb, embeddings)
            for aid in candidates
        }
    return RankedRun.from_scores(query_id, scores)
