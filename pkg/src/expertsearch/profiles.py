"""Per-author expertise profiles: entity graph, outlier removal, relevance, vector.

The profile pipeline per author: collect entity evidence, build a graph with
relatedness-weighted edges, drop outlier entities by density clustering,
score the survivors with Personalized PageRank, and sum the top entities'
embedding vectors into an author vector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote, unquote

import numpy as np

from .embeddings import EMBEDDING_DIM, EmbeddingModel
from .errors import RecordFormatError
from .kb import KnowledgeBase
from .linking import AuthorEntityEvidence

log = logging.getLogger(__name__)

DAMPING = 0.85
PPR_TOL = 1e-9
PPR_MAX_ITER = 200
MIN_PTS = 3
CLUSTER_CUT = 0.5
OUTLIER_MAX_FRACTION = 0.2
AUTHOR_VECTOR_K = 30


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class AuthorProfile:
    """Expertise profile: retained entity graph plus relevance and vector."""

    author_id: str
    nodes: tuple[str, ...]
    edges: dict[tuple[str, str], float]
    relevance: dict[str, float]
    ordered_entities: tuple[str, ...]
    author_vector: np.ndarray
    rho: dict[str, float] = field(default_factory=dict)
    doc_count: dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        assert sorted(self.ordered_entities) == sorted(self.nodes)
        if self.nodes:
            assert abs(sum(self.relevance.values()) - 1.0) <= 1e-9
        for (u, v), w in self.edges.items():
            assert u in self.relevance and v in self.relevance
            assert 0.0 <= w <= 1.0
        assert self.author_vector.shape == (EMBEDDING_DIM,)


def build_author_graph(evidence: list[AuthorEntityEvidence], kb: KnowledgeBase):
    """Graph over the author's retained entities; edges carry relatedness > 0."""
    nodes = tuple(sorted(ev.entity_id for ev in evidence))
    edges: dict[tuple[str, str], float] = {}
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            w = kb.relatedness(u, v)
            if w > 0.0:
                edges[edge_key(u, v)] = w
    return nodes, edges


def _mst_prim(n: int, dist) -> list[tuple[int, int, float]]:
    """Prim's algorithm on a dense symmetric distance matrix.

    dist(i, j) must be callable; ties resolve to the smallest node index, so
    the tree is deterministic.
    """
    in_tree = [False] * n
    best = [math.inf] * n
    parent = [-1] * n
    best[0] = 0.0
    edges: list[tuple[int, int, float]] = []
    for _ in range(n):
        u = -1
        for i in range(n):
            if not in_tree[i] and (u == -1 or best[i] < best[u]):
                u = i
        in_tree[u] = True
        if parent[u] >= 0:
            edges.append((parent[u], u, best[u]))
        for v in range(n):
            if not in_tree[v]:
                d = dist(u, v)
                if d < best[v]:
                    best[v] = d
                    parent[v] = u
    return edges


def remove_outliers(nodes, edges, min_pts: int = MIN_PTS, cut: float = CLUSTER_CUT,
                    max_noise_fraction: float = OUTLIER_MAX_FRACTION) -> tuple[str, ...]:
    """Retained node subset after density clustering; singleton clusters are noise.

    Distances are 1 - edge weight (missing edge counts as 1). Clusters come
    from cutting the mutual-reachability minimum spanning tree at `cut`. If
    more than `max_noise_fraction` of the nodes land in noise, the clustering
    is considered invalid and every node is retained.
    """
    nodes = tuple(sorted(nodes))
    n = len(nodes)
    if n <= min_pts:
        return nodes
    index = {e: i for i, e in enumerate(nodes)}
    dmat = np.ones((n, n))
    np.fill_diagonal(dmat, 0.0)
    for (u, v), w in edges.items():
        d = 1.0 - w
        dmat[index[u], index[v]] = d
        dmat[index[v], index[u]] = d

    core = np.empty(n)
    for i in range(n):
        others = np.delete(dmat[i], i)
        others.sort()
        core[i] = others[min_pts - 2]

    def mreach(i: int, j: int) -> float:
        return max(core[i], core[j], dmat[i, j])

    mst = _mst_prim(n, mreach)
    kept_edges = [(a, b) for a, b, d in mst if d <= cut]
    component = list(range(n))

    def find(x: int) -> int:
        while component[x] != x:
            component[x] = component[component[x]]
            x = component[x]
        return x

    for a, b in kept_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            component[max(ra, rb)] = min(ra, rb)
    sizes: dict[int, int] = {}
    for i in range(n):
        sizes[find(i)] = sizes.get(find(i), 0) + 1
    noise = [i for i in range(n) if sizes[find(i)] == 1]
    if len(noise) > max_noise_fraction * n:
        log.info("clustering marked %d of %d nodes as noise; discarding the clustering", len(noise), n)
        return nodes
    noise_set = set(noise)
    return tuple(e for i, e in enumerate(nodes) if i not in noise_set)


def evidence_teleport(nodes, rho: dict[str, float], doc_count: dict[str, int]) -> dict[str, float]:
    """Teleport distribution over retained nodes from annotation evidence."""
    weights = {e: rho[e] * math.log(1 + doc_count[e]) for e in nodes}
    total = sum(weights.values())
    if total <= 0.0:
        return {e: 1.0 / len(nodes) for e in nodes} if nodes else {}
    return {e: w / total for e, w in weights.items()}


def compute_relevance(nodes, edges, teleport: dict[str, float], damping: float = DAMPING,
                      tol: float = PPR_TOL, max_iter: int = PPR_MAX_ITER) -> dict[str, float]:
    """Personalized PageRank over the weighted undirected profile graph.

    Dangling nodes hand their mass to the teleport distribution. Iterates
    until the L1 change drops below `tol` or `max_iter` rounds.
    """
    nodes = tuple(sorted(nodes))
    n = len(nodes)
    if n == 0:
        return {}
    index = {e: i for i, e in enumerate(nodes)}
    tp = np.array([teleport[e] for e in nodes])
    weights = np.zeros((n, n))
    for (u, v), w in edges.items():
        weights[index[u], index[v]] = w
        weights[index[v], index[u]] = w
    out_sum = weights.sum(axis=1)
    dangling = out_sum == 0.0
    trans = np.zeros((n, n))
    nz = ~dangling
    trans[nz] = weights[nz] / out_sum[nz, None]

    x = tp.copy()
    residual = math.inf
    for iteration in range(max_iter):
        flow = trans.T @ x + float(x[dangling].sum()) * tp
        nxt = (1.0 - damping) * tp + damping * flow
        residual = float(np.abs(nxt - x).sum())
        x = nxt
        if residual < tol:
            break
    log.debug("relevance converged after %d iterations, residual %.3g", iteration + 1, residual)
    return {e: float(x[index[e]]) for e in nodes}


def order_entities(relevance: dict[str, float]) -> tuple[str, ...]:
    return tuple(sorted(relevance, key=lambda e: (-relevance[e], e)))


def build_author_vector(ordered_entities, relevance, embeddings: EmbeddingModel,
                        k: int = AUTHOR_VECTOR_K, weighted: bool = False) -> np.ndarray:
    top = ordered_entities[:min(k, len(ordered_entities))]
    vec = np.zeros(EMBEDDING_DIM)
    missing = 0
    for e in top:
        part = embeddings.get(e)
        if part is None:
            missing += 1
            continue
        vec = vec + (relevance[e] * part if weighted else part)
    if missing:
        log.warning("%d of %d top entities lack embedding vectors; treated as zero", missing, len(top))
    return vec


def build_profile(author_id: str, evidence: list[AuthorEntityEvidence], kb: KnowledgeBase,
                  embeddings: EmbeddingModel, *, min_pts: int = MIN_PTS, cut: float = CLUSTER_CUT,
                  max_noise_fraction: float = OUTLIER_MAX_FRACTION, damping: float = DAMPING,
                  tol: float = PPR_TOL, max_iter: int = PPR_MAX_ITER,
                  embed_k: int = AUTHOR_VECTOR_K, weighted_vector: bool = False) -> AuthorProfile:
    nodes, edges = build_author_graph(evidence, kb)
    retained = remove_outliers(nodes, edges, min_pts, cut, max_noise_fraction)
    retained_set = set(retained)
    edges = {k_: w for k_, w in edges.items() if k_[0] in retained_set and k_[1] in retained_set}
    rho = {ev.entity_id: ev.rho_ae for ev in evidence if ev.entity_id in retained_set}
    doc_count = {ev.entity_id: ev.doc_count for ev in evidence if ev.entity_id in retained_set}
    teleport = evidence_teleport(retained, rho, doc_count)
    relevance = compute_relevance(retained, edges, teleport, damping, tol, max_iter)
    ordered = order_entities(relevance)
    vector = build_author_vector(ordered, relevance, embeddings, embed_k, weighted_vector)
    return AuthorProfile(author_id, retained, edges, relevance, ordered, vector, rho, doc_count)


@dataclass(frozen=True)
class DoubleIndex:
    author_entities: dict[str, tuple[str, ...]]
    entity_authors: dict[str, tuple[str, ...]]


def build_double_index(profiles: dict[str, AuthorProfile]) -> DoubleIndex:
    author_entities = {aid: prof.ordered_entities for aid, prof in profiles.items()}
    entity_authors: dict[str, list[str]] = {}
    for aid in sorted(profiles):
        for e in profiles[aid].nodes:
            entity_authors.setdefault(e, []).append(aid)
    return DoubleIndex(author_entities, {e: tuple(a) for e, a in entity_authors.items()})


# -- profile files -------------------------------------------------------------

def profile_filename(author_id: str) -> str:
    return quote(author_id, safe="") + ".profile"


def author_id_from_filename(name: str) -> str:
    return unquote(name.removesuffix(".profile"))


def save_profile(path: str | Path, profile: AuthorProfile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in profile.ordered_entities:
            fh.write(f"N {e} {repr(profile.relevance[e])} {repr(profile.rho[e])} {profile.doc_count[e]}\n")
        for (u, v) in sorted(profile.edges):
            fh.write(f"E {u} {v} {repr(profile.edges[(u, v)])}\n")
        fh.write("V " + " ".join(repr(float(x)) for x in profile.author_vector) + "\n")


def load_profile(path: str | Path, author_id: str) -> AuthorProfile:
    relevance: dict[str, float] = {}
    rho: dict[str, float] = {}
    doc_count: dict[str, int] = {}
    ordered: list[str] = []
    edges: dict[tuple[str, str], float] = {}
    vector = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ")
            try:
                if parts[0] == "N" and len(parts) == 5:
                    _, eid, rel, rho_ae, count = parts
                    ordered.append(eid)
                    relevance[eid] = float(rel)
                    rho[eid] = float(rho_ae)
                    doc_count[eid] = int(count)
                elif parts[0] == "E" and len(parts) == 4:
                    edges[(parts[1], parts[2])] = float(parts[3])
                elif parts[0] == "V" and len(parts) == EMBEDDING_DIM + 1:
                    vector = np.array([float(x) for x in parts[1:]])
                else:
                    raise RecordFormatError(path, line_no, f"unrecognized record {line!r}")
            except ValueError:
                raise RecordFormatError(path, line_no, f"bad number in {line!r}") from None
    if vector is None:
        raise RecordFormatError(path, 1, "missing author vector line")
    return AuthorProfile(author_id, tuple(sorted(ordered)), edges, relevance,
                         tuple(ordered), vector, rho, doc_count)
