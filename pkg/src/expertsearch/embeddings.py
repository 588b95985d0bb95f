"""Entity embeddings: file-backed models and in-repo DeepWalk-style training.

Training follows the classic recipe: truncated random walks over the entity
graph treated as sentences, then a shallow CBOW pass with negative sampling
(predict the focus entity from its averaged walk context). Single-threaded on
purpose so a fixed seed reproduces the model bit for bit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import RecordFormatError
from .kb import KnowledgeGraphSnapshot

log = logging.getLogger(__name__)

EMBEDDING_DIM = 100


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    negative: int = 5
    rng_seed: int = 1

    def __post_init__(self):
        for field in ("walks_per_node", "walk_length", "window", "epochs"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.negative < 0:
            raise ValueError("negative must be >= 0")


class EmbeddingModel:
    """Immutable entity_id -> vector map with fixed dimension."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int = EMBEDDING_DIM):
        self.dim = dim
        self._vectors = {}
        for eid, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(f"vector for {eid} has shape {arr.shape}, expected ({dim},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"vector for {eid} has non-finite components")
            arr.setflags(write=False)
            self._vectors[eid] = arr

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, entity_id: str) -> np.ndarray | None:
        return self._vectors.get(entity_id)

    def vector(self, entity_id: str) -> np.ndarray:
        """Vector for the entity; zeros when the model has none."""
        vec = self._vectors.get(entity_id)
        if vec is None:
            return np.zeros(self.dim)
        return vec

    @property
    def entity_ids(self) -> list[str]:
        return sorted(self._vectors)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#dim {self.dim} #count {len(self._vectors)}\n")
            for eid in sorted(self._vectors):
                comps = " ".join(repr(float(x)) for x in self._vectors[eid])
                fh.write(f"{eid} {comps}\n")

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingModel":
        vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            parts = header.split()
            if len(parts) != 4 or parts[0] != "#dim" or parts[2] != "#count":
                raise RecordFormatError(path, 1, f"bad header {header!r}")
            try:
                dim, count = int(parts[1]), int(parts[3])
            except ValueError:
                raise RecordFormatError(path, 1, f"bad header {header!r}") from None
            if dim != EMBEDDING_DIM:
                raise RecordFormatError(path, 1, f"dimension {dim} != {EMBEDDING_DIM}")
            for line_no, raw in enumerate(fh, start=2):
                line = raw.rstrip("\n")
                if not line:
                    continue
                fields = line.split(" ")
                if len(fields) != dim + 1:
                    raise RecordFormatError(path, line_no,
                                            f"expected {dim} components, got {len(fields) - 1}")
                eid = fields[0]
                if eid in vectors:
                    raise RecordFormatError(path, line_no, f"duplicate entity {eid}")
                try:
                    arr = np.array([float(x) for x in fields[1:]])
                except ValueError:
                    raise RecordFormatError(path, line_no, "bad float component") from None
                if not np.all(np.isfinite(arr)):
                    raise RecordFormatError(path, line_no, "non-finite component")
                vectors[eid] = arr
        if len(vectors) != count:
            raise RecordFormatError(path, 1, f"header declares {count} vectors, file has {len(vectors)}")
        return cls(vectors, dim)


def cosine(v1, v2) -> float:
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise ValueError(f"dimension mismatch: {v1.shape} vs {v2.shape}")
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    return float(np.dot(v1, v2) / (n1 * n2))


def _sigmoid(x: float) -> float:
    if x > 50.0:
        return 1.0
    if x < -50.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


def train_deepwalk(snapshot: KnowledgeGraphSnapshot, config: WalkConfig = WalkConfig()) -> EmbeddingModel:
    """Train one vector per snapshot entity. Deterministic for a fixed seed."""
    nodes = sorted(snapshot.entity_ids)
    index = {e: i for i, e in enumerate(nodes)}
    neighbors: list[list[int]] = []
    for e in nodes:
        adj = sorted(snapshot.out_links[e] | snapshot.in_links[e])
        neighbors.append([index[a] for a in adj])
    isolated = sum(1 for adj in neighbors if not adj)
    if isolated:
        log.warning("%d of %d entities have no edges; their vectors stay at initialization",
                    isolated, len(nodes))

    n = len(nodes)
    rng = np.random.default_rng(config.rng_seed)
    syn0 = (rng.random((n, EMBEDDING_DIM)) - 0.5) / EMBEDDING_DIM
    syn1 = np.zeros((n, EMBEDDING_DIM))

    walks: list[list[int]] = []
    for _ in range(config.walks_per_node):
        for start in rng.permutation(n):
            if not neighbors[start]:
                continue
            walk = [int(start)]
            for _ in range(config.walk_length - 1):
                adj = neighbors[walk[-1]]
                walk.append(adj[int(rng.integers(len(adj)))])
            walks.append(walk)

    if not walks:
        return EmbeddingModel({e: syn0[index[e]] for e in nodes})

    counts = np.zeros(n)
    for walk in walks:
        for node in walk:
            counts[node] += 1
    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    alpha0 = config.learning_rate
    min_alpha = alpha0 * 0.01
    total = config.epochs * sum(len(w) for w in walks)
    processed = 0
    window = config.window

    for _ in range(config.epochs):
        for walk in walks:
            alpha = max(min_alpha, alpha0 * (1.0 - processed / total))
            processed += len(walk)
            for pos, focus in enumerate(walk):
                context = walk[max(0, pos - window):pos] + walk[pos + 1:pos + 1 + window]
                if not context:
                    continue
                h = syn0[context].mean(axis=0)
                e_acc = np.zeros(EMBEDDING_DIM)
                for k in range(config.negative + 1):
                    if k == 0:
                        target, label = focus, 1.0
                    else:
                        target = int(np.searchsorted(noise_cdf, rng.random()))
                        if target == focus:
                            continue
                        label = 0.0
                    f = _sigmoid(float(np.dot(h, syn1[target])))
                    g = (label - f) * alpha
                    e_acc += g * syn1[target]
                    syn1[target] += g * h
                for c in context:
                    syn0[c] += e_acc

    return EmbeddingModel({e: syn0[index[e]] for e in nodes})
