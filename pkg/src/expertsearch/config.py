"""Engine configuration: flat key=value file with typed, closed-world parsing."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .docrank import DOC_FUSIONS, SCHEMES, ScoringScheme
from .embeddings import WalkConfig
from .errors import ConfigError
from .fusion import FUSION_METHODS, MISSING_RANK_MODES
from .profilerank import (
    AGGREGATIONS,
    EXACT_METHODS,
    RELATED_METHODS,
    ExactMatchConfig,
    RelatedMatchConfig,
)

PROFILE_METHODS = EXACT_METHODS + RELATED_METHODS
STRATEGIES = ("doc", "profile", "fused")


@dataclass
class EngineConfig:
    # input artifacts
    documents_path: str = ""
    authors_path: str = ""
    dictionary_path: str = ""
    snapshot_path: str = ""
    embeddings_path: str = ""  # empty: train from the snapshot instead
    store_dir: str = "store"

    # strategy defaults
    scheme: str = "bm25"
    doc_fusion: str = "rr"
    profile_method: str = "rec_iaf"
    scaling: str = "sqrt"
    aggregation: str = "mean"
    fusion_method: str = "rrm"

    # retrieval knobs
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    dirichlet_mu: float = 2000.0
    jm_lambda: float = 0.1
    meank_k: int = 5
    max_docs: int = 1000

    # profile knobs
    rho_filter: float = 0.2
    query_rho_filter: float = -1.0  # negative: follow rho_filter
    min_pts: int = 3
    cluster_cut: float = 0.5
    outlier_max_fraction: float = 0.2
    ppr_damping: float = 0.85
    ppr_tol: float = 1e-9
    ppr_max_iter: int = 200
    top_fraction: float = 0.1
    embed_k: int = 30
    weighted_author_vector: bool = False

    # run fusion
    fusion_normalize: bool = True
    fusion_missing_rank: str = "len_plus_one"

    # embedding training
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    negative: int = 5
    seed: int = 1

    # service
    http_host: str = "127.0.0.1"
    http_port: int = 8040

    def effective_query_rho_filter(self) -> float:
        return self.rho_filter if self.query_rho_filter < 0 else self.query_rho_filter

    def scoring_scheme(self) -> ScoringScheme:
        return ScoringScheme(self.scheme, k1=self.bm25_k1, b=self.bm25_b,
                             mu=self.dirichlet_mu, lam=self.jm_lambda)

    def exact_match_config(self) -> ExactMatchConfig:
        return ExactMatchConfig(self.profile_method, self.scaling, self.aggregation)

    def related_match_config(self) -> RelatedMatchConfig:
        return RelatedMatchConfig(self.profile_method, self.scaling,
                                  self.top_fraction, self.embed_k)

    def walk_config(self) -> WalkConfig:
        return WalkConfig(self.walks_per_node, self.walk_length, self.window,
                          self.epochs, self.learning_rate, self.negative, self.seed)

    def validate(self) -> None:
        try:
            ScoringScheme(self.scheme, k1=self.bm25_k1, b=self.bm25_b,
                          mu=self.dirichlet_mu, lam=self.jm_lambda)
            if self.profile_method in EXACT_METHODS:
                self.exact_match_config()
            elif self.profile_method not in RELATED_METHODS:
                raise ValueError(f"unknown profile_method {self.profile_method!r}")
            # top_fraction/embed_k feed profiles and explanations on every path
            RelatedMatchConfig(self.profile_method if self.profile_method in RELATED_METHODS
                               else "aer", self.scaling, self.top_fraction, self.embed_k)
            self.walk_config()
        except ValueError as err:
            raise ConfigError(str(err)) from None
        if self.doc_fusion not in DOC_FUSIONS:
            raise ConfigError(f"unknown doc_fusion {self.doc_fusion!r}")
        if self.fusion_method not in FUSION_METHODS:
            raise ConfigError(f"unknown fusion_method {self.fusion_method!r}")
        if self.fusion_missing_rank not in MISSING_RANK_MODES:
            raise ConfigError(f"unknown fusion_missing_rank {self.fusion_missing_rank!r}")
        if not 0.0 <= self.rho_filter <= 1.0:
            raise ConfigError("rho_filter must be in [0, 1]")
        if self.query_rho_filter > 1.0:
            raise ConfigError("query_rho_filter must be in [0, 1] (or negative to follow rho_filter)")
        if self.meank_k < 1:
            raise ConfigError("meank_k must be >= 1")
        if self.max_docs < 1:
            raise ConfigError("max_docs must be >= 1")
        if self.min_pts < 1:
            raise ConfigError("min_pts must be >= 1")
        if not 0.0 <= self.cluster_cut <= 1.0:
            raise ConfigError("cluster_cut must be in [0, 1]")
        if not 0.0 <= self.outlier_max_fraction <= 1.0:
            raise ConfigError("outlier_max_fraction must be in [0, 1]")
        if not 0.0 < self.ppr_damping < 1.0:
            raise ConfigError("ppr_damping must be in (0, 1)")
        if self.ppr_tol <= 0:
            raise ConfigError("ppr_tol must be > 0")
        if self.ppr_max_iter < 1:
            raise ConfigError("ppr_max_iter must be >= 1")
        if not 1 <= self.http_port <= 65535:
            raise ConfigError("http_port must be a valid port")


_BOOL_VALUES = {"true": True, "false": False}


def _convert(key: str, text: str, target_type):
    if target_type is bool:
        if text.lower() not in _BOOL_VALUES:
            raise ConfigError(f"{key}: expected true or false, got {text!r}")
        return _BOOL_VALUES[text.lower()]
    try:
        return target_type(text)
    except ValueError:
        raise ConfigError(f"{key}: expected {target_type.__name__}, got {text!r}") from None


def config_from_items(items: dict[str, str], base: EngineConfig | None = None) -> EngineConfig:
    config = EngineConfig() if base is None else base
    known = {f.name: f.type for f in fields(EngineConfig)}
    types = {"str": str, "int": int, "float": float, "bool": bool}
    for key, text in items.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(config, key, _convert(key, text, types[known[key]]))
    config.validate()
    return config


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> EngineConfig:
    """Parse `key = value` lines; later lines win; `#` starts a comment."""
    items: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            items[key.strip()] = value.strip()
    if overrides:
        items.update(overrides)
    return config_from_items(items)


def parse_override_args(pairs: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = value.strip()
    return out
