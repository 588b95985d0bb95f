"""End-to-end engine: offline build stages plus the online query facade.

Offline: `build_index` ingests the corpus, annotates every document, and
freezes the entity artifacts under the store directory; `build_profiles`
turns the annotation evidence into one profile file per author.  Online:
`load` re-opens a built store immutably, after which `search`, `explain`
and `batch_eval` never mutate it.
"""

from __future__ import annotations

import logging
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import STRATEGIES, EngineConfig
from .corpus import CorpusStats, CorpusStore
from .docrank import TextIndex, rank_authors_doc_centric
from .embeddings import EmbeddingModel, train_deepwalk
from .errors import ConfigError, NotFoundError, StageError
from .evaluation import METRICS, MetricReport, Qrels, evaluate, paired_t_test, report_text
from .fusion import fuse
from .kb import KnowledgeBase, KnowledgeGraphSnapshot
from .linking import DictionaryLinker, LinkerDictionary, build_author_evidence, load_annotations, save_annotations
from .profilerank import (
    SCALINGS,
    ExactMatchConfig,
    iaf,
    rank_authors_profile_centric,
    top_profile_entities,
)
from .profiles import (
    AuthorProfile,
    DoubleIndex,
    author_id_from_filename,
    build_double_index,
    build_profile,
    load_profile,
    profile_filename,
    save_profile,
)
from .runs import RankedRun, save_runs
from .textutil import tokenize

log = logging.getLogger(__name__)

ANNOTATIONS_FILE = "annotations.tsv"
DICTIONARY_FILE = "dictionary.tsv"
SNAPSHOT_FILE = "snapshot.tsv"
EMBEDDINGS_FILE = "embeddings.vec"
PROFILES_DIR = "profiles"


@dataclass(frozen=True)
class EntityContribution:
    """One exact addend of a profile sub-score, tied to a query entity."""

    entity_id: str
    contribution: float
    in_profile: bool
    rho: float | None = None
    doc_count: int | None = None
    relevance: float | None = None
    iaf: float | None = None


@dataclass(frozen=True)
class Explanation:
    query_entities: tuple[str, ...]
    method: str
    contributions: tuple[EntityContribution, ...]
    top_entities: tuple[dict, ...]

    def total(self) -> float:
        return sum(c.contribution for c in self.contributions)


@dataclass(frozen=True)
class SearchResult:
    author_id: str
    display_name: str
    score: float
    rank: int
    sub_scores: dict[str, float]
    explanation: Explanation | None = None


@dataclass(frozen=True)
class SearchResponse:
    query_text: str
    strategy: str
    query_entities: tuple[str, ...]
    term_matched: bool
    results: tuple[SearchResult, ...] = field(default_factory=tuple)

    @property
    def empty_query(self) -> bool:
        """Neither an entity nor an index term matched: nothing to rank on."""
        return not self.query_entities and not self.term_matched


class Engine:
    def __init__(self, config: EngineConfig):
        config.validate()
        self.config = config
        self.store_dir = Path(config.store_dir)
        self.store = CorpusStore(self.store_dir)
        self.index: TextIndex | None = None
        self.linker: DictionaryLinker | None = None
        self.kb: KnowledgeBase | None = None
        self.embeddings: EmbeddingModel | None = None
        self.profiles: dict[str, AuthorProfile] = {}
        self.double_index: DoubleIndex | None = None
        self._doc_totals: dict[str, int] = {}

    # -- offline stages --------------------------------------------------------

    def build_index(self) -> CorpusStats:
        """Ingest the corpus, annotate it, and freeze the entity artifacts."""
        for key in ("documents_path", "authors_path", "dictionary_path", "snapshot_path"):
            if not getattr(self.config, key):
                raise ConfigError(f"{key} must be set to build the index")
        started = time.perf_counter()
        stats = self.store.ingest(self.config.documents_path, self.config.authors_path)
        dictionary = LinkerDictionary.from_file(self.config.dictionary_path)
        snapshot = KnowledgeGraphSnapshot.from_file(self.config.snapshot_path)
        unknown = sorted(dictionary.entity_ids - snapshot.entity_ids)
        if unknown:
            raise StageError(
                f"dictionary names {len(unknown)} entities missing from the snapshot "
                f"(first: {unknown[0]!r}); align the two inputs and re-run",
                stage="index build")
        linker = DictionaryLinker(dictionary)
        annotations = {}
        for doc in self.store.iter_documents():
            found = linker.annotate(doc.title + " " + doc.body)
            if found:
                annotations[doc.doc_id] = found
        save_annotations(self.store_dir / ANNOTATIONS_FILE, annotations)
        shutil.copyfile(self.config.dictionary_path, self.store_dir / DICTIONARY_FILE)
        shutil.copyfile(self.config.snapshot_path, self.store_dir / SNAPSHOT_FILE)
        if self.config.embeddings_path:
            model = EmbeddingModel.load(self.config.embeddings_path)
        else:
            model = train_deepwalk(snapshot, self.config.walk_config())
        model.save(self.store_dir / EMBEDDINGS_FILE)
        log.info("index build: %d documents, %d annotated, %d entities embedded (%.2fs)",
                 stats.n_documents, len(annotations), len(model), time.perf_counter() - started)
        return stats

    def build_profiles(self) -> int:
        """One profile per registered author, from the frozen annotations."""
        started = time.perf_counter()
        self._require(self.store_dir / ANNOTATIONS_FILE, "annotations", "index build")
        self.store.load()
        annotations = load_annotations(self.store_dir / ANNOTATIONS_FILE)
        kb = KnowledgeBase(KnowledgeGraphSnapshot.from_file(self.store_dir / SNAPSHOT_FILE))
        embeddings = EmbeddingModel.load(self.store_dir / EMBEDDINGS_FILE)
        profiles_dir = self.store_dir / PROFILES_DIR
        if profiles_dir.exists():
            shutil.rmtree(profiles_dir)
        profiles_dir.mkdir(parents=True)
        cfg = self.config
        built = 0
        for author_id in self.store.author_ids:
            evidence = build_author_evidence(author_id, self.store, annotations, cfg.rho_filter)
            profile = build_profile(
                author_id, evidence, kb, embeddings,
                min_pts=cfg.min_pts, cut=cfg.cluster_cut,
                max_noise_fraction=cfg.outlier_max_fraction, damping=cfg.ppr_damping,
                tol=cfg.ppr_tol, max_iter=cfg.ppr_max_iter,
                embed_k=cfg.embed_k, weighted_vector=cfg.weighted_author_vector)
            save_profile(profiles_dir / profile_filename(author_id), profile)
            built += 1
        log.info("profile build: %d profiles (%.2fs)", built, time.perf_counter() - started)
        return built

    def _require(self, path: Path, what: str, stage: str) -> None:
        if not path.exists():
            raise StageError(f"{what} missing under {self.store_dir}; run `{stage}` first",
                             stage=stage)

    # -- online facade -----------------------------------------------------------

    def load(self) -> "Engine":
        self.store.load()
        self._require(self.store_dir / ANNOTATIONS_FILE, "annotations", "index build")
        self._require(self.store_dir / DICTIONARY_FILE, "linker dictionary", "index build")
        self._require(self.store_dir / SNAPSHOT_FILE, "knowledge graph snapshot", "index build")
        self._require(self.store_dir / EMBEDDINGS_FILE, "entity embeddings", "index build")
        self._require(self.store_dir / PROFILES_DIR, "author profiles", "profile build")
        self.index = TextIndex(self.store)
        self.linker = DictionaryLinker(LinkerDictionary.from_file(self.store_dir / DICTIONARY_FILE))
        self.kb = KnowledgeBase(KnowledgeGraphSnapshot.from_file(self.store_dir / SNAPSHOT_FILE))
        self.embeddings = EmbeddingModel.load(self.store_dir / EMBEDDINGS_FILE)
        self.profiles = {}
        for path in sorted((self.store_dir / PROFILES_DIR).glob("*.profile")):
            author_id = author_id_from_filename(path.name)
            self.profiles[author_id] = load_profile(path, author_id)
        missing = [aid for aid in self.store.author_ids if aid not in self.profiles]
        if missing:
            raise StageError(f"{len(missing)} authors lack profiles (first: {missing[0]!r}); "
                             "run `profile build` again", stage="profile build")
        self.double_index = build_double_index(self.profiles)
        self._doc_totals = {aid: len(self.store.documents_of(aid)) for aid in self.store.author_ids}
        return self

    def _loaded(self) -> None:
        if self.index is None:
            raise StageError("engine not loaded; call load() after `index build` and `profile build`",
                             stage="load")

    def query_entities(self, query_text: str) -> tuple[str, ...]:
        self._loaded()
        return tuple(self.linker.annotate_query(query_text, self.config.effective_query_rho_filter()))

    def _term_matched(self, query_text: str) -> bool:
        return any(token in self.index.postings for token in tokenize(query_text))

    def _doc_run(self, query_id: str, query_text: str) -> RankedRun:
        cfg = self.config
        return rank_authors_doc_centric(query_id, query_text, self.store, self.index,
                                        cfg.scoring_scheme(), cfg.doc_fusion,
                                        k=cfg.meank_k, max_docs=cfg.max_docs)

    def _profile_run(self, query_id: str, entities: tuple[str, ...]) -> RankedRun:
        cfg = self.config
        if cfg.profile_method in ("ec_iaf", "ef_iaf", "rec_iaf"):
            method_cfg = cfg.exact_match_config()
        else:
            method_cfg = cfg.related_match_config()
        return rank_authors_profile_centric(query_id, entities, self.profiles,
                                            self.double_index, len(self.profiles),
                                            self._doc_totals, method_cfg,
                                            kb=self.kb, embeddings=self.embeddings)

    def _strategy_runs(self, query_id: str, query_text: str,
                       strategy: str) -> tuple[RankedRun, RankedRun | None, RankedRun | None]:
        """(final run, doc run, profile run); sub-runs None when not computed."""
        if strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
        started = time.perf_counter()
        doc_run = self._doc_run(query_id, query_text) if strategy in ("doc", "fused") else None
        profile_run = (self._profile_run(query_id, self.query_entities(query_text))
                       if strategy in ("profile", "fused") else None)
        if strategy == "doc":
            run = doc_run
        elif strategy == "profile":
            run = profile_run
        else:
            run = fuse([doc_run, profile_run], self.config.fusion_method,
                       normalize=self.config.fusion_normalize,
                       missing_rank=self.config.fusion_missing_rank)
        log.info("query %s strategy=%s: %d authors in %.1fms",
                 query_id, strategy, len(run), 1000 * (time.perf_counter() - started))
        return run, doc_run, profile_run

    def query_run(self, query_id: str, query_text: str, strategy: str) -> RankedRun:
        """The ranking a strategy produces; shared by search, CLI and batch-eval."""
        self._loaded()
        return self._strategy_runs(query_id, query_text, strategy)[0]

    def search(self, query_text: str, strategy: str = "fused", limit: int = 10,
               with_explanations: bool = True) -> SearchResponse:
        self._loaded()
        if limit < 1:
            raise ConfigError("limit must be >= 1")
        entities = self.query_entities(query_text)
        run, doc_run, profile_run = self._strategy_runs("q", query_text, strategy)
        results = []
        for entry in run.top(limit):
            sub_scores: dict[str, float] = {}
            for name, sub_run in (("doc", doc_run), ("profile", profile_run)):
                sub_score = sub_run.score_of(entry.author_id) if sub_run else None
                if sub_score is not None:
                    sub_scores[name] = sub_score
            explanation = None
            if with_explanations:
                explanation = self._explain_author(entry.author_id, entities)
            results.append(SearchResult(entry.author_id,
                                        self.store.author(entry.author_id).display_name,
                                        entry.score, entry.rank, sub_scores, explanation))
        return SearchResponse(query_text, strategy, entities,
                              self._term_matched(query_text), tuple(results))

    # -- explanations ------------------------------------------------------------

    def explain(self, query_text: str, author_id: str) -> Explanation:
        self._loaded()
        if not self.store.has_author(author_id):
            raise NotFoundError(f"unknown author {author_id!r}")
        return self._explain_author(author_id, self.query_entities(query_text))

    def _explain_author(self, author_id: str, entities: tuple[str, ...]) -> Explanation:
        """Decompose the author's profile sub-score into per-entity addends."""
        cfg = self.config
        profile = self.profiles[author_id]
        top = [
            {"entity_id": e, "relevance": profile.relevance[e], "rho": profile.rho[e]}
            for e in top_profile_entities(profile, cfg.top_fraction)[:5]
        ]
        method = cfg.profile_method
        contributions: list[EntityContribution] = []
        if not entities:
            return Explanation((), method, (), tuple(top))
        if method in ("ec_iaf", "ef_iaf", "rec_iaf"):
            contributions = self._exact_contributions(profile, entities, cfg.exact_match_config())
        elif method in ("aer", "raer"):
            contributions = self._related_contributions(profile, entities)
        else:
            contributions = self._vector_contributions(profile, entities)
        return Explanation(entities, method, tuple(contributions), tuple(top))

    def _exact_contributions(self, profile: AuthorProfile, entities: tuple[str, ...],
                             method_cfg: ExactMatchConfig) -> list[EntityContribution]:
        scale = SCALINGS[method_cfg.scaling]
        n_authors = len(self.profiles)
        terms: list[tuple[str, float, dict]] = []
        for e in entities:
            info: dict = {"in_profile": e in profile.relevance}
            if e not in profile.relevance:
                terms.append((e, 0.0, info))
                continue
            iaf_value = iaf(e, n_authors, self.double_index)
            term = profile.doc_count[e] * profile.rho[e] * iaf_value
            if method_cfg.method == "ef_iaf":
                total = self._doc_totals.get(profile.author_id, 0)
                term = term / total if total else 0.0
            elif method_cfg.method == "rec_iaf":
                term *= scale(profile.relevance[e])
            info.update(rho=profile.rho[e], doc_count=profile.doc_count[e],
                        relevance=profile.relevance[e], iaf=iaf_value)
            terms.append((e, term, info))
        if method_cfg.aggregation == "max":
            best = max(range(len(terms)), key=lambda i: terms[i][1])
            addends = [t if i == best else 0.0 for i, (_, t, _) in enumerate(terms)]
        else:
            addends = [t / len(entities) for _, t, _ in terms]
        return [
            EntityContribution(e, addend, info["in_profile"], info.get("rho"),
                               info.get("doc_count"), info.get("relevance"), info.get("iaf"))
            for (e, _, info), addend in zip(terms, addends)
        ]

    def _related_contributions(self, profile: AuthorProfile,
                               entities: tuple[str, ...]) -> list[EntityContribution]:
        cfg = self.config.related_match_config()
        top = top_profile_entities(profile, cfg.top_fraction)
        if not top:
            return [EntityContribution(e, 0.0, e in profile.relevance) for e in entities]
        scale = SCALINGS[cfg.scaling]
        out = []
        for eq in entities:
            total = 0.0
            for ep in top:
                term = profile.rho[ep] * self.kb.relatedness(eq, ep)
                if cfg.method == "raer":
                    term *= scale(profile.relevance[ep])
                total += term
            out.append(EntityContribution(eq, total / (len(top) * len(entities)),
                                          eq in profile.relevance,
                                          profile.rho.get(eq), profile.doc_count.get(eq),
                                          profile.relevance.get(eq)))
        return out

    def _vector_contributions(self, profile: AuthorProfile,
                              entities: tuple[str, ...]) -> list[EntityContribution]:
        # cosine(Σ v_e, a) split by bilinearity: addend_e = v_e·a / (‖Σv‖‖a‖)
        vectors = {e: self.embeddings.vector(e) for e in entities}
        query_vec = sum(vectors.values(), np.zeros(len(profile.author_vector)))
        denom = float(np.linalg.norm(query_vec) * np.linalg.norm(profile.author_vector))
        out = []
        for e in entities:
            addend = float(vectors[e] @ profile.author_vector) / denom if denom else 0.0
            out.append(EntityContribution(e, addend, e in profile.relevance,
                                          profile.rho.get(e), profile.doc_count.get(e),
                                          profile.relevance.get(e)))
        return out

    # -- batch evaluation ----------------------------------------------------------

    def batch_eval(self, queries_path: str | Path, qrels_path: str | Path,
                   out_dir: str | Path, strategies: tuple[str, ...] = STRATEGIES,
                   tag_prefix: str = "expertsearch") -> dict[str, MetricReport]:
        """One TREC run + metric report per strategy, plus pairwise t-tests."""
        self._loaded()
        for strategy in strategies:
            if strategy not in STRATEGIES:
                raise ConfigError(f"unknown strategy {strategy!r}")
        queries = load_queries(queries_path)
        qrels = Qrels.from_file(qrels_path)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        reports: dict[str, MetricReport] = {}
        for strategy in strategies:
            runs = {qid: self.query_run(qid, text, strategy) for qid, text in queries.items()}
            save_runs(out / f"run_{strategy}.txt", runs, tag=f"{tag_prefix}_{strategy}")
            report = evaluate(runs, qrels)
            (out / f"report_{strategy}.tsv").write_text(report_text(report), encoding="utf-8")
            reports[strategy] = report
        self._write_t_tests(out / "ttests.tsv", reports, strategies)
        return reports

    def _write_t_tests(self, path: Path, reports: dict[str, MetricReport],
                       strategies: tuple[str, ...]) -> None:
        lines = ["metric\tsystem_a\tsystem_b\tp_two_tailed\tp_one_tailed"]
        pairs = [(a, b) for i, a in enumerate(strategies) for b in strategies[i + 1:]]
        for metric in METRICS:
            for a, b in pairs:
                shared = [q for q in reports[a].evaluated_queries
                          if q in reports[b].per_query]
                if len(shared) < 2:
                    continue
                sample_a = [reports[a].per_query[q][metric] for q in shared]
                sample_b = [reports[b].per_query[q][metric] for q in shared]
                p2 = paired_t_test(sample_a, sample_b, tails=2)
                p1 = paired_t_test(sample_a, sample_b, tails=1)
                lines.append(f"{metric}\t{a}\t{b}\t{repr(p2)}\t{repr(p1)}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_queries(path: str | Path) -> dict[str, str]:
    """`query_id<TAB>text` lines, one query each; order preserved."""
    from .errors import RecordFormatError

    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise RecordFormatError(path, line_no, "expected `query_id<TAB>text`")
            if parts[0] in out:
                raise RecordFormatError(path, line_no, f"duplicate query id {parts[0]!r}")
            out[parts[0]] = parts[1]
    return out
