"""Acceptance gate: one test per shipped criterion, each recording a PASS/FAIL line.

Every oracle here is implemented from scratch inside this module (dense
power iteration, direct scoring formulas, brute-force reference formulas) so a
regression in the package cannot silently deform its own yardstick.  Run
with `pytest tests/test_acceptance.py -v`; a summary block at the end of
the pytest run repeats one line per criterion.
"""

from __future__ import annotations

import math
import os
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from expertsearch.config import EngineConfig
from expertsearch.docrank import ScoringScheme, TextIndex, fuse_doc_scores, score_documents
from expertsearch.embeddings import WalkConfig, cosine, train_deepwalk
from expertsearch.engine import Engine, load_queries
from expertsearch.evaluation import METRICS, Qrels, evaluate
from expertsearch.fusion import fuse
from expertsearch.kb import KnowledgeGraphSnapshot, milne_witten
from expertsearch.profilerank import (
    ExactMatchConfig,
    RelatedMatchConfig,
    exact_match_score,
    related_match_score,
)
from expertsearch.profiles import AuthorProfile, compute_relevance
from expertsearch.runs import RankedRun, load_runs

FIXTURES = Path(__file__).parent / "fixtures"

# pinned gate tolerances and budgets
GOLDEN_BUDGET_S = 1.0
PPR_CASES = 100
PPR_MAX_NODES = 12
PPR_LINF = 1e-8
PPR_MASS = 1e-9
PPR_BUDGET_S = 10.0
SCORER_TOL = 1e-9
FORMULA_TOL = 1e-12
FORMULA_CASES = 200
MW_PAIRS = 1000
MW_ENTITIES = 50
E2E_BUDGET_S = 60.0
FUSION_PAIRS = 100
CLIQUE_MARGIN = 0.1

RESULTS: list[tuple[str, str, str]] = []


def record(name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    RESULTS.append((name, status, detail))
    print(f"[{status}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def record_skip(name: str, detail: str) -> None:
    RESULTS.append((name, "SKIP", detail))
    print(f"[SKIP] {name}: {detail}")
    pytest.skip(detail)


# -- criterion: metric golden suite ---------------------------------------------


def test_metric_golden_suite():
    started = time.perf_counter()
    golden = FIXTURES / "golden"
    report = evaluate(load_runs(golden / "run.txt"), Qrels.from_file(golden / "qrels.txt"))
    mismatches = []
    for line in (golden / "expected.tsv").read_text().strip().split("\n"):
        fields = line.split("\t")
        qid, values = fields[0], fields[1:]
        row = report.means if qid == "all" else report.per_query[qid]
        for metric, value in zip(METRICS, values):
            if f"{row[metric]:.10f}" != value:
                mismatches.append(f"{qid}/{metric}: {row[metric]:.10f} != {value}")
    elapsed = time.perf_counter() - started
    record("metric-golden-suite",
           not mismatches and elapsed < GOLDEN_BUDGET_S,
           f"5-query fixture, {len(report.evaluated_queries)} evaluated, "
           f"{len(mismatches)} mismatches, {elapsed:.3f}s (< {GOLDEN_BUDGET_S:.0f}s)")


# -- criterion: personalized pagerank oracle -------------------------------------


def oracle_power_iteration(nodes, edges, teleport, damping=0.85):
    """Dense power iteration written independently of the package code."""
    n = len(nodes)
    pos = {node: i for i, node in enumerate(nodes)}
    tp = np.array([teleport[node] for node in nodes])
    weight = np.zeros((n, n))
    for (u, v), w in edges.items():
        weight[pos[u], pos[v]] += w
        weight[pos[v], pos[u]] += w
    out = weight.sum(axis=1)
    x = tp.copy()
    for _ in range(100000):
        nxt = np.zeros(n)
        for i in range(n):
            if out[i] == 0.0:
                nxt += x[i] * tp
            else:
                nxt += x[i] * weight[i] / out[i]
        nxt = (1 - damping) * tp + damping * nxt
        if np.abs(nxt - x).sum() < 1e-15:
            x = nxt
            break
        x = nxt
    return {node: x[i] for i, node in enumerate(nodes)}


def random_ppr_case(rng):
    n = int(rng.integers(2, PPR_MAX_NODES + 1))
    nodes = tuple(f"n{i}" for i in range(n))
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                edges[(nodes[i], nodes[j])] = float(rng.uniform(0.05, 1.0))
    raw = rng.uniform(0.01, 1.0, size=n)
    teleport = {node: float(v / raw.sum()) for node, v in zip(nodes, raw)}
    return nodes, edges, teleport


def test_personalized_pagerank_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_gap = 0.0
    worst_mass = 0.0
    for _ in range(PPR_CASES):
        nodes, edges, teleport = random_ppr_case(rng)
        got = compute_relevance(nodes, edges, teleport, tol=1e-14, max_iter=100000)
        want = oracle_power_iteration(nodes, edges, teleport)
        worst_gap = max(worst_gap, max(abs(got[u] - want[u]) for u in nodes))
        worst_mass = max(worst_mass, abs(sum(got.values()) - 1.0))
    elapsed = time.perf_counter() - started
    record("personalized-pagerank-oracle",
           worst_gap <= PPR_LINF and worst_mass <= PPR_MASS and elapsed < PPR_BUDGET_S,
           f"{PPR_CASES} graphs (<= {PPR_MAX_NODES} nodes): "
           f"Linf {worst_gap:.2e} (<= {PPR_LINF:.0e}), mass gap {worst_mass:.2e} "
           f"(<= {PPR_MASS:.0e}), {elapsed:.2f}s (< {PPR_BUDGET_S:.0f}s)")


# -- criterion: scorer oracles ----------------------------------------------------


TEN_DOCS = [
    ("t1", "gradient descent convergence", "We bound gradient descent steps on convex losses."),
    ("t2", "stochastic gradient tricks", "Momentum helps stochastic gradient descent escape plateaus."),
    ("t3", "convex duality notes", "Duality gaps certify convergence for convex programs."),
    ("t4", "kernel methods primer", "Kernel ridge regression generalizes linear models."),
    ("t5", "random forests in practice", "Bagged trees reduce variance on tabular data."),
    ("t6", "boosting weak learners", "Gradient boosting fits residuals stage by stage."),
    ("t7", "neural scaling laws", "Loss follows a power law in model size."),
    ("t8", "attention is sparse", "Sparse attention cuts quadratic cost in sequence length."),
    ("t9", "graph neural nets", "Message passing aggregates neighborhood features."),
    ("t10", "causal inference basics", "Confounders bias naive treatment effect estimates."),
]


def direct_scores(docs, query_tokens, scheme):
    """Direct-formula document scoring from the raw token lists."""
    token_lists = {doc_id: (title + " " + body).lower().split() for doc_id, title, body in docs}
    token_lists = {d: ["".join(ch for ch in t if ch.isalnum()) for t in toks]
                   for d, toks in token_lists.items()}
    token_lists = {d: [t for t in toks if t] for d, toks in token_lists.items()}
    n_docs = len(docs)
    doc_len = {d: len(toks) for d, toks in token_lists.items()}
    avgdl = sum(doc_len.values()) / n_docs
    total = sum(doc_len.values())
    tfs = {d: Counter(toks) for d, toks in token_lists.items()}
    df = Counter()
    cf = Counter()
    for d, counts in tfs.items():
        for tok, c in counts.items():
            df[tok] += 1
            cf[tok] += c
    out = {}
    for d in token_lists:
        if not any(tfs[d][t] for t in query_tokens):
            continue
        score = 0.0
        for t in query_tokens:
            if cf[t] == 0:
                continue
            tf = tfs[d][t]
            if scheme.name == "tfidf":
                score += tf * math.log(1 + n_docs / df[t]) if tf else 0.0
            elif scheme.name == "bm25":
                if tf:
                    idf = math.log(1 + (n_docs - df[t] + 0.5) / (df[t] + 0.5))
                    norm = tf * (scheme.k1 + 1) / (
                        tf + scheme.k1 * (1 - scheme.b + scheme.b * doc_len[d] / avgdl))
                    score += idf * norm
            elif scheme.name == "lm_dirichlet":
                score += math.log((tf + scheme.mu * cf[t] / total) / (doc_len[d] + scheme.mu))
            else:
                score += math.log((1 - scheme.lam) * tf / doc_len[d] + scheme.lam * cf[t] / total)
        out[d] = score
    return out


class _ListStore:
    """Minimal corpus facade for TextIndex over the in-memory 10-doc corpus."""

    def __init__(self, docs):
        from expertsearch.corpus import Document

        self._docs = [Document(d, t, b, (), "paper") for d, t, b in docs]

    def iter_documents(self):
        return iter(self._docs)


def brute_doc_fusion(scores_ranks, method, k, total_docs):
    scores = [s for s, _ in scores_ranks]
    if method == "meank":
        return sum(sorted(scores, reverse=True)[:min(k, len(scores))]) / k
    if method == "max":
        return max(scores)
    if method == "rr":
        return sum(1.0 / r for _, r in scores_ranks)
    return (len(scores) / total_docs) * sum(scores)


def brute_exact(profile_rows, query_entities, method, scaling, aggregation,
                n_authors, author_counts, total_docs):
    def scale(r):
        return {"identity": lambda x: x, "sigmoid": lambda x: 1 / (1 + math.exp(-x)),
                "sqrt": math.sqrt, "square": lambda x: x * x}[scaling](r)

    terms = []
    for e in query_entities:
        if e not in profile_rows:
            terms.append(0.0)
            continue
        dc, rho, rel = profile_rows[e]
        term = dc * rho * math.log(n_authors / author_counts[e])
        if method == "ef_iaf":
            term /= total_docs
        elif method == "rec_iaf":
            term *= scale(rel)
        terms.append(term)
    return max(terms) if aggregation == "max" else sum(terms) / len(query_entities)


def brute_related(profile_rows, ordered, query_entities, method, scaling,
                  top_fraction, relatedness):
    def scale(r):
        return {"identity": lambda x: x, "sigmoid": lambda x: 1 / (1 + math.exp(-x)),
                "sqrt": math.sqrt, "square": lambda x: x * x}[scaling](r)

    k = max(1, math.ceil(top_fraction * len(ordered)))
    top = ordered[:k]
    total = 0.0
    for eq in query_entities:
        for ep in top:
            dc, rho, rel = profile_rows[ep]
            term = rho * relatedness.get(frozenset((eq, ep)) if eq != ep else eq, 0.0)
            if method == "raer":
                term *= scale(rel)
            total += term
    return total / (k * len(query_entities))


def brute_run_fusion(runs, method, normalize, missing_rank):
    universe = sorted({a for entries in runs for a, _ in entries})
    fused = {}
    per_run_scores = []
    per_run_ranks = []
    for entries in runs:
        scores = {a: s for a, s in entries}
        if normalize and scores:
            low, high = min(scores.values()), max(scores.values())
            scores = {a: 1.0 if high == low else (s - low) / (high - low)
                      for a, s in scores.items()}
        per_run_scores.append(scores)
        ordered = sorted(entries, key=lambda item: (-item[1], item[0]))
        per_run_ranks.append({a: i + 1 for i, (a, _) in enumerate(ordered)})
    for author in universe:
        if method in ("combsum", "combmin", "combmax"):
            values = [s.get(author, 0.0) for s in per_run_scores]
            fused[author] = {"combsum": sum, "combmin": min, "combmax": max}[method](values)
        else:
            ranks = []
            for entries, rank_map in zip(runs, per_run_ranks):
                rank = rank_map.get(author)
                if rank is None:
                    if missing_rank == "skip":
                        continue
                    rank = len(entries) + 1
                ranks.append(rank)
            if not ranks:
                fused[author] = 0.0
            elif method == "rrm":
                value = 1.0
                for rank in ranks:
                    value *= 1.0 / rank
                fused[author] = value
            else:
                fused[author] = 1.0 / sum(ranks)
    return fused


def test_scorer_oracles():
    failures = []

    # direct-formula document scoring on the 10-doc corpus
    store = _ListStore(TEN_DOCS)
    index = TextIndex(store)
    queries = ["gradient descent", "convex convergence", "sparse attention cost",
               "message passing", "treatment effect", "gradient"]
    for name in ("tfidf", "bm25", "lm_dirichlet", "lm_jm"):
        scheme = ScoringScheme(name)
        for q in queries:
            got = {d.doc_id: d.score for d in score_documents(index, q, scheme)}
            want = direct_scores(TEN_DOCS, q.split(), scheme)
            if set(got) != set(want):
                failures.append(f"{name}/{q}: candidate sets differ")
                continue
            gap = max((abs(got[d] - want[d]) for d in got), default=0.0)
            if gap > SCORER_TOL:
                failures.append(f"{name}/{q}: max gap {gap:.2e}")

    rng = np.random.default_rng(99)

    # Document-score fusion formulas
    from expertsearch.docrank import DocScore

    for _ in range(FORMULA_CASES):
        n = int(rng.integers(1, 8))
        ranks = sorted(rng.choice(np.arange(1, 50), size=n, replace=False).tolist())
        scores = sorted(rng.uniform(0.1, 5.0, size=n).tolist(), reverse=True)
        doc_scores = [DocScore(f"d{i}", s, r) for i, (s, r) in enumerate(zip(scores, ranks))]
        total_docs = int(rng.integers(n, n + 10))
        k = int(rng.integers(1, 8))
        for method in ("meank", "max", "rr", "combnz"):
            got = fuse_doc_scores(doc_scores, method, k=k, total_docs=total_docs)
            want = brute_doc_fusion(list(zip(scores, ranks)), method, k, total_docs)
            if abs(got - want) > FORMULA_TOL:
                failures.append(f"docfuse/{method}: {abs(got - want):.2e}")

    # Exact-match scoring formulas
    n_authors = 20
    for _ in range(FORMULA_CASES):
        profile_entities = [f"e{i}" for i in range(int(rng.integers(1, 9)))]
        rows = {e: (int(rng.integers(1, 7)), float(rng.uniform(0.2, 1.0)),
                    float(rng.uniform(0.0, 1.0))) for e in profile_entities}
        author_counts = {e: int(rng.integers(1, n_authors + 1)) for e in profile_entities}
        pool = profile_entities + ["missing1", "missing2"]
        query = list(rng.choice(pool, size=min(int(rng.integers(1, 5)), len(pool)),
                                replace=False))
        total_docs = int(rng.integers(1, 30))
        relevance = {e: rows[e][2] for e in profile_entities}
        profile = AuthorProfile(
            "a", tuple(profile_entities), {}, relevance,
            tuple(sorted(profile_entities, key=lambda e: (-relevance[e], e))),
            np.zeros(100), {e: rows[e][1] for e in profile_entities},
            {e: rows[e][0] for e in profile_entities})
        iaf_values = {e: math.log(n_authors / author_counts[e]) for e in profile_entities}
        for method in ("ec_iaf", "ef_iaf", "rec_iaf"):
            for scaling in ("identity", "sigmoid", "sqrt", "square"):
                for aggregation in ("max", "mean"):
                    config = ExactMatchConfig(method, scaling, aggregation)
                    got = exact_match_score(profile, query, config, iaf_values, total_docs)
                    want = brute_exact(rows, query, method, scaling, aggregation,
                                       n_authors, author_counts, total_docs)
                    if abs(got - want) > FORMULA_TOL:
                        failures.append(f"exact/{method}/{scaling}/{aggregation}: "
                                        f"{abs(got - want):.2e}")

    # Related-match scoring formulas
    class DictKb:
        def __init__(self, table):
            self.table = table

        def relatedness(self, e1, e2):
            if e1 == e2:
                return self.table.get(e1, 1.0)
            return self.table.get(frozenset((e1, e2)), 0.0)

    for _ in range(FORMULA_CASES):
        profile_entities = [f"p{i}" for i in range(int(rng.integers(1, 9)))]
        rows = {e: (int(rng.integers(1, 7)), float(rng.uniform(0.2, 1.0)),
                    float(rng.uniform(0.0, 1.0))) for e in profile_entities}
        relevance = {e: rows[e][2] for e in profile_entities}
        ordered = tuple(sorted(profile_entities, key=lambda e: (-relevance[e], e)))
        query = [f"q{i}" for i in range(int(rng.integers(1, 4)))]
        table = {}
        for eq in query:
            for ep in profile_entities:
                if rng.random() < 0.7:
                    table[frozenset((eq, ep))] = float(rng.uniform(0.0, 1.0))
        for e in profile_entities:
            table[e] = 1.0
        top_fraction = float(rng.choice([0.1, 0.3, 0.5, 1.0]))
        profile = AuthorProfile(
            "a", tuple(profile_entities), {}, relevance, ordered, np.zeros(100),
            {e: rows[e][1] for e in profile_entities},
            {e: rows[e][0] for e in profile_entities})
        kb = DictKb(table)
        for method in ("aer", "raer"):
            for scaling in ("identity", "sigmoid", "sqrt", "square"):
                config = RelatedMatchConfig(method, scaling, top_fraction)
                got = related_match_score(profile, query, config, kb, None)
                want = brute_related(rows, ordered, query, method, scaling,
                                     top_fraction, table)
                if abs(got - want) > FORMULA_TOL:
                    failures.append(f"related/{method}/{scaling}: {abs(got - want):.2e}")

    # aes: cosine of summed query vectors against the author vector
    from expertsearch.embeddings import EmbeddingModel

    for _ in range(50):
        dim = 100
        known = [f"q{i}" for i in range(3)]
        vectors = {e: rng.normal(size=dim) for e in known}
        model = EmbeddingModel({e: v.copy() for e, v in vectors.items()})
        author_vector = rng.normal(size=dim)
        profile = AuthorProfile("a", ("p0",), {}, {"p0": 0.5}, ("p0",),
                                author_vector.copy(), {"p0": 0.9}, {"p0": 1})
        query = list(rng.choice(known + ["missing"], size=int(rng.integers(1, 4)),
                                replace=False))
        got = related_match_score(profile, query, RelatedMatchConfig("aes"), None, model)
        summed = np.zeros(dim)
        for e in query:
            summed += vectors.get(e, np.zeros(dim))
        denom = np.linalg.norm(summed) * np.linalg.norm(author_vector)
        want = float(summed @ author_vector / denom) if denom else 0.0
        if abs(got - want) > FORMULA_TOL:
            failures.append(f"related/aes: {abs(got - want):.2e}")

    # Run-fusion formulas
    for _ in range(FORMULA_CASES):
        n_runs = int(rng.integers(2, 4))
        entries_per_run = []
        for _ in range(n_runs):
            authors = rng.choice([f"a{i}" for i in range(10)],
                                 size=int(rng.integers(1, 8)), replace=False)
            entries_per_run.append([(a, float(rng.uniform(-2, 5))) for a in authors])
        runs = [RankedRun.from_scores("q", dict(entries)) for entries in entries_per_run]
        normalize = bool(rng.integers(0, 2))
        missing_rank = "skip" if rng.integers(0, 2) else "len_plus_one"
        for method in ("combsum", "combmin", "combmax", "rrm", "rrs"):
            got_run = fuse(runs, method, normalize=normalize, missing_rank=missing_rank)
            got = {e.author_id: e.score for e in got_run.entries}
            want = brute_run_fusion(entries_per_run, method, normalize, missing_rank)
            gap = max(abs(got[a] - want[a]) for a in want)
            if gap > FORMULA_TOL:
                failures.append(f"runfuse/{method}: {gap:.2e}")

    record("scorer-oracles", not failures,
           f"4 schemes on 10-doc corpus to {SCORER_TOL:.0e}; all scoring formulas brute-forced "
           f"({FORMULA_CASES} cases each) to {FORMULA_TOL:.0e}; "
           f"{len(failures)} failures" + (f" (first: {failures[0]})" if failures else ""))


# -- criterion: relatedness properties ---------------------------------------------


def test_relatedness_properties():
    rng = np.random.default_rng(7)
    entity_ids = [f"e{i:02d}" for i in range(MW_ENTITIES)]
    links = set()
    for dst in entity_ids[:40]:
        for src in entity_ids:
            if src != dst and rng.random() < 0.15:
                links.add((src, dst))
    # engineered extremes: twins share in-links exactly; loners have none
    for src in ("e00", "e01", "e02"):
        links.add((src, "e48"))
        links.add((src, "e49"))
    links = {(u, v) for (u, v) in links if v not in ("e46", "e47")}
    snapshot = KnowledgeGraphSnapshot(entity_ids, sorted(links))
    failures = []
    pairs = 0
    while pairs < MW_PAIRS:
        e1, e2 = (entity_ids[int(i)] for i in rng.integers(0, MW_ENTITIES, size=2))
        if e1 == e2:
            continue
        pairs += 1
        r12 = milne_witten(snapshot, e1, e2)
        r21 = milne_witten(snapshot, e2, e1)
        if r12 != r21:
            failures.append(f"symmetry {e1},{e2}")
        if not 0.0 <= r12 <= 1.0:
            failures.append(f"range {e1},{e2}: {r12}")
        in1, in2 = snapshot.in_links_of(e1), snapshot.in_links_of(e2)
        if in1 and in1 == in2 and r12 != 1.0:
            failures.append(f"identical sets {e1},{e2}: {r12}")
        if (not in1 or not in2 or not (in1 & in2)) and r12 != 0.0:
            failures.append(f"disjoint {e1},{e2}: {r12}")
    twins = milne_witten(snapshot, "e48", "e49")
    loners = milne_witten(snapshot, "e46", "e47")
    if twins != 1.0:
        failures.append(f"engineered twins: {twins}")
    if loners != 0.0:
        failures.append(f"engineered loners: {loners}")
    record("relatedness-properties", not failures,
           f"{MW_PAIRS} random pairs on a {MW_ENTITIES}-entity snapshot: symmetry, "
           f"range, identical->1, disjoint->0; {len(failures)} violations")


# -- criterion: planted-expert end to end --------------------------------------------


PLANTED_AUTHOR = {"qa1": "p01", "qa2": "p01", "qa3": "p01",
                  "qb1": "p02", "qb2": "p02", "qb3": "p02",
                  "qc1": "p03", "qc2": "p03", "qc3": "p03"}


def planted_engine_config(store_dir: Path) -> EngineConfig:
    planted = FIXTURES / "planted"
    return EngineConfig(
        documents_path=str(planted / "documents.tsv"),
        authors_path=str(planted / "authors.tsv"),
        dictionary_path=str(planted / "dictionary.tsv"),
        snapshot_path=str(planted / "snapshot.tsv"),
        store_dir=str(store_dir), seed=7)


def run_planted_pipeline(store_dir: Path, out_dir: Path):
    engine = Engine(planted_engine_config(store_dir))
    engine.build_index()
    engine.build_profiles()
    engine.load()
    reports = engine.batch_eval(FIXTURES / "planted" / "queries.tsv",
                                FIXTURES / "planted" / "qrels.txt", out_dir)
    return engine, reports


def test_planted_expert_end_to_end(tmp_path):
    started = time.perf_counter()
    engine, reports = run_planted_pipeline(tmp_path / "store", tmp_path / "eval")
    queries = load_queries(FIXTURES / "planted" / "queries.tsv")
    failures = []
    # (a) document-centric bm25+rr, (b) exact-match rec-iaf(sqrt, mean), (c) rrm fusion
    for strategy in ("doc", "profile", "fused"):
        for qid, text in queries.items():
            rank = engine.query_run(qid, text, strategy).rank_of(PLANTED_AUTHOR[qid])
            if rank != 1:
                failures.append(f"{strategy}/{qid}: rank {rank}")
        if reports[strategy].means["MAP"] != 1.0:
            failures.append(f"{strategy}: MAP {reports[strategy].means['MAP']}")
    elapsed = time.perf_counter() - started
    record("planted-expert-end-to-end",
           not failures and elapsed < E2E_BUDGET_S,
           f"12 authors, 3 topics, 9 queries; bm25+rr, rec-iaf(sqrt,mean), rrm fusion "
           f"all rank the planted author 1; MAP=1.0; pipeline {elapsed:.1f}s "
           f"(< {E2E_BUDGET_S:.0f}s); {len(failures)} failures"
           + (f" (first: {failures[0]})" if failures else ""))


# -- criterion: rank-only fusion invariance ---------------------------------------


MONOTONE_TRANSFORMS = [
    lambda x: 3.0 * x + 7.0,
    lambda x: x ** 3,
    math.atan,
    lambda x: math.exp(0.5 * x),
    lambda x: x + math.tanh(x),
]


def test_rank_fusion_monotone_invariance():
    rng = np.random.default_rng(4242)
    failures = []
    for case in range(FUSION_PAIRS):
        runs = []
        for _ in range(2):
            authors = rng.choice([f"a{i}" for i in range(12)],
                                 size=int(rng.integers(2, 10)), replace=False)
            # distinct scores keep the rank order unambiguous under transforms
            scores = rng.permutation(len(authors)) + rng.uniform(0.1, 0.9)
            runs.append(RankedRun.from_scores(
                "q", {a: float(s) for a, s in zip(authors, scores)}))
        transforms = [MONOTONE_TRANSFORMS[int(rng.integers(len(MONOTONE_TRANSFORMS)))]
                      for _ in runs]
        transformed = [
            RankedRun.from_scores("q", {e.author_id: float(f(e.score)) for e in run.entries})
            for run, f in zip(runs, transforms)
        ]
        for method in ("rrm", "rrs"):
            for missing_rank in ("len_plus_one", "skip"):
                base = fuse(runs, method, missing_rank=missing_rank)
                after = fuse(transformed, method, missing_rank=missing_rank)
                if base.entries != after.entries:
                    failures.append(f"case {case}/{method}/{missing_rank}")
    record("rank-fusion-monotone-invariance", not failures,
           f"rrm/rrs identical across {FUSION_PAIRS} random run-pairs under strictly "
           f"monotone score transforms; {len(failures)} violations")


# -- criterion: embedding clique structure -----------------------------------------


def test_embedding_clique_structure():
    clique_a = [f"a{i}" for i in range(6)]
    clique_b = [f"b{i}" for i in range(6)]
    links = []
    for clique in (clique_a, clique_b):
        for u in clique:
            for v in clique:
                if u != v:
                    links.append((u, v))
    links += [("a0", "b0"), ("b0", "a0")]
    snapshot = KnowledgeGraphSnapshot(clique_a + clique_b, links)
    model = train_deepwalk(snapshot, WalkConfig(rng_seed=7))
    intra, inter = [], []
    nodes = clique_a + clique_b
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            value = cosine(model.get(u), model.get(v))
            same = (u in clique_a) == (v in clique_a)
            (intra if same else inter).append(value)
    margin = sum(intra) / len(intra) - sum(inter) / len(inter)
    record("embedding-clique-structure", margin >= CLIQUE_MARGIN,
           f"two 6-cliques plus bridge, seed 7: mean intra-inter cosine margin "
           f"{margin:.4f} (>= {CLIQUE_MARGIN})")


# -- criterion: pipeline determinism ------------------------------------------------


def test_pipeline_determinism(tmp_path):
    digests = []
    for attempt in ("first", "second"):
        root = tmp_path / attempt
        run_planted_pipeline(root / "store", root / "eval")
        blob = {}
        for path in sorted((root / "store" / "profiles").glob("*.profile")):
            blob[f"profiles/{path.name}"] = path.read_bytes()
        for path in sorted((root / "eval").glob("run_*.txt")):
            blob[f"eval/{path.name}"] = path.read_bytes()
        blob["embeddings.vec"] = (root / "store" / "embeddings.vec").read_bytes()
        digests.append(blob)
    first, second = digests
    differing = sorted(name for name in first
                       if name not in second or first[name] != second[name])
    differing += sorted(name for name in second if name not in first)
    record("pipeline-determinism", first.keys() == second.keys() and not differing,
           f"two pipeline executions, identical config+seed: "
           f"{len(first)} run/profile/embedding files byte-identical; "
           f"{len(differing)} differ" + (f" (first: {differing[0]})" if differing else ""))


# -- criterion: reference corpus report (optional integration) ----------------------


def test_reference_corpus_report(tmp_path):
    """Informational only: compare against published MAP/MRR/NDCG when data is supplied."""
    root = os.environ.get("EXPERTSEARCH_REFERENCE_DIR")
    if not root:
        record_skip("reference-corpus-report",
                    "set EXPERTSEARCH_REFERENCE_DIR to a directory holding "
                    "documents.tsv, authors.tsv, dictionary.tsv, snapshot.tsv, "
                    "queries.tsv and qrels.txt to enable this report")
    base = Path(root)
    required = ["documents.tsv", "authors.tsv", "dictionary.tsv", "snapshot.tsv",
                "queries.tsv", "qrels.txt"]
    missing = [name for name in required if not (base / name).exists()]
    if missing:
        record_skip("reference-corpus-report", f"missing files: {', '.join(missing)}")
    config = EngineConfig(
        documents_path=str(base / "documents.tsv"),
        authors_path=str(base / "authors.tsv"),
        dictionary_path=str(base / "dictionary.tsv"),
        snapshot_path=str(base / "snapshot.tsv"),
        embeddings_path=str(base / "embeddings.vec") if (base / "embeddings.vec").exists() else "",
        store_dir=str(tmp_path / "store"), seed=7)
    engine = Engine(config)
    engine.build_index()
    engine.build_profiles()
    engine.load()
    reports = engine.batch_eval(base / "queries.tsv", base / "qrels.txt",
                                tmp_path / "eval", strategies=("doc", "fused"))
    published = {"doc": (0.363, 0.437, 0.495), "fused": (0.385, 0.459, 0.516)}
    lines = []
    for strategy, (p_map, p_mrr, p_ndcg) in published.items():
        means = reports[strategy].means
        lines.append(f"{strategy}: MAP {means['MAP']:.3f} (published {p_map}), "
                     f"MRR {means['MRR']:.3f} ({p_mrr}), "
                     f"NDCG@100 {means['NDCG@100']:.3f} ({p_ndcg})")
    record("reference-corpus-report", True,
           "informational, no tolerance: " + "; ".join(lines))
