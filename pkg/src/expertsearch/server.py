"""Read-only HTTP service over a loaded engine.

The engine snapshot is immutable for the process lifetime; reindexing
means rebuilding the store and restarting.  All endpoints live under
/api; an optional static directory (the built web UI) is mounted last
so it never shadows the API.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .config import STRATEGIES
from .engine import Engine, Explanation
from .errors import NotFoundError

DEFAULT_STATIC_DIR = Path("frontend/dist")
MAX_LIMIT = 100


def _explanation_payload(explanation: Explanation | None) -> dict | None:
    if explanation is None:
        return None
    payload = asdict(explanation)
    payload["total"] = explanation.total()
    return payload


def create_app(engine: Engine, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="expertsearch", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    def _author_or_404(author_id: str):
        try:
            return engine.store.author(author_id)
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown author {author_id!r}")

    @app.get("/api/strategies")
    def strategies():
        return {"strategies": list(STRATEGIES), "default": "fused",
                "scheme": engine.config.scheme,
                "profile_method": engine.config.profile_method,
                "fusion_method": engine.config.fusion_method}

    @app.get("/api/search")
    def search(q: str = Query(""), strategy: str = Query("fused"),
               limit: int = Query(10)):
        if not q.strip():
            raise HTTPException(status_code=400, detail="q must be a non-empty query")
        if strategy not in STRATEGIES:
            raise HTTPException(status_code=400,
                                detail=f"strategy must be one of {', '.join(STRATEGIES)}")
        if not 1 <= limit <= MAX_LIMIT:
            raise HTTPException(status_code=400,
                                detail=f"limit must be between 1 and {MAX_LIMIT}")
        response = engine.search(q, strategy=strategy, limit=limit)
        if response.empty_query:
            raise HTTPException(status_code=422,
                                detail="query matches no entity and no indexed term")
        return {
            "query": response.query_text,
            "strategy": response.strategy,
            "query_entities": list(response.query_entities),
            "results": [
                {
                    "author_id": r.author_id,
                    "display_name": r.display_name,
                    "score": r.score,
                    "rank": r.rank,
                    "sub_scores": r.sub_scores,
                    "explanation": _explanation_payload(r.explanation),
                }
                for r in response.results
            ],
        }

    @app.get("/api/authors/{author_id}")
    def author_card(author_id: str):
        author = _author_or_404(author_id)
        profile = engine.profiles[author.author_id]
        documents = engine.store.documents_of(author.author_id)
        return {
            "author_id": author.author_id,
            "display_name": author.display_name,
            "document_count": len(documents),
            "entity_count": len(profile.nodes),
            "top_entities": [
                {"entity_id": e, "relevance": profile.relevance[e]}
                for e in profile.ordered_entities[:5]
            ],
        }

    @app.get("/api/authors/{author_id}/profile")
    def author_profile(author_id: str):
        author = _author_or_404(author_id)
        profile = engine.profiles[author.author_id]
        return {
            "author_id": author.author_id,
            "display_name": author.display_name,
            "entities": [
                {"entity_id": e, "relevance": profile.relevance[e],
                 "rho": profile.rho[e], "doc_count": profile.doc_count[e]}
                for e in profile.ordered_entities
            ],
            "edges": [
                {"source": u, "target": v, "weight": w}
                for (u, v), w in sorted(profile.edges.items())
            ],
        }

    @app.get("/api/authors/{author_id}/documents")
    def author_documents(author_id: str):
        author = _author_or_404(author_id)
        return {
            "author_id": author.author_id,
            "documents": [
                {"doc_id": d.doc_id, "title": d.title, "body": d.body,
                 "doc_kind": d.doc_kind, "author_ids": list(d.author_ids)}
                for d in engine.store.documents_of(author.author_id)
            ],
        }

    @app.get("/api/explain")
    def explain(q: str = Query(""), author: str = Query("")):
        if not q.strip():
            raise HTTPException(status_code=400, detail="q must be a non-empty query")
        if not author:
            raise HTTPException(status_code=400, detail="author must be given")
        _author_or_404(author)
        explanation = engine.explain(q, author)
        return {"query": q, "author_id": author,
                "explanation": _explanation_payload(explanation)}

    static_root = Path(static_dir) if static_dir is not None else DEFAULT_STATIC_DIR
    if static_root.is_dir():
        app.mount("/", StaticFiles(directory=static_root, html=True), name="ui")
    return app
