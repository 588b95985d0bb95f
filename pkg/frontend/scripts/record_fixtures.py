"""Record live API responses into JSON fixtures for the UI tests.

Builds the engine over the planted test corpus shipped with the Python
package, then captures each documented endpoint's body (and status for the
error cases) exactly as the service returns it. Rerun after any API change:

    python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from expertsearch.config import EngineConfig
from expertsearch.engine import Engine
from expertsearch.server import create_app

REPO = Path(__file__).resolve().parents[2]
PLANTED = REPO / "tests" / "fixtures" / "planted"
OUT = REPO / "frontend" / "tests" / "fixtures"


def build_client(store_dir: Path, **overrides) -> TestClient:
    config = EngineConfig(
        documents_path=str(PLANTED / "documents.tsv"),
        authors_path=str(PLANTED / "authors.tsv"),
        dictionary_path=str(PLANTED / "dictionary.tsv"),
        snapshot_path=str(PLANTED / "snapshot.tsv"),
        store_dir=str(store_dir), seed=7, **overrides)
    engine = Engine(config)
    engine.build_index()
    engine.build_profiles()
    engine.load()
    return TestClient(create_app(engine, static_dir=store_dir / "no-ui"))


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")
    print(f"wrote {path.relative_to(REPO)}")


def record(client: TestClient, name: str, url: str, expect: int = 200) -> None:
    response = client.get(url)
    if response.status_code != expect:
        sys.exit(f"{url}: expected {expect}, got {response.status_code}: {response.text}")
    if expect == 200:
        dump(name, response.json())
    else:
        dump(name, {"status": response.status_code, "body": response.json()})


def synthetic() -> None:
    """Hand-shaped payloads for cases the planted corpus cannot produce."""
    results = []
    for i in range(1, 51):
        results.append({
            "author_id": f"s{i:02d}",
            "display_name": f"Synthetic Author {i:02d}",
            "score": round(1.0 / i, 6),
            "rank": i,
            "sub_scores": {"doc": round(0.5 / i, 6), "profile": round(0.5 / i, 6)},
            "explanation": None,
        })
    dump("search_fifty", {
        "query": "synthetic pagination corpus",
        "strategy": "fused",
        "query_entities": ["synthetic"],
        "results": results,
    })
    dump("profile_three_topics", {
        "author_id": "s01",
        "display_name": "Synthetic Author 01",
        "entities": [
            {"entity_id": "alpha", "relevance": 0.5, "rho": 0.9, "doc_count": 5},
            {"entity_id": "beta", "relevance": 0.3, "rho": 0.8, "doc_count": 3},
            {"entity_id": "gamma", "relevance": 0.2, "rho": 0.7, "doc_count": 2},
        ],
        "edges": [
            {"source": "alpha", "target": "beta", "weight": 0.6},
        ],
    })
    dump("profile_empty", {
        "author_id": "s02",
        "display_name": "Synthetic Author 02",
        "entities": [],
        "edges": [],
    })
    dump("author_empty", {
        "author_id": "s02",
        "display_name": "Synthetic Author 02",
        "document_count": 2,
        "entity_count": 0,
        "top_entities": [],
    })


def main() -> None:
    synthetic()
    with tempfile.TemporaryDirectory() as tmp:
        client = build_client(Path(tmp) / "store")
        record(client, "strategies", "/api/strategies")
        record(client, "search_wal",
               "/api/search?q=write+ahead+log&strategy=fused&limit=20")
        record(client, "search_buffer",
               "/api/search?q=crash+recovery+and+the+buffer+pool&strategy=fused&limit=20")
        record(client, "search_no_match",
               "/api/search?q=zzz+qqq+xyzzy", expect=422)
        record(client, "author_p01", "/api/authors/p01")
        record(client, "author_missing", "/api/authors/nobody", expect=404)
        record(client, "profile_p01", "/api/authors/p01/profile")
        record(client, "documents_p01", "/api/authors/p01/documents")
        record(client, "explain_wal_p01",
               "/api/explain?q=write+ahead+log&author=p01")
        record(client, "explain_buffer_p01",
               "/api/explain?q=crash+recovery+and+the+buffer+pool&author=p01")

    with tempfile.TemporaryDirectory() as tmp:
        related = build_client(Path(tmp) / "store", profile_method="aer")
        record(related, "explain_aer_p01",
               "/api/explain?q=write+ahead+log&author=p01")


if __name__ == "__main__":
    main()
