"""Read-only HTTP facade over the ontology, matching, retrieval and recounting.

All state is loaded and validated at startup and never mutated afterwards
(reload = restart), so any number of concurrent readers see identical
answers. Every endpoint is a thin adapter: the response body is exactly the
canonical serialization of the corresponding library call's document, and
errors are structured {code, message, detail} objects.

Endpoints:
    GET  /health
    GET  /ontology/stats
    GET  /ontology/tree?root=<id>&depth=<n>
    GET  /ontology/node/<id>
    POST /match
    POST /retrieve
    POST /recount
    GET  /corpora
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from fastapi import Body, FastAPI, Request, Response

from .errors import UnknownCorpusError, VidexError
from .matching import MatchQuery, match_concepts
from .ontology import OntologyTree, load_ontology
from .ranking import canonical_json
from .scoring import ScoreMatrix, load_score_matrix, recount, recount_two_step, retrieve
from .similarity import default_backend

_NOT_FOUND_CODES = {"unknown-id", "unknown-corpus", "unknown-video"}


@dataclass(frozen=True)
class ServiceConfig:
    ontology: str
    corpora: Dict[str, str] = field(default_factory=dict)
    embeddings: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000


@dataclass(frozen=True)
class EngineState:
    """Everything the endpoints read; immutable once serving."""

    tree: OntologyTree
    backend: object
    corpora: Dict[str, ScoreMatrix] = field(default_factory=dict)


def build_state(config: ServiceConfig) -> EngineState:
    """Load and cross-validate all configured files; fail fast on any error."""
    tree = load_ontology(config.ontology)
    backend = default_backend(tree, embeddings_path=config.embeddings)
    corpora = {}
    for name, path in sorted(config.corpora.items()):
        matrix = load_score_matrix(Path(path))
        matrix.validate_against(tree)
        corpora[name] = matrix
    return EngineState(tree=tree, backend=backend, corpora=corpora)


# -- document builders shared by endpoints, CLI and tests ----------------------


def node_document(tree: OntologyTree, node_id: str) -> dict:
    node = tree.node(node_id)
    return {
        "id": node.id,
        "name": node.name,
        "kind": node.kind,
        "parent": node.parent,
        "children": list(tree.children(node.id)),
    }


def tree_document(tree: OntologyTree, root: Optional[str] = None, depth: int = 1) -> dict:
    """Nodes within ``depth`` levels below ``root`` (default: the tree root).

    depth=0 is just the root node; the UI lazy-loads one level at a time.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    root = tree.root_id if root is None else root
    tree.node(root)
    included = []
    frontier = [root]
    for _ in range(depth + 1):
        included.extend(frontier)
        frontier = [c for nid in frontier for c in tree.children(nid)]
    return {
        "root": root,
        "depth": depth,
        "nodes": [node_document(tree, nid) for nid in sorted(included)],
    }


def health_document(state: EngineState) -> dict:
    return {
        "status": "ok",
        "ontology": state.tree.stats().to_document(),
        "corpora": sorted(state.corpora),
    }


def corpora_document(state: EngineState) -> dict:
    return {
        "corpora": [
            {
                "name": name,
                "video_count": len(matrix.video_ids),
                "concept_count": len(matrix.concept_ids),
            }
            for name, matrix in sorted(state.corpora.items())
        ]
    }


def parse_match_query(payload: dict) -> MatchQuery:
    if not isinstance(payload, dict) or "text" not in payload:
        raise ValueError("request body must be an object with a 'text' field")
    restrict = payload.get("restrict_categories")
    try:
        return MatchQuery(
            text=str(payload["text"]),
            restrict_categories=frozenset(str(c) for c in restrict) if restrict else None,
            event_count=int(payload.get("event_count", 2)),
            concept_count=int(payload.get("concept_count", 15)),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad match query: {exc}") from exc


def match_document(state: EngineState, payload: dict) -> dict:
    query = parse_match_query(payload)
    if query.restrict_categories:
        for cid in sorted(query.restrict_categories):
            state.tree.node(cid)  # raises UnknownIdError with the offending id
    return match_concepts(state.tree, query, state.backend).to_document()


def _corpus(state: EngineState, name) -> ScoreMatrix:
    if name not in state.corpora:
        raise UnknownCorpusError(f"unknown corpus {name!r}")
    return state.corpora[name]


def retrieve_document(state: EngineState, payload: dict) -> dict:
    """Rank a named corpus. Body: {corpus, query: {...}} or {corpus, concepts: [...]}."""
    if not isinstance(payload, dict) or "corpus" not in payload:
        raise ValueError("request body must be an object with a 'corpus' field")
    corpus = _corpus(state, payload["corpus"])
    weighted = bool(payload.get("weighted", False))
    if "concepts" in payload:
        concept_ids = [str(c) for c in payload["concepts"]]
        ranking = retrieve(corpus, concept_ids, weighted=False)
        match_doc = None
    elif "query" in payload:
        match = match_concepts(state.tree, parse_match_query(payload["query"]), state.backend)
        ranking = retrieve(corpus, match, weighted=weighted)
        match_doc = match.to_document()
    else:
        raise ValueError("request body needs either 'query' or 'concepts'")
    return {
        "corpus": str(payload["corpus"]),
        "ranking": [[v, s] for v, s in ranking],
        "match": match_doc,
    }


def recount_document(state: EngineState, payload: dict) -> dict:
    """Recount one video. Body: {corpus, video_id, top_n?, mode?, top_events?}."""
    if not isinstance(payload, dict) or "corpus" not in payload or "video_id" not in payload:
        raise ValueError("request body must carry 'corpus' and 'video_id'")
    corpus = _corpus(state, payload["corpus"])
    vector = corpus.vector_for(str(payload["video_id"]))
    top_n = int(payload.get("top_n", 5))
    mode = payload.get("mode", "plain")
    if mode == "plain":
        entries = recount(vector, state.tree, top_n=top_n)
    elif mode == "two-step":
        entries = recount_two_step(
            vector, state.tree, top_events=int(payload.get("top_events", 2)), top_n=top_n
        )
    else:
        raise ValueError(f"unknown recount mode {mode!r}")
    return {
        "video_id": vector.video_id,
        "mode": mode,
        "entries": [e.to_document() for e in entries],
    }


# -- app ------------------------------------------------------------------------


def _json(document, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(document), media_type="application/json", status_code=status_code
    )


def _error(code: str, message: str, status: int) -> Response:
    return _json({"code": code, "message": message, "detail": {}}, status_code=status)


def create_app(state: EngineState) -> FastAPI:
    app = FastAPI(title="videx", docs_url=None, redoc_url=None)

    # the browser UI is served from a different origin; responses are read-only
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"], allow_headers=["*"]
    )

    @app.exception_handler(VidexError)
    async def _videx_error(_request: Request, exc: VidexError):
        status = 404 if exc.code in _NOT_FOUND_CODES else 400
        return _error(exc.code, str(exc), status)

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return _error("validation", str(exc), 400)

    @app.get("/health")
    def health():
        return _json(health_document(state))

    @app.get("/ontology/stats")
    def ontology_stats():
        return _json(state.tree.stats().to_document())

    @app.get("/ontology/tree")
    def ontology_tree(root: Optional[str] = None, depth: int = 1):
        return _json(tree_document(state.tree, root=root, depth=depth))

    @app.get("/ontology/node/{node_id}")
    def ontology_node(node_id: str):
        return _json(node_document(state.tree, node_id))

    @app.get("/corpora")
    def corpora():
        return _json(corpora_document(state))

    @app.post("/match")
    def match(payload: dict = Body(...)):
        return _json(match_document(state, payload))

    @app.post("/retrieve")
    def retrieve_endpoint(payload: dict = Body(...)):
        return _json(retrieve_document(state, payload))

    @app.post("/recount")
    def recount_endpoint(payload: dict = Body(...)):
        return _json(recount_document(state, payload))

    return app


def serve(config: ServiceConfig) -> None:
    """Validate config, build immutable state, and serve until interrupted."""
    import uvicorn

    state = build_state(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
