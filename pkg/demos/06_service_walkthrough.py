"""The HTTP facade, exercised in-process.

Builds the same immutable engine state the `videx serve` command loads,
mounts it in the app, and walks the endpoints a browser UI would call:
health, lazy tree expansion, matching with and without restriction,
retrieval, and recounting.

Run:  python demos/06_service_walkthrough.py
(For a real server:  videx serve --ontology src/videx/data/sample_ontology.jsonl)
"""

import json
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from videx import ScoreMatrix, load_sample_ontology, save_score_matrix
from videx.service import ServiceConfig, build_state, create_app

tree = load_sample_ontology()
rng = np.random.default_rng(3)
matrix = ScoreMatrix(
    concept_ids=tree.concept_ids,
    video_ids=[f"v{i:03d}" for i in range(25)],
    scores=rng.normal(size=(25, len(tree.concept_ids))),
)

with tempfile.TemporaryDirectory() as tmp:
    corpus_path = Path(tmp) / "demo.scores"
    save_score_matrix(matrix, corpus_path)
    state = build_state(
        ServiceConfig(
            ontology="src/videx/data/sample_ontology.jsonl",
            corpora={"demo": str(corpus_path)},
        )
    )
    client = TestClient(create_app(state))

    print("== GET /health ==")
    health = client.get("/health").json()
    print(f"   status={health['status']}  corpora={health['corpora']}  "
          f"events={health['ontology']['event_count']}")

    print("\n== GET /ontology/tree?depth=1 (lazy top level) ==")
    for node in client.get("/ontology/tree", params={"depth": 1}).json()["nodes"]:
        if node["kind"] == "category" and node["parent"]:
            print(f"   {node['id']}  {node['name']}")

    print("\n== POST /match: 'wedding shower', then restricted ==")
    plain = client.post("/match", json={"text": "wedding shower"}).json()
    print("   unrestricted events: ", [e for e, _ in plain["matched_events"]])
    restricted = client.post(
        "/match", json={"text": "wedding shower", "restrict_categories": ["c01"]}
    ).json()
    print("   restricted events:   ", [e for e, _ in restricted["matched_events"]])

    print("\n== restriction that empties the pool is a structured error ==")
    err = client.post("/match", json={"text": "x", "restrict_categories": ["c18"]})
    print(f"   HTTP {err.status_code}: {json.dumps(err.json())}")

    print("\n== POST /retrieve on corpus 'demo' ==")
    body = {"corpus": "demo", "query": {"text": "groom a dog", "concept_count": 5}}
    ranking = client.post("/retrieve", json=body).json()["ranking"]
    print("   top 3:", [(v, round(s, 3)) for v, s in ranking[:3]])

    print("\n== POST /recount for the top video ==")
    rec = client.post(
        "/recount", json={"corpus": "demo", "video_id": ranking[0][0], "top_n": 3}
    ).json()
    for entry in rec["entries"]:
        print(f"   {entry['score']:+.3f}  {entry['concept_name']} "
              f"(event: {entry['event_name']})")
