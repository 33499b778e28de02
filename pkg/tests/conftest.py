"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from videx import OverlapCosineBackend, load_sample_ontology
from videx.ontology import OntologyNode, OntologyTree

# word pool for random node names: half "common" words that collide across
# names, half rarer ones, so similarity scores spread out
WORDS = [
    "dog", "cat", "fish", "cake", "tire", "bike", "dance", "party", "repair",
    "ride", "climb", "wash", "build", "paint", "garden", "boat", "snow",
    "guitar", "wedding", "parade", "shower", "race", "camp", "knit", "brew",
]


def make_random_tree(rng: np.random.Generator, max_top=4, max_events=10) -> OntologyTree:
    """A small random but always-valid tree with 1..max_top top categories."""
    nodes = [OntologyNode("c000", "root category", "category", None)]
    categories = ["c000"]
    for i in range(int(rng.integers(1, max_top + 1))):
        cid = f"c{i + 1:03d}"
        nodes.append(OntologyNode(cid, _phrase(rng, 2), "category", "c000"))
        categories.append(cid)
        if rng.random() < 0.4:
            sub = f"c{i + 1:03d}s"
            nodes.append(OntologyNode(sub, _phrase(rng, 2), "category", cid))
            categories.append(sub)
    n_events = int(rng.integers(1, max_events + 1))
    k = 0
    for j in range(n_events):
        eid = f"e{j:03d}"
        parent = categories[int(rng.integers(1, len(categories)))] if len(categories) > 1 else "c000"
        nodes.append(OntologyNode(eid, _phrase(rng, 3), "event", parent))
        for _ in range(int(rng.integers(0, 5))):
            nodes.append(OntologyNode(f"k{k:04d}", _phrase(rng, 1), "concept", eid))
            k += 1
    return OntologyTree(nodes)


def _phrase(rng: np.random.Generator, n_words: int) -> str:
    picks = rng.choice(len(WORDS), size=n_words, replace=False)
    return " ".join(WORDS[i] for i in picks)


def random_phrase(rng: np.random.Generator, max_words: int = 3) -> str:
    return _phrase(rng, int(rng.integers(1, max_words + 1)))


def build_ambiguity_benchmark(
    n_events=20,
    decoy_count=10,
    videos_per_event=100,
    seed=2024,
    signal=1.5,
    noise=1.0,
    concepts_per_event=5,
):
    """Synthetic retrieval benchmark with polysemous decoy events.

    Each planted event i sits alone under its own top-level category and has
    ``concepts_per_event`` concepts carrying +signal on that event's videos.
    The first ``decoy_count`` events get a query sharing a rare token with
    two decoy events on other branches, so unrestricted matching walks into
    the decoys while restriction to the event's category recovers.

    Returns (tree, backend, corpus, query_cases).
    """
    from videx.evaluation import QueryCase
    from videx.scoring import ScoreMatrix

    nodes = [OntologyNode("c000", "root", "category", None)]
    nodes.append(OntologyNode("cd01", "distractor area one", "category", "c000"))
    nodes.append(OntologyNode("cd02", "distractor area two", "category", "c000"))
    concepts = []
    queries = []
    for i in range(n_events):
        cat, eid = f"c{i + 1:03d}", f"e{i:03d}"
        # the category name repeats the common token so decoy names stay rarer
        nodes.append(OntologyNode(cat, f"area common{i}", "category", "c000"))
        nodes.append(OntologyNode(eid, f"common{i}", "event", cat))
        for j in range(concepts_per_event):
            kid = f"k{i:03d}x{j}"
            name = f"common{i} filler" if j == 0 else f"bland{i}x{j}"
            nodes.append(OntologyNode(kid, name, "concept", eid))
            concepts.append((kid, eid))
        if i < decoy_count:
            for side, dcat in (("a", "cd01"), ("b", "cd02")):
                did = f"ed{i:03d}{side}"
                nodes.append(OntologyNode(did, f"poly{i}", "event", dcat))
                for j in range(concepts_per_event):
                    kid = f"kd{i:03d}{side}{j}"
                    nodes.append(OntologyNode(kid, f"decoybland{i}{side}{j}", "concept", did))
                    concepts.append((kid, did))
            queries.append(QueryCase(text=f"common{i} poly{i}", relevant=frozenset(),
                                     restrict=frozenset({cat})))
        else:
            queries.append(QueryCase(text=f"common{i}", relevant=frozenset(),
                                     restrict=frozenset({cat})))

    tree = OntologyTree(nodes)
    backend = OverlapCosineBackend.from_tree(tree)

    concept_ids = tree.concept_ids
    col = {cid: idx for idx, cid in enumerate(concept_ids)}
    rng = np.random.default_rng(seed)
    video_ids, owners = [], []
    for i in range(n_events):
        for v in range(videos_per_event):
            video_ids.append(f"v{i:03d}n{v:04d}")
            owners.append(i)
    scores = rng.normal(scale=noise, size=(len(video_ids), len(concept_ids)))
    for row, owner in enumerate(owners):
        eid = f"e{owner:03d}"
        for kid, parent in concepts:
            if parent == eid:
                scores[row, col[kid]] += signal
    corpus = ScoreMatrix(concept_ids=concept_ids, video_ids=video_ids, scores=scores)

    queries = [
        QueryCase(
            text=q.text,
            relevant=frozenset(v for v, o in zip(video_ids, owners) if o == i),
            restrict=q.restrict,
        )
        for i, q in enumerate(queries)
    ]
    return tree, backend, corpus, queries


def build_sweep_benchmark(
    n_events=10,
    videos_per_event=60,
    noise_concepts=27,
    seed=4242,
    signal=1.0,
    noise=1.0,
):
    """Planted fixture where exactly 3 concepts per event carry signal.

    Concept names are rigged so matching ranks the three signal concepts
    first for the event's own query; every other concept is name-disjoint.
    Returns (tree, backend, corpus, query_cases, signal_ids_by_event).
    """
    from videx.evaluation import QueryCase
    from videx.scoring import ScoreMatrix

    nodes = [OntologyNode("c000", "root", "category", None)]
    signal_ids = {}
    queries = []
    for i in range(n_events):
        cat, eid = f"c{i + 1:03d}", f"e{i:03d}"
        nodes.append(OntologyNode(cat, f"area{i}", "category", "c000"))
        nodes.append(OntologyNode(eid, f"sig{i} mid{i} low{i}", "event", cat))
        trio = [f"k{i:03d}s0", f"k{i:03d}s1", f"k{i:03d}s2"]
        nodes.append(OntologyNode(trio[0], f"sig{i} mid{i} low{i}", "concept", eid))
        nodes.append(OntologyNode(trio[1], f"sig{i} mid{i}", "concept", eid))
        nodes.append(OntologyNode(trio[2], f"sig{i}", "concept", eid))
        signal_ids[eid] = trio
        for j in range(noise_concepts):
            nodes.append(OntologyNode(f"k{i:03d}z{j:02d}", f"junk{i}x{j}", "concept", eid))
        queries.append(QueryCase(text=f"sig{i} mid{i} low{i}", relevant=frozenset()))

    tree = OntologyTree(nodes)
    backend = OverlapCosineBackend.from_tree(tree)

    concept_ids = tree.concept_ids
    col = {cid: idx for idx, cid in enumerate(concept_ids)}
    rng = np.random.default_rng(seed)
    video_ids, owners = [], []
    for i in range(n_events):
        for v in range(videos_per_event):
            video_ids.append(f"v{i:03d}n{v:04d}")
            owners.append(i)
    scores = rng.normal(scale=noise, size=(len(video_ids), len(concept_ids)))
    for row, owner in enumerate(owners):
        for kid in signal_ids[f"e{owner:03d}"]:
            scores[row, col[kid]] += signal
    corpus = ScoreMatrix(concept_ids=concept_ids, video_ids=video_ids, scores=scores)

    queries = [
        QueryCase(
            text=q.text,
            relevant=frozenset(v for v, o in zip(video_ids, owners) if o == i),
        )
        for i, q in enumerate(queries)
    ]
    return tree, backend, corpus, queries, signal_ids


@pytest.fixture(scope="session")
def sample_tree():
    return load_sample_ontology()


@pytest.fixture(scope="session")
def sample_backend(sample_tree):
    return OverlapCosineBackend.from_tree(sample_tree)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
