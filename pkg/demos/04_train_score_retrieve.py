"""End to end on synthetic features: train concept models, build the score
matrix, run a zero-shot query, and recount the top video.

Frames arrive as precomputed feature vectors (the real pipeline extracts
them upstream). Each concept gets a one-vs-all linear model trained on
frames of its videos against frames sampled from other events' concepts;
a video's representation is the frame-average of all concept scores.

Run:  python demos/04_train_score_retrieve.py
"""

import numpy as np

from videx import (
    MatchQuery,
    OverlapCosineBackend,
    load_sample_ontology,
    match_concepts,
    recount,
    retrieve,
    sample_negatives,
    score_corpus,
    train_linear,
)

rng = np.random.default_rng(7)
tree = load_sample_ontology()
backend = OverlapCosineBackend.from_tree(tree)
DIM = 16

# synthetic world: each concept has a direction in feature space; frames of
# a video point toward the directions of its event's concepts
directions = {cid: rng.normal(size=DIM) / np.sqrt(DIM) for cid in tree.concept_ids}

videos_by_concept = {}
features = {}
for eid in tree.event_ids:
    eids = tree.children(eid)
    for v in range(6):
        vid = f"{eid}v{v}"
        signal = sum(directions[c] for c in eids)
        features[vid] = rng.normal(scale=0.6, size=(5, DIM)) + signal
        for cid in eids:
            videos_by_concept.setdefault(cid, []).append(vid)

print(f"== training {len(tree.concept_ids)} one-vs-all concept models ==")
models = []
for cid in tree.concept_ids:
    positives = np.vstack([features[v] for v in videos_by_concept[cid]])
    neg_videos = sample_negatives(tree, cid, videos_by_concept, seed=11)
    negatives = np.vstack([features[v] for v in neg_videos])
    models.append(train_linear(positives, negatives, target=cid))
print(f"   trained on {len(features)} videos x 5 frames, dim {DIM}")

print("\n== scoring the corpus (frame scores averaged per video) ==")
corpus = score_corpus(features, models, tree.concept_ids)
print(f"   score matrix: {len(corpus.video_ids)} videos x {len(corpus.concept_ids)} concepts")

print("\n== zero-shot retrieval: 'grooming the dog' ==")
match = match_concepts(tree, MatchQuery("grooming the dog", concept_count=5), backend)
print("   selected concepts:", [tree.node(c).name for c, _ in match.matched_concepts])
ranking = retrieve(corpus, match)
print("   top 5 videos:")
for vid, score in ranking[:5]:
    marker = "<-- groom-a-dog video" if vid.startswith("e11") else ""
    print(f"     {score:+.3f}  {vid}  {marker}")

print("\n== recounting the top video ==")
for entry in recount(corpus.vector_for(ranking[0][0]), tree, top_n=5):
    print(f"   {entry.score:+.3f}  {entry.concept_name:<10} (event: {entry.event_name})")
