"""Score vectors/matrices, zero-shot retrieval, recounting, matrix files."""

import numpy as np
import pytest

from videx.errors import ChecksumError, UnknownIdError, UnknownVideoError
from videx.models import LinearModel
from videx.ontology import parse_ontology
from videx.scoring import (
    ScoreMatrix,
    ScoreVector,
    aggregate_frames,
    load_score_matrix,
    load_score_matrix_binary,
    recount,
    recount_two_step,
    retrieve,
    save_score_matrix,
    save_score_matrix_binary,
    score_corpus,
    video_representation,
    zero_shot_score,
)

TREE = parse_ontology("""
{"id": "c0", "kind": "category", "name": "root", "parent": null}
{"id": "c1", "kind": "category", "name": "pets", "parent": "c0"}
{"id": "c2", "kind": "category", "name": "food", "parent": "c0"}
{"id": "e1", "kind": "event", "name": "groom a dog", "parent": "c1"}
{"id": "e2", "kind": "event", "name": "bake a cake", "parent": "c2"}
{"id": "k1", "kind": "concept", "name": "dog", "parent": "e1"}
{"id": "k2", "kind": "concept", "name": "brush", "parent": "e1"}
{"id": "k3", "kind": "concept", "name": "cake", "parent": "e2"}
{"id": "k4", "kind": "concept", "name": "oven", "parent": "e2"}
""")
CIDS = TREE.concept_ids  # ("k1", "k2", "k3", "k4")


def vec(video_id, scores):
    return ScoreVector(video_id=video_id, concept_ids=CIDS, scores=np.asarray(scores, float))


def matrix(rows):
    return ScoreMatrix(
        concept_ids=CIDS,
        video_ids=[vid for vid, _ in rows],
        scores=np.array([s for _, s in rows], dtype=float),
    )


# -- aggregation -----------------------------------------------------------------


def test_aggregate_single_frame_is_identity():
    frame = np.array([0.1, 0.2, 0.3])
    assert np.array_equal(aggregate_frames([frame]), frame)


def test_aggregate_two_frames():
    assert np.allclose(aggregate_frames([[0.0, 1.0], [1.0, 0.0]]), [0.5, 0.5])


def test_aggregate_matches_column_mean_oracle(rng):
    frames = rng.normal(size=(30, 12))
    expected = [sum(frames[:, j]) / 30 for j in range(12)]  # independent column mean
    assert np.allclose(aggregate_frames(frames), expected, atol=1e-12)


def test_aggregate_rejects_empty():
    with pytest.raises(ValueError):
        aggregate_frames(np.zeros((0, 4)))


# -- representation ----------------------------------------------------------------


def zero_weight_models(biases):
    return [
        LinearModel(np.zeros(3), b, target=cid) for cid, b in zip(CIDS, biases)
    ]


def test_representation_zero_weights_yields_biases():
    models = zero_weight_models([0.1, 0.2, 0.3, 0.4])
    sv = video_representation(np.ones((1, 3)), models, CIDS, video_id="v1")
    assert np.allclose(sv.scores, [0.1, 0.2, 0.3, 0.4])


def test_representation_two_frames_average():
    # one model, frames scoring 0.2 and 0.4 -> 0.3
    model = LinearModel(np.array([1.0]), 0.0, target="k1")
    sv = video_representation(np.array([[0.2], [0.4]]), [model], ["k1"])
    assert sv.scores[0] == pytest.approx(0.3)


def test_representation_matches_double_loop_oracle(rng):
    frames = rng.normal(size=(6, 5))
    models = [LinearModel(rng.normal(size=5), float(rng.normal()), target=cid) for cid in CIDS]
    sv = video_representation(frames, models, CIDS, video_id="v")
    for j, model in enumerate(models):
        per_frame = [float(model.weights @ f + model.bias) for f in frames]
        assert sv.scores[j] == pytest.approx(sum(per_frame) / len(per_frame), abs=1e-12)


def test_representation_requires_all_models():
    with pytest.raises(UnknownIdError, match="k4"):
        video_representation(np.ones((1, 3)), zero_weight_models([0, 0, 0, 0])[:3], CIDS)


def test_score_corpus_builds_aligned_matrix(rng):
    models = [LinearModel(rng.normal(size=4), 0.0, target=cid) for cid in CIDS]
    features = {"v1": rng.normal(size=(3, 4)), "v2": rng.normal(size=(2, 4))}
    corpus = score_corpus(features, models, CIDS)
    assert corpus.video_ids == ("v1", "v2")
    assert corpus.concept_ids == CIDS
    sv = video_representation(features["v2"], models, CIDS, "v2")
    assert np.allclose(corpus.vector_for("v2").scores, sv.scores)


# -- zero-shot scores ---------------------------------------------------------------


def test_zero_shot_single_concept():
    v = vec("v", [0.7, 0.0, 0.0, 0.0])
    assert zero_shot_score(v, ["k1"]) == 0.7


def test_zero_shot_mean_of_two():
    v = vec("v", [0.2, 0.4, 0.0, 0.0])
    assert zero_shot_score(v, ["k1", "k2"]) == pytest.approx(0.3)


def test_zero_shot_matches_mean_oracle(rng):
    scores = rng.normal(size=4)
    v = vec("v", scores)
    picked = ["k1", "k3", "k4"]
    expected = (scores[0] + scores[2] + scores[3]) / 3
    assert zero_shot_score(v, picked) == pytest.approx(expected, abs=1e-12)


def test_zero_shot_optional_weighting():
    v = vec("v", [1.0, 3.0, 0.0, 0.0])
    assert zero_shot_score(v, ["k1", "k2"], weights=[3.0, 1.0]) == pytest.approx(1.5)


def test_zero_shot_errors():
    v = vec("v", [0.0] * 4)
    with pytest.raises(ValueError):
        zero_shot_score(v, [])
    with pytest.raises(UnknownIdError):
        zero_shot_score(v, ["nope"])


# -- retrieval ----------------------------------------------------------------------


def test_retrieve_single_video():
    corpus = matrix([("v1", [0.5, 0.5, 0.0, 0.0])])
    assert retrieve(corpus, ["k1", "k2"]) == [("v1", 0.5)]


def test_retrieve_ties_broken_by_video_id():
    corpus = matrix([("vb", [1.0, 0.0, 0.0, 0.0]), ("va", [1.0, 0.0, 0.0, 0.0])])
    assert [v for v, _ in retrieve(corpus, ["k1"])] == ["va", "vb"]


def test_retrieve_planted_signal_and_sort_oracle(rng):
    # videos of the planted event get +2 on k1/k2; everyone gets unit noise
    rows = []
    for i in range(30):
        noise = rng.normal(scale=0.3, size=4)
        if i < 10:
            noise[:2] += 2.0
        rows.append((f"v{i:02d}", noise))
    corpus = matrix(rows)
    ranking = retrieve(corpus, ["k1", "k2"])
    top10 = {v for v, _ in ranking[:10]}
    assert top10 == {f"v{i:02d}" for i in range(10)}
    # independent sort oracle
    expected = sorted(
        [(vid, (s[0] + s[1]) / 2) for vid, s in rows], key=lambda p: (-p[1], p[0])
    )
    got = [(v, s) for v, s in ranking]
    assert [v for v, _ in got] == [v for v, _ in expected]
    assert np.allclose([s for _, s in got], [s for _, s in expected], atol=1e-12)


def test_retrieve_is_permutation_invariant(rng):
    rows = [(f"v{i}", rng.normal(size=4)) for i in range(20)]
    shuffled = [rows[i] for i in rng.permutation(20)]
    assert retrieve(matrix(rows), ["k1", "k3"]) == retrieve(matrix(shuffled), ["k1", "k3"])


def test_raising_selected_scores_never_lowers_rank(rng):
    rows = [(f"v{i}", rng.normal(size=4)) for i in range(15)]
    corpus = matrix(rows)
    before = {v: r for r, (v, _) in enumerate(retrieve(corpus, ["k1", "k2"]))}
    bumped = [
        (vid, s + np.array([1.0, 1.0, 0.0, 0.0]) if vid == "v7" else s) for vid, s in rows
    ]
    after = {v: r for r, (v, _) in enumerate(retrieve(matrix(bumped), ["k1", "k2"]))}
    assert after["v7"] <= before["v7"]


def test_retrieve_accepts_match_result(sample_tree, sample_backend):
    from videx.matching import MatchQuery, match_concepts

    result = match_concepts(sample_tree, MatchQuery("groom a dog", concept_count=5),
                            sample_backend)
    rng = np.random.default_rng(0)
    corpus = ScoreMatrix(
        concept_ids=sample_tree.concept_ids,
        video_ids=["v1", "v2"],
        scores=rng.normal(size=(2, len(sample_tree.concept_ids))),
    )
    ranking = retrieve(corpus, result)
    oracle = retrieve(corpus, [cid for cid, _ in result.matched_concepts])
    assert ranking == oracle


# -- recounting ---------------------------------------------------------------------


def test_recount_full_sort_when_top_n_is_header_length():
    v = vec("v", [0.3, 0.9, 0.1, 0.5])
    entries = recount(v, TREE, top_n=4)
    assert [e.concept_id for e in entries] == ["k2", "k4", "k1", "k3"]
    assert entries[0].event_name == "groom a dog"


def test_recount_one_hot_concept_first():
    v = vec("v", [0.0, 0.0, 1.0, 0.0])
    entries = recount(v, TREE, top_n=2)
    assert entries[0].concept_id == "k3"
    assert entries[0].concept_name == "cake"
    assert entries[0].event_id == "e2"


def test_recount_equals_sort_oracle_prefix(rng):
    scores = rng.normal(size=4)
    v = vec("v", scores)
    full = sorted(zip(CIDS, scores), key=lambda p: (-p[1], p[0]))
    for n in (1, 2, 3, 4):
        assert [e.concept_id for e in recount(v, TREE, top_n=n)] == [c for c, _ in full[:n]]


def test_recount_two_step_all_events_equals_plain(rng):
    v = vec("v", rng.normal(size=4))
    plain = [e.concept_id for e in recount(v, TREE, top_n=4)]
    two = [e.concept_id for e in recount_two_step(v, TREE, top_events=2, top_n=4)]
    assert two == plain


def test_recount_two_step_restricts_to_predicted_event():
    # k3/k4 (bake a cake) score higher on average -> only its concepts compete
    v = vec("v", [0.6, 0.0, 0.5, 0.45])
    entries = recount_two_step(v, TREE, top_events=1, top_n=4)
    assert {e.concept_id for e in entries} == {"k3", "k4"}


def test_recount_two_step_matches_filter_then_sort_oracle(rng):
    for _ in range(20):
        scores = rng.normal(size=4)
        v = vec("v", scores)
        means = {"e1": (scores[0] + scores[1]) / 2, "e2": (scores[2] + scores[3]) / 2}
        best = max(sorted(means), key=lambda e: means[e])
        members = {"e1": ["k1", "k2"], "e2": ["k3", "k4"]}[best]
        expected = sorted(
            [(c, scores[CIDS.index(c)]) for c in members], key=lambda p: (-p[1], p[0])
        )
        got = recount_two_step(v, TREE, top_events=1, top_n=2)
        assert [e.concept_id for e in got] == [c for c, _ in expected]
        assert {e.event_id for e in got} == {best}


def test_recount_two_step_with_event_head(rng):
    frames = rng.normal(size=(3, 5))
    event_models = {
        "e1": LinearModel(np.zeros(5), 5.0, target="e1"),  # e1 always wins
        "e2": LinearModel(np.zeros(5), -5.0, target="e2"),
    }
    v = vec("v", [0.1, 0.2, 0.9, 0.8])
    entries = recount_two_step(
        v, TREE, top_events=1, top_n=4, event_models=event_models, frames=frames
    )
    assert {e.concept_id for e in entries} == {"k1", "k2"}


# -- matrix files ------------------------------------------------------------------


def test_score_matrix_text_round_trip(tmp_path, rng):
    corpus = matrix([(f"v{i}", rng.normal(size=4)) for i in range(5)])
    path = tmp_path / "scores.tsv"
    save_score_matrix(corpus, path)
    back = load_score_matrix(path)
    assert back.concept_ids == corpus.concept_ids
    assert back.video_ids == corpus.video_ids
    assert np.array_equal(back.scores, corpus.scores)


def test_score_matrix_text_checksum_detects_tampering(tmp_path, rng):
    corpus = matrix([("v1", rng.normal(size=4))])
    path = tmp_path / "scores.tsv"
    save_score_matrix(corpus, path)
    body = path.read_text().replace("v1", "vX", 1)
    path.write_text(body)
    with pytest.raises(ChecksumError):
        load_score_matrix(path)
    path.write_text("no checksum here\n")
    with pytest.raises(ChecksumError):
        load_score_matrix(path)


def test_score_matrix_binary_round_trip(tmp_path, rng):
    corpus = matrix([(f"v{i}", rng.normal(size=4)) for i in range(7)])
    path = tmp_path / "scores.bin"
    save_score_matrix_binary(corpus, path)
    back = load_score_matrix_binary(path)
    assert back.concept_ids == corpus.concept_ids
    assert back.video_ids == corpus.video_ids
    assert np.array_equal(back.scores, corpus.scores)


def test_score_matrix_binary_checksum_detects_tampering(tmp_path, rng):
    corpus = matrix([("v1", rng.normal(size=4))])
    path = tmp_path / "scores.bin"
    save_score_matrix_binary(corpus, path)
    blob = bytearray(path.read_bytes())
    blob[-1] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(ChecksumError):
        load_score_matrix_binary(path)


def test_matrix_validation():
    with pytest.raises(ValueError, match="duplicate video"):
        ScoreMatrix(CIDS, ["v1", "v1"], np.zeros((2, 4)))
    with pytest.raises(ValueError, match="non-finite"):
        ScoreMatrix(CIDS, ["v1"], np.array([[np.nan, 0, 0, 0]]))
    corpus = matrix([("v1", [0.0] * 4)])
    with pytest.raises(UnknownVideoError):
        corpus.vector_for("nope")


def test_matrix_validate_against_tree():
    good = matrix([("v1", [0.0] * 4)])
    good.validate_against(TREE)  # no error
    bad = ScoreMatrix(("k1", "k2", "k3", "zz"), ["v1"], np.zeros((1, 4)))
    with pytest.raises(UnknownIdError, match="zz"):
        bad.validate_against(TREE)
    reordered = ScoreMatrix(("k2", "k1", "k3", "k4"), ["v1"], np.zeros((1, 4)))
    with pytest.raises(ValueError, match="canonical"):
        reordered.validate_against(TREE)
