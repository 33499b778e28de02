"""Concept-score video representations, zero-shot retrieval and recounting.

A video is represented by the vector of concept-classifier scores obtained by
scoring every frame with every concept model and averaging across frames.
Retrieval for a novel query averages the scores of the query's matched
concepts per video and ranks the corpus by that mean. Recounting lists the
top-scoring concepts of one video as human-readable evidence.

Scores are raw linear margins by default; sigmoid calibration is available
behind a flag but off unless asked for.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ChecksumError, UnknownIdError, UnknownVideoError
from .models import LinearModel, predict_many, softmax
from .ontology import OntologyTree
from .ranking import RankedList, ranked


@dataclass(frozen=True)
class ScoreVector:
    """One video's concept scores, aligned to a fixed concept-id ordering."""

    video_id: str
    concept_ids: Tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.shape != (len(self.concept_ids),):
            raise ValueError(
                f"scores shape {arr.shape} does not match {len(self.concept_ids)} concepts"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite score for video {self.video_id!r}")
        object.__setattr__(self, "scores", arr)
        object.__setattr__(self, "concept_ids", tuple(self.concept_ids))

    def score_of(self, concept_id: str) -> float:
        try:
            return float(self.scores[self.concept_ids.index(concept_id)])
        except ValueError:
            raise UnknownIdError(f"concept {concept_id!r} not in score header") from None


class ScoreMatrix:
    """Videos x concepts score table with a fixed concept-id header."""

    def __init__(self, concept_ids: Sequence[str], video_ids: Sequence[str], scores):
        self.concept_ids: Tuple[str, ...] = tuple(str(c) for c in concept_ids)
        self.video_ids: Tuple[str, ...] = tuple(str(v) for v in video_ids)
        arr = np.asarray(scores, dtype=np.float64)
        if arr.shape != (len(self.video_ids), len(self.concept_ids)):
            raise ValueError(
                f"scores shape {arr.shape} != ({len(self.video_ids)}, {len(self.concept_ids)})"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("score matrix has non-finite entries")
        if len(set(self.video_ids)) != len(self.video_ids):
            raise ValueError("duplicate video ids in score matrix")
        if len(set(self.concept_ids)) != len(self.concept_ids):
            raise ValueError("duplicate concept ids in score matrix header")
        self.scores = arr
        self._video_index = {v: i for i, v in enumerate(self.video_ids)}
        self._concept_index = {c: i for i, c in enumerate(self.concept_ids)}

    def __len__(self) -> int:
        return len(self.video_ids)

    def vector_for(self, video_id: str) -> ScoreVector:
        if video_id not in self._video_index:
            raise UnknownVideoError(f"unknown video {video_id!r}")
        row = self.scores[self._video_index[video_id]]
        return ScoreVector(video_id=video_id, concept_ids=self.concept_ids, scores=row.copy())

    def columns_for(self, concept_ids: Sequence[str]) -> np.ndarray:
        idx = []
        for cid in concept_ids:
            if cid not in self._concept_index:
                raise UnknownIdError(f"concept {cid!r} not in score matrix header")
            idx.append(self._concept_index[cid])
        return self.scores[:, idx]

    def validate_against(self, tree: OntologyTree) -> None:
        """Header must equal the tree's canonical concept ordering exactly."""
        expected = tree.concept_ids
        unknown = [c for c in self.concept_ids if c not in set(expected)]
        if unknown:
            raise UnknownIdError(f"score matrix header has unknown concept id {unknown[0]!r}")
        if self.concept_ids != expected:
            raise ValueError(
                "score matrix header does not cover the ontology concepts in canonical order"
            )


# -- frame aggregation --------------------------------------------------------


def aggregate_frames(frame_scores) -> np.ndarray:
    """Per-dimension arithmetic mean over one video's frame score vectors."""
    arr = np.asarray(frame_scores, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("need at least one frame score vector")
    return arr.mean(axis=0)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def video_representation(
    frames,
    concept_models: Sequence[LinearModel],
    concept_ids: Sequence[str],
    video_id: str = "",
    calibrate: bool = False,
) -> ScoreVector:
    """Score every frame with every concept model and average across frames.

    ``concept_models`` must cover every id in ``concept_ids`` (the canonical
    ontology ordering); a missing model is an error, not a zero column.
    """
    by_target = {m.target: m for m in concept_models}
    missing = [cid for cid in concept_ids if cid not in by_target]
    if missing:
        raise UnknownIdError(f"no model for concept {missing[0]!r}")
    columns = []
    for cid in concept_ids:
        margins = predict_many(by_target[cid], frames)
        columns.append(_sigmoid(margins) if calibrate else margins)
    per_frame = np.stack(columns, axis=1)  # frames x concepts
    return ScoreVector(
        video_id=video_id, concept_ids=tuple(concept_ids), scores=aggregate_frames(per_frame)
    )


def score_corpus(
    features: Dict[str, np.ndarray],
    concept_models: Sequence[LinearModel],
    concept_ids: Sequence[str],
    calibrate: bool = False,
) -> ScoreMatrix:
    """Build a ScoreMatrix by scoring every video's frames."""
    video_ids = sorted(features)
    rows = [
        video_representation(features[v], concept_models, concept_ids, v, calibrate).scores
        for v in video_ids
    ]
    return ScoreMatrix(concept_ids=concept_ids, video_ids=video_ids, scores=np.vstack(rows))


# -- zero-shot retrieval ------------------------------------------------------


def zero_shot_score(
    video: ScoreVector,
    selected: Sequence[str],
    weights: Optional[Sequence[float]] = None,
) -> float:
    """Mean of the selected concepts' scores on one video.

    ``weights`` (similarity weighting) is only honored when passed
    explicitly; the default pipeline averages unweighted.
    """
    selected = list(selected)
    if not selected:
        raise ValueError("empty concept selection")
    values = np.array([video.score_of(cid) for cid in selected])
    if weights is None:
        return float(values.mean())
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != values.shape:
        raise ValueError(f"weights shape {w.shape} != selection shape {values.shape}")
    if w.sum() == 0:
        raise ValueError("weights sum to zero")
    return float((values * w).sum() / w.sum())


def retrieve(
    corpus: ScoreMatrix,
    match,
    weighted: bool = False,
) -> RankedList:
    """Rank the corpus by zero-shot score for a match result.

    ``match`` is either a MatchResult (its matched concepts are used, with
    similarity weights when ``weighted``) or a plain sequence of concept ids.
    """
    if hasattr(match, "matched_concepts"):
        pairs = list(match.matched_concepts)
    else:
        pairs = [(cid, 1.0) for cid in match]
    if not pairs:
        raise ValueError("empty concept selection")
    ids = [cid for cid, _ in pairs]
    columns = corpus.columns_for(ids)
    if weighted:
        w = np.array([s for _, s in pairs])
        if w.sum() == 0:
            raise ValueError("similarity weights sum to zero; cannot weight")
        scores = columns @ w / w.sum()
    else:
        scores = columns.mean(axis=1)
    return ranked(zip(corpus.video_ids, scores))


# -- recounting ---------------------------------------------------------------


@dataclass(frozen=True)
class RecountEntry:
    concept_id: str
    concept_name: str
    event_id: str
    event_name: str
    score: float

    def to_document(self) -> dict:
        return {
            "concept_id": self.concept_id,
            "concept_name": self.concept_name,
            "event_id": self.event_id,
            "event_name": self.event_name,
            "score": self.score,
        }


def _entries_for(video: ScoreVector, tree: OntologyTree, concept_ids: Iterable[str]):
    pairs = [(cid, video.score_of(cid)) for cid in concept_ids]
    out = []
    for cid, score in ranked(pairs):
        event_id = tree.parent_event(cid)
        out.append(
            RecountEntry(
                concept_id=cid,
                concept_name=tree.node(cid).name,
                event_id=event_id,
                event_name=tree.node(event_id).name,
                score=score,
            )
        )
    return out


def recount(video: ScoreVector, tree: OntologyTree, top_n: int = 5) -> List[RecountEntry]:
    """Top-n concepts detected in the video, with their events for display."""
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    return _entries_for(video, tree, video.concept_ids)[:top_n]


def recount_two_step(
    video: ScoreVector,
    tree: OntologyTree,
    top_events: int = 2,
    top_n: int = 5,
    event_models: Optional[Dict[str, LinearModel]] = None,
    frames=None,
) -> List[RecountEntry]:
    """Recount restricted to the concepts of the most likely events.

    Event likelihood comes from a softmax over a trained event head when one
    is supplied together with the video's frames; otherwise each event is
    scored by the mean of its own concepts' scores. Only concepts under the
    ``top_events`` best events compete for the top-n list.
    """
    if top_n < 1 or top_events < 1:
        raise ValueError("top_events and top_n must be >= 1")

    if event_models is not None and frames is not None:
        event_ids = sorted(event_models)
        logits = np.array(
            [float(np.mean(predict_many(event_models[eid], frames))) for eid in event_ids]
        )
        event_scores = list(zip(event_ids, softmax(logits)))
    else:
        event_scores = []
        for eid in tree.event_ids:
            concepts = [c for c in tree.children(eid) if c in set(video.concept_ids)]
            if not concepts:
                continue
            event_scores.append((eid, float(np.mean([video.score_of(c) for c in concepts]))))

    chosen = [eid for eid, _ in ranked(event_scores)[:top_events]]
    pool = [cid for eid in chosen for cid in tree.children(eid) if cid in set(video.concept_ids)]
    return _entries_for(video, tree, pool)[:top_n]


# -- score matrix files -------------------------------------------------------

_TEXT_PREFIX = "#checksum sha256 "
_BINARY_MAGIC = b"VXSCORES1\n"


def _matrix_payload_text(matrix: ScoreMatrix) -> str:
    lines = ["video_id\t" + "\t".join(matrix.concept_ids)]
    for vid, row in zip(matrix.video_ids, matrix.scores):
        lines.append(vid + "\t" + "\t".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_score_matrix(matrix: ScoreMatrix, path) -> None:
    """Text variant: checksum line, tab-separated header, one row per video."""
    payload = _matrix_payload_text(matrix)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    Path(path).write_text(_TEXT_PREFIX + digest + "\n" + payload, encoding="utf-8")


def load_score_matrix(path) -> ScoreMatrix:
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith(_TEXT_PREFIX):
        newline = text.index("\n")
        declared = text[len(_TEXT_PREFIX):newline].strip()
        payload = text[newline + 1:]
        actual = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        if actual != declared:
            raise ChecksumError(f"score matrix checksum mismatch: {actual} != {declared}")
    else:
        raise ChecksumError("score matrix file lacks a checksum line")
    lines = payload.splitlines()
    header = lines[0].split("\t")
    if header[:1] != ["video_id"]:
        raise ValueError("score matrix header must start with 'video_id'")
    concept_ids = header[1:]
    video_ids, rows = [], []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        video_ids.append(parts[0])
        rows.append([float(v) for v in parts[1:]])
    return ScoreMatrix(concept_ids=concept_ids, video_ids=video_ids, scores=np.asarray(rows))


def save_score_matrix_binary(matrix: ScoreMatrix, path) -> None:
    """Binary variant: magic, JSON header with checksum, float64 LE rows."""
    data = np.ascontiguousarray(matrix.scores, dtype="<f8").tobytes()
    header = json.dumps(
        {
            "concept_ids": list(matrix.concept_ids),
            "video_ids": list(matrix.video_ids),
            "checksum": "sha256:" + hashlib.sha256(data).hexdigest(),
        },
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_BINARY_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(data)


def load_score_matrix_binary(path) -> ScoreMatrix:
    blob = Path(path).read_bytes()
    if not blob.startswith(_BINARY_MAGIC):
        raise ValueError("not a binary score matrix file")
    offset = len(_BINARY_MAGIC)
    (header_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    header = json.loads(blob[offset:offset + header_len].decode("utf-8"))
    data = blob[offset + header_len:]
    declared = header["checksum"]
    actual = "sha256:" + hashlib.sha256(data).hexdigest()
    if actual != declared:
        raise ChecksumError(f"score matrix checksum mismatch: {actual} != {declared}")
    scores = np.frombuffer(data, dtype="<f8").reshape(
        len(header["video_ids"]), len(header["concept_ids"])
    )
    return ScoreMatrix(
        concept_ids=header["concept_ids"], video_ids=header["video_ids"], scores=scores.copy()
    )
