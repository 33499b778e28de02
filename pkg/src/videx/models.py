"""Linear learning components over precomputed frame features.

Upstream feature extraction is out of scope: frames arrive as fixed-dimension
real vectors (the production contract is an L2-normalized 4096-d deep
feature, but nothing here depends on the dimension). This module owns

* the softmax event head math (probabilities, multinomial logistic loss and
  its analytic gradient),
* one-vs-all linear concept classifiers trained with regularized hinge loss
  by deterministic full-batch subgradient descent,
* negative sampling that only draws videos from concepts under *other*
  events, and
* the stratified 70/10/20 dataset split.

Everything is deterministic: training starts from zeros and sampling is
driven by an explicit seed, so identical inputs give bitwise-identical
models and splits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .ontology import OntologyTree

#: Seed used whenever the caller does not supply one.
DEFAULT_SEED = 17

DEFAULT_RATIOS = (0.7, 0.1, 0.2)


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a vector or matrix, got ndim={arr.ndim}")
    return arr


def l2_normalize(v) -> np.ndarray:
    """Scale a vector to unit Euclidean norm; the zero vector passes through
    unchanged (avoids NaN poisoning in downstream averages)."""
    arr = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("feature vector has non-finite entries")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        return arr.copy()
    return arr / norm


def softmax(x) -> np.ndarray:
    """Softmax with max-subtraction; works on one logit vector or a batch.

    Output rows sum to 1 and no overflow occurs for any finite input.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("logits must be finite")
    shifted = arr - arr.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_labels(logits: np.ndarray, labels: np.ndarray) -> None:
    c = logits.shape[1]
    if labels.ndim != 1 or labels.shape[0] != logits.shape[0]:
        raise ValueError("labels must be one integer per sample")
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise ValueError(f"label out of range [0, {c})")


def multinomial_loss(logits, labels) -> float:
    """Mean negative log-probability of the true class.

    Computed through log-sum-exp, so a batch of uniform logits over C classes
    yields exactly log(C).
    """
    x = _as_matrix(logits, "logits")
    y = np.asarray(labels, dtype=np.int64)
    _check_labels(x, y)
    m = x.max(axis=1)
    # grouped as log-sum-exp-shifted + (max - true logit): uniform logits give
    # exactly log(C) because the second term is exactly zero
    lse_shifted = np.log(np.exp(x - m[:, None]).sum(axis=1))
    return float(np.mean(lse_shifted + (m - x[np.arange(x.shape[0]), y])))


def multinomial_loss_gradient(logits, labels) -> Tuple[float, np.ndarray]:
    """Loss plus its analytic gradient w.r.t. the logits: (p - onehot) / N."""
    x = _as_matrix(logits, "logits")
    y = np.asarray(labels, dtype=np.int64)
    _check_labels(x, y)
    p = softmax(x)
    grad = p.copy()
    grad[np.arange(x.shape[0]), y] -= 1.0
    grad /= x.shape[0]
    return multinomial_loss(x, y), grad


# -- linear concept models ----------------------------------------------------


@dataclass(frozen=True)
class LinearModel:
    """One-vs-all linear scorer: score(v) = weights . v + bias."""

    weights: np.ndarray
    bias: float
    target: Optional[str] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValueError(f"weights must be 1-D, got shape {w.shape}")
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def predict(model: LinearModel, v) -> float:
    """Raw margin of one feature vector under one model."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (model.dim,):
        raise ValueError(f"feature has shape {arr.shape}, model expects ({model.dim},)")
    return float(model.weights @ arr + model.bias)


def predict_many(model: LinearModel, frames) -> np.ndarray:
    """Raw margins for a (frames x dim) matrix."""
    x = _as_matrix(frames, "frames")
    if x.shape[1] != model.dim:
        raise ValueError(f"frames have dim {x.shape[1]}, model expects {model.dim}")
    return x @ model.weights + model.bias


def hinge_objective(weights, bias, x, y, lam: float) -> float:
    """lam * ||w||^2 + mean hinge loss, the quantity the trainer descends."""
    margins = y * (x @ weights + bias)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(lam * (weights @ weights) + hinge.mean())


def train_linear(
    positives,
    negatives,
    *,
    lam: float = 1e-4,
    iterations: int = 500,
    step: float = 0.1,
    target: Optional[str] = None,
    return_losses: bool = False,
):
    """Train a binary linear classifier on frame features.

    Full-batch subgradient descent on the L2-regularized hinge objective,
    starting from zeros with step ``step / t`` at iteration t. No randomness
    is involved, so the same inputs always produce the same model, bit for
    bit. With ``return_losses=True`` also returns the objective after every
    update (the first entry is the starting objective).
    """
    pos = _as_matrix(positives, "positives")
    neg = _as_matrix(negatives, "negatives")
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise ValueError("both classes must be non-empty")
    if pos.shape[1] != neg.shape[1]:
        raise ValueError(f"dimension mismatch: {pos.shape[1]} vs {neg.shape[1]}")

    x = np.vstack([pos, neg])
    y = np.concatenate([np.ones(pos.shape[0]), -np.ones(neg.shape[0])])
    n = x.shape[0]

    w = np.zeros(x.shape[1])
    b = 0.0
    losses = [hinge_objective(w, b, x, y, lam)]
    for t in range(1, iterations + 1):
        margins = y * (x @ w + b)
        violating = margins < 1.0
        grad_w = 2.0 * lam * w - (y[violating, None] * x[violating]).sum(axis=0) / n
        grad_b = -y[violating].sum() / n
        lr = step / t
        w = w - lr * grad_w
        b = b - lr * grad_b
        losses.append(hinge_objective(w, b, x, y, lam))

    model = LinearModel(weights=w, bias=b, target=target)
    if return_losses:
        return model, losses
    return model


def training_accuracy(model: LinearModel, positives, negatives) -> float:
    """Fraction of training points on the correct side (score > 0 is positive)."""
    pos = predict_many(model, positives) > 0.0
    neg = predict_many(model, negatives) <= 0.0
    return float((pos.sum() + neg.sum()) / (pos.size + neg.size))


# -- negative sampling --------------------------------------------------------


def sample_negatives(
    tree: OntologyTree,
    concept_id: str,
    corpus: Mapping[str, Sequence[str]],
    seed: int = DEFAULT_SEED,
    count: Optional[int] = None,
) -> List[str]:
    """Sample negative videos for a concept from concepts under other events.

    The pool excludes every video associated with any concept of the target
    concept's own event (a video crawled for the event is never a safe
    negative). Draws ``count`` videos (default: as many as the concept has
    positives) without replacement, deterministically under ``seed``.
    """
    event = tree.parent_event(concept_id)
    positives = list(corpus.get(concept_id, ()))
    if count is None:
        count = len(positives)
    if count < 1:
        raise ValueError(f"need at least one negative, got count={count}")

    same_event_videos = set()
    pool = set()
    for cid in sorted(corpus):
        if cid not in tree:
            continue
        videos = corpus[cid]
        if tree.parent_event(cid) == event:
            same_event_videos.update(videos)
        else:
            pool.update(videos)
    candidates = sorted(pool - same_event_videos)
    if len(candidates) < count:
        raise ValueError(
            f"only {len(candidates)} candidate negatives for {concept_id!r}, need {count}"
        )
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(candidates), size=count, replace=False)
    return [candidates[i] for i in sorted(picked)]


# -- dataset split ------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSplit:
    """Per-event train/validation/test partition of video ids."""

    train: Dict[str, Tuple[str, ...]]
    validation: Dict[str, Tuple[str, ...]]
    test: Dict[str, Tuple[str, ...]]

    def ids(self, part: str) -> frozenset:
        return frozenset(v for videos in getattr(self, part).values() for v in videos)

    def to_document(self) -> dict:
        return {
            part: {event: list(videos) for event, videos in getattr(self, part).items()}
            for part in ("train", "validation", "test")
        }


def split_dataset(
    videos_by_event: Mapping[str, Sequence[str]],
    ratios: Tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = DEFAULT_SEED,
    min_videos: int = 3,
) -> DatasetSplit:
    """Stratified split: floor(n * ratio) videos to validation and test, the
    remainder to train, independently per event, shuffled under ``seed``."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be three non-negative numbers, got {ratios}")

    rng = np.random.default_rng(seed)
    train: Dict[str, Tuple[str, ...]] = {}
    validation: Dict[str, Tuple[str, ...]] = {}
    test: Dict[str, Tuple[str, ...]] = {}
    for event in sorted(videos_by_event):
        videos = [str(v) for v in videos_by_event[event]]
        if len(videos) < min_videos:
            raise ValueError(
                f"event {event!r} has {len(videos)} videos, below the minimum {min_videos}"
            )
        order = rng.permutation(len(videos))
        shuffled = [videos[i] for i in order]
        n = len(shuffled)
        n_val = math.floor(n * ratios[1])
        n_test = math.floor(n * ratios[2])
        n_train = n - n_val - n_test
        train[event] = tuple(shuffled[:n_train])
        validation[event] = tuple(shuffled[n_train:n_train + n_val])
        test[event] = tuple(shuffled[n_train + n_val:])
    return DatasetSplit(train=train, validation=validation, test=test)


# -- model and feature files --------------------------------------------------


def save_model(model: LinearModel, path) -> None:
    """Write one model as a single canonical JSON line (bitwise-stable)."""
    doc = {
        "target": model.target,
        "dim": model.dim,
        "weights": [float(w) for w in model.weights],
        "bias": model.bias,
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> LinearModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    weights = np.asarray(doc["weights"], dtype=np.float64)
    if weights.shape[0] != int(doc["dim"]):
        raise ValueError(f"model file declares dim {doc['dim']} but has {weights.shape[0]} weights")
    return LinearModel(weights=weights, bias=float(doc["bias"]), target=doc.get("target"))


def save_features(features: Mapping[str, np.ndarray], path) -> None:
    """Write per-video frame matrices as text blocks.

    Each block: a JSON header line {video_id, frame_count, dim} followed by
    frame_count lines of dim space-separated values.
    """
    lines = []
    for video_id in sorted(features):
        frames = _as_matrix(features[video_id], f"frames[{video_id}]")
        header = {"video_id": video_id, "frame_count": frames.shape[0], "dim": frames.shape[1]}
        lines.append(json.dumps(header, sort_keys=True))
        for row in frames:
            lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_features(path) -> Dict[str, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    out: Dict[str, np.ndarray] = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        header = json.loads(line)
        count, dim = int(header["frame_count"]), int(header["dim"])
        rows = []
        for _ in range(count):
            values = lines[i].split()
            if len(values) != dim:
                raise ValueError(
                    f"frame row for {header['video_id']!r} has {len(values)} values, want {dim}"
                )
            rows.append([float(v) for v in values])
            i += 1
        video_id = str(header["video_id"])
        if video_id in out:
            raise ValueError(f"duplicate video id {video_id!r} in feature file")
        out[video_id] = np.asarray(rows, dtype=np.float64).reshape(count, dim)
    return out
