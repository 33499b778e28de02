"""Phrase-level semantic similarity between short texts.

Queries, event names and concept names are all short phrases, so similarity
is computed at the phrase level behind a pluggable backend interface. Two
backends ship by default:

``OverlapCosineBackend``
    IDF-weighted token-overlap cosine. Each phrase becomes a set of tokens
    weighted by IDF computed over all node names of a loaded ontology. Scores
    are already in [0, 1]. This is the deterministic default.

``EmbeddingBackend``
    Mean-pooled word-vector cosine over a user-supplied embedding table,
    mapped to [0, 1] via (1 + cos) / 2. Words missing from the table
    contribute a zero vector (queries contain novel words by design).

Both backends are symmetric, deterministic for fixed parameters, and score
any non-empty phrase against itself as 1.0.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Mapping

import numpy as np

from .ontology import OntologyTree

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


@lru_cache(maxsize=1)
def stopwords() -> frozenset:
    """The bundled, versioned stopword list (lowercase words)."""
    path = Path(__file__).parent / "data" / "stopwords.txt"
    words = []
    for line in path.read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.append(word)
    return frozenset(words)


def tokenize(text: str) -> List[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords.

    Deterministic by construction; empty result is allowed.
    """
    drop = stopwords()
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t and t not in drop]


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


class OverlapCosineBackend:
    """IDF-weighted token-overlap cosine over an ontology's name vocabulary.

    Each node name is one IDF document. The smoothed weight
    ``1 + ln((1 + N) / (1 + df))`` stays strictly positive, which keeps
    self-similarity at exactly 1.0 even for tokens that appear in every name.
    Tokens never seen in the ontology get the maximum weight (df = 0).
    """

    name = "overlap-cosine"

    def __init__(self, idf: Mapping[str, float], default_idf: float):
        self.idf = dict(idf)
        self.default_idf = float(default_idf)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "OverlapCosineBackend":
        names = list(names)
        df: Dict[str, int] = {}
        for name in names:
            for token in set(tokenize(name)):
                df[token] = df.get(token, 0) + 1
        n = len(names)
        idf = {t: 1.0 + math.log((1 + n) / (1 + c)) for t, c in df.items()}
        return cls(idf=idf, default_idf=1.0 + math.log(1 + n))

    @classmethod
    def from_tree(cls, tree: OntologyTree) -> "OverlapCosineBackend":
        return cls.from_names(tree.names())

    def _weight(self, token: str) -> float:
        return self.idf.get(token, self.default_idf)

    def similarity(self, a: str, b: str) -> float:
        ta, tb = set(tokenize(a)), set(tokenize(b))
        if not ta or not tb:
            return 0.0
        if ta == tb:
            # the cosine is exactly 1; skip the sqrt round-off
            return 1.0
        # iterate in sorted order so float summation is identical across runs
        shared = sum(self._weight(t) ** 2 for t in sorted(ta & tb))
        if shared == 0.0:
            return 0.0
        norm_a = math.sqrt(sum(self._weight(t) ** 2 for t in sorted(ta)))
        norm_b = math.sqrt(sum(self._weight(t) ** 2 for t in sorted(tb)))
        return _clamp01(shared / (norm_a * norm_b))


class EmbeddingBackend:
    """Mean-pooled word-embedding cosine, mapped to [0, 1] via (1 + cos) / 2.

    If either phrase pools to the zero vector (all words unknown), cosine is
    undefined; the backend falls back to 1.0 for identical token sequences
    and 0.0 otherwise, preserving self-similarity and symmetry.
    """

    name = "embedding-cosine"

    def __init__(self, vectors: Mapping[str, np.ndarray], dim: int):
        self.dim = int(dim)
        self.vectors = {w: np.asarray(v, dtype=np.float64) for w, v in vectors.items()}
        for word, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise ValueError(f"vector for {word!r} has shape {vec.shape}, want ({dim},)")

    @classmethod
    def from_file(cls, path) -> "EmbeddingBackend":
        """Load a table of lines ``word v1 v2 ... vD`` headed by ``D=<int>``."""
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        header = next((l for l in lines if l.strip()), "")
        m = re.fullmatch(r"D=(\d+)", header.strip())
        if not m:
            raise ValueError(f"embedding table must start with 'D=<int>', got {header!r}")
        dim = int(m.group(1))
        vectors: Dict[str, np.ndarray] = {}
        for raw in lines[lines.index(header) + 1:]:
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise ValueError(f"embedding line has {len(parts) - 1} values, want {dim}")
            vectors[parts[0]] = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        return cls(vectors, dim)

    def _pool(self, tokens: List[str]) -> np.ndarray:
        pooled = np.zeros(self.dim, dtype=np.float64)
        for token in tokens:
            vec = self.vectors.get(token)
            if vec is not None:
                pooled += vec
        return pooled / len(tokens)

    def similarity(self, a: str, b: str) -> float:
        ta, tb = tokenize(a), tokenize(b)
        if not ta or not tb:
            return 0.0
        if ta == tb:
            return 1.0
        va, vb = self._pool(ta), self._pool(tb)
        na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            return 1.0 if ta == tb else 0.0
        cos = float(va @ vb) / (na * nb)
        return _clamp01((1.0 + cos) / 2.0)


def phrase_similarity(a: str, b: str, backend) -> float:
    """Score two phrases in [0, 1] with the given backend."""
    if backend is None:
        raise ValueError("similarity backend is not configured")
    return backend.similarity(a, b)


def default_backend(tree: OntologyTree, embeddings_path=None):
    """Embedding backend when a table is supplied, else overlap cosine."""
    if embeddings_path is not None:
        return EmbeddingBackend.from_file(embeddings_path)
    return OverlapCosineBackend.from_tree(tree)
