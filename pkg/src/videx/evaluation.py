"""Retrieval and classification metrics plus comparison reports.

Average precision is the non-interpolated TRECVID-style definition: the mean,
over relevant items, of precision at each relevant item's rank. Relevant
items missing from the ranking contribute zero precision (retrieval over a
filtered corpus may legitimately drop videos). mAP is the arithmetic mean of
per-query APs. Binary relevance throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .matching import MatchQuery, match_concepts
from .ontology import OntologyTree
from .ranking import RankedList, canonical_json
from .scoring import ScoreMatrix, retrieve


def average_precision(ranking: RankedList, relevant) -> float:
    """Non-interpolated AP of a ranked (id, score) list against a relevant set."""
    relevant = set(relevant)
    if not relevant:
        raise ValueError("relevant set must be non-empty")
    hits = 0
    precisions = []
    for rank, (item_id, _) in enumerate(ranking, start=1):
        if item_id in relevant:
            hits += 1
            precisions.append(hits / rank)
    # relevant items absent from the ranking contribute zero precision
    return float(sum(precisions) / len(relevant))


def mean_ap(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise ValueError("need at least one AP value")
    return float(np.mean([float(v) for v in values]))


def top_k_by_category(tree, scores, labels, event_ids, k: int) -> Dict[str, float]:
    """Per-top-level-category top-k accuracy for event classification.

    ``scores`` is a (videos x events) matrix whose columns follow
    ``event_ids``; ``labels`` holds each video's true column index. Following
    the usual reporting recipe, each event's own top-k accuracy is computed
    first and events are then averaged within their top-level category.
    Events with no test videos are skipped.
    """
    arr = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    event_ids = list(event_ids)
    if arr.ndim != 2 or arr.shape[1] != len(event_ids):
        raise ValueError("scores must be (videos x events) aligned to event_ids")

    per_event: Dict[str, float] = {}
    for col, eid in enumerate(event_ids):
        mask = y == col
        if not mask.any():
            continue
        per_event[eid] = top_k_accuracy(arr[mask], y[mask], k)

    def top_of(eid: str) -> str:
        anc = tree.ancestors(eid)
        return anc[-2] if len(anc) >= 2 else tree.root_id

    grouped: Dict[str, List[float]] = {}
    for eid, acc in per_event.items():
        grouped.setdefault(top_of(eid), []).append(acc)
    return {cat: float(np.mean(values)) for cat, values in sorted(grouped.items())}


def top_k_accuracy(scores, labels, k: int) -> float:
    """Fraction of rows whose true label is among the k best-scoring labels.

    Ties inside the top-k cut are broken by label id ascending, consistent
    with ranked-list policy everywhere else.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("scores must be a (videos x classes) matrix")
    y = np.asarray(labels, dtype=np.int64)
    if y.shape != (arr.shape[0],):
        raise ValueError("labels must be one integer per row")
    if y.size and (y.min() < 0 or y.max() >= arr.shape[1]):
        raise ValueError(f"label out of range [0, {arr.shape[1]})")
    correct = 0
    for row, label in zip(arr, y):
        order = sorted(range(arr.shape[1]), key=lambda c: (-row[c], c))
        if label in order[:k]:
            correct += 1
    return correct / max(1, y.size)


# -- retrieval evaluation over query sets --------------------------------------


@dataclass(frozen=True)
class QueryCase:
    """One evaluation query: text, its relevant videos, optional restriction."""

    text: str
    relevant: frozenset
    restrict: Optional[frozenset] = None


def load_query_cases(path) -> List[QueryCase]:
    """Read a JSONL ground-truth file: {query, relevant: [...], restrict: [...]?}."""
    cases = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        record = json.loads(line)
        cases.append(
            QueryCase(
                text=str(record["query"]),
                relevant=frozenset(str(v) for v in record["relevant"]),
                restrict=(
                    frozenset(str(c) for c in record["restrict"])
                    if record.get("restrict")
                    else None
                ),
            )
        )
    return cases


@dataclass(frozen=True)
class EvalReport:
    per_query_ap: Dict[str, float]
    mean_ap: float
    config: Dict[str, object] = field(default_factory=dict)
    top_k_accuracy: Optional[Dict[str, float]] = None

    def to_document(self) -> dict:
        doc = {
            "per_query_ap": dict(self.per_query_ap),
            "mean_ap": self.mean_ap,
            "config": dict(self.config),
        }
        if self.top_k_accuracy is not None:
            doc["top_k_accuracy"] = dict(self.top_k_accuracy)
        return doc

    def to_bytes(self) -> bytes:
        return canonical_json(self.to_document())


def evaluate_retrieval(
    tree: OntologyTree,
    queries: Sequence[QueryCase],
    corpus: ScoreMatrix,
    backend,
    event_count: int = 2,
    concept_count: int = 15,
    use_restrictions: bool = False,
    weighted: bool = False,
) -> EvalReport:
    """Run match -> retrieve -> AP for every query and aggregate to mAP."""
    if not queries:
        raise ValueError("need at least one query")
    per_query: Dict[str, float] = {}
    for case in queries:
        query = MatchQuery(
            text=case.text,
            restrict_categories=case.restrict if use_restrictions else None,
            event_count=event_count,
            concept_count=concept_count,
        )
        result = match_concepts(tree, query, backend)
        ranking = retrieve(corpus, result, weighted=weighted)
        per_query[case.text] = average_precision(ranking, case.relevant)
    return EvalReport(
        per_query_ap=per_query,
        mean_ap=mean_ap(list(per_query.values())),
        config={
            "event_count": event_count,
            "concept_count": concept_count,
            "restricted": use_restrictions,
            "weighted": weighted,
        },
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side mAP with and without human category restriction."""

    unrestricted: EvalReport
    restricted: EvalReport

    def to_document(self) -> dict:
        return {
            "unrestricted": self.unrestricted.to_document(),
            "restricted": self.restricted.to_document(),
        }

    def to_bytes(self) -> bytes:
        return canonical_json(self.to_document())

    def render_text(self) -> str:
        rows = [
            ("without category restriction", self.unrestricted.mean_ap),
            ("with category restriction", self.restricted.mean_ap),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"{'method':<{width}}  mAP"]
        lines += [f"{name:<{width}}  {value:.4f}" for name, value in rows]
        return "\n".join(lines)


def compare_matching(
    tree: OntologyTree,
    queries: Sequence[QueryCase],
    corpus: ScoreMatrix,
    backend,
    event_count: int = 2,
    concept_count: int = 15,
) -> ComparisonReport:
    """Evaluate the same query set twice: restriction off, then on."""
    unrestricted = evaluate_retrieval(
        tree, queries, corpus, backend, event_count, concept_count, use_restrictions=False
    )
    restricted = evaluate_retrieval(
        tree, queries, corpus, backend, event_count, concept_count, use_restrictions=True
    )
    return ComparisonReport(unrestricted=unrestricted, restricted=restricted)


# -- concept-count sweep --------------------------------------------------------


def concept_count_sweep(
    tree: OntologyTree,
    queries: Sequence[QueryCase],
    corpus: ScoreMatrix,
    backend,
    counts: Sequence[int],
    event_count: int = 2,
    use_restrictions: bool = False,
) -> List[Tuple[int, float]]:
    """mAP at each concept count; counts must be ascending and distinct."""
    counts = [int(c) for c in counts]
    if not counts:
        raise ValueError("counts must be non-empty")
    if any(c < 1 for c in counts):
        raise ValueError("counts must be >= 1")
    if sorted(set(counts)) != counts:
        raise ValueError(f"counts must be strictly ascending and unique, got {counts}")
    out = []
    for count in counts:
        report = evaluate_retrieval(
            tree,
            queries,
            corpus,
            backend,
            event_count=event_count,
            concept_count=count,
            use_restrictions=use_restrictions,
        )
        out.append((count, report.mean_ap))
    return out


def sweep_tsv(rows: Sequence[Tuple[int, float]]) -> str:
    """Plot-ready tab-separated table for a concept-count sweep."""
    lines = ["concept_count\tmean_ap"]
    lines += [f"{count}\t{value!r}" for count, value in rows]
    return "\n".join(lines) + "\n"
