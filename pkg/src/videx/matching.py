"""Cascaded query matching: events first, then the matched events' concepts.

An event query is matched against event names over the whole tree, or over
the events under user-chosen categories when a restriction is given (the
engine never infers categories on its own; restriction is a human judgment
call). Concepts are then accumulated from the matched events in rank order,
expanding the event pool one event at a time until enough concepts are
available, and re-ranked globally by query-to-concept-name similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import EmptyPoolError
from .ontology import OntologyTree
from .ranking import canonical_json, ranked
from .similarity import phrase_similarity


@dataclass(frozen=True)
class MatchQuery:
    """An event query plus matching knobs.

    ``restrict_categories`` may name any category nodes; ids that are not
    top-level (direct children of the root) are accepted but flagged in the
    result so a UI can warn about them.
    """

    text: str
    restrict_categories: Optional[frozenset] = None
    event_count: int = 2
    concept_count: int = 15

    def __post_init__(self):
        if self.event_count < 1:
            raise ValueError(f"event_count must be >= 1, got {self.event_count}")
        if self.concept_count < 1:
            raise ValueError(f"concept_count must be >= 1, got {self.concept_count}")
        if self.restrict_categories is not None:
            object.__setattr__(
                self, "restrict_categories", frozenset(str(c) for c in self.restrict_categories)
            )


@dataclass(frozen=True)
class MatchResult:
    matched_events: Tuple[Tuple[str, float], ...]
    matched_concepts: Tuple[Tuple[str, float], ...]
    restricted: bool
    shortage: bool = False
    non_top_level_restrictions: Tuple[str, ...] = ()

    def to_document(self) -> dict:
        return {
            "matched_events": [[i, s] for i, s in self.matched_events],
            "matched_concepts": [[i, s] for i, s in self.matched_concepts],
            "restricted": self.restricted,
            "shortage": self.shortage,
            "non_top_level_restrictions": list(self.non_top_level_restrictions),
        }

    def to_bytes(self) -> bytes:
        return canonical_json(self.to_document())

    @property
    def concept_ids(self) -> List[str]:
        return [cid for cid, _ in self.matched_concepts]


def _candidate_events(tree: OntologyTree, query: MatchQuery) -> List[str]:
    if query.restrict_categories is None:
        pool = list(tree.event_ids)
    else:
        pool = sorted(tree.events_under(query.restrict_categories))
    if not pool:
        raise EmptyPoolError(
            "no candidate events"
            + (" under the given category restriction" if query.restrict_categories else "")
        )
    return pool


def _flagged_restrictions(tree: OntologyTree, query: MatchQuery) -> Tuple[str, ...]:
    if query.restrict_categories is None:
        return ()
    top = set(tree.top_level_categories)
    return tuple(sorted(cid for cid in query.restrict_categories if cid not in top))


def match_events(tree: OntologyTree, query: MatchQuery, backend):
    """Rank candidate events by query-to-name similarity.

    Returns a ranked (event_id, score) list; raises
    :class:`~videx.errors.EmptyPoolError` when the pool is empty (an empty
    list would silently hide a bad restriction).
    """
    pool = _candidate_events(tree, query)
    pairs = [(eid, phrase_similarity(query.text, tree.node(eid).name, backend)) for eid in pool]
    return ranked(pairs)


def match_concepts(tree: OntologyTree, query: MatchQuery, backend) -> MatchResult:
    """Full cascade: rank events, accumulate their concepts, re-rank globally.

    The initial event pool holds ``event_count`` events; it grows one
    next-ranked event at a time while fewer than ``concept_count`` concepts
    are available. Fewer concepts than requested is reported with the
    ``shortage`` flag, not an error.
    """
    events = match_events(tree, query, backend)

    pool_size = min(query.event_count, len(events))
    concepts: List[str] = []
    seen_events: List[Tuple[str, float]] = []
    for eid, score in events[:pool_size]:
        seen_events.append((eid, score))
        concepts.extend(tree.children(eid))
    while len(concepts) < query.concept_count and pool_size < len(events):
        eid, score = events[pool_size]
        pool_size += 1
        seen_events.append((eid, score))
        concepts.extend(tree.children(eid))

    scored = [
        (cid, phrase_similarity(query.text, tree.node(cid).name, backend)) for cid in concepts
    ]
    top = ranked(scored)[: query.concept_count]

    return MatchResult(
        matched_events=tuple(seen_events),
        matched_concepts=tuple(top),
        restricted=query.restrict_categories is not None,
        shortage=len(concepts) < query.concept_count,
        non_top_level_restrictions=_flagged_restrictions(tree, query),
    )
