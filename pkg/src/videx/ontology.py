"""Category / event / concept tree: ingestion, validation, traversal, stats.

The tree has three layered node kinds. Categories form the upper hierarchy,
each event hangs off exactly one category, and each concept hangs off exactly
one event (the same concept word under two events is two distinct nodes).
The tree is immutable after construction, so concurrent readers are safe.

Document format (one JSON object per line, canonical save order by id):

    {"id": "c00", "kind": "category", "name": "everyday life", "parent": null}
    {"id": "e01", "kind": "event", "name": "wedding ceremony", "parent": "c11"}
    {"id": "k01", "kind": "concept", "name": "bride", "parent": "e01"}

A separate concept-videos manifest maps concept id -> list of video ids:

    {"concept": "k01", "videos": ["v001", "v002"]}
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import (
    NotACategoryError,
    NotAConceptError,
    NotAnEventError,
    OntologyParseError,
    OntologyValidationError,
    UnknownIdError,
)

KINDS = ("category", "event", "concept")

#: Depth beyond which validation emits a warning (not an error). Deep real-world
#: trees bottom out around this level; anything deeper is usually a data bug.
DEFAULT_MAX_DEPTH = 8


@dataclass(frozen=True)
class OntologyNode:
    id: str
    name: str
    kind: str  # "category" | "event" | "concept"
    parent: Optional[str]  # None only for the root category

    def to_record(self) -> dict:
        return {"id": self.id, "kind": self.kind, "name": self.name, "parent": self.parent}


@dataclass(frozen=True)
class OntologyStats:
    category_count: int
    event_count: int
    concept_count: int
    max_depth: int
    avg_children_per_category: float
    events_per_top_category: Dict[str, int]

    def to_document(self) -> dict:
        return {
            "category_count": self.category_count,
            "event_count": self.event_count,
            "concept_count": self.concept_count,
            "max_depth": self.max_depth,
            "avg_children_per_category": self.avg_children_per_category,
            "events_per_top_category": dict(self.events_per_top_category),
        }


class OntologyTree:
    """Validated, immutable category/event/concept tree.

    Construction runs full validation and raises
    :class:`~videx.errors.OntologyValidationError` listing every problem with
    the offending node id. Child ordering is canonicalized by id so traversals
    are reproducible.
    """

    def __init__(self, nodes: Iterable[OntologyNode], max_depth: int = DEFAULT_MAX_DEPTH):
        node_list = list(nodes)
        problems: List[Tuple[str, str]] = []

        by_id: Dict[str, OntologyNode] = {}
        for node in node_list:
            if not node.id:
                problems.append(("<empty>", "empty node id"))
                continue
            if node.id in by_id:
                problems.append((node.id, "duplicate id"))
                continue
            if node.kind not in KINDS:
                problems.append((node.id, f"unknown kind {node.kind!r}"))
                continue
            by_id[node.id] = node

        roots = [n for n in by_id.values() if n.parent is None]
        if len(roots) != 1:
            ids = ",".join(sorted(n.id for n in roots)) or "<none>"
            problems.append((ids, f"expected exactly one root, found {len(roots)}"))
        elif roots[0].kind != "category":
            problems.append((roots[0].id, "root must be a category"))

        for node in by_id.values():
            if node.parent is None:
                continue
            parent = by_id.get(node.parent)
            if parent is None:
                problems.append((node.id, f"missing parent {node.parent!r}"))
                continue
            if node.kind == "category" and parent.kind != "category":
                problems.append((node.id, "a category's parent must be a category"))
            elif node.kind == "event" and parent.kind != "category":
                problems.append((node.id, "an event's parent must be a category"))
            elif node.kind == "concept" and parent.kind != "event":
                problems.append((node.id, "a concept's parent must be an event"))

        if problems:
            raise OntologyValidationError(sorted(problems))

        root = roots[0]

        children: Dict[str, List[str]] = {nid: [] for nid in by_id}
        for node in by_id.values():
            if node.parent is not None:
                children[node.parent].append(node.id)

        # Depth-first walk from the root; anything unreachable sits on a cycle
        # (all parents exist, so the only way to miss the root is a loop).
        depth: Dict[str, int] = {root.id: 0}
        stack = [root.id]
        while stack:
            nid = stack.pop()
            for child in children[nid]:
                depth[child] = depth[nid] + 1
                stack.append(child)
        unreachable = sorted(set(by_id) - set(depth))
        if unreachable:
            raise OntologyValidationError(
                [(nid, "unreachable from root (cycle)") for nid in unreachable]
            )

        too_deep = sorted(nid for nid, d in depth.items() if d > max_depth)
        if too_deep:
            warnings.warn(
                f"{len(too_deep)} node(s) deeper than {max_depth} (first: {too_deep[0]})",
                stacklevel=2,
            )

        self._nodes: Dict[str, OntologyNode] = {nid: by_id[nid] for nid in sorted(by_id)}
        self._children: Dict[str, Tuple[str, ...]] = {
            nid: tuple(sorted(children[nid])) for nid in sorted(by_id)
        }
        self._depth = depth
        self.root_id = root.id
        self.max_depth_limit = max_depth

    # -- basic access -----------------------------------------------------

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> OntologyNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownIdError(f"unknown node id {node_id!r}") from None

    def nodes(self) -> Tuple[OntologyNode, ...]:
        return tuple(self._nodes.values())

    def children(self, node_id: str) -> Tuple[str, ...]:
        self.node(node_id)
        return self._children[node_id]

    def depth(self, node_id: str) -> int:
        self.node(node_id)
        return self._depth[node_id]

    def ids_of_kind(self, kind: str) -> Tuple[str, ...]:
        return tuple(nid for nid, n in self._nodes.items() if n.kind == kind)

    @property
    def category_ids(self) -> Tuple[str, ...]:
        return self.ids_of_kind("category")

    @property
    def event_ids(self) -> Tuple[str, ...]:
        return self.ids_of_kind("event")

    @property
    def concept_ids(self) -> Tuple[str, ...]:
        """Canonical global concept ordering (sorted ids): score-matrix headers
        and model banks all align to this order."""
        return self.ids_of_kind("concept")

    @property
    def top_level_categories(self) -> Tuple[str, ...]:
        return tuple(
            cid for cid in self._children[self.root_id]
            if self._nodes[cid].kind == "category"
        )

    def names(self) -> Tuple[str, ...]:
        return tuple(n.name for n in self._nodes.values())

    def ids_by_name(self, name: str) -> Tuple[str, ...]:
        return tuple(nid for nid, n in self._nodes.items() if n.name == name)

    def parent_event(self, concept_id: str) -> str:
        node = self.node(concept_id)
        if node.kind != "concept":
            raise NotAConceptError(f"{concept_id!r} is a {node.kind}, not a concept")
        return node.parent

    def subtree_ids(self, node_id: str) -> Tuple[str, ...]:
        """All ids at or below node_id, in sorted order."""
        self.node(node_id)
        out = []
        stack = [node_id]
        while stack:
            nid = stack.pop()
            out.append(nid)
            stack.extend(self._children[nid])
        return tuple(sorted(out))

    def ancestors(self, node_id: str) -> Tuple[str, ...]:
        """Path from the node's parent up to the root (exclusive of node_id)."""
        node = self.node(node_id)
        out = []
        while node.parent is not None:
            out.append(node.parent)
            node = self._nodes[node.parent]
        return tuple(out)

    # -- traversal operations ----------------------------------------------

    def events_under(self, categories: Iterable[str]) -> Set[str]:
        """Union of event descendants of the given category nodes."""
        out: Set[str] = set()
        for cid in categories:
            node = self.node(cid)
            if node.kind != "category":
                raise NotACategoryError(f"{cid!r} is a {node.kind}, not a category")
            for nid in self.subtree_ids(cid):
                if self._nodes[nid].kind == "event":
                    out.add(nid)
        return out

    def redundancy_candidates(self, event_id: str) -> Set[str]:
        """Events on different branches than the query event.

        Excludes the query itself, events attached to any category on the
        query's root path, and events anywhere under the query's category
        subtree. What remains is the search base for redundancy analysis.
        """
        node = self.node(event_id)
        if node.kind != "event":
            raise NotAnEventError(f"{event_id!r} is a {node.kind}, not an event")
        home = node.parent
        excluded_categories = set(self.ancestors(home)) | {home}
        excluded_categories |= {
            nid for nid in self.subtree_ids(home) if self._nodes[nid].kind == "category"
        }
        out = set()
        for eid in self.event_ids:
            if eid == event_id:
                continue
            if self._nodes[eid].parent in excluded_categories:
                continue
            out.add(eid)
        return out

    def stats(self) -> OntologyStats:
        kinds = {"category": 0, "event": 0, "concept": 0}
        for n in self._nodes.values():
            kinds[n.kind] += 1
        category_children = [
            len(self._children[nid])
            for nid, n in self._nodes.items()
            if n.kind == "category"
        ]
        avg = sum(category_children) / len(category_children)

        # Events parented directly to the root are counted under the root id
        # so the per-top-category counts always sum to event_count.
        per_top: Dict[str, int] = {cid: 0 for cid in self.top_level_categories}
        for eid in self.event_ids:
            top = self._top_category_of(eid)
            per_top[top] = per_top.get(top, 0) + 1

        return OntologyStats(
            category_count=kinds["category"],
            event_count=kinds["event"],
            concept_count=kinds["concept"],
            max_depth=max(self._depth.values()),
            avg_children_per_category=avg,
            events_per_top_category=per_top,
        )

    def _top_category_of(self, node_id: str) -> str:
        anc = self.ancestors(node_id)  # parent, ..., root
        if len(anc) < 2:
            return self.root_id
        # the ancestor sitting directly below the root
        return anc[-2]


# -- document ingest / persist ----------------------------------------------


def parse_ontology(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> OntologyTree:
    """Parse a line-oriented ontology document into a validated tree."""
    nodes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OntologyParseError(f"line {lineno}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise OntologyParseError(f"line {lineno}: expected an object")
        missing = [k for k in ("id", "name", "kind") if k not in record]
        if missing:
            raise OntologyParseError(f"line {lineno}: missing field(s) {missing}")
        nodes.append(
            OntologyNode(
                id=str(record["id"]),
                name=str(record["name"]),
                kind=str(record["kind"]),
                parent=None if record.get("parent") is None else str(record["parent"]),
            )
        )
    return OntologyTree(nodes, max_depth=max_depth)


def load_ontology(path, max_depth: int = DEFAULT_MAX_DEPTH) -> OntologyTree:
    return parse_ontology(Path(path).read_text(encoding="utf-8"), max_depth=max_depth)


def dumps_ontology(tree: OntologyTree) -> str:
    """Canonical serialization: one record per line, ids ascending, keys sorted.

    load(dumps(tree)) round-trips to a structurally equal tree, and
    dumps(load(text)) is byte-stable.
    """
    lines = [
        json.dumps(tree.node(nid).to_record(), sort_keys=True)
        for nid in sorted(n.id for n in tree.nodes())
    ]
    return "\n".join(lines) + "\n"


def save_ontology(tree: OntologyTree, path) -> None:
    Path(path).write_text(dumps_ontology(tree), encoding="utf-8")


def bundled_sample_path() -> Path:
    """Path of the sample ontology shipped with the package."""
    return Path(__file__).parent / "data" / "sample_ontology.jsonl"


def load_sample_ontology() -> OntologyTree:
    return load_ontology(bundled_sample_path())


# -- module-level operation aliases (the functional surface) -----------------


def stats(tree: OntologyTree) -> OntologyStats:
    return tree.stats()


def events_under(tree: OntologyTree, categories: Iterable[str]) -> Set[str]:
    return tree.events_under(categories)


def redundancy_candidates(tree: OntologyTree, event_id: str) -> Set[str]:
    return tree.redundancy_candidates(event_id)


# -- concept-videos manifest --------------------------------------------------


def load_concept_videos(path) -> Dict[str, List[str]]:
    """Read a concept-videos manifest: {"concept": id, "videos": [ids...]} per line."""
    mapping: Dict[str, List[str]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OntologyParseError(f"line {lineno}: not valid JSON ({exc.msg})") from exc
        concept = str(record["concept"])
        if concept in mapping:
            raise OntologyParseError(f"line {lineno}: duplicate concept {concept!r}")
        mapping[concept] = [str(v) for v in record["videos"]]
    return mapping


def save_concept_videos(mapping: Dict[str, List[str]], path) -> None:
    lines = [
        json.dumps({"concept": cid, "videos": list(videos)}, sort_keys=True)
        for cid, videos in sorted(mapping.items())
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
