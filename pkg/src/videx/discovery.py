"""Event-specific concept mining from crawled video tag lists.

Pipeline per event: collect the most frequent tag words across the crawled
videos (document frequency, counted once per video), drop videos that share
fewer than three of those frequent words (they are usually off-topic search
noise), then keep the surviving tags that appear in at least one visual
vocabulary (objects, scenes, actions). Each kept word becomes one concept
attached to the manifest's event, carrying the videos that support it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

from .similarity import tokenize


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    tags: FrozenSet[str]


@dataclass(frozen=True)
class CrawlManifest:
    event_id: str
    entries: Tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.video_id in seen:
                raise ValueError(f"duplicate video id {e.video_id!r} in manifest")
            seen.add(e.video_id)

    @classmethod
    def from_records(cls, event_id: str, records: Sequence[dict]) -> "CrawlManifest":
        """Build from raw {video_id, tags} records; tags are tokenized on load
        (lowercased, split, stopwords dropped) and stored as a set per video."""
        entries = []
        for record in records:
            words: Set[str] = set()
            for tag in record["tags"]:
                words.update(tokenize(str(tag)))
            entries.append(ManifestEntry(video_id=str(record["video_id"]), tags=frozenset(words)))
        return cls(event_id=event_id, entries=tuple(entries))


def load_manifest(path, event_id: str) -> CrawlManifest:
    """Read a JSONL crawl manifest: one {video_id, tags: [...]} record per line."""
    records = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        record = json.loads(line)
        if "video_id" not in record or "tags" not in record:
            raise ValueError(f"line {lineno}: manifest record needs video_id and tags")
        records.append(record)
    return CrawlManifest.from_records(event_id, records)


@dataclass(frozen=True)
class Vocabulary:
    """A named set of visually detectable terms (exact match on tokenized form)."""

    name: str
    terms: FrozenSet[str]

    def __post_init__(self):
        if not self.terms:
            raise ValueError(f"vocabulary {self.name!r} is empty")

    @classmethod
    def from_terms(cls, name: str, terms) -> "Vocabulary":
        normalized = {" ".join(tokenize(str(t))) for t in terms}
        normalized.discard("")
        return cls(name=name, terms=frozenset(normalized))

    def __contains__(self, word: str) -> bool:
        return word in self.terms


def load_vocabulary(path) -> Vocabulary:
    """Read a vocabulary file: header line ``vocabulary=<name>``, then one term per line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [l.strip() for l in lines if l.strip() and not l.strip().startswith("#")]
    if not body or not body[0].startswith("vocabulary="):
        raise ValueError("vocabulary file must start with a 'vocabulary=<name>' header")
    name = body[0].split("=", 1)[1].strip()
    if not name:
        raise ValueError("vocabulary header has an empty name")
    return Vocabulary.from_terms(name, body[1:])


@dataclass(frozen=True)
class DiscoveredConcept:
    name: str
    event_id: str
    supporting_videos: Tuple[str, ...]
    source_vocabulary: str


def frequent_words(manifest: CrawlManifest, n: int = 10) -> List[Tuple[str, int]]:
    """Top-n tag words by document frequency (once per video), ties alphabetical.

    Returns fewer than n pairs when the manifest has fewer distinct words.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not manifest.entries:
        raise ValueError(f"manifest for {manifest.event_id!r} has no videos")
    counts: Dict[str, int] = {}
    for entry in manifest.entries:
        for word in entry.tags:
            counts[word] = counts.get(word, 0) + 1
    order = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return order[:n]


def filter_videos(manifest: CrawlManifest, frequent, min_overlap: int = 3) -> CrawlManifest:
    """Keep videos whose tag set shares >= min_overlap distinct frequent words."""
    if min_overlap < 1:
        raise ValueError(f"min_overlap must be >= 1, got {min_overlap}")
    frequent = set(frequent)
    kept = tuple(e for e in manifest.entries if len(e.tags & frequent) >= min_overlap)
    return CrawlManifest(event_id=manifest.event_id, entries=kept)


def discover_concepts(
    manifest: CrawlManifest,
    vocabularies: Sequence[Vocabulary],
    n: int = 10,
    min_overlap: int = 3,
) -> List[DiscoveredConcept]:
    """Run the full mining pipeline for one event.

    frequent_words -> filter_videos -> keep surviving tags found in any
    vocabulary -> one concept per kept word, ordered by name. A word present
    in several vocabularies is attributed to the first one in the given order.
    """
    if not vocabularies:
        raise ValueError("at least one vocabulary is required")
    frequent = {w for w, _ in frequent_words(manifest, n)}
    surviving = filter_videos(manifest, frequent, min_overlap)

    support: Dict[str, List[str]] = {}
    for entry in surviving.entries:
        for word in entry.tags:
            support.setdefault(word, []).append(entry.video_id)

    out = []
    for word in sorted(support):
        source = next((v.name for v in vocabularies if word in v), None)
        if source is None:
            continue
        out.append(
            DiscoveredConcept(
                name=word,
                event_id=manifest.event_id,
                supporting_videos=tuple(support[word]),
                source_vocabulary=source,
            )
        )
    return out
