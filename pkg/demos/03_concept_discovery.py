"""Mining event-specific concepts from crawled video tags.

Simulates the tag lists of videos returned by searching for one event,
then runs the three-stage pipeline: frequent words -> drop videos sharing
fewer than three of them -> keep surviving tags found in a visual
vocabulary. Words that survive become concepts attached to the event.

Run:  python demos/03_concept_discovery.py
"""

import numpy as np

from videx import CrawlManifest, Vocabulary, discover_concepts, filter_videos, frequent_words

rng = np.random.default_rng(40)

# on-topic videos tag real things; off-topic search noise tags junk
on_topic = ["dog", "grooming", "brush", "clipper", "tub", "fur", "cute"]
off_topic = ["funny", "fail", "compilation", "music", "hd", "subscribe"]

records = []
for i in range(160):
    if rng.random() < 0.7:
        tags = list(rng.choice(on_topic, size=int(rng.integers(3, 6)), replace=False))
        tags += list(rng.choice(off_topic, size=int(rng.integers(0, 2)), replace=False))
    else:
        tags = list(rng.choice(off_topic, size=int(rng.integers(2, 5)), replace=False))
        tags += list(rng.choice(on_topic, size=int(rng.integers(0, 2)), replace=False))
    records.append({"video_id": f"yt{i:03d}", "tags": tags})

manifest = CrawlManifest.from_records("e11", records)  # groom a dog

print("== stage 1: frequent tag words (document frequency) ==")
frequent = frequent_words(manifest, n=10)
for word, count in frequent:
    print(f"   {word:<12} {count}")

print("\n== stage 2: keep videos sharing >= 3 frequent words ==")
surviving = filter_videos(manifest, {w for w, _ in frequent}, min_overlap=3)
print(f"   {len(manifest.entries)} crawled -> {len(surviving.entries)} kept")

print("\n== stage 3: match surviving tags against visual vocabularies ==")
objects = Vocabulary.from_terms("object", ["dog", "brush", "clipper", "tub", "cat"])
actions = Vocabulary.from_terms("action", ["grooming", "washing", "running"])
concepts = discover_concepts(manifest, [objects, actions], n=10, min_overlap=3)
for c in concepts:
    print(f"   {c.name:<12} from {c.source_vocabulary:<7} "
          f"supported by {len(c.supporting_videos)} videos")

print("\nWords like 'cute' or 'subscribe' are frequent but not visually")
print("detectable, so the vocabulary stage drops them; noisy videos never")
print("make it past the overlap filter in the first place.")
