"""Batch entry points for every pipeline stage, plus the server.

One binary, one subcommand per stage. Every subcommand wraps exactly one
library pipeline and, in ``--format record`` mode, prints the canonical JSON
bytes of the library result so scripted callers see exactly what the API
returns. ``--seed`` drives all randomness; omitting it uses the documented
default (17). Exit status is 0 on success, 1 with a diagnostic on failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evaluation, models, scoring
from .discovery import discover_concepts, load_manifest, load_vocabulary
from .errors import VidexError
from .matching import MatchQuery
from .models import DEFAULT_SEED
from .ontology import load_concept_videos, load_ontology
from .ranking import canonical_json
from .service import (
    ServiceConfig,
    match_document,
    recount_document,
    retrieve_document,
    serve,
    EngineState,
)
from .similarity import default_backend


def _emit(args, document, text: str) -> None:
    payload = canonical_json(document) if args.format == "record" else text.encode("utf-8")
    out = Path(args.out).open("wb") if getattr(args, "out", None) else sys.stdout.buffer
    try:
        out.write(payload)
        out.write(b"\n")
    finally:
        if out is not sys.stdout.buffer:
            out.close()


def _load_tree_and_backend(args):
    tree = load_ontology(args.ontology)
    backend = default_backend(tree, embeddings_path=getattr(args, "embeddings", None))
    return tree, backend


def _match_query(args) -> MatchQuery:
    return MatchQuery(
        text=args.query,
        restrict_categories=frozenset(args.restrict) if args.restrict else None,
        event_count=args.events,
        concept_count=args.concepts,
    )


def _stats_text(stats) -> str:
    lines = [
        f"categories: {stats.category_count}",
        f"events:     {stats.event_count}",
        f"concepts:   {stats.concept_count}",
        f"max depth:  {stats.max_depth}",
        f"avg children per category: {stats.avg_children_per_category:.3f}",
        "events per top-level category:",
    ]
    lines += [f"  {cid}: {count}" for cid, count in sorted(stats.events_per_top_category.items())]
    return "\n".join(lines)


def cmd_validate(args) -> int:
    tree = load_ontology(args.ontology)
    stats = tree.stats()
    _emit(args, stats.to_document(), "ok\n" + _stats_text(stats))
    return 0


def cmd_stats(args) -> int:
    tree = load_ontology(args.ontology)
    stats = tree.stats()
    _emit(args, stats.to_document(), _stats_text(stats))
    return 0


def cmd_discover(args) -> int:
    manifest = load_manifest(args.manifest, event_id=args.event)
    vocabularies = [load_vocabulary(p) for p in args.vocab]
    concepts = discover_concepts(manifest, vocabularies, n=args.top, min_overlap=args.min_overlap)
    document = [
        {
            "name": c.name,
            "event_id": c.event_id,
            "supporting_videos": list(c.supporting_videos),
            "source_vocabulary": c.source_vocabulary,
        }
        for c in concepts
    ]
    text = "\n".join(
        f"{c.name}\t{c.source_vocabulary}\t{len(c.supporting_videos)} videos" for c in concepts
    )
    _emit(args, document, text or "(no concepts discovered)")
    return 0


def cmd_match(args) -> int:
    tree, backend = _load_tree_and_backend(args)
    state = EngineState(tree=tree, backend=backend)
    document = match_document(state, _query_payload(args))
    lines = ["matched events:"]
    lines += [f"  {tree.node(e).name} ({e})  {s:.4f}" for e, s in document["matched_events"]]
    lines.append("matched concepts:")
    lines += [f"  {tree.node(c).name} ({c})  {s:.4f}" for c, s in document["matched_concepts"]]
    if document["shortage"]:
        lines.append("note: fewer concepts available than requested")
    _emit(args, document, "\n".join(lines))
    return 0


def _query_payload(args) -> dict:
    payload = {"text": args.query, "event_count": args.events, "concept_count": args.concepts}
    if args.restrict:
        payload["restrict_categories"] = list(args.restrict)
    return payload


def _state_with_corpus(args):
    tree, backend = _load_tree_and_backend(args)
    matrix = scoring.load_score_matrix(args.corpus)
    matrix.validate_against(tree)
    return EngineState(tree=tree, backend=backend, corpora={"corpus": matrix})


def cmd_retrieve(args) -> int:
    state = _state_with_corpus(args)
    document = retrieve_document(
        state, {"corpus": "corpus", "query": _query_payload(args), "weighted": args.weighted}
    )
    ranking = document["ranking"][: args.top] if args.top else document["ranking"]
    document["ranking"] = ranking
    text = "\n".join(f"{rank}\t{vid}\t{score!r}" for rank, (vid, score) in enumerate(ranking, 1))
    _emit(args, document, text)
    return 0


def cmd_recount(args) -> int:
    state = _state_with_corpus(args)
    document = recount_document(
        state,
        {
            "corpus": "corpus",
            "video_id": args.video,
            "top_n": args.top,
            "mode": "two-step" if args.two_step else "plain",
            "top_events": args.top_events,
        },
    )
    text = "\n".join(
        f"{e['concept_name']} ({e['concept_id']}, event: {e['event_name']})\t{e['score']!r}"
        for e in document["entries"]
    )
    _emit(args, document, text)
    return 0


def cmd_train(args) -> int:
    tree = load_ontology(args.ontology)
    corpus = load_concept_videos(args.concept_videos)
    features = models.load_features(args.features)
    if args.target not in corpus:
        raise VidexError(f"no videos listed for concept {args.target!r}")

    def frames_of(videos):
        import numpy as np

        missing = [v for v in videos if v not in features]
        if missing:
            raise VidexError(f"feature file lacks video {missing[0]!r}")
        return np.vstack([features[v] for v in videos])

    positives = corpus[args.target]
    negatives = models.sample_negatives(tree, args.target, corpus, seed=args.seed)
    model = models.train_linear(
        frames_of(positives), frames_of(negatives), target=args.target
    )
    models.save_model(model, args.out)
    sys.stdout.write(f"trained {args.target}: dim={model.dim}, saved to {args.out}\n")
    return 0


def cmd_eval(args) -> int:
    state = _state_with_corpus(args)
    queries = evaluation.load_query_cases(args.queries)
    corpus = state.corpora["corpus"]
    if args.mode == "ap":
        report = evaluation.evaluate_retrieval(
            state.tree, queries, corpus, state.backend,
            event_count=args.events, concept_count=args.concepts,
        )
        text = "\n".join(
            [f"{'query':<40}  AP"]
            + [f"{q:<40}  {ap:.4f}" for q, ap in sorted(report.per_query_ap.items())]
            + [f"{'mAP':<40}  {report.mean_ap:.4f}"]
        )
        _emit(args, report.to_document(), text)
    else:  # compare-structure
        comparison = evaluation.compare_matching(
            state.tree, queries, corpus, state.backend,
            event_count=args.events, concept_count=args.concepts,
        )
        _emit(args, comparison.to_document(), comparison.render_text())
    return 0


def cmd_sweep(args) -> int:
    state = _state_with_corpus(args)
    queries = evaluation.load_query_cases(args.queries)
    counts = [int(c) for c in args.counts.split(",")]
    rows = evaluation.concept_count_sweep(
        state.tree, queries, state.corpora["corpus"], state.backend,
        counts=counts, event_count=args.events,
    )
    document = {"counts": [c for c, _ in rows], "mean_aps": [m for _, m in rows]}
    _emit(args, document, evaluation.sweep_tsv(rows).rstrip("\n"))
    return 0


def cmd_serve(args) -> int:
    corpora = {}
    for spec in args.corpus or []:
        if "=" not in spec:
            raise VidexError(f"--corpus expects name=path, got {spec!r}")
        name, path = spec.split("=", 1)
        corpora[name] = path
    serve(
        ServiceConfig(
            ontology=args.ontology,
            corpora=corpora,
            embeddings=args.embeddings,
            host=args.host,
            port=args.port,
        )
    )
    return 0


def _add_common(parser, *, ontology=True, fmt=True):
    if ontology:
        parser.add_argument("--ontology", required=True, help="ontology document path")
    if fmt:
        parser.add_argument("--format", choices=("text", "record"), default="text")
        parser.add_argument("--out", default=None, help="write output to this file")


def _add_query_flags(parser):
    parser.add_argument("--query", required=True, help="event query phrase")
    parser.add_argument("--restrict", action="append", default=[],
                        help="category id restriction (repeatable)")
    parser.add_argument("--events", type=int, default=2, help="events to match")
    parser.add_argument("--concepts", type=int, default=15, help="concepts to select")
    parser.add_argument("--embeddings", default=None, help="embedding table for similarity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="videx", description="concept-based zero-shot video event retrieval"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an ontology document and print stats")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="ontology statistics")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("discover", help="mine event-specific concepts from a tag manifest")
    _add_common(p, ontology=False)
    p.add_argument("--manifest", required=True)
    p.add_argument("--event", required=True, help="event id the manifest was crawled for")
    p.add_argument("--vocab", action="append", required=True, help="vocabulary file (repeatable)")
    p.add_argument("--top", type=int, default=10, help="frequent words to keep")
    p.add_argument("--min-overlap", type=int, default=3, dest="min_overlap")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("match", help="match a query to events and concepts")
    _add_common(p)
    _add_query_flags(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("retrieve", help="rank a corpus for a query")
    _add_common(p)
    _add_query_flags(p)
    p.add_argument("--corpus", required=True, help="score matrix file")
    p.add_argument("--top", type=int, default=0, help="truncate ranking (0 = all)")
    p.add_argument("--weighted", action="store_true", help="similarity-weighted averaging")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("recount", help="top concepts detected in one video")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--video", required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--two-step", action="store_true", dest="two_step",
                   help="restrict to concepts of the most likely events")
    p.add_argument("--top-events", type=int, default=2, dest="top_events")
    p.add_argument("--embeddings", default=None)
    p.set_defaults(func=cmd_recount)

    p = sub.add_parser("train", help="train one concept model from frame features")
    _add_common(p, fmt=False)
    p.add_argument("--features", required=True, help="frame feature file")
    p.add_argument("--concept-videos", required=True, dest="concept_videos")
    p.add_argument("--target", required=True, help="concept id to train")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate retrieval over a query set")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True, help="ground-truth JSONL file")
    p.add_argument("--mode", choices=("ap", "compare-structure"), default="ap")
    p.add_argument("--events", type=int, default=2)
    p.add_argument("--concepts", type=int, default=15)
    p.add_argument("--embeddings", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="mAP at several concept counts")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--counts", required=True, help="comma-separated ascending counts")
    p.add_argument("--events", type=int, default=2)
    p.add_argument("--embeddings", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", action="append", default=[], help="name=path (repeatable)")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VidexError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc}\n")
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
