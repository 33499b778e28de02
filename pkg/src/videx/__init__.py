"""videx: concept-based zero-shot video event retrieval.

A category/event/concept ontology, tag-driven concept discovery, cascaded
query-to-concept matching with optional human category restriction, linear
concept scoring over precomputed features, zero-shot ranking, semantic
recounting, and a retrieval-evaluation harness. Served over HTTP and a CLI.
"""

from .errors import (
    ChecksumError,
    EmptyPoolError,
    NotACategoryError,
    NotAConceptError,
    NotAnEventError,
    OntologyParseError,
    OntologyValidationError,
    UnknownCorpusError,
    UnknownIdError,
    UnknownVideoError,
    VidexError,
)
from .ontology import (
    OntologyNode,
    OntologyStats,
    OntologyTree,
    dumps_ontology,
    events_under,
    load_concept_videos,
    load_ontology,
    load_sample_ontology,
    parse_ontology,
    redundancy_candidates,
    save_ontology,
    stats,
)
from .similarity import (
    EmbeddingBackend,
    OverlapCosineBackend,
    default_backend,
    phrase_similarity,
    tokenize,
)
from .matching import MatchQuery, MatchResult, match_concepts, match_events
from .discovery import (
    CrawlManifest,
    DiscoveredConcept,
    Vocabulary,
    discover_concepts,
    filter_videos,
    frequent_words,
    load_manifest,
    load_vocabulary,
)
from .models import (
    DEFAULT_SEED,
    DatasetSplit,
    LinearModel,
    l2_normalize,
    load_features,
    load_model,
    multinomial_loss,
    multinomial_loss_gradient,
    predict,
    predict_many,
    sample_negatives,
    save_features,
    save_model,
    softmax,
    split_dataset,
    train_linear,
)
from .scoring import (
    RecountEntry,
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
from .evaluation import (
    ComparisonReport,
    EvalReport,
    QueryCase,
    average_precision,
    compare_matching,
    concept_count_sweep,
    evaluate_retrieval,
    load_query_cases,
    mean_ap,
    top_k_accuracy,
    top_k_by_category,
)
from .ranking import canonical_json, ranked, top_n

__version__ = "0.1.0"
