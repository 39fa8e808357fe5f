"""Bilingual word embeddings from document-aligned comparable corpora.

The pipeline: load an aligned corpus, build pseudo-bilingual documents by
merge-and-shuffle or length-ratio interleaving (or plain concatenation as
a baseline), train skip-gram with negative sampling on the mixed token
stream, then query the shared space for mono-, cross- or multilingual
neighbors, extract bilingual lexicons, and rank in-context translation
candidates.
"""

__version__ = "0.1.0"

from .context import (
    ContextBag,
    ContextScorerConfig,
    ScoreMethod,
    compose,
    contextualize,
    rank_candidates,
    score_in_context,
)
from .corpus import (
    AlignedCorpus,
    DocumentPair,
    Token,
    Vocabulary,
    build_vocabulary,
    filter_pair,
    load_corpus,
)
from .errors import (
    AlignmentError,
    BwesgError,
    ConfigurationError,
    DomainError,
    EmptyContextError,
    EmptyDocumentError,
    EmptySideError,
    FormatError,
    PairingError,
    ParseError,
    UndefinedSimilarityError,
    UnknownWordError,
)
from .evaluation import (
    BleTestSet,
    EvalResult,
    SwtcInstance,
    acc_by_sense_count,
    ble_evaluate,
    load_ble_test,
    load_swtc_instances,
    mcnemar,
    no_context_baseline,
    swtc_evaluate,
)
from .shuffle import (
    PseudoBilingualDocument,
    Strategy,
    concat,
    length_ratio_shuffle,
    merge_and_shuffle,
    read_pseudo_documents,
    shuffle_corpus,
    write_pseudo_documents,
)
from .space import (
    EmbeddingSpace,
    RankedList,
    SimilarityMode,
    cosine,
    hellinger,
    nearest_cross,
    ranked_list,
)
from .trainer import (
    ModelParams,
    TrainingConfig,
    TrainingPair,
    generate_pairs,
    init_params,
    negative_table,
    pair_probability,
    sgd_step,
    subsample,
    train,
)

__all__ = [
    "__version__",
    # corpus
    "Token", "DocumentPair", "AlignedCorpus", "Vocabulary",
    "load_corpus", "build_vocabulary", "filter_pair",
    # shuffle
    "Strategy", "PseudoBilingualDocument",
    "merge_and_shuffle", "length_ratio_shuffle", "concat", "shuffle_corpus",
    "write_pseudo_documents", "read_pseudo_documents",
    # trainer
    "TrainingConfig", "ModelParams", "TrainingPair",
    "init_params", "pair_probability", "subsample", "generate_pairs",
    "negative_table", "sgd_step", "train",
    # space
    "EmbeddingSpace", "RankedList", "SimilarityMode",
    "cosine", "hellinger", "ranked_list", "nearest_cross",
    # context
    "ContextBag", "ContextScorerConfig", "ScoreMethod",
    "compose", "contextualize", "score_in_context", "rank_candidates",
    # evaluation
    "BleTestSet", "SwtcInstance", "EvalResult",
    "ble_evaluate", "swtc_evaluate", "no_context_baseline",
    "mcnemar", "acc_by_sense_count", "load_ble_test", "load_swtc_instances",
    # errors
    "BwesgError", "ParseError", "FormatError", "AlignmentError",
    "ConfigurationError", "EmptyDocumentError", "EmptySideError",
    "UndefinedSimilarityError", "DomainError", "UnknownWordError",
    "EmptyContextError", "PairingError",
]
