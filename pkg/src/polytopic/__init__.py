"""Multilingual topic quality toolkit.

Crosslingual coherence metrics over parallel reference corpora, a
document-links polylingual topic model, a boosted-regression estimator that
re-scores coherence when only a narrow reference is available, and a
crosslingual classification harness.
"""

__version__ = "0.1.0"

from .cooccur import (
    ContextVector,
    CooccurrenceIndex,
    build_index,
    context_vector,
    cosine_similarity,
    pair_probability,
)
from .corpus import (
    BilingualDictionary,
    CorpusPair,
    DocumentPair,
    EraLexicon,
    MultilingualTopic,
    Vocabulary,
    corpus_from_token_lists,
    load_dictionary,
    load_era_lexicon,
    load_parallel_corpus,
    load_topics,
    write_parallel_corpus,
    write_topics,
)
from .downstream import (
    LabeledThetaSet,
    build_theta_set,
    evaluate_f1,
    select_labels,
    train_classifier,
)
from .estimator import (
    EstimatorModel,
    FeatureVector,
    cross_validate,
    extract_features,
    fit,
    predict,
)
from .metrics import (
    TopicScore,
    cnpmi,
    inpmi,
    mta,
    npmi_pair,
    pearson,
    score_topics,
    topic_npmi,
    twc,
)
from .plm import PlmConfig, PlmOutput, export_topics, topics_from_output, train

__all__ = [
    "__version__",
    "BilingualDictionary",
    "ContextVector",
    "CooccurrenceIndex",
    "CorpusPair",
    "DocumentPair",
    "EraLexicon",
    "EstimatorModel",
    "FeatureVector",
    "LabeledThetaSet",
    "MultilingualTopic",
    "PlmConfig",
    "PlmOutput",
    "TopicScore",
    "Vocabulary",
    "build_index",
    "build_theta_set",
    "cnpmi",
    "context_vector",
    "corpus_from_token_lists",
    "cosine_similarity",
    "cross_validate",
    "evaluate_f1",
    "export_topics",
    "extract_features",
    "fit",
    "inpmi",
    "load_dictionary",
    "load_era_lexicon",
    "load_parallel_corpus",
    "load_topics",
    "mta",
    "npmi_pair",
    "pair_probability",
    "pearson",
    "predict",
    "score_topics",
    "select_labels",
    "topic_npmi",
    "topics_from_output",
    "train",
    "train_classifier",
    "twc",
    "write_parallel_corpus",
    "write_topics",
]
