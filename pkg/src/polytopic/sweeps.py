"""The three sweep experiments: topic cardinality, document-link fraction,
and reference-corpus size."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np

from .cooccur import CooccurrenceIndex, build_index
from .corpus import BilingualDictionary, CorpusPair, MultilingualTopic, subsample_corpus
from .errors import PolytopicError
from .metrics import cnpmi, mta
from .plm import PlmConfig, topics_from_output, train

CARDINALITY_GRID = (10, 20, 30, 40, 50)
LINK_FRACTION_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
REFERENCE_FRACTION_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)
# below this many sampled documents a reference is flagged as unreliable
SMALL_REFERENCE_DOCS = 1000


def _topic_words(topics: Sequence[MultilingualTopic], side: str) -> set[str]:
    out: set[str] = set()
    for topic in topics:
        out.update(topic.words_a if side == "a" else topic.words_b)
    return out


def run_cardinality_sweep(
    index: CooccurrenceIndex,
    topics: Sequence[MultilingualTopic],
    dictionary: BilingualDictionary | None = None,
    cardinalities: Sequence[int] = CARDINALITY_GRID,
    include_raw_mta: bool = False,
) -> list[tuple[int, str, float]]:
    """Mean cnpmi (and mta, when a dictionary is given) per cardinality.

    Every topic must be at least as deep as the largest cardinality.
    """
    deepest = max(cardinalities)
    for i, topic in enumerate(topics):
        if topic.cardinality < deepest:
            raise PolytopicError(
                f"topic {i} has only {topic.cardinality} words per side; "
                f"the sweep needs {deepest}"
            )
    rows = []
    for c in cardinalities:
        truncated = [t.truncate(c) for t in topics]
        values = {"cnpmi": float(np.mean([cnpmi(index, t) for t in truncated]))}
        if dictionary is not None:
            values["mta"] = float(np.mean([mta(dictionary, t) for t in truncated]))
            if include_raw_mta:
                values["mta_raw"] = float(
                    np.mean([mta(dictionary, t, normalized=False) for t in truncated])
                )
        for metric in sorted(values):
            rows.append((c, metric, values[metric]))
    return rows


def _score_model_cnpmi(
    ref_corpus: CorpusPair, topics: Sequence[MultilingualTopic]
) -> float:
    index = build_index(
        ref_corpus,
        restrict_a=_topic_words(topics, "a"),
        restrict_b=_topic_words(topics, "b"),
    )
    return float(np.mean([cnpmi(index, t) for t in topics]))


def run_link_sweep(
    train_corpus: CorpusPair,
    ref_corpus: CorpusPair,
    config: PlmConfig,
    fractions: Sequence[float] = LINK_FRACTION_GRID,
    cardinality: int = 10,
    workers: int = 1,
) -> list[tuple[float, float]]:
    """Train one model per link fraction and score its mean cnpmi on the
    reference. Sweep points may run in parallel; rows keep grid order."""

    def point(fraction: float) -> tuple[float, float]:
        output = train(train_corpus, replace(config, link_fraction=fraction))
        topics = topics_from_output(output, cardinality)
        return fraction, _score_model_cnpmi(ref_corpus, topics)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(point, fractions))
    return [point(f) for f in fractions]


def run_reference_size_sweep(
    ref_corpus: CorpusPair,
    topics: Sequence[MultilingualTopic],
    fractions: Sequence[float] = REFERENCE_FRACTION_GRID,
    cardinality: int = 10,
    seed: int = 0,
) -> list[tuple[float, float, int]]:
    """Mean cnpmi of a fixed topic set against seeded subsamples of the
    reference. Returns (fraction, mean cnpmi, sampled doc count) rows; the
    caller flags rows whose doc count falls below SMALL_REFERENCE_DOCS."""
    truncated = [t.truncate(cardinality) for t in topics]
    restrict_a = _topic_words(truncated, "a")
    restrict_b = _topic_words(truncated, "b")
    n = ref_corpus.doc_count
    rows = []
    for fraction in fractions:
        size = max(1, int(round(fraction * n)))
        rng = np.random.default_rng([seed, 5, int(round(fraction * 1000))])
        indices = np.sort(rng.permutation(n)[:size])
        sub = subsample_corpus(ref_corpus, indices.tolist())
        index = build_index(sub, restrict_a=restrict_a, restrict_b=restrict_b)
        mean_score = float(np.mean([cnpmi(index, t) for t in truncated]))
        rows.append((fraction, mean_score, size))
    return rows
