"""Coherence and consistency metrics for multilingual topics.

Pair scores are PMI normalized by -log(joint probability), so +1 means
perfect co-occurrence and higher always means more coherent. Pairs that
never co-occur in the reference (or contain reference-absent words) score
exactly 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .cooccur import CooccurrenceIndex
from .corpus import BilingualDictionary, MultilingualTopic, side_index
from .errors import DegenerateTopicError, UndefinedCorrelationError

METRIC_NAMES = ("NPMI_A", "NPMI_B", "INPMI", "CNPMI", "MTA", "TWC_A", "TWC_B")


@dataclass(frozen=True)
class TopicScore:
    topic_id: int
    metric: str
    value: float


def npmi_pair(index: CooccurrenceIndex, token_i: str, token_j: str, mode: str = "cross") -> float:
    """Normalized pointwise mutual information of one word pair in [-1, 1].

    Returns 0.0 when the pair never co-occurs, when either marginal is zero
    (reference-absent words), or when the joint probability is 1 (the
    normalizer vanishes).
    """
    p_i, p_j, p_joint = index.probabilities(token_i, token_j, mode)
    if p_joint == 0.0 or p_i == 0.0 or p_j == 0.0:
        return 0.0
    if p_joint == 1.0:
        return 0.0
    score = (math.log(p_joint) - math.log(p_i) - math.log(p_j)) / -math.log(p_joint)
    # mathematically in [-1, 1]; clamp float rounding at the boundaries
    return min(1.0, max(-1.0, score))


def topic_npmi(
    index: CooccurrenceIndex,
    words: Sequence[str],
    cardinality: int | None = None,
    side: str = "a",
) -> float:
    """Average pair score over all unordered pairs among the top `cardinality` words."""
    c = cardinality if cardinality is not None else len(words)
    if c > len(words):
        raise ValueError(f"cardinality {c} exceeds word list length {len(words)}")
    if c < 2:
        raise DegenerateTopicError(f"topic NPMI needs at least 2 words, got {c}")
    mode = "mono_a" if side_index(side) == 0 else "mono_b"
    top = words[:c]
    total = 0.0
    for i in range(c):
        for j in range(i + 1, c):
            total += npmi_pair(index, top[i], top[j], mode)
    return total / (c * (c - 1) / 2)


def inpmi(index: CooccurrenceIndex, topic: MultilingualTopic) -> float:
    """Average of the two monolingual topic scores."""
    score_a = topic_npmi(index, topic.words_a, side="a")
    score_b = topic_npmi(index, topic.words_b, side="b")
    return (score_a + score_b) / 2.0


def cnpmi(index: CooccurrenceIndex, topic: MultilingualTopic) -> float:
    """Crosslingual coherence: mean pair score over all C^2 ordered bilingual pairs."""
    c = topic.cardinality
    total = 0.0
    for word_a in topic.words_a:
        for word_b in topic.words_b:
            total += npmi_pair(index, word_a, word_b, "cross")
    return total / (c * c)


def cnpmi_multilingual(
    scored_pairs: Sequence[tuple[CooccurrenceIndex, MultilingualTopic]],
) -> float:
    """Generalization beyond two languages: the mean of the bilingual score
    over all language pairs of one multilingual topic."""
    if not scored_pairs:
        raise ValueError("need at least one language pair")
    return sum(cnpmi(index, topic) for index, topic in scored_pairs) / len(scored_pairs)


def _max_bipartite_matching(adjacency: list[list[int]], n_right: int) -> int:
    """Size of a maximum matching (augmenting-path algorithm)."""
    match_right = [-1] * n_right

    def try_assign(left: int, seen: list[bool]) -> bool:
        for right in adjacency[left]:
            if not seen[right]:
                seen[right] = True
                if match_right[right] == -1 or try_assign(match_right[right], seen):
                    match_right[right] = left
                    return True
        return False

    size = 0
    for left in range(len(adjacency)):
        if try_assign(left, [False] * n_right):
            size += 1
    return size


def mta(dictionary: BilingualDictionary, topic: MultilingualTopic, normalized: bool = True) -> float:
    """Matching translation accuracy.

    Default is the size of a maximum bipartite matching between the two word
    lists under the dictionary, divided by cardinality (each word used at
    most once). With normalized=False returns the raw number of translation
    pairs present, without matching or normalization.
    """
    if not normalized:
        return float(
            sum(
                1
                for wa in topic.words_a
                for wb in topic.words_b
                if dictionary.contains(wa, wb)
            )
        )
    adjacency = [
        [j for j, wb in enumerate(topic.words_b) if dictionary.contains(wa, wb)]
        for wa in topic.words_a
    ]
    matched = _max_bipartite_matching(adjacency, topic.cardinality)
    return matched / topic.cardinality


def twc(index: CooccurrenceIndex, words: Sequence[str], side: str = "a") -> float:
    """Fraction of the words that appear at all in the reference corpus."""
    if not words:
        return 0.0
    present = sum(1 for w in words if index.df(w, side) > 0)
    return present / len(words)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be equal-length 1-d sequences")
    if xs.size < 2:
        raise ValueError("need at least 2 observations")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError(
            "correlation undefined: an argument has zero variance"
        )
    return float(np.dot(dx, dy) / math.sqrt(sxx * syy))


def score_topics(
    index: CooccurrenceIndex,
    topics: Sequence[MultilingualTopic],
    dictionary: BilingualDictionary | None = None,
) -> list[TopicScore]:
    """All metrics for each topic, ordered by topic id then metric name."""
    scores = []
    for topic_id, topic in enumerate(topics):
        values = {
            "NPMI_A": topic_npmi(index, topic.words_a, side="a"),
            "NPMI_B": topic_npmi(index, topic.words_b, side="b"),
            "INPMI": inpmi(index, topic),
            "CNPMI": cnpmi(index, topic),
            "TWC_A": twc(index, topic.words_a, "a"),
            "TWC_B": twc(index, topic.words_b, "b"),
        }
        if dictionary is not None:
            values["MTA"] = mta(dictionary, topic)
        for metric in sorted(values):
            scores.append(TopicScore(topic_id, metric, values[metric]))
    return scores


def write_scores_tsv(scores: Sequence[TopicScore], path) -> None:
    lines = ["topic\tmetric\tvalue"]
    for s in sorted(scores, key=lambda s: (s.topic_id, s.metric)):
        lines.append(f"{s.topic_id}\t{s.metric}\t{s.value:.10g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_scores_json(scores: Sequence[TopicScore], path) -> None:
    report: dict[str, dict[str, float]] = {}
    for s in scores:
        report.setdefault(str(s.topic_id), {})[s.metric] = s.value
    Path(path).write_text(
        json.dumps(report, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
