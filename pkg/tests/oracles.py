"""Independent brute-force reference implementations.

Everything here recomputes statistics by direct enumeration over documents
and word pairs, deliberately sharing no code with the package internals.
"""

import math


def doc_token_sets(corpus, side):
    return [set(corpus.doc_tokens(i, side)) for i in range(corpus.doc_count)]


def brute_probabilities(corpus, token_i, token_j, mode):
    sets_a = doc_token_sets(corpus, "a")
    sets_b = doc_token_sets(corpus, "b")
    n = corpus.doc_count
    if mode == "cross":
        sets_i, sets_j = sets_a, sets_b
    elif mode == "mono_a":
        sets_i = sets_j = sets_a
    elif mode == "mono_b":
        sets_i = sets_j = sets_b
    else:
        raise ValueError(mode)
    p_i = sum(1 for s in sets_i if token_i in s) / n
    p_j = sum(1 for s in sets_j if token_j in s) / n
    p_joint = sum(
        1 for si, sj in zip(sets_i, sets_j) if token_i in si and token_j in sj
    ) / n
    return p_i, p_j, p_joint


def brute_npmi_from_probs(p_i, p_j, p_joint):
    if p_joint == 0.0 or p_i == 0.0 or p_j == 0.0:
        return 0.0
    if p_joint == 1.0:
        return 0.0
    return math.log(p_joint / (p_i * p_j)) / (-math.log(p_joint))


def brute_npmi(corpus, token_i, token_j, mode):
    return brute_npmi_from_probs(*brute_probabilities(corpus, token_i, token_j, mode))


def brute_topic_npmi(corpus, words, side):
    mode = "mono_a" if side == "a" else "mono_b"
    pairs = [
        (words[i], words[j])
        for i in range(len(words))
        for j in range(i + 1, len(words))
    ]
    return sum(brute_npmi(corpus, a, b, mode) for a, b in pairs) / len(pairs)


def brute_inpmi(corpus, topic):
    return (
        brute_topic_npmi(corpus, list(topic.words_a), "a")
        + brute_topic_npmi(corpus, list(topic.words_b), "b")
    ) / 2.0


def brute_cnpmi(corpus, topic):
    total = 0.0
    for wa in topic.words_a:
        for wb in topic.words_b:
            total += brute_npmi(corpus, wa, wb, "cross")
    return total / (topic.cardinality**2)


def brute_max_matching(words_a, words_b, is_translation):
    """Exhaustive search over assignments; only viable for small topics."""

    def recurse(i, used):
        if i == len(words_a):
            return 0
        best = recurse(i + 1, used)
        for j, wb in enumerate(words_b):
            if j not in used and is_translation(words_a[i], wb):
                best = max(best, 1 + recurse(i + 1, used | {j}))
        return best

    return recurse(0, frozenset())


def brute_mta(dictionary, topic):
    matched = brute_max_matching(
        list(topic.words_a), list(topic.words_b), dictionary.contains
    )
    return matched / topic.cardinality


def brute_twc(corpus, words, side):
    seen = set()
    for s in doc_token_sets(corpus, side):
        seen |= s
    return sum(1 for w in words if w in seen) / len(words)
