"""Document-level occurrence and co-occurrence statistics over a reference corpus.

Counting is at document granularity: a token counts once per document no
matter how often it appears. Positional (windowed) counting exists only for
context vectors.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping

import numpy as np

from .corpus import CorpusPair, Vocabulary, side_index

INDEX_CACHE_VERSION = 1


@dataclass
class CooccurrenceIndex:
    """Document frequencies and pair co-document counts, mono and crosslingual.

    Immutable once built; queries are read-only and thread-safe. Mono pair
    keys are stored canonically (sorted); cross keys as (token_a, token_b).
    """

    n_docs: int
    df_a: Counter
    df_b: Counter
    joint_aa: Counter
    joint_bb: Counter
    joint_ab: Counter
    vocab_a: Vocabulary
    vocab_b: Vocabulary
    language_a: str
    language_b: str
    corpus_checksum: str

    def df(self, token: str, side: str) -> int:
        return (self.df_a if side_index(side) == 0 else self.df_b)[token]

    def joint_cross(self, token_a: str, token_b: str) -> int:
        return self.joint_ab[(token_a, token_b)]

    def joint_mono(self, token_x: str, token_y: str, side: str) -> int:
        table = self.joint_aa if side_index(side) == 0 else self.joint_bb
        if token_x == token_y:
            # a pair is two distinct words; same-word queries fall back to df
            return self.df(token_x, side)
        return table[tuple(sorted((token_x, token_y)))]

    def probabilities(self, token_i: str, token_j: str, mode: str) -> tuple[float, float, float]:
        """Marginal and joint probabilities for a word pair under the given mode.

        Modes: "cross" (token_i in language A, token_j in language B),
        "mono_a", "mono_b". Unknown tokens contribute zero marginals and a
        zero joint.
        """
        n = self.n_docs
        if mode == "cross":
            return (
                self.df_a[token_i] / n,
                self.df_b[token_j] / n,
                self.joint_ab[(token_i, token_j)] / n,
            )
        if mode == "mono_a":
            side = "a"
        elif mode == "mono_b":
            side = "b"
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return (
            self.df(token_i, side) / n,
            self.df(token_j, side) / n,
            self.joint_mono(token_i, token_j, side) / n,
        )

    def pair_probability(self, token_a: str, token_b: str) -> tuple[float, float, float]:
        """Crosslingual (p_a, p_b, p_joint) for a bilingual word pair."""
        return self.probabilities(token_a, token_b, "cross")


def build_index(
    corpus: CorpusPair,
    restrict_a: Iterable[str] | None = None,
    restrict_b: Iterable[str] | None = None,
) -> CooccurrenceIndex:
    """Count document frequencies and pair co-document counts.

    When restriction sets are given, counting is limited to those tokens
    (typically the evaluated topics' words), which keeps memory linear in
    the evaluated vocabulary. Counts on restricted tokens are identical to
    the unrestricted index.
    """
    restrict_a = set(restrict_a) if restrict_a is not None else None
    restrict_b = set(restrict_b) if restrict_b is not None else None
    df_a, df_b = Counter(), Counter()
    joint_aa, joint_bb, joint_ab = Counter(), Counter(), Counter()
    vocab_a, vocab_b = corpus.vocab_a, corpus.vocab_b
    for doc in corpus.docs:
        set_a = {vocab_a.token_of(t) for t in doc.tokens_a}
        set_b = {vocab_b.token_of(t) for t in doc.tokens_b}
        if restrict_a is not None:
            set_a &= restrict_a
        if restrict_b is not None:
            set_b &= restrict_b
        df_a.update(set_a)
        df_b.update(set_b)
        for pair in combinations(sorted(set_a), 2):
            joint_aa[pair] += 1
        for pair in combinations(sorted(set_b), 2):
            joint_bb[pair] += 1
        for pair in product(set_a, set_b):
            joint_ab[pair] += 1
    return CooccurrenceIndex(
        n_docs=corpus.doc_count,
        df_a=df_a,
        df_b=df_b,
        joint_aa=joint_aa,
        joint_bb=joint_bb,
        joint_ab=joint_ab,
        vocab_a=vocab_a,
        vocab_b=vocab_b,
        language_a=corpus.language_a,
        language_b=corpus.language_b,
        corpus_checksum=corpus.checksum(),
    )


def pair_probability(index: CooccurrenceIndex, token_a: str, token_b: str) -> tuple[float, float, float]:
    return index.pair_probability(token_a, token_b)


@dataclass(frozen=True)
class ContextVector:
    """Windowed co-occurrence counts around every occurrence of one token."""

    token: str
    counts: Mapping[str, int]

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.counts.values()))


def _postings(corpus: CorpusPair, side: str) -> dict[int, list[tuple[int, int]]]:
    """token id -> [(doc index, position)] for one side; built lazily and cached."""
    key = ("postings", side)
    cached = corpus._derived.get(key)
    if cached is not None:
        return cached
    postings: dict[int, list[tuple[int, int]]] = {}
    for doc_idx in range(corpus.doc_count):
        for pos, token_id in enumerate(corpus.doc_token_ids(doc_idx, side)):
            postings.setdefault(token_id, []).append((doc_idx, pos))
    corpus._derived[key] = postings
    return postings


def context_vector(corpus: CorpusPair, side: str, token: str, window: int) -> ContextVector:
    """Counts of tokens within +-window positions of each occurrence of `token`.

    Windows never cross document boundaries; the occurrence position itself
    is not counted (other occurrences of the same token are). Unknown tokens
    yield an empty vector.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    cache_key = ("context", side, token, window)
    cached = corpus._derived.get(cache_key)
    if cached is not None:
        return cached
    vocab = corpus.vocab(side)
    token_id = vocab.id_of(token)
    counts: Counter = Counter()
    if token_id is not None:
        for doc_idx, pos in _postings(corpus, side).get(token_id, ()):
            ids = corpus.doc_token_ids(doc_idx, side)
            lo = max(0, pos - window)
            hi = min(len(ids), pos + window + 1)
            for j in range(lo, hi):
                if j == pos:
                    continue
                counts[vocab.token_of(ids[j])] += 1
    vector = ContextVector(token=token, counts=dict(counts))
    corpus._derived[cache_key] = vector
    return vector


def cosine_similarity(u: ContextVector, v: ContextVector) -> float:
    """Cosine of two sparse count vectors; 0.0 if either has zero norm."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    smaller, larger = (u.counts, v.counts) if len(u.counts) <= len(v.counts) else (v.counts, u.counts)
    dot = sum(c * larger.get(tok, 0) for tok, c in smaller.items())
    return dot / (nu * nv)


def _encode_pairs(table: Counter, key_to_idx_i, key_to_idx_j):
    i_idx = np.array([key_to_idx_i[k[0]] for k in table], dtype=np.int64)
    j_idx = np.array([key_to_idx_j[k[1]] for k in table], dtype=np.int64)
    counts = np.array(list(table.values()), dtype=np.int64)
    return i_idx, j_idx, counts


def save_index_cache(index: CooccurrenceIndex, path) -> None:
    """Persist a built index as a binary cache (numpy archive with a versioned header)."""
    tokens_a = sorted(index.df_a)
    tokens_b = sorted(index.df_b)
    idx_a = {t: i for i, t in enumerate(tokens_a)}
    idx_b = {t: i for i, t in enumerate(tokens_b)}
    header = json.dumps(
        {
            "version": INDEX_CACHE_VERSION,
            "n_docs": index.n_docs,
            "language_a": index.language_a,
            "language_b": index.language_b,
            "corpus_checksum": index.corpus_checksum,
        }
    )
    aa_i, aa_j, aa_c = _encode_pairs(index.joint_aa, idx_a, idx_a)
    bb_i, bb_j, bb_c = _encode_pairs(index.joint_bb, idx_b, idx_b)
    ab_i, ab_j, ab_c = _encode_pairs(index.joint_ab, idx_a, idx_b)
    with open(path, "wb") as handle:  # exact filename (savez would append .npz)
        np.savez_compressed(
            handle,
            header=np.array(header),
            tokens_a=np.array(tokens_a, dtype=str),
            tokens_b=np.array(tokens_b, dtype=str),
            df_a=np.array([index.df_a[t] for t in tokens_a], dtype=np.int64),
            df_b=np.array([index.df_b[t] for t in tokens_b], dtype=np.int64),
            aa_i=aa_i, aa_j=aa_j, aa_c=aa_c,
            bb_i=bb_i, bb_j=bb_j, bb_c=bb_c,
            ab_i=ab_i, ab_j=ab_j, ab_c=ab_c,
        )


def load_index_cache(path, corpus: CorpusPair) -> CooccurrenceIndex | None:
    """Load a cached index; returns None when the cache is stale or incompatible."""
    try:
        archive = np.load(path, allow_pickle=False)
    except (OSError, ValueError):
        return None
    try:
        header = json.loads(str(archive["header"]))
    except (KeyError, json.JSONDecodeError):
        return None
    if header.get("version") != INDEX_CACHE_VERSION:
        return None
    if header.get("corpus_checksum") != corpus.checksum():
        return None
    tokens_a = [str(t) for t in archive["tokens_a"]]
    tokens_b = [str(t) for t in archive["tokens_b"]]
    df_a = Counter(dict(zip(tokens_a, archive["df_a"].tolist())))
    df_b = Counter(dict(zip(tokens_b, archive["df_b"].tolist())))

    def decode(prefix, toks_i, toks_j):
        i_idx = archive[f"{prefix}_i"].tolist()
        j_idx = archive[f"{prefix}_j"].tolist()
        counts = archive[f"{prefix}_c"].tolist()
        return Counter(
            {(toks_i[i], toks_j[j]): c for i, j, c in zip(i_idx, j_idx, counts)}
        )

    return CooccurrenceIndex(
        n_docs=int(header["n_docs"]),
        df_a=df_a,
        df_b=df_b,
        joint_aa=decode("aa", tokens_a, tokens_a),
        joint_bb=decode("bb", tokens_b, tokens_b),
        joint_ab=decode("ab", tokens_a, tokens_b),
        vocab_a=corpus.vocab_a,
        vocab_b=corpus.vocab_b,
        language_a=header["language_a"],
        language_b=header["language_b"],
        corpus_checksum=header["corpus_checksum"],
    )
