"""Corpus ingestion: parallel bilingual text, dictionaries, era lexicons, topic files.

File conventions: a parallel corpus is two aligned UTF-8 text files with one
whitespace-tokenized document per line; dictionaries and era lexicons are
two-column TSV without headers; topic files are JSON (see `load_topics`).
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import AlignmentError, EmptyCorpusError, ParseError, TopicFileError

SIDES = ("a", "b")

ERA_YEAR_MIN = 800
ERA_YEAR_MAX = 2100


def side_index(side: str) -> int:
    if side == "a":
        return 0
    if side == "b":
        return 1
    raise ValueError(f"side must be 'a' or 'b', got {side!r}")


def _has_letter(token: str) -> bool:
    return any(ch.isalpha() for ch in token)


class Vocabulary:
    """Bidirectional token <-> id table; ids are dense and follow insertion order."""

    __slots__ = ("_tokens", "_ids")

    def __init__(self, tokens: Iterable[str] = ()):
        self._tokens: list[str] = []
        self._ids: dict[str, int] = {}
        for token in tokens:
            self.add(token)

    def add(self, token: str) -> int:
        existing = self._ids.get(token)
        if existing is not None:
            return existing
        token_id = len(self._tokens)
        self._tokens.append(token)
        self._ids[token] = token_id
        return token_id

    def id_of(self, token: str) -> int | None:
        return self._ids.get(token)

    def token_of(self, token_id: int) -> str:
        return self._tokens[token_id]

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self._tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token) -> bool:
        return token in self._ids

    def __iter__(self):
        return iter(self._tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._tokens == other._tokens

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} tokens)"


@dataclass(frozen=True)
class DocumentPair:
    """One aligned document pair, token sequences encoded against the owning vocabularies."""

    id: int
    tokens_a: tuple[int, ...]
    tokens_b: tuple[int, ...]
    linked: bool = True


@dataclass(eq=False)
class CorpusPair:
    """An aligned bilingual document collection with per-language vocabularies.

    Treat instances as immutable after construction; they are then safe to
    share across threads.
    """

    language_a: str
    language_b: str
    docs: list[DocumentPair]
    vocab_a: Vocabulary
    vocab_b: Vocabulary
    # lazily built query structures (postings, context vectors); not identity
    _derived: dict = field(default_factory=dict, repr=False)

    @property
    def doc_count(self) -> int:
        return len(self.docs)

    def vocab(self, side: str) -> Vocabulary:
        return self.vocab_a if side_index(side) == 0 else self.vocab_b

    def doc_token_ids(self, doc_index: int, side: str) -> tuple[int, ...]:
        doc = self.docs[doc_index]
        return doc.tokens_a if side_index(side) == 0 else doc.tokens_b

    def doc_tokens(self, doc_index: int, side: str) -> list[str]:
        vocab = self.vocab(side)
        return [vocab.token_of(t) for t in self.doc_token_ids(doc_index, side)]

    def checksum(self) -> str:
        """Stable content hash, used to invalidate on-disk index caches."""
        h = hashlib.sha256()
        h.update(self.language_a.encode("utf-8"))
        h.update(b"\x00")
        h.update(self.language_b.encode("utf-8"))
        for vocab in (self.vocab_a, self.vocab_b):
            h.update(b"\x01")
            for token in vocab:
                h.update(token.encode("utf-8"))
                h.update(b"\x00")
        for doc in self.docs:
            h.update(b"\x02")
            h.update(b"1" if doc.linked else b"0")
            for ids in (doc.tokens_a, doc.tokens_b):
                h.update(b",".join(str(i).encode() for i in ids))
                h.update(b"\x03")
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CorpusPair)
            and self.language_a == other.language_a
            and self.language_b == other.language_b
            and self.vocab_a == other.vocab_a
            and self.vocab_b == other.vocab_b
            and self.docs == other.docs
        )


def corpus_from_token_lists(
    docs_a: Sequence[Sequence[str]],
    docs_b: Sequence[Sequence[str]],
    language_a: str = "a",
    language_b: str = "b",
) -> CorpusPair:
    """Build a CorpusPair directly from token lists.

    Programmatic constructor for tests and synthetic data; applies no pruning
    or symbol stripping. Vocabulary ids follow first occurrence.
    """
    if len(docs_a) != len(docs_b):
        raise AlignmentError(
            f"document count mismatch: {len(docs_a)} vs {len(docs_b)}"
        )
    if not docs_a:
        raise EmptyCorpusError("cannot build an empty corpus")
    vocab_a, vocab_b = Vocabulary(), Vocabulary()
    docs = []
    for i, (toks_a, toks_b) in enumerate(zip(docs_a, docs_b)):
        ids_a = tuple(vocab_a.add(t) for t in toks_a)
        ids_b = tuple(vocab_b.add(t) for t in toks_b)
        docs.append(DocumentPair(id=i, tokens_a=ids_a, tokens_b=ids_b))
    return CorpusPair(language_a, language_b, docs, vocab_a, vocab_b)


def _read_documents(path) -> list[list[str]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise EmptyCorpusError(f"empty corpus file: {path}")
    return [[t for t in line.split() if _has_letter(t)] for line in lines]


def _prune(docs: list[list[str]], threshold: float) -> set[str]:
    """Token types whose document frequency exceeds threshold * doc count."""
    df = Counter()
    for tokens in docs:
        df.update(set(tokens))
    limit = threshold * len(docs)
    return {token for token, count in df.items() if count > limit}


def load_parallel_corpus(
    path_a,
    path_b,
    language_a: str,
    language_b: str,
    prune_threshold: float = 0.3,
) -> CorpusPair:
    """Load two aligned one-document-per-line files into a CorpusPair.

    Documents are aligned by line number. Tokens without any letter code
    point (digits, punctuation) are dropped, then each language drops every
    token type appearing in more than `prune_threshold` of its documents.
    All pairs are marked linked.
    """
    if not 0.0 < prune_threshold <= 1.0:
        raise ValueError(f"prune_threshold must be in (0, 1], got {prune_threshold}")
    raw_a = _read_documents(path_a)
    raw_b = _read_documents(path_b)
    if len(raw_a) != len(raw_b):
        raise AlignmentError(
            f"line count mismatch: {path_a} has {len(raw_a)} documents, "
            f"{path_b} has {len(raw_b)}"
        )
    pruned_a = _prune(raw_a, prune_threshold)
    pruned_b = _prune(raw_b, prune_threshold)
    docs_a = [[t for t in tokens if t not in pruned_a] for tokens in raw_a]
    docs_b = [[t for t in tokens if t not in pruned_b] for tokens in raw_b]
    return corpus_from_token_lists(docs_a, docs_b, language_a, language_b)


def write_parallel_corpus(corpus: CorpusPair, path_a, path_b) -> None:
    """Write a CorpusPair back to the canonical two-file format."""
    for path, side in ((path_a, "a"), (path_b, "b")):
        lines = [
            " ".join(corpus.doc_tokens(i, side)) for i in range(corpus.doc_count)
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def subsample_corpus(corpus: CorpusPair, doc_indices: Sequence[int]) -> CorpusPair:
    """New corpus containing only the given documents (renumbered), same vocabularies."""
    if len(doc_indices) == 0:
        raise EmptyCorpusError("cannot subsample to zero documents")
    docs = [
        DocumentPair(
            id=new_id,
            tokens_a=corpus.docs[old].tokens_a,
            tokens_b=corpus.docs[old].tokens_b,
            linked=corpus.docs[old].linked,
        )
        for new_id, old in enumerate(doc_indices)
    ]
    return CorpusPair(
        corpus.language_a, corpus.language_b, docs, corpus.vocab_a, corpus.vocab_b
    )


def swap_corpus_sides(corpus: CorpusPair) -> CorpusPair:
    """View of the corpus with languages A and B exchanged."""
    docs = [
        DocumentPair(id=d.id, tokens_a=d.tokens_b, tokens_b=d.tokens_a, linked=d.linked)
        for d in corpus.docs
    ]
    return CorpusPair(
        corpus.language_b, corpus.language_a, docs, corpus.vocab_b, corpus.vocab_a
    )


@dataclass(frozen=True)
class BilingualDictionary:
    """Set of translation pairs; lookup works from either side."""

    entries: frozenset[tuple[str, str]]

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[str, str]]) -> "BilingualDictionary":
        # canonical unordered storage; duplicates (in either order) collapse
        return BilingualDictionary(
            frozenset(tuple(sorted(p)) for p in pairs)
        )

    def contains(self, token_x: str, token_y: str) -> bool:
        return tuple(sorted((token_x, token_y))) in self.entries

    def translations_of(self, token: str) -> set[str]:
        out = set()
        for x, y in self.entries:
            if x == token:
                out.add(y)
            elif y == token:
                out.add(x)
        return out

    def __len__(self) -> int:
        return len(self.entries)


def load_dictionary(path) -> BilingualDictionary:
    """Load a two-column TSV of translation pairs."""
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, 1):
            row = line.rstrip("\n").split("\t")
            if len(row) != 2:
                raise ParseError(
                    f"expected 2 tab-separated columns, got {len(row)}",
                    path=path,
                    line_number=line_number,
                )
            pairs.append((row[0], row[1]))
    return BilingualDictionary.from_pairs(pairs)


@dataclass(frozen=True)
class EraLexicon:
    """Earliest attested usage year per token."""

    years: dict[str, int]

    def get(self, token: str) -> int | None:
        return self.years.get(token)

    def __contains__(self, token) -> bool:
        return token in self.years

    def __len__(self) -> int:
        return len(self.years)


def load_era_lexicon(path) -> EraLexicon:
    """Load a (token, year) TSV; on duplicate tokens the last row wins."""
    years: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, 1):
            row = line.rstrip("\n").split("\t")
            if len(row) != 2:
                raise ParseError(
                    f"expected 2 tab-separated columns, got {len(row)}",
                    path=path,
                    line_number=line_number,
                )
            token, raw_year = row
            try:
                year = int(raw_year)
            except ValueError:
                raise ParseError(
                    f"year is not an integer: {raw_year!r}",
                    path=path,
                    line_number=line_number,
                ) from None
            if not ERA_YEAR_MIN <= year <= ERA_YEAR_MAX:
                raise ParseError(
                    f"year {year} outside [{ERA_YEAR_MIN}, {ERA_YEAR_MAX}]",
                    path=path,
                    line_number=line_number,
                )
            years[token] = year
    return EraLexicon(years)


@dataclass(frozen=True)
class MultilingualTopic:
    """Per-language ranked word lists for one topic (most probable first)."""

    words_a: tuple[str, ...]
    words_b: tuple[str, ...]
    language_a: str = "a"
    language_b: str = "b"

    def __post_init__(self):
        object.__setattr__(self, "words_a", tuple(self.words_a))
        object.__setattr__(self, "words_b", tuple(self.words_b))
        if len(self.words_a) != len(self.words_b):
            raise TopicFileError(
                f"topic sides differ in length: {len(self.words_a)} vs {len(self.words_b)}"
            )
        if len(self.words_a) < 1:
            raise TopicFileError("topic must contain at least one word per language")
        for words, lang in ((self.words_a, self.language_a), (self.words_b, self.language_b)):
            if len(set(words)) != len(words):
                raise TopicFileError(f"duplicate words in {lang} side of topic")

    @property
    def cardinality(self) -> int:
        return len(self.words_a)

    def truncate(self, cardinality: int) -> "MultilingualTopic":
        if cardinality > self.cardinality:
            raise ValueError(
                f"cannot truncate to {cardinality}: topic has {self.cardinality} words"
            )
        return MultilingualTopic(
            self.words_a[:cardinality],
            self.words_b[:cardinality],
            self.language_a,
            self.language_b,
        )

    def swapped(self) -> "MultilingualTopic":
        return MultilingualTopic(
            self.words_b, self.words_a, self.language_b, self.language_a
        )


def _topic_words(raw, path, index) -> tuple[str, ...]:
    words = []
    for entry in raw:
        if isinstance(entry, str):
            words.append(entry)
        elif isinstance(entry, (list, tuple)) and entry and isinstance(entry[0], str):
            words.append(entry[0])  # [word, probability] form; probability ignored
        else:
            raise TopicFileError(f"topic {index} in {path}: unrecognized word entry {entry!r}")
    return tuple(words)


def load_topics(path, language_a: str | None = None, language_b: str | None = None) -> list[MultilingualTopic]:
    """Load a JSON topic file: a list of objects mapping language code to word list.

    Word entries may be plain strings or [word, probability] pairs; the
    probability is ignored. If the language codes are not given they are
    inferred from the first topic's key order.
    """
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, list):
        raise TopicFileError(f"{path}: expected a JSON list of topics")
    if not data:
        return []
    if language_a is None or language_b is None:
        keys = list(data[0].keys())
        if len(keys) != 2:
            raise TopicFileError(
                f"{path}: topic 0 must map exactly two language codes, found {keys}"
            )
        language_a, language_b = keys
    topics = []
    for index, item in enumerate(data):
        if not isinstance(item, dict):
            raise TopicFileError(f"{path}: topic {index} is not an object")
        for lang in (language_a, language_b):
            if lang not in item:
                raise TopicFileError(f"{path}: topic {index} missing language block {lang!r}")
        words_a = _topic_words(item[language_a], path, index)
        words_b = _topic_words(item[language_b], path, index)
        try:
            topics.append(
                MultilingualTopic(words_a, words_b, language_a, language_b)
            )
        except TopicFileError as err:
            raise TopicFileError(f"{path}: topic {index}: {err}") from None
    return topics


def write_topics(topics: Sequence[MultilingualTopic], path) -> None:
    """Write topics to the JSON topic file format."""
    data = [
        {t.language_a: list(t.words_a), t.language_b: list(t.words_b)}
        for t in topics
    ]
    Path(path).write_text(
        json.dumps(data, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
