"""Synthetic bilingual worlds with planted themes.

Desk-scale stand-ins for the real corpora: themed parallel documents, topics
of controllable quality, aligned dictionaries, and era lexicons where "old"
themes carry archaic years. Used by the experiment scripts and the
acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import (
    BilingualDictionary,
    CorpusPair,
    EraLexicon,
    MultilingualTopic,
    corpus_from_token_lists,
)


@dataclass(frozen=True)
class Theme:
    words_a: tuple[str, ...]
    words_b: tuple[str, ...]
    base_year: int
    modern: bool


@dataclass(frozen=True)
class ThemeWorld:
    language_a: str
    language_b: str
    themes: tuple[Theme, ...]

    @property
    def old_theme_ids(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.themes) if not t.modern)

    @property
    def modern_theme_ids(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.themes) if t.modern)

    def all_words(self, side: str) -> list[str]:
        out = []
        for theme in self.themes:
            out.extend(theme.words_a if side == "a" else theme.words_b)
        return out


def make_world(
    language_a: str = "en",
    language_b: str = "xx",
    n_themes: int = 8,
    n_modern: int = 4,
    words_per_theme: int = 12,
    seed: int = 0,
) -> ThemeWorld:
    """Themes 0..n-n_modern-1 are 'old' (years ~1500s-1700s); the rest are
    'modern' (~1900s). Word i of a theme translates word i on the other side."""
    rng = np.random.default_rng([seed, 10])
    themes = []
    for t in range(n_themes):
        modern = t >= n_themes - n_modern
        base_year = int(rng.integers(1900, 1990)) if modern else int(rng.integers(1500, 1750))
        words_a = tuple(f"{language_a}.t{t}.w{i}" for i in range(words_per_theme))
        words_b = tuple(f"{language_b}.t{t}.w{i}" for i in range(words_per_theme))
        themes.append(Theme(words_a, words_b, base_year, modern))
    return ThemeWorld(language_a, language_b, tuple(themes))


def make_dictionary(world: ThemeWorld, coverage: float = 1.0, seed: int = 0) -> BilingualDictionary:
    """Aligned translation pairs; `coverage` keeps a random fraction of them."""
    rng = np.random.default_rng([seed, 11])
    pairs = []
    for theme in world.themes:
        for wa, wb in zip(theme.words_a, theme.words_b):
            if rng.random() < coverage:
                pairs.append((wa, wb))
    return BilingualDictionary.from_pairs(pairs)


def make_era_lexicon(world: ThemeWorld, coverage: float = 1.0, seed: int = 0) -> EraLexicon:
    """Pivot-side words mapped to their theme's era, with small jitter."""
    rng = np.random.default_rng([seed, 12])
    years = {}
    for theme in world.themes:
        for word in theme.words_a:
            if rng.random() < coverage:
                years[word] = theme.base_year + int(rng.integers(0, 30))
    return EraLexicon(years)


def _themed_documents(world, n_docs, pool, doc_length, noise, rng):
    docs_a, docs_b, themes = [], [], []
    for _ in range(n_docs):
        theme_id = pool[rng.integers(len(pool))]
        themes.append(theme_id)
        doc_sides = []
        for side in ("a", "b"):
            tokens = []
            for _ in range(doc_length):
                if rng.random() < noise and len(pool) > 1:
                    other = theme_id
                    while other == theme_id:
                        other = pool[rng.integers(len(pool))]
                    source = world.themes[other]
                else:
                    source = world.themes[theme_id]
                words = source.words_a if side == "a" else source.words_b
                tokens.append(words[rng.integers(len(words))])
            doc_sides.append(tokens)
        docs_a.append(doc_sides[0])
        docs_b.append(doc_sides[1])
    return docs_a, docs_b, themes


def make_reference_corpus(
    world: ThemeWorld,
    n_docs: int,
    theme_ids: tuple[int, ...] | None = None,
    doc_length: int = 8,
    noise: float = 0.1,
    seed: int = 0,
) -> CorpusPair:
    """Parallel documents, each about one theme on both sides; a `noise`
    fraction of tokens comes from other themes in the pool."""
    rng = np.random.default_rng([seed, 13])
    pool = list(theme_ids) if theme_ids is not None else list(range(len(world.themes)))
    docs_a, docs_b, _ = _themed_documents(world, n_docs, pool, doc_length, noise, rng)
    return corpus_from_token_lists(docs_a, docs_b, world.language_a, world.language_b)


def make_labeled_corpus(
    world: ThemeWorld,
    n_docs: int,
    doc_length: int = 12,
    noise: float = 0.1,
    seed: int = 0,
) -> tuple[CorpusPair, list[str]]:
    """Like `make_reference_corpus` but also returns each document pair's
    theme name, usable as a classification category."""
    rng = np.random.default_rng([seed, 13])
    pool = list(range(len(world.themes)))
    docs_a, docs_b, themes = _themed_documents(world, n_docs, pool, doc_length, noise, rng)
    corpus = corpus_from_token_lists(docs_a, docs_b, world.language_a, world.language_b)
    return corpus, [f"theme{t}" for t in themes]


def make_topic(
    world: ThemeWorld,
    theme_id: int,
    quality: float,
    cardinality: int,
    rng: np.random.Generator,
) -> MultilingualTopic:
    """A topic whose first round(quality * C) word pairs are aligned theme
    words; the rest are unaligned draws from other themes."""
    theme = world.themes[theme_id]
    n_core = int(round(quality * cardinality))
    n_core = min(n_core, len(theme.words_a), cardinality)
    core_idx = rng.permutation(len(theme.words_a))[:n_core]
    words_a = [theme.words_a[i] for i in core_idx]
    words_b = [theme.words_b[i] for i in core_idx]
    others = [i for i in range(len(world.themes)) if i != theme_id]
    for side, words in (("a", words_a), ("b", words_b)):
        attempts = 0
        while len(words) < cardinality:
            attempts += 1
            if attempts > 1000 * cardinality:
                raise ValueError(
                    f"cannot draw {cardinality} distinct words; the world is too small"
                )
            other = world.themes[others[rng.integers(len(others))]]
            pool = other.words_a if side == "a" else other.words_b
            candidate = pool[rng.integers(len(pool))]
            if candidate not in words:
                words.append(candidate)
    return MultilingualTopic(
        tuple(words_a), tuple(words_b), world.language_a, world.language_b
    )


def make_topic_set(
    world: ThemeWorld,
    count: int,
    cardinality: int = 10,
    seed: int = 0,
) -> tuple[list[MultilingualTopic], list[float], list[int]]:
    """Topics cycling through themes and a spread of quality levels.

    Returns (topics, qualities, theme ids).
    """
    rng = np.random.default_rng([seed, 14])
    qualities_cycle = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
    topics, qualities, themes = [], [], []
    for i in range(count):
        theme_id = i % len(world.themes)
        quality = qualities_cycle[(i // len(world.themes)) % len(qualities_cycle)]
        topics.append(make_topic(world, theme_id, quality, cardinality, rng))
        qualities.append(quality)
        themes.append(theme_id)
    return topics, qualities, themes


def make_training_corpus(
    world: ThemeWorld,
    n_pairs: int,
    doc_length: int = 16,
    noise: float = 0.1,
    theme_ids: tuple[int, ...] | None = None,
    seed: int = 0,
) -> CorpusPair:
    """Parallel training corpus for the topic model (same planting scheme as
    the reference generator, longer documents)."""
    return make_reference_corpus(
        world, n_pairs, theme_ids=theme_ids, doc_length=doc_length, noise=noise,
        seed=seed + 1_000_003,
    )


@dataclass(frozen=True)
class LanguagePack:
    """Everything one synthetic language pair contributes to an estimator
    experiment: topics of varying quality, a narrow (old themes only)
    reference, a broad reference over every theme, and lexicons."""

    world: ThemeWorld
    topics: list
    qualities: list
    narrow: CorpusPair
    broad: CorpusPair
    dictionary: BilingualDictionary
    era: EraLexicon
    targets: list  # broad-reference cnpmi per topic


def build_language_pack(
    language_b: str,
    seed: int,
    n_topics: int = 36,
    cardinality: int = 10,
    narrow_docs: int = 300,
    broad_docs: int = 900,
) -> LanguagePack:
    from .cooccur import build_index
    from .metrics import cnpmi

    world = make_world(language_b=language_b, seed=seed)
    narrow = make_reference_corpus(
        world, narrow_docs, theme_ids=world.old_theme_ids, doc_length=8,
        noise=0.1, seed=seed + 1,
    )
    broad = make_reference_corpus(
        world, broad_docs, doc_length=8, noise=0.1, seed=seed + 2
    )
    topics, qualities, _ = make_topic_set(world, n_topics, cardinality, seed=seed + 3)
    dictionary = make_dictionary(world, coverage=0.9, seed=seed + 4)
    era = make_era_lexicon(world, coverage=0.9, seed=seed + 5)
    words_a = {w for t in topics for w in t.words_a}
    words_b = {w for t in topics for w in t.words_b}
    broad_index = build_index(broad, restrict_a=words_a, restrict_b=words_b)
    targets = [cnpmi(broad_index, t) for t in topics]
    return LanguagePack(world, topics, qualities, narrow, broad, dictionary, era, targets)


def write_dictionary_tsv(dictionary: BilingualDictionary, path) -> None:
    lines = [f"{a}\t{b}" for a, b in sorted(dictionary.entries)]
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def write_era_tsv(era: EraLexicon, path) -> None:
    lines = [f"{token}\t{year}" for token, year in sorted(era.years.items())]
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def write_language_dir(pack: LanguagePack, directory, include_targets: bool = True) -> None:
    """Materialize a pack in the on-disk layout the estimator CLI consumes."""
    from pathlib import Path

    from .corpus import write_parallel_corpus, write_topics

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_topics(pack.topics, directory / "topics.json")
    write_parallel_corpus(pack.narrow, directory / "ref_a.txt", directory / "ref_b.txt")
    write_parallel_corpus(pack.broad, directory / "aux_a.txt", directory / "aux_b.txt")
    write_dictionary_tsv(pack.dictionary, directory / "dictionary.tsv")
    write_era_tsv(pack.era, directory / "era.tsv")
    if include_targets:
        lines = [f"{i}\t{v:.10g}" for i, v in enumerate(pack.targets)]
        (directory / "targets.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
