"""Document-links polylingual topic model trained by collapsed Gibbs sampling.

Aligned document pairs can share one document-topic distribution (linked) or
be treated as two independent documents (unlinked); the linked fraction is a
training parameter. Hyperparameter optimization uses the Dirichlet
fixed-point maximum-likelihood update rather than slice sampling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit
from scipy.special import digamma, gammaln

from .corpus import CorpusPair, MultilingualTopic, Vocabulary, write_topics
from .errors import CapacityError, ConfigError

ALPHA_MIN = 1e-6
ALPHA_MAX = 1e3
# memory bound on the topic-word count matrices (entries across both languages)
MAX_TOPIC_WORD_ENTRIES = 50_000_000

PHI_CACHE_VERSION = 1


@dataclass(frozen=True)
class PlmConfig:
    """Sampler configuration. Defaults mirror common usage: symmetric priors
    alpha=0.1 / beta=0.01, five chains of 1000 sweeps, optimization every 50."""

    n_topics: int
    alpha: float = 0.1
    beta: float = 0.01
    iterations: int = 1000
    chains: int = 5
    optimize_interval: int = 50
    link_fraction: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_topics < 1:
            raise ConfigError(f"n_topics must be >= 1, got {self.n_topics}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.chains < 1:
            raise ConfigError("chains must be >= 1")
        if self.optimize_interval < 0:
            raise ConfigError("optimize_interval must be >= 0 (0 disables)")
        if not 0.0 <= self.link_fraction <= 1.0:
            raise ConfigError(f"link_fraction must be in [0, 1], got {self.link_fraction}")


@dataclass
class PlmState:
    """Mutable sampler state for one chain.

    Token arrays are flattened over all documents (side A tokens before side
    B tokens within each pair). `row_of[d, s]` maps pair d / side s to its
    document-topic count row; linked pairs share one row.
    """

    n_topics: int
    beta: float
    token_word: np.ndarray
    token_lang: np.ndarray
    token_row: np.ndarray
    token_topic: np.ndarray
    n_dk: np.ndarray
    n_kw_a: np.ndarray
    n_kw_b: np.ndarray
    n_k_a: np.ndarray
    n_k_b: np.ndarray
    alpha: np.ndarray
    row_of: np.ndarray
    linked: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.n_dk.shape[0]

    def recount(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Rebuild all count matrices from the assignments (for consistency checks)."""
        k = self.n_topics
        n_dk = np.zeros_like(self.n_dk)
        n_kw_a = np.zeros_like(self.n_kw_a)
        n_kw_b = np.zeros_like(self.n_kw_b)
        np.add.at(n_dk, (self.token_row, self.token_topic), 1)
        mask_a = self.token_lang == 0
        np.add.at(n_kw_a, (self.token_topic[mask_a], self.token_word[mask_a]), 1)
        np.add.at(n_kw_b, (self.token_topic[~mask_a], self.token_word[~mask_a]), 1)
        return n_dk, n_kw_a, n_kw_b, n_kw_a.sum(axis=1), n_kw_b.sum(axis=1)

    def check_consistency(self) -> None:
        """Raise AssertionError unless every count matrix matches the assignments."""
        n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b = self.recount()
        assert np.array_equal(self.n_dk, n_dk), "document-topic counts inconsistent"
        assert np.array_equal(self.n_kw_a, n_kw_a), "topic-word counts (A) inconsistent"
        assert np.array_equal(self.n_kw_b, n_kw_b), "topic-word counts (B) inconsistent"
        assert np.array_equal(self.n_k_a, n_k_a), "topic totals (A) inconsistent"
        assert np.array_equal(self.n_k_b, n_k_b), "topic totals (B) inconsistent"
        assert (self.n_dk >= 0).all() and (self.n_kw_a >= 0).all() and (self.n_kw_b >= 0).all()


def topic_conditional_weights(
    n_dk_row: np.ndarray,
    n_kw_col: np.ndarray,
    n_k: np.ndarray,
    alpha: np.ndarray,
    beta: float,
    vocab_size: int,
) -> np.ndarray:
    """Unnormalized Gibbs conditional for one token, current token excluded
    from all counts: (n_dk + alpha_k) * (n_kw + beta) / (n_k + V * beta)."""
    return (n_dk_row + alpha) * (n_kw_col + beta) / (n_k + vocab_size * beta)


@njit(cache=True, nogil=True)
def _sweep_kernel(
    token_word, token_lang, token_row, token_topic,
    n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b,
    alpha, beta, uniforms,
):  # pragma: no cover - exercised via run_sweep
    n_topics = n_dk.shape[1]
    v_a = n_kw_a.shape[1]
    v_b = n_kw_b.shape[1]
    cumulative = np.empty(n_topics, np.float64)
    for t in range(token_word.shape[0]):
        w = token_word[t]
        row = token_row[t]
        lang = token_lang[t]
        k_old = token_topic[t]
        n_dk[row, k_old] -= 1
        if lang == 0:
            n_kw_a[k_old, w] -= 1
            n_k_a[k_old] -= 1
        else:
            n_kw_b[k_old, w] -= 1
            n_k_b[k_old] -= 1
        total = 0.0
        for k in range(n_topics):
            if lang == 0:
                weight = (n_dk[row, k] + alpha[k]) * (n_kw_a[k, w] + beta) / (n_k_a[k] + v_a * beta)
            else:
                weight = (n_dk[row, k] + alpha[k]) * (n_kw_b[k, w] + beta) / (n_k_b[k] + v_b * beta)
            total += weight
            cumulative[k] = total
        u = uniforms[t] * total
        k_new = n_topics - 1
        for k in range(n_topics):
            if u < cumulative[k]:
                k_new = k
                break
        token_topic[t] = k_new
        n_dk[row, k_new] += 1
        if lang == 0:
            n_kw_a[k_new, w] += 1
            n_k_a[k_new] += 1
        else:
            n_kw_b[k_new, w] += 1
            n_k_b[k_new] += 1


def _sweep_reference(
    token_word, token_lang, token_row, token_topic,
    n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b,
    alpha, beta, uniforms,
):
    """Pure-python mirror of the compiled kernel; the arithmetic must match
    it operation for operation so tests can compare the two bitwise."""
    n_topics = n_dk.shape[1]
    v_a = n_kw_a.shape[1]
    v_b = n_kw_b.shape[1]
    cumulative = np.empty(n_topics, np.float64)
    for t in range(token_word.shape[0]):
        w = token_word[t]
        row = token_row[t]
        lang = token_lang[t]
        k_old = token_topic[t]
        n_dk[row, k_old] -= 1
        if lang == 0:
            n_kw_a[k_old, w] -= 1
            n_k_a[k_old] -= 1
        else:
            n_kw_b[k_old, w] -= 1
            n_k_b[k_old] -= 1
        total = 0.0
        for k in range(n_topics):
            if lang == 0:
                weight = (n_dk[row, k] + alpha[k]) * (n_kw_a[k, w] + beta) / (n_k_a[k] + v_a * beta)
            else:
                weight = (n_dk[row, k] + alpha[k]) * (n_kw_b[k, w] + beta) / (n_k_b[k] + v_b * beta)
            total += weight
            cumulative[k] = total
        u = uniforms[t] * total
        k_new = n_topics - 1
        for k in range(n_topics):
            if u < cumulative[k]:
                k_new = k
                break
        token_topic[t] = k_new
        n_dk[row, k_new] += 1
        if lang == 0:
            n_kw_a[k_new, w] += 1
            n_k_a[k_new] += 1
        else:
            n_kw_b[k_new, w] += 1
            n_k_b[k_new] += 1


def select_linked(corpus: CorpusPair, link_fraction: float, seed: int) -> np.ndarray:
    """Boolean mask of pairs sharing a topic distribution: a seeded shuffle
    selects round(fraction * N) documents among those the corpus marks linkable."""
    n = corpus.doc_count
    rng = np.random.default_rng([seed, 1])
    order = rng.permutation(n)
    n_linked = int(round(link_fraction * n))
    mask = np.zeros(n, dtype=bool)
    mask[order[:n_linked]] = True
    for d, doc in enumerate(corpus.docs):
        if not doc.linked:
            mask[d] = False
    return mask


def initialize_state(
    corpus: CorpusPair,
    config: PlmConfig,
    rng: np.random.Generator,
    linked: np.ndarray | None = None,
) -> PlmState:
    """Flatten the corpus into token arrays and draw uniform initial topics."""
    if linked is None:
        linked = select_linked(corpus, config.link_fraction, config.seed)
    n_docs = corpus.doc_count
    row_of = np.zeros((n_docs, 2), dtype=np.int32)
    next_row = 0
    for d in range(n_docs):
        if linked[d]:
            row_of[d, 0] = row_of[d, 1] = next_row
            next_row += 1
        else:
            row_of[d, 0] = next_row
            row_of[d, 1] = next_row + 1
            next_row += 2
    words, langs, rows = [], [], []
    for d, doc in enumerate(corpus.docs):
        words.extend(doc.tokens_a)
        langs.extend([0] * len(doc.tokens_a))
        rows.extend([row_of[d, 0]] * len(doc.tokens_a))
        words.extend(doc.tokens_b)
        langs.extend([1] * len(doc.tokens_b))
        rows.extend([row_of[d, 1]] * len(doc.tokens_b))
    token_word = np.array(words, dtype=np.int32)
    token_lang = np.array(langs, dtype=np.int8)
    token_row = np.array(rows, dtype=np.int32)
    token_topic = rng.integers(0, config.n_topics, size=token_word.shape[0]).astype(np.int32)
    state = PlmState(
        n_topics=config.n_topics,
        beta=config.beta,
        token_word=token_word,
        token_lang=token_lang,
        token_row=token_row,
        token_topic=token_topic,
        n_dk=np.zeros((next_row, config.n_topics), dtype=np.int32),
        n_kw_a=np.zeros((config.n_topics, len(corpus.vocab_a)), dtype=np.int32),
        n_kw_b=np.zeros((config.n_topics, len(corpus.vocab_b)), dtype=np.int32),
        n_k_a=np.zeros(config.n_topics, dtype=np.int32),
        n_k_b=np.zeros(config.n_topics, dtype=np.int32),
        alpha=np.full(config.n_topics, config.alpha, dtype=np.float64),
        row_of=row_of,
        linked=linked.copy(),
    )
    n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b = state.recount()
    state.n_dk, state.n_kw_a, state.n_kw_b = n_dk, n_kw_a, n_kw_b
    state.n_k_a, state.n_k_b = n_k_a.astype(np.int32), n_k_b.astype(np.int32)
    return state


def run_sweep(state: PlmState, rng: np.random.Generator, compiled: bool = True) -> None:
    """One full Gibbs sweep over every token, in corpus order."""
    uniforms = rng.random(state.token_word.shape[0])
    sweep = _sweep_kernel if compiled else _sweep_reference
    sweep(
        state.token_word, state.token_lang, state.token_row, state.token_topic,
        state.n_dk, state.n_kw_a, state.n_kw_b, state.n_k_a, state.n_k_b,
        state.alpha, state.beta, uniforms,
    )


def _count_histogram(column: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hist = np.bincount(column)
    support = np.nonzero(hist)[0]
    support = support[support > 0]
    return support, hist[support].astype(np.float64)


def optimize_alpha(state: PlmState, max_rounds: int = 20000, tol: float = 1e-9) -> np.ndarray:
    """Re-estimate the document-topic prior by the Dirichlet fixed-point
    maximum-likelihood update over the current count histograms, iterated to
    convergence and clamped to [1e-6, 1e3]. Returns the updated vector.

    Degenerate data (all documents identical) has no finite optimum; the
    iteration then drifts until the clamp absorbs it, which the round budget
    covers.
    """
    alpha = state.alpha.copy()
    length_support, length_freq = _count_histogram(state.n_dk.sum(axis=1))
    columns = [_count_histogram(state.n_dk[:, k]) for k in range(state.n_topics)]
    for _ in range(max_rounds):
        alpha_sum = alpha.sum()
        denom = float(
            np.dot(length_freq, digamma(length_support + alpha_sum) - digamma(alpha_sum))
        )
        if denom <= 0.0:
            break
        new_alpha = np.empty_like(alpha)
        for k, (support, freq) in enumerate(columns):
            numer = float(np.dot(freq, digamma(support + alpha[k]) - digamma(alpha[k])))
            new_alpha[k] = alpha[k] * numer / denom
        np.clip(new_alpha, ALPHA_MIN, ALPHA_MAX, out=new_alpha)
        delta = float(np.max(np.abs(new_alpha - alpha)))
        alpha = new_alpha
        if delta < tol:
            break
    state.alpha = alpha
    return alpha


def joint_log_likelihood(state: PlmState) -> float:
    """Collapsed joint log probability of the current assignments (used to
    pick the best chain; label switching makes cross-chain averaging invalid)."""
    alpha = state.alpha
    alpha_sum = alpha.sum()
    lengths = state.n_dk.sum(axis=1)
    ll = float(
        state.n_rows * gammaln(alpha_sum)
        - gammaln(lengths + alpha_sum).sum()
        + gammaln(state.n_dk + alpha).sum()
        - state.n_rows * gammaln(alpha).sum()
    )
    for n_kw, n_k in ((state.n_kw_a, state.n_k_a), (state.n_kw_b, state.n_k_b)):
        v = n_kw.shape[1]
        beta_sum = v * state.beta
        ll += float(
            state.n_topics * gammaln(beta_sum)
            - gammaln(n_k + beta_sum).sum()
            + gammaln(n_kw + state.beta).sum()
            - state.n_topics * v * gammaln(state.beta)
        )
    return ll


@dataclass
class PlmOutput:
    """Posterior-mean estimates from the selected chain's final state."""

    topics: list[MultilingualTopic]
    theta: np.ndarray  # (n_docs, 2, K); both sides equal for linked pairs
    phi_a: np.ndarray  # (K, V_a)
    phi_b: np.ndarray
    alpha: np.ndarray
    log_likelihood: float
    config: PlmConfig
    language_a: str = "a"
    language_b: str = "b"
    vocab_a: Vocabulary | None = None
    vocab_b: Vocabulary | None = None

    @property
    def n_topics(self) -> int:
        return self.phi_a.shape[0]


def _top_words(phi_row: np.ndarray, vocab: Vocabulary, cardinality: int) -> tuple[str, ...]:
    # stable ranking: probability descending, ties by vocabulary id ascending
    order = np.lexsort((np.arange(phi_row.shape[0]), -phi_row))[:cardinality]
    return tuple(vocab.token_of(int(i)) for i in order)


def topics_from_output(output: PlmOutput, cardinality: int) -> list[MultilingualTopic]:
    """Top-`cardinality` words per language per topic, ties broken by vocabulary id."""
    if cardinality > min(output.phi_a.shape[1], output.phi_b.shape[1]):
        raise ValueError(
            f"cardinality {cardinality} exceeds a vocabulary size "
            f"({output.phi_a.shape[1]}, {output.phi_b.shape[1]})"
        )
    return [
        MultilingualTopic(
            _top_words(output.phi_a[k], output.vocab_a, cardinality),
            _top_words(output.phi_b[k], output.vocab_b, cardinality),
            output.language_a,
            output.language_b,
        )
        for k in range(output.n_topics)
    ]


def train(corpus: CorpusPair, config: PlmConfig, compiled: bool = True) -> PlmOutput:
    """Run the configured number of independent chains and keep the one with
    the highest final joint count-likelihood.

    Deterministic: the same corpus, config, and seed give bitwise-identical
    results. Estimates are posterior means from the selected chain's final
    counts (no sample averaging).
    """
    config.validate()
    if corpus.doc_count == 0:
        raise ConfigError("corpus is empty")
    entries = config.n_topics * (len(corpus.vocab_a) + len(corpus.vocab_b))
    if entries > MAX_TOPIC_WORD_ENTRIES:
        raise CapacityError(
            f"topic-word matrices would need {entries} entries "
            f"(bound {MAX_TOPIC_WORD_ENTRIES}); lower n_topics or prune harder"
        )
    linked = select_linked(corpus, config.link_fraction, config.seed)
    best_state: PlmState | None = None
    best_ll = -np.inf
    for chain in range(config.chains):
        rng = np.random.default_rng([config.seed, 2, chain])
        state = initialize_state(corpus, config, rng, linked)
        for iteration in range(1, config.iterations + 1):
            run_sweep(state, rng, compiled=compiled)
            if config.optimize_interval > 0 and iteration % config.optimize_interval == 0:
                optimize_alpha(state)
        ll = joint_log_likelihood(state)
        if ll > best_ll:
            best_ll = ll
            best_state = state
    assert best_state is not None
    return _build_output(corpus, config, best_state, best_ll)


def _build_output(corpus: CorpusPair, config: PlmConfig, state: PlmState, ll: float) -> PlmOutput:
    alpha = state.alpha
    alpha_sum = alpha.sum()
    lengths = state.n_dk.sum(axis=1)
    theta_rows = (state.n_dk + alpha) / (lengths + alpha_sum)[:, None]
    theta = theta_rows[state.row_of]  # (n_docs, 2, K)
    phi_a = (state.n_kw_a + config.beta) / (
        state.n_k_a + state.n_kw_a.shape[1] * config.beta
    )[:, None]
    phi_b = (state.n_kw_b + config.beta) / (
        state.n_k_b + state.n_kw_b.shape[1] * config.beta
    )[:, None]
    output = PlmOutput(
        topics=[],
        theta=theta,
        phi_a=phi_a,
        phi_b=phi_b,
        alpha=alpha.copy(),
        log_likelihood=ll,
        config=config,
        language_a=corpus.language_a,
        language_b=corpus.language_b,
        vocab_a=corpus.vocab_a,
        vocab_b=corpus.vocab_b,
    )
    default_c = min(10, len(corpus.vocab_a), len(corpus.vocab_b))
    output.topics = topics_from_output(output, default_c)
    return output


def export_topics(output: PlmOutput, path, cardinality: int) -> list[MultilingualTopic]:
    """Write the topic file with top-`cardinality` words per language per topic."""
    topics = topics_from_output(output, cardinality)
    write_topics(topics, path)
    return topics


def write_theta_tsv(output: PlmOutput, path, header: Sequence[str] = ()) -> None:
    """Document-topic rows as TSV: doc-id column is `<pair>:<side>`; linked
    pairs repeat their shared distribution on both rows. Optional header
    lines are written as `#` comments."""
    lines = list(header)
    n_docs = output.theta.shape[0]
    for d in range(n_docs):
        for s, side in enumerate(("a", "b")):
            probs = "\t".join(f"{p:.10g}" for p in output.theta[d, s])
            lines.append(f"{d}:{side}\t{probs}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_theta_tsv(path) -> dict[str, np.ndarray]:
    """Inverse of `write_theta_tsv`: doc-id string -> distribution."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        out[parts[0]] = np.array([float(x) for x in parts[1:]])
    return out


def save_phi_cache(output: PlmOutput, path) -> None:
    header = json.dumps(
        {
            "version": PHI_CACHE_VERSION,
            "language_a": output.language_a,
            "language_b": output.language_b,
        }
    )
    np.savez_compressed(
        path,
        header=np.array(header),
        phi_a=output.phi_a,
        phi_b=output.phi_b,
        alpha=output.alpha,
        tokens_a=np.array(list(output.vocab_a), dtype=str),
        tokens_b=np.array(list(output.vocab_b), dtype=str),
    )
