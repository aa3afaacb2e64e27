import numpy as np
import pytest

from polytopic.corpus import corpus_from_token_lists, load_topics
from polytopic.errors import CapacityError, ConfigError
from polytopic.plm import (
    PlmConfig,
    PlmState,
    _sweep_kernel,
    _sweep_reference,
    export_topics,
    initialize_state,
    joint_log_likelihood,
    optimize_alpha,
    read_theta_tsv,
    run_sweep,
    select_linked,
    topic_conditional_weights,
    topics_from_output,
    train,
    write_theta_tsv,
)
from polytopic import synthetic


def small_corpus(n_docs=6, seed=5):
    rng = np.random.default_rng(seed)
    vocab_a = [f"a{i}" for i in range(7)]
    vocab_b = [f"b{i}" for i in range(7)]
    docs_a = [
        [vocab_a[j] for j in rng.integers(0, 7, size=rng.integers(2, 6))]
        for _ in range(n_docs)
    ]
    docs_b = [
        [vocab_b[j] for j in rng.integers(0, 7, size=rng.integers(2, 6))]
        for _ in range(n_docs)
    ]
    return corpus_from_token_lists(docs_a, docs_b)


def state_with_counts(n_dk, alpha):
    """Bare state carrying given document-topic counts, for prior updates."""
    n_dk = np.asarray(n_dk, dtype=np.int32)
    k = n_dk.shape[1]
    empty = np.zeros(0, dtype=np.int32)
    return PlmState(
        n_topics=k,
        beta=0.01,
        token_word=empty,
        token_lang=np.zeros(0, dtype=np.int8),
        token_row=empty,
        token_topic=empty,
        n_dk=n_dk,
        n_kw_a=np.zeros((k, 1), dtype=np.int32),
        n_kw_b=np.zeros((k, 1), dtype=np.int32),
        n_k_a=np.zeros(k, dtype=np.int32),
        n_k_b=np.zeros(k, dtype=np.int32),
        alpha=np.asarray(alpha, dtype=np.float64),
        row_of=np.zeros((n_dk.shape[0], 2), dtype=np.int32),
        linked=np.ones(n_dk.shape[0], dtype=bool),
    )


class TestConditionalWeights:
    def test_hand_computed_example(self):
        weights = topic_conditional_weights(
            n_dk_row=np.array([2.0, 0.0]),
            n_kw_col=np.array([1.0, 0.0]),
            n_k=np.array([3.0, 0.0]),
            alpha=np.array([0.1, 0.1]),
            beta=0.01,
            vocab_size=2,
        )
        assert weights[0] == pytest.approx(2.1 * (1.01 / 3.02))
        assert weights[1] == pytest.approx(0.05)


class TestSweep:
    def test_kernel_matches_reference_bitwise(self):
        corpus = small_corpus()
        config = PlmConfig(n_topics=3, iterations=1, chains=1, optimize_interval=0, seed=3)
        rng = np.random.default_rng(3)
        state_c = initialize_state(corpus, config, np.random.default_rng(1))
        state_p = initialize_state(corpus, config, np.random.default_rng(1))
        for _ in range(4):
            uniforms = rng.random(state_c.token_word.shape[0])
            args_c = (
                state_c.token_word, state_c.token_lang, state_c.token_row,
                state_c.token_topic, state_c.n_dk, state_c.n_kw_a, state_c.n_kw_b,
                state_c.n_k_a, state_c.n_k_b, state_c.alpha, state_c.beta, uniforms,
            )
            args_p = (
                state_p.token_word, state_p.token_lang, state_p.token_row,
                state_p.token_topic, state_p.n_dk, state_p.n_kw_a, state_p.n_kw_b,
                state_p.n_k_a, state_p.n_k_b, state_p.alpha, state_p.beta, uniforms,
            )
            _sweep_kernel(*args_c)
            _sweep_reference(*args_p)
            assert np.array_equal(state_c.token_topic, state_p.token_topic)
            assert np.array_equal(state_c.n_dk, state_p.n_dk)
            assert np.array_equal(state_c.n_kw_a, state_p.n_kw_a)
            assert np.array_equal(state_c.n_kw_b, state_p.n_kw_b)

    def test_counts_consistent_after_sweeps(self):
        corpus = small_corpus(n_docs=10)
        config = PlmConfig(
            n_topics=4, iterations=1, chains=1, optimize_interval=0,
            link_fraction=0.5, seed=2,
        )
        rng = np.random.default_rng([2, 2, 0])
        state = initialize_state(corpus, config, rng)
        for _ in range(10):
            run_sweep(state, rng)
            state.check_consistency()

    def test_unlinked_pairs_become_two_documents(self):
        corpus = small_corpus()
        config = PlmConfig(n_topics=2, link_fraction=0.0, seed=0)
        state = initialize_state(corpus, config, np.random.default_rng(0))
        assert state.n_rows == 2 * corpus.doc_count
        config_full = PlmConfig(n_topics=2, link_fraction=1.0, seed=0)
        state_full = initialize_state(corpus, config_full, np.random.default_rng(0))
        assert state_full.n_rows == corpus.doc_count

    def test_no_links_equals_monolingual_sampler(self):
        """With no document links the pair sampler restricted to one language
        is exactly an independent monolingual collapsed sampler."""
        corpus = small_corpus()
        config = PlmConfig(n_topics=3, link_fraction=0.0, seed=4, chains=1, optimize_interval=0)
        state = initialize_state(corpus, config, np.random.default_rng(44))
        a_mask = np.asarray(state.token_lang == 0)

        # independent monolingual sampler over the side-A tokens only
        mono = initialize_state(corpus, config, np.random.default_rng(44))
        keep = np.where(a_mask)[0]
        mono.token_word = mono.token_word[keep]
        mono.token_lang = mono.token_lang[keep]
        mono.token_row = mono.token_row[keep]
        mono.token_topic = mono.token_topic[keep]
        n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b = mono.recount()
        mono.n_dk, mono.n_kw_a, mono.n_kw_b = n_dk, n_kw_a, n_kw_b
        mono.n_k_a, mono.n_k_b = n_k_a.astype(np.int32), n_k_b.astype(np.int32)

        rng = np.random.default_rng(7)
        for _ in range(5):
            uniforms = rng.random(state.token_word.shape[0])
            _sweep_reference(
                state.token_word, state.token_lang, state.token_row,
                state.token_topic, state.n_dk, state.n_kw_a, state.n_kw_b,
                state.n_k_a, state.n_k_b, state.alpha, state.beta, uniforms,
            )
            _sweep_reference(
                mono.token_word, mono.token_lang, mono.token_row,
                mono.token_topic, mono.n_dk, mono.n_kw_a, mono.n_kw_b,
                mono.n_k_a, mono.n_k_b, mono.alpha, mono.beta, uniforms[a_mask],
            )
        assert np.array_equal(state.token_topic[a_mask], mono.token_topic)
        assert np.array_equal(state.n_kw_a, mono.n_kw_a)
        assert np.array_equal(state.n_k_a, mono.n_k_a)

    def test_document_permutation_relabels_counts(self):
        corpus = small_corpus(n_docs=8)
        permutation = [3, 1, 7, 0, 5, 2, 6, 4]
        from polytopic.corpus import subsample_corpus

        permuted = subsample_corpus(corpus, permutation)
        config = PlmConfig(n_topics=3, link_fraction=1.0, seed=0)
        state = initialize_state(corpus, config, np.random.default_rng(1))
        state_p = initialize_state(permuted, config, np.random.default_rng(2))
        # copy assignments document by document through the permutation
        cursor = {}
        for t, row in enumerate(state.token_row):
            cursor.setdefault(int(row), []).append(t)
        cursor_p = {}
        for t, row in enumerate(state_p.token_row):
            cursor_p.setdefault(int(row), []).append(t)
        for new_row, old_row in enumerate(permutation):
            for t_new, t_old in zip(cursor_p[new_row], cursor[old_row]):
                state_p.token_topic[t_new] = state.token_topic[t_old]
        n_dk, n_kw_a, n_kw_b, n_k_a, n_k_b = state.recount()
        n_dk_p, n_kw_a_p, n_kw_b_p, _, _ = state_p.recount()
        assert np.array_equal(n_kw_a, n_kw_a_p)
        assert np.array_equal(n_kw_b, n_kw_b_p)
        assert np.array_equal(n_dk[permutation], n_dk_p)


class TestLinkSelection:
    def test_fraction_counts(self):
        corpus = small_corpus(n_docs=10)
        assert select_linked(corpus, 0.0, 1).sum() == 0
        assert select_linked(corpus, 1.0, 1).sum() == 10
        assert select_linked(corpus, 0.4, 1).sum() == 4

    def test_seeded_and_deterministic(self):
        corpus = small_corpus(n_docs=10)
        mask1 = select_linked(corpus, 0.5, 9)
        mask2 = select_linked(corpus, 0.5, 9)
        assert np.array_equal(mask1, mask2)


class TestTrain:
    def test_single_topic_degenerates(self):
        corpus = small_corpus()
        output = train(corpus, PlmConfig(n_topics=1, iterations=3, chains=1, optimize_interval=0))
        assert np.allclose(output.theta[:, :, 0], 1.0)

    def test_distributions_normalized(self):
        corpus = small_corpus(n_docs=8)
        output = train(
            corpus,
            PlmConfig(n_topics=3, iterations=10, chains=2, optimize_interval=5, seed=1),
        )
        assert np.allclose(output.theta.sum(axis=2), 1.0, atol=1e-9)
        assert np.allclose(output.phi_a.sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(output.phi_b.sum(axis=1), 1.0, atol=1e-9)

    def test_deterministic_under_seed(self):
        corpus = small_corpus(n_docs=8)
        config = PlmConfig(n_topics=3, iterations=8, chains=2, optimize_interval=4, seed=11)
        out1 = train(corpus, config)
        out2 = train(corpus, config)
        assert np.array_equal(out1.theta, out2.theta)
        assert np.array_equal(out1.phi_a, out2.phi_a)
        assert out1.topics == out2.topics
        assert out1.log_likelihood == out2.log_likelihood

    def test_large_beta_flattens_topics(self):
        corpus = small_corpus(n_docs=8)
        output = train(
            corpus,
            PlmConfig(n_topics=2, beta=1e6, iterations=5, chains=1, optimize_interval=0),
        )
        v_a = output.phi_a.shape[1]
        assert np.all(np.abs(output.phi_a - 1.0 / v_a) < 0.1 / v_a)

    def test_linked_sides_share_theta(self):
        corpus = small_corpus()
        output = train(
            corpus,
            PlmConfig(n_topics=3, iterations=5, chains=1, optimize_interval=0, link_fraction=1.0),
        )
        assert np.array_equal(output.theta[:, 0, :], output.theta[:, 1, :])

    def test_capacity_bound(self):
        corpus = small_corpus()
        with pytest.raises(CapacityError):
            train(corpus, PlmConfig(n_topics=30_000_000, iterations=1, chains=1))

    def test_invalid_config(self):
        corpus = small_corpus()
        with pytest.raises(ConfigError):
            train(corpus, PlmConfig(n_topics=0))
        with pytest.raises(ConfigError):
            train(corpus, PlmConfig(n_topics=2, link_fraction=1.5))


class TestOptimizeAlpha:
    def test_converged_update_is_fixed_point(self):
        rng = np.random.default_rng(0)
        n_dk = rng.integers(0, 6, size=(30, 3)).astype(np.int32)
        state = state_with_counts(n_dk, np.array([0.5, 0.5, 0.5]))
        first = optimize_alpha(state).copy()
        second = optimize_alpha(state)
        assert np.max(np.abs(second - first)) < 1e-6

    def test_identical_proportional_histograms_converge_and_stay(self):
        # every document has the same histogram, proportional to alpha
        n_dk = np.tile(np.array([[2, 4, 6]], dtype=np.int32), (20, 1))
        state = state_with_counts(n_dk, np.array([1.0, 2.0, 3.0]))
        first = optimize_alpha(state).copy()
        second = optimize_alpha(state)
        assert np.max(np.abs(second - first)) < 1e-6

    def test_uniform_counts_stay_symmetric(self):
        n_dk = np.full((12, 4), 3, dtype=np.int32)
        state = state_with_counts(n_dk, np.full(4, 0.1))
        updated = optimize_alpha(state)
        assert np.allclose(updated, updated[0])

    def test_empty_single_document_is_guarded(self):
        state = state_with_counts(np.zeros((1, 3), dtype=np.int32), np.full(3, 0.1))
        updated = optimize_alpha(state)
        assert np.all(np.isfinite(updated))

    def test_clamped_range(self):
        n_dk = np.tile(np.array([[50, 0]], dtype=np.int32), (40, 1))
        state = state_with_counts(n_dk, np.array([0.1, 0.1]))
        updated = optimize_alpha(state)
        assert np.all(updated >= 1e-6) and np.all(updated <= 1e3)


class TestExport:
    def make_output(self, n_topics=20, iterations=4):
        world = synthetic.make_world(n_themes=5, n_modern=2, words_per_theme=12, seed=0)
        corpus = synthetic.make_training_corpus(world, 60, doc_length=10, seed=0)
        config = PlmConfig(
            n_topics=n_topics, iterations=iterations, chains=1, optimize_interval=0, seed=0
        )
        return train(corpus, config)

    def test_topic_file_shape(self, tmp_path):
        output = self.make_output()
        path = tmp_path / "topics.json"
        topics = export_topics(output, path, 10)
        assert len(topics) == 20
        loaded = load_topics(path)
        assert len(loaded) == 20
        assert all(t.cardinality == 10 for t in loaded)
        assert all(len(set(t.words_a)) == 10 for t in loaded)

    def test_cardinality_one(self, tmp_path):
        output = self.make_output(n_topics=3)
        topics = export_topics(output, tmp_path / "t.json", 1)
        for k, topic in enumerate(topics):
            best = np.flatnonzero(output.phi_a[k] == output.phi_a[k].max()).min()
            assert topic.words_a == (output.vocab_a.token_of(int(best)),)

    def test_cardinality_sweep_exports(self, tmp_path):
        output = self.make_output(n_topics=4)
        for c in (10, 20, 30, 40, 50):
            path = tmp_path / f"topics_{c}.json"
            export_topics(output, path, c)
            loaded = load_topics(path)
            assert all(t.cardinality == c for t in loaded)

    def test_cardinality_exceeding_vocabulary(self, tmp_path):
        output = self.make_output(n_topics=2)
        with pytest.raises(ValueError):
            export_topics(output, tmp_path / "t.json", 1000)

    def test_ties_broken_by_vocabulary_id(self):
        output = self.make_output(n_topics=2, iterations=1)
        # force an exact tie on the two smallest ids
        output.phi_a[0, :] = 1.0 / output.phi_a.shape[1]
        topics = topics_from_output(output, 2)
        assert topics[0].words_a == (
            output.vocab_a.token_of(0),
            output.vocab_a.token_of(1),
        )

    def test_theta_tsv_round_trip(self, tmp_path):
        output = self.make_output(n_topics=3)
        path = tmp_path / "theta.tsv"
        write_theta_tsv(output, path)
        table = read_theta_tsv(path)
        assert set(table) == {
            f"{d}:{s}" for d in range(output.theta.shape[0]) for s in ("a", "b")
        }
        assert table["0:a"] == pytest.approx(output.theta[0, 0], abs=1e-9)


class TestLogLikelihood:
    def test_prefers_structured_assignments(self):
        world = synthetic.make_world(n_themes=2, n_modern=0, words_per_theme=8, seed=1)
        corpus = synthetic.make_reference_corpus(world, 40, doc_length=8, noise=0.0, seed=1)
        config = PlmConfig(n_topics=2, iterations=40, chains=1, optimize_interval=0, seed=0)
        trained_state = initialize_state(corpus, config, np.random.default_rng([0, 2, 0]))
        rng = np.random.default_rng([0, 2, 0])
        for _ in range(40):
            run_sweep(trained_state, rng)
        random_state = initialize_state(corpus, config, np.random.default_rng([0, 2, 0]))
        assert joint_log_likelihood(trained_state) > joint_log_likelihood(random_state)
