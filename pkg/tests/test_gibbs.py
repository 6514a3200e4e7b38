import math

import mpmath
import numpy as np
import pytest

import topicforge as tf
from topicforge import gibbs

from conftest import random_corpus


def set_assignments(state, assignments):
    """Overwrite z wholesale and retally the four tables."""
    state.z[:] = assignments
    n_wt, n_dt, n_t, n_d = state.recount_tables()
    state.n_wt[:] = n_wt
    state.n_dt[:] = n_dt
    state.n_t[:] = n_t
    state.n_d[:] = n_d


def make_corpus(entry_lists):
    vocab_size = 1 + max(tid for entries in entry_lists for tid, _ in entries)
    vocab = tf.Vocabulary.from_terms(f"term{v:02d}" for v in range(vocab_size))
    docs = [
        tf.Document(id=f"d{i}", entries=entries)
        for i, entries in enumerate(entry_lists)
    ]
    return tf.Corpus(vocabulary=vocab, documents=docs)


class TestHyperparams:
    def test_alpha_default_is_50_over_t(self):
        assert gibbs.Hyperparams(topics=5).alpha == 10.0
        assert gibbs.Hyperparams(topics=50).alpha == 1.0

    def test_explicit_alpha_kept(self):
        assert gibbs.Hyperparams(topics=5, alpha=0.7).alpha == 0.7

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(topics=0),
            dict(topics=2, alpha=0.0),
            dict(topics=2, alpha=-1.0),
            dict(topics=2, chi=0.0),
            dict(topics=2, iterations=0),
            dict(topics=2, burn_in=-1),
            dict(topics=2, iterations=10, burn_in=11),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            gibbs.Hyperparams(**kwargs)


class TestInitState:
    def test_single_topic_forced(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=1, iterations=1, burn_in=0, seed=9)
        state = gibbs.init_state(tiny_corpus, hp)
        assert np.all(state.z == 0)
        assert state.n_t[0] == tiny_corpus.num_tokens

    def test_same_seed_identical(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=3, iterations=1, burn_in=0, seed=4)
        a = gibbs.init_state(tiny_corpus, hp)
        b = gibbs.init_state(tiny_corpus, hp)
        assert np.array_equal(a.z, b.z)

    def test_tally_consistency_random_corpora(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            corpus = random_corpus(rng)
            hp = gibbs.Hyperparams(
                topics=int(rng.integers(1, 5)), iterations=1, burn_in=0, seed=trial
            )
            state = gibbs.init_state(corpus, hp)
            state.validate()
            assert state.n_t.sum() == corpus.num_tokens

    def test_empty_corpus_errors(self):
        corpus = tf.Corpus(vocabulary=tf.Vocabulary(), documents=[])
        hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0)
        with pytest.raises(ValueError):
            gibbs.init_state(corpus, hp)


class TestFullConditional:
    def test_hand_example(self):
        # two-term, two-topic configuration whose exclusive counts are
        # n_wt[v]=(2,0), n_t=(3,1), n_dt[d]=(1,1), n_d[d]=2 at chi=alpha=0.5;
        # the ratios work out to exactly (5/7, 2/7)
        corpus = make_corpus([[(0, 2), (1, 1)], [(0, 1), (1, 1)]])
        hp = gibbs.Hyperparams(
            topics=2, alpha=0.5, chi=0.5, iterations=1, burn_in=0, seed=0
        )
        state = gibbs.init_state(corpus, hp)
        set_assignments(state, [1, 0, 1, 0, 0])
        gibbs.decrement_token(state, 0)
        probs = gibbs.full_conditional(state, hp, 0, 0)
        assert abs(probs[0] - 5 / 7) < 1e-12
        assert abs(probs[1] - 2 / 7) < 1e-12

    def test_all_counts_zero_uniform(self):
        corpus = make_corpus([[(0, 1)]])
        hp = gibbs.Hyperparams(
            topics=3, alpha=0.5, chi=0.5, iterations=1, burn_in=0, seed=0
        )
        state = gibbs.init_state(corpus, hp)
        gibbs.decrement_token(state, 0)
        probs = gibbs.full_conditional(state, hp, 0, 0)
        assert np.all(np.abs(probs - 1 / 3) < 1e-12)

    def test_single_topic_degenerate(self):
        corpus = make_corpus([[(0, 2)]])
        hp = gibbs.Hyperparams(topics=1, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(corpus, hp)
        gibbs.decrement_token(state, 1)
        probs = gibbs.full_conditional(state, hp, 0, 1)
        assert probs.shape == (1,)
        assert probs[0] == 1.0

    def test_negative_count_detected(self):
        corpus = make_corpus([[(0, 1)]])
        hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(corpus, hp)
        gibbs.decrement_token(state, 0)
        gibbs.decrement_token(state, 0)
        with pytest.raises(ValueError, match="negative"):
            gibbs.full_conditional(state, hp, 0, 0)

    def test_out_of_range_indices(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(tiny_corpus, hp)
        with pytest.raises(ValueError):
            gibbs.full_conditional(state, hp, 5, 0)
        with pytest.raises(ValueError):
            gibbs.full_conditional(state, hp, 0, 99)

    def test_random_states_sum_to_one_and_nonnegative(self):
        rng = np.random.default_rng(12)
        for trial in range(50):
            corpus = random_corpus(rng)
            hp = gibbs.Hyperparams(
                topics=int(rng.integers(1, 6)),
                alpha=float(rng.uniform(0.05, 30.0)),
                chi=float(rng.uniform(0.005, 2.0)),
                iterations=1,
                burn_in=0,
                seed=trial,
            )
            state = gibbs.init_state(corpus, hp)
            pos = int(rng.integers(0, state.num_tokens))
            d = int(state.doc_of[pos])
            i = pos - int(state.doc_offsets[d])
            gibbs.decrement_token(state, pos)
            probs = gibbs.full_conditional(state, hp, d, i)
            assert abs(probs.sum() - 1.0) <= 1e-12
            assert np.all(probs > 0)


class TestSweep:
    def test_single_topic_state_unchanged(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=1, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(tiny_corpus, hp)
        before = state.z.copy()
        gibbs.sweep(state, hp)
        assert np.array_equal(state.z, before)
        state.validate()

    def test_token_conservation_and_tally_consistency(self):
        rng = np.random.default_rng(5)
        corpus = random_corpus(rng, max_docs=8, max_vocab=10)
        hp = gibbs.Hyperparams(topics=4, iterations=1, burn_in=0, seed=2)
        state = gibbs.init_state(corpus, hp)
        total = state.n_t.sum()
        for _ in range(25):
            gibbs.sweep(state, hp)
            assert state.n_t.sum() == total
        state.validate()

    def test_kernel_matches_reference_bitwise(self):
        rng = np.random.default_rng(77)
        for trial in range(3):
            corpus = random_corpus(rng, max_docs=5, max_vocab=7)
            hp = gibbs.Hyperparams(
                topics=3, alpha=1.5, chi=0.1, iterations=1, burn_in=0, seed=trial
            )
            fast = gibbs.init_state(corpus, hp)
            slow = gibbs.init_state(corpus, hp)
            for _ in range(60):
                gibbs.sweep(fast, hp)
                gibbs.sweep_reference(slow, hp)
            assert np.array_equal(fast.z, slow.z)
            assert np.array_equal(fast.n_wt, slow.n_wt)
            assert np.array_equal(fast.n_dt, slow.n_dt)

    def test_sweep_deterministic_by_seed(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0, seed=31)
        a = gibbs.init_state(tiny_corpus, hp)
        b = gibbs.init_state(tiny_corpus, hp)
        for _ in range(10):
            gibbs.sweep(a, hp)
            gibbs.sweep(b, hp)
        assert np.array_equal(a.z, b.z)


class TestLogLikelihood:
    def test_empty_topic_contributes_exactly_zero(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=3, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(tiny_corpus, hp)
        set_assignments(state, [0] * state.num_tokens)
        per_topic = gibbs.per_topic_log_likelihood(state, hp)
        assert per_topic[1] == 0.0
        assert per_topic[2] == 0.0

    def test_single_token_unit_chi_is_zero(self):
        corpus = make_corpus([[(0, 1)]])
        hp = gibbs.Hyperparams(topics=1, chi=1.0, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(corpus, hp)
        assert gibbs.log_likelihood(state, hp) == 0.0

    def test_matches_high_precision_formula(self):
        rng = np.random.default_rng(3)
        mpmath.mp.dps = 60
        for trial in range(10):
            corpus = random_corpus(rng)
            hp = gibbs.Hyperparams(
                topics=int(rng.integers(1, 5)),
                chi=float(rng.uniform(0.01, 2.0)),
                iterations=1,
                burn_in=0,
                seed=trial,
            )
            state = gibbs.init_state(corpus, hp)
            V = state.vocab_size
            chi = mpmath.mpf(repr(hp.chi))
            expected = mpmath.mpf(0)
            for j in range(hp.topics):
                expected += mpmath.loggamma(V * chi) - V * mpmath.loggamma(chi)
                for v in range(V):
                    expected += mpmath.loggamma(int(state.n_wt[v, j]) + chi)
                expected -= mpmath.loggamma(int(state.n_t[j]) + V * chi)
            got = gibbs.log_likelihood(state, hp)
            assert abs(got - float(expected)) < 1e-9


class TestEstimate:
    def test_psi_hand_example(self):
        # one 4-token document, both tokens' topics forced to the first of
        # two topics, alpha=25: psi row must be (29/54, 25/54)
        corpus = make_corpus([[(0, 3), (1, 1)]])
        hp = gibbs.Hyperparams(
            topics=2, alpha=25.0, chi=0.01, iterations=1, burn_in=0, seed=0
        )
        state = gibbs.init_state(corpus, hp)
        set_assignments(state, [0, 0, 0, 0])
        model = gibbs.estimate(
            state, hp, corpus.vocabulary.terms, [d.id for d in corpus.documents]
        )
        assert model.psi[0, 0] == 29.0 / 54.0
        assert model.psi[0, 1] == 25.0 / 54.0

    def test_empty_topic_phi_row_uniform(self):
        corpus = make_corpus([[(0, 2), (1, 2)]])
        hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0, seed=0)
        state = gibbs.init_state(corpus, hp)
        set_assignments(state, [0, 0, 0, 0])
        model = gibbs.estimate(state, hp, corpus.vocabulary.terms, ["d0"])
        assert np.all(model.phi[1] == 0.5)

    def test_rows_stochastic_on_random_states(self):
        rng = np.random.default_rng(8)
        for trial in range(30):
            corpus = random_corpus(rng)
            hp = gibbs.Hyperparams(
                topics=int(rng.integers(1, 6)),
                alpha=float(rng.uniform(0.05, 30.0)),
                chi=float(rng.uniform(0.005, 2.0)),
                iterations=1,
                burn_in=0,
                seed=trial,
            )
            state = gibbs.init_state(corpus, hp)
            gibbs.sweep(state, hp)
            model = gibbs.estimate(
                state, hp, corpus.vocabulary.terms, [d.id for d in corpus.documents]
            )
            assert np.max(np.abs(model.phi.sum(axis=1) - 1.0)) <= 1e-12
            assert np.max(np.abs(model.psi.sum(axis=1) - 1.0)) <= 1e-12
            assert np.all(model.phi > 0)
            assert np.all(model.psi > 0)


class TestTrain:
    def test_bitwise_deterministic(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=40, burn_in=20, seed=6)
        a = gibbs.train(tiny_corpus, hp)
        b = gibbs.train(tiny_corpus, hp)
        assert np.array_equal(a.model.phi, b.model.phi)
        assert np.array_equal(a.model.psi, b.model.psi)
        assert a.trace.iterations == b.trace.iterations
        assert a.trace.log_likelihoods == b.trace.log_likelihoods

    def test_trace_grid(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=25, burn_in=5, seed=1)
        result = gibbs.train(tiny_corpus, hp, trace_every=10)
        assert result.trace.iterations == [0, 10, 20, 25]

    def test_final_iteration_always_recorded(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=30, burn_in=5, seed=1)
        result = gibbs.train(tiny_corpus, hp, trace_every=10)
        assert result.trace.iterations == [0, 10, 20, 30]

    def test_invalid_trace_every(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=5, burn_in=0, seed=1)
        with pytest.raises(ValueError):
            gibbs.train(tiny_corpus, hp, trace_every=0)

    def test_averaged_estimates_still_stochastic(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=30, burn_in=10, seed=3)
        result = gibbs.train(tiny_corpus, hp, average_every=5)
        model = result.model
        assert np.max(np.abs(model.phi.sum(axis=1) - 1.0)) <= 1e-12
        assert np.max(np.abs(model.psi.sum(axis=1) - 1.0)) <= 1e-12

    def test_train_chains_seed_offsets(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=15, burn_in=5, seed=100)
        results = gibbs.train_chains(tiny_corpus, hp, chains=3)
        assert [r.trace.chain_id for r in results] == [0, 1, 2]
        assert [r.model.hyperparams.seed for r in results] == [100, 101, 102]
        solo = gibbs.train(
            tiny_corpus,
            gibbs.Hyperparams(topics=2, iterations=15, burn_in=5, seed=101),
        )
        assert np.array_equal(results[1].model.phi, solo.model.phi)

    def test_train_chains_parallel_matches_serial(self, tiny_corpus):
        hp = gibbs.Hyperparams(topics=2, iterations=15, burn_in=5, seed=50)
        serial = gibbs.train_chains(tiny_corpus, hp, chains=3, workers=1)
        threaded = gibbs.train_chains(tiny_corpus, hp, chains=3, workers=3)
        for a, b in zip(serial, threaded):
            assert np.array_equal(a.model.phi, b.model.phi)
            assert a.trace.log_likelihoods == b.trace.log_likelihoods


class TestConvergenceReport:
    def grid_trace(self, cid, values):
        iters = [10 * k for k in range(len(values))]
        return gibbs.ChainTrace(
            chain_id=cid, iterations=iters, log_likelihoods=list(values)
        )

    def test_identical_chains_spread_zero(self):
        a = self.grid_trace(0, [-50.0, -40.0, -30.0])
        b = self.grid_trace(1, [-50.0, -40.0, -30.0])
        report = gibbs.convergence_report([a, b], window=2)
        assert report.spreads == [0.0, 0.0, 0.0]
        assert report.rel_spreads == [0.0, 0.0, 0.0]
        assert report.converged_at == 0

    def test_crossing_iteration(self):
        a = self.grid_trace(0, [-200.0, -100.0, -100.0, -100.0])
        b = self.grid_trace(1, [-100.0, -100.0, -100.0, -100.0])
        report = gibbs.convergence_report([a, b], window=2, threshold=0.02)
        assert report.converged_at == 10

    def test_constant_offset_never_converges(self):
        a = self.grid_trace(0, [-100.0] * 6)
        b = self.grid_trace(1, [-103.0] * 6)
        report = gibbs.convergence_report([a, b], window=2, threshold=0.02)
        assert report.converged_at is None
        assert all(r > 0.02 for r in report.rel_spreads)

    def test_zero_mean_nonzero_spread_is_infinite(self):
        a = self.grid_trace(0, [1.0, 1.0])
        b = self.grid_trace(1, [-1.0, 1.0])
        report = gibbs.convergence_report([a, b], window=1, threshold=0.5)
        assert math.isinf(report.rel_spreads[0])
        assert report.converged_at == 10

    def test_requires_two_chains(self):
        a = self.grid_trace(0, [-1.0, -2.0])
        with pytest.raises(ValueError):
            gibbs.convergence_report([a], window=1)

    def test_mismatched_grids_rejected(self):
        a = self.grid_trace(0, [-1.0, -2.0])
        b = gibbs.ChainTrace(chain_id=1, iterations=[0, 5], log_likelihoods=[-1.0, -2.0])
        with pytest.raises(ValueError):
            gibbs.convergence_report([a, b], window=1)


class TestTopWords:
    def make_model(self, phi_rows, terms):
        phi = np.asarray(phi_rows, dtype=np.float64)
        T = phi.shape[0]
        psi = np.full((1, T), 1.0 / T)
        hp = gibbs.Hyperparams(topics=T, iterations=1, burn_in=0, seed=0)
        return gibbs.LdaModel(
            phi=phi, psi=psi, hyperparams=hp, terms=terms, doc_ids=["d0"]
        )

    def test_ordering_and_probabilities(self):
        model = self.make_model([[0.2, 0.5, 0.3]], ["aa", "bb", "cc"])
        assert gibbs.top_words(model, 0, 2) == [("bb", 0.5), ("cc", 0.3)]

    def test_ties_broken_by_ascending_term_id(self):
        model = self.make_model([[0.25, 0.25, 0.25, 0.25]], list("abcd"))
        assert [t for t, _ in gibbs.top_words(model, 0, 3)] == ["a", "b", "c"]

    def test_full_permutation(self):
        model = self.make_model([[0.1, 0.6, 0.3]], ["aa", "bb", "cc"])
        terms = [t for t, _ in gibbs.top_words(model, 0, 3)]
        assert sorted(terms) == ["aa", "bb", "cc"]

    def test_out_of_range_errors(self):
        model = self.make_model([[0.5, 0.5]], ["aa", "bb"])
        with pytest.raises(ValueError):
            gibbs.top_words(model, 1, 1)
        with pytest.raises(ValueError):
            gibbs.top_words(model, 0, 0)
        with pytest.raises(ValueError):
            gibbs.top_words(model, 0, 3)
