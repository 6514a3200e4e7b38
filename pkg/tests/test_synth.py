import numpy as np
import pytest

import topicforge as tf
from topicforge import synth


class TestConfig:
    def test_defaults_valid(self):
        cfg = synth.SynthConfig()
        assert cfg.topics == 5 and cfg.vocab_size == 500

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(topics=0),
            dict(docs=0),
            dict(doc_len=0),
            dict(topics=10, vocab_size=5),
            dict(doc_topic_alpha=0.0),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            synth.SynthConfig(**kwargs)


class TestPlantedPhi:
    def test_rows_stochastic_and_disjoint(self):
        cfg = synth.SynthConfig(topics=4, docs=10, doc_len=10, vocab_size=21, seed=0)
        phi = synth.planted_phi(cfg)
        assert phi.shape == (4, 21)
        assert np.allclose(phi.sum(axis=1), 1.0, atol=1e-12)
        support = phi > 0
        # blocks are disjoint: each column belongs to exactly one topic
        assert np.all(support.sum(axis=0) == 1)
        # remainder columns fold into the last block
        assert support[3].sum() == 21 - 3 * 5

    def test_zipf_profile_within_block(self):
        cfg = synth.SynthConfig(topics=2, docs=10, doc_len=10, vocab_size=10, seed=0)
        phi = synth.planted_phi(cfg)
        block = phi[0, :5]
        ratios = block[0] / block
        assert np.allclose(ratios, [1, 2, 3, 4, 5])


class TestGenerate:
    def test_deterministic_by_seed(self):
        cfg = synth.SynthConfig(topics=3, docs=12, doc_len=8, vocab_size=30, seed=5)
        a, b = synth.generate(cfg), synth.generate(cfg)
        assert [d.entries for d in a.corpus.documents] == [
            d.entries for d in b.corpus.documents
        ]
        assert np.array_equal(a.theta, b.theta)

    def test_different_seeds_differ(self):
        cfg5 = synth.SynthConfig(topics=3, docs=12, doc_len=8, vocab_size=30, seed=5)
        cfg6 = synth.SynthConfig(topics=3, docs=12, doc_len=8, vocab_size=30, seed=6)
        a, b = synth.generate(cfg5), synth.generate(cfg6)
        assert [d.entries for d in a.corpus.documents] != [
            d.entries for d in b.corpus.documents
        ]

    def test_shapes_and_token_budget(self):
        cfg = synth.SynthConfig(topics=3, docs=12, doc_len=8, vocab_size=30, seed=1)
        result = synth.generate(cfg)
        assert result.corpus.num_docs == 12
        assert all(d.length == 8 for d in result.corpus.documents)
        assert len(result.corpus.vocabulary) == 30
        assert result.phi.shape == (3, 30)
        assert result.theta.shape == (12, 3)
        result.corpus.validate()

    def test_terms_survive_preprocessing_unchanged(self):
        stopwords = tf.load_stopwords()
        cfg = synth.SynthConfig(topics=2, docs=4, doc_len=6, vocab_size=25, seed=2)
        result = synth.generate(cfg)
        for term in result.corpus.vocabulary.terms:
            assert tf.preprocess(term, stopwords) == [term]

    def test_term_names_stable(self):
        assert synth.term_name(0, 4) == "wbbbb"
        assert synth.term_name(42, 4) == "wbbgd"
        assert synth.term_name(499, 4) == "wbgnn"


class TestPlantedFile:
    def test_round_trip(self, tmp_path):
        cfg = synth.SynthConfig(topics=3, docs=7, doc_len=5, vocab_size=18, seed=9)
        result = synth.generate(cfg)
        path = tmp_path / "planted.txt"
        synth.save_planted(result, path)
        loaded_cfg, phi, theta = synth.load_planted(path)
        assert loaded_cfg == cfg
        assert np.array_equal(phi, result.phi)
        assert np.array_equal(theta, result.theta)

    def test_bad_format_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not-planted v0\n", encoding="utf-8")
        with pytest.raises(tf.ParseError):
            synth.load_planted(path)

    def test_truncated_rejected(self, tmp_path):
        cfg = synth.SynthConfig(topics=2, docs=4, doc_len=5, vocab_size=10, seed=3)
        result = synth.generate(cfg)
        path = tmp_path / "planted.txt"
        synth.save_planted(result, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        path.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
        with pytest.raises(tf.ParseError):
            synth.load_planted(path)
