import numpy as np
import pytest

import topicforge as tf
from topicforge import gibbs, synth

# One line per acceptance criterion, echoed after the run so the verdicts
# survive pytest's stdout capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Compile the sweep kernel once so per-test timings stay honest."""
    vocab = tf.Vocabulary.from_terms(["aa", "bb"])
    docs = [tf.Document(id="d0", entries=[(0, 1), (1, 1)])]
    corpus = tf.Corpus(vocabulary=vocab, documents=docs)
    hp = gibbs.Hyperparams(topics=2, iterations=1, burn_in=0, seed=0)
    gibbs.sweep(gibbs.init_state(corpus, hp), hp)


@pytest.fixture(scope="session")
def tiny_corpus():
    """2 docs over 2 terms, 4 tokens total: the enumeration-sized case."""
    vocab = tf.Vocabulary.from_terms(["apple", "berry"])
    docs = [
        tf.Document(id="d0", entries=[(0, 2), (1, 1)]),
        tf.Document(id="d1", entries=[(1, 1)]),
    ]
    return tf.Corpus(vocabulary=vocab, documents=docs)


@pytest.fixture(scope="session")
def planted_synth():
    """The acceptance-scale synthetic corpus with planted topics."""
    cfg = synth.SynthConfig(topics=5, docs=200, doc_len=50, vocab_size=500, seed=42)
    return synth.generate(cfg)


def random_corpus(rng: np.random.Generator, max_docs=6, max_vocab=8, max_count=4):
    """Small random corpus for property tests; every term occurs somewhere."""
    vocab_size = int(rng.integers(2, max_vocab + 1))
    num_docs = int(rng.integers(1, max_docs + 1))
    terms = [f"t{v:03d}x" for v in range(vocab_size)]
    docs = []
    for d in range(num_docs):
        present = rng.random(vocab_size) < 0.6
        if not present.any():
            present[int(rng.integers(0, vocab_size))] = True
        entries = [
            (v, int(rng.integers(1, max_count + 1)))
            for v in np.nonzero(present)[0]
        ]
        docs.append(tf.Document(id=f"d{d}", entries=entries))
    # make sure no term has corpus count zero (build_corpus-style corpora)
    seen = set()
    for doc in docs:
        seen.update(tid for tid, _ in doc.entries)
    missing = [v for v in range(vocab_size) if v not in seen]
    for v in missing:
        entries = dict(docs[0].entries)
        entries[v] = 1
        docs[0].entries = sorted(entries.items())
    corpus = tf.Corpus(vocabulary=tf.Vocabulary.from_terms(terms), documents=docs)
    corpus.validate()
    return corpus
