"""Synthetic corpora with planted topics, for recovery and convergence tests.

The generator plants T topics over a fixed vocabulary: it is split into T
contiguous disjoint blocks and each topic puts a 1/rank (Zipf-like)
profile on its own block only. Document topic mixtures are Dirichlet
draws, tokens are sampled topic-then-term. The planted phi/theta matrices
are returned next to the corpus so learned models can be scored against
ground truth.

Term strings are "w" plus the term id's digits transliterated to
consonants (w=0 -> "wbbbb" at width 4), which keeps them lowercase,
letter-only, vowel-free and unstemmable: every synthetic term passes
through the text preprocessing pipeline unchanged, so target lists built
from them survive evaluation.

Because the vocabulary is fixed up front, a generated corpus may list
terms that no document ended up containing (rare tail events).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document, ParseError, Vocabulary

PLANTED_FORMAT = "topicforge-planted v1"

# digit -> consonant map for synthetic term names; no vowels, no s/l/y, so
# no stemmer rule can fire and no token is short or a stopword
_DIGIT_LETTERS = "bcdfghjkmn"


def term_name(v: int, width: int) -> str:
    digits = f"{v:0{width}d}"
    return "w" + "".join(_DIGIT_LETTERS[int(ch)] for ch in digits)


@dataclass(frozen=True)
class SynthConfig:
    topics: int = 5
    docs: int = 200
    doc_len: int = 50
    vocab_size: int = 500
    seed: int = 0
    doc_topic_alpha: float = 0.3

    def __post_init__(self):
        if self.topics < 1:
            raise ValueError(f"topics must be >= 1, got {self.topics}")
        if self.docs < 1:
            raise ValueError(f"docs must be >= 1, got {self.docs}")
        if self.doc_len < 1:
            raise ValueError(f"doc_len must be >= 1, got {self.doc_len}")
        if self.vocab_size < self.topics:
            raise ValueError(
                f"vocab_size ({self.vocab_size}) must be >= topics ({self.topics})"
            )
        if not self.doc_topic_alpha > 0:
            raise ValueError(
                f"doc_topic_alpha must be > 0, got {self.doc_topic_alpha}"
            )


@dataclass
class SynthResult:
    corpus: Corpus
    phi: np.ndarray
    theta: np.ndarray
    config: SynthConfig


def planted_phi(config: SynthConfig) -> np.ndarray:
    """The T x V planted topic-term matrix (disjoint blocks, 1/rank profile)."""
    T, V = config.topics, config.vocab_size
    phi = np.zeros((T, V), dtype=np.float64)
    block = V // T
    for j in range(T):
        start = j * block
        stop = V if j == T - 1 else (j + 1) * block
        ranks = np.arange(1, stop - start + 1, dtype=np.float64)
        weights = 1.0 / ranks
        phi[j, start:stop] = weights / weights.sum()
    return phi


def generate(config: SynthConfig) -> SynthResult:
    """Sample a corpus from the planted model, deterministically by seed."""
    rng = np.random.default_rng(config.seed)
    T, V, D, L = config.topics, config.vocab_size, config.docs, config.doc_len
    phi = planted_phi(config)
    theta = rng.dirichlet(np.full(T, config.doc_topic_alpha), size=D)
    pad = max(4, len(str(V - 1)))
    vocab = Vocabulary.from_terms(term_name(v, pad) for v in range(V))
    id_pad = max(5, len(str(D - 1)))
    documents = []
    for d in range(D):
        topics = rng.choice(T, size=L, p=theta[d])
        terms = np.empty(L, dtype=np.int64)
        for j in np.unique(topics):
            mask = topics == j
            terms[mask] = rng.choice(V, size=int(mask.sum()), p=phi[j])
        tids, counts = np.unique(terms, return_counts=True)
        entries = [(int(t), int(c)) for t, c in zip(tids, counts)]
        documents.append(Document(id=f"doc-{d:0{id_pad}d}", entries=entries))
    corpus = Corpus(vocabulary=vocab, documents=documents)
    corpus.validate()
    return SynthResult(corpus=corpus, phi=phi, theta=theta, config=config)


def save_planted(result: SynthResult, path: str | Path) -> None:
    """Write the planted matrices with enough precision to round-trip."""
    cfg = result.config
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PLANTED_FORMAT + "\n")
        fh.write(f"topics {cfg.topics}\n")
        fh.write(f"docs {cfg.docs}\n")
        fh.write(f"doc_len {cfg.doc_len}\n")
        fh.write(f"vocab_size {cfg.vocab_size}\n")
        fh.write(f"seed {cfg.seed}\n")
        fh.write(f"doc_topic_alpha {cfg.doc_topic_alpha:.17g}\n")
        fh.write("phi\n")
        for row in result.phi:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        fh.write("theta\n")
        for row in result.theta:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_planted(path: str | Path) -> tuple[SynthConfig, np.ndarray, np.ndarray]:
    """Read back (config, phi, theta) written by save_planted."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != PLANTED_FORMAT:
        raise ParseError(f"{path}: not a {PLANTED_FORMAT} file")
    fields: dict[str, str] = {}
    i = 1
    while i < len(lines) and lines[i] != "phi":
        key, _, value = lines[i].partition(" ")
        fields[key] = value
        i += 1
    try:
        cfg = SynthConfig(
            topics=int(fields["topics"]),
            docs=int(fields["docs"]),
            doc_len=int(fields["doc_len"]),
            vocab_size=int(fields["vocab_size"]),
            seed=int(fields["seed"]),
            doc_topic_alpha=float(fields["doc_topic_alpha"]),
        )
    except KeyError as exc:
        raise ParseError(f"{path}: missing field {exc}") from None
    def read_matrix(start: int, rows: int) -> tuple[np.ndarray, int]:
        if start + rows > len(lines):
            raise ParseError(f"{path}: truncated matrix section")
        data = [
            np.array([float(x) for x in lines[start + r].split()])
            for r in range(rows)
        ]
        return np.vstack(data), start + rows

    if i >= len(lines) or lines[i] != "phi":
        raise ParseError(f"{path}: missing phi section")
    phi, i = read_matrix(i + 1, cfg.topics)
    if i >= len(lines) or lines[i] != "theta":
        raise ParseError(f"{path}: missing theta section")
    theta, i = read_matrix(i + 1, cfg.docs)
    if phi.shape != (cfg.topics, cfg.vocab_size) or theta.shape != (
        cfg.docs,
        cfg.topics,
    ):
        raise ParseError(f"{path}: matrix shapes disagree with header")
    return cfg, phi, theta
