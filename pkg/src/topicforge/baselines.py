"""Unigram and TF-IDF comparison models.

The unigram model is a single multinomial over the vocabulary fit by
maximum likelihood; document log probability is the sum of per-token log
probabilities. TF-IDF weighs a term in a document by raw count times
ln(|D| / df(term)) and ranks a document's terms by that weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import Corpus, Document, ParseError


@dataclass
class UnigramModel:
    """Multinomial over term ids: p sums to 1, n holds the fitted counts."""

    p: np.ndarray
    n: np.ndarray

    @classmethod
    def fit(cls, corpus: Corpus) -> "UnigramModel":
        n = np.zeros(len(corpus.vocabulary), dtype=np.int64)
        for doc in corpus.documents:
            for tid, count in doc.entries:
                n[tid] += count
        total = int(n.sum())
        if total < 1:
            raise ValueError("cannot fit a unigram model on zero tokens")
        return cls(p=n / total, n=n)


def _iter_counts(
    target: Document | Corpus | Iterable[tuple[int, int]],
) -> Iterable[tuple[int, int]]:
    if isinstance(target, Corpus):
        for doc in target.documents:
            yield from doc.entries
    elif isinstance(target, Document):
        yield from target.entries
    else:
        yield from target


def unigram_log_prob(
    model: UnigramModel,
    target: Document | Corpus | Iterable[tuple[int, int]],
) -> float:
    """ln of the product of p[term]^count over the target's counts.

    An empty target has probability 1, hence 0.0. A present term with
    p = 0 makes the product vanish: returns -inf and warns rather than
    raising, so corpus-level scans survive unseen terms.
    """
    total = 0.0
    for tid, count in _iter_counts(target):
        p = float(model.p[tid])
        if p == 0.0:
            warnings.warn(
                f"term id {tid} has zero probability; log probability is -inf",
                RuntimeWarning,
                stacklevel=2,
            )
            return float("-inf")
        total += count * math.log(p)
    return total


@dataclass
class TfidfTable:
    """Per-document (term-id, weight) rows plus the document-frequency vector.

    Rows keep every term that occurs in the document, including weight-0
    entries for terms present in all documents; ranking filters those.
    """

    weights: list[list[tuple[int, float]]]
    df: np.ndarray
    doc_ids: list[str]
    terms: list[str]

    def doc_index(self, doc: int | str) -> int:
        if isinstance(doc, str):
            try:
                return self.doc_ids.index(doc)
            except ValueError:
                raise KeyError(f"unknown document id {doc!r}") from None
        if doc < 0 or doc >= len(self.weights):
            raise KeyError(f"document index {doc} out of range")
        return doc


def fit_tfidf(corpus: Corpus) -> TfidfTable:
    """Weight every (document, present term) pair by tf * ln(|D|/df).

    tf is the raw in-document count. Terms the corpus vocabulary lists
    but no document contains (possible for synthetic corpora with fixed
    vocabularies) keep df = 0; they never receive a weight.
    """
    D = corpus.num_docs
    V = len(corpus.vocabulary)
    df = np.zeros(V, dtype=np.int64)
    for doc in corpus.documents:
        for tid, _ in doc.entries:
            df[tid] += 1
    # scalar math.log keeps weights bit-identical to a direct per-entry
    # evaluation of count * ln(D/df), which the oracle tests rely on
    idf = np.zeros(V, dtype=np.float64)
    for tid in np.nonzero(df > 0)[0]:
        idf[tid] = math.log(D / df[tid])
    weights = [
        [(tid, count * idf[tid]) for tid, count in doc.entries]
        for doc in corpus.documents
    ]
    return TfidfTable(
        weights=weights,
        df=df,
        doc_ids=[doc.id for doc in corpus.documents],
        terms=list(corpus.vocabulary.terms),
    )


def tfidf_top_terms(
    table: TfidfTable, doc: int | str, k: int
) -> list[tuple[str, float]]:
    """Top-k terms of one document by weight descending, ties by ascending id.

    Zero-weight terms are excluded, so the list may be shorter than k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    d = table.doc_index(doc)
    nonzero = [(tid, w) for tid, w in table.weights[d] if w > 0.0]
    nonzero.sort(key=lambda tw: (-tw[1], tw[0]))
    return [(table.terms[tid], w) for tid, w in nonzero[:k]]


def write_tfidf_tsv(
    table: TfidfTable, top_k: int, path: str | Path
) -> None:
    """Write per-document rankings as TSV: doc_id, rank, term, weight."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("doc_id\trank\tterm\tweight\n")
        for doc_id in table.doc_ids:
            for rank, (term, weight) in enumerate(
                tfidf_top_terms(table, doc_id, top_k), start=1
            ):
                fh.write(f"{doc_id}\t{rank}\t{term}\t{weight:.17g}\n")


def read_tfidf_tsv(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    """Read rankings written by write_tfidf_tsv; doc -> [(term, weight)] by rank."""
    rankings: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != "doc_id\trank\tterm\tweight":
            raise ParseError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(f"{path}: line {lineno}: expected 4 columns")
            doc_id, rank_s, term, weight_s = parts
            ranked = rankings.setdefault(doc_id, [])
            try:
                rank = int(rank_s)
                weight = float(weight_s)
            except ValueError:
                raise ParseError(
                    f"{path}: line {lineno}: bad rank or weight"
                ) from None
            if rank != len(ranked) + 1:
                raise ParseError(
                    f"{path}: line {lineno}: rank {rank} out of sequence"
                )
            ranked.append((term, weight))
    return rankings


def unigram_log_prob_per_doc(
    model: UnigramModel, corpus: Corpus
) -> list[tuple[str, float]]:
    """Convenience scan: (doc id, ln p) for every document."""
    return [
        (doc.id, unigram_log_prob(model, doc)) for doc in corpus.documents
    ]


__all__ = [
    "UnigramModel",
    "unigram_log_prob",
    "unigram_log_prob_per_doc",
    "TfidfTable",
    "fit_tfidf",
    "tfidf_top_terms",
    "write_tfidf_tsv",
    "read_tfidf_tsv",
]
