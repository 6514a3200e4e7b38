"""Target-list precision for topic models and TF-IDF rankings.

A document counts as correct when its extracted term set shares at least
one term with the target list; precision is n_correct / n_total. Target
lists are prefixes of a fixed ordered "correct list" so growing the
prefix can only add match opportunities, which makes precision
non-decreasing in the prefix length.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import corpus as corpus_mod
from .baselines import TfidfTable, tfidf_top_terms
from .gibbs import LdaModel, top_words


@dataclass
class TargetList:
    """Ordered correct list; size-g target lists are its first g entries.

    Entries live in preprocessed token space (lowercased, stemmed) so they
    compare against model terms directly. ``dropped`` records raw entries
    that preprocessing erased (stopwords, too short).
    """

    entries: list[str]
    dropped: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def prefix(self, g: int) -> frozenset[str]:
        if g < 1 or g > len(self.entries):
            raise ValueError(
                f"prefix length {g} outside [1, {len(self.entries)}]"
            )
        return frozenset(self.entries[:g])

    @classmethod
    def from_raw(
        cls, raw_entries: Iterable[str], stopwords: frozenset[str]
    ) -> "TargetList":
        """Preprocess raw entries into the model token space.

        Each raw entry runs through the standard pipeline (it may yield
        several tokens, kept in order). Duplicates keep their first
        position; entries that vanish are dropped with a warning.
        """
        entries: list[str] = []
        seen: set[str] = set()
        dropped: list[str] = []
        for raw in raw_entries:
            tokens = corpus_mod.preprocess(raw, stopwords)
            if not tokens:
                if raw.strip():
                    dropped.append(raw.strip())
                continue
            for tok in tokens:
                if tok not in seen:
                    seen.add(tok)
                    entries.append(tok)
        if dropped:
            warnings.warn(
                "target entries vanished in preprocessing: "
                + ", ".join(repr(r) for r in dropped),
                RuntimeWarning,
                stacklevel=2,
            )
        return cls(entries=entries, dropped=dropped)

    @classmethod
    def from_file(
        cls, path: str | Path, stopwords: frozenset[str]
    ) -> "TargetList":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        raw = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
        return cls.from_raw(raw, stopwords)


@dataclass(frozen=True)
class EvalRow:
    model: str
    tw: int
    tg: int
    n_correct: int
    n_total: int
    precision: float


@dataclass
class EvalReport:
    rows: list[EvalRow]

    def to_csv(self) -> str:
        lines = ["model,tw,tg,n_correct,n_total,precision"]
        for r in self.rows:
            lines.append(
                f"{r.model},{r.tw},{r.tg},{r.n_correct},{r.n_total},{r.precision:.17g}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def precision(
    term_sets: Sequence[frozenset[str] | set[str]], targets: frozenset[str]
) -> tuple[int, int, float]:
    """(n_correct, n_total, n_correct/n_total) over per-document term sets."""
    n_total = len(term_sets)
    if n_total < 1:
        raise ValueError("precision needs at least one document term set")
    n_correct = sum(1 for s in term_sets if s & targets)
    return n_correct, n_total, n_correct / n_total


def doc_topic_words_lda(
    model: LdaModel, d: int | str, tw: int, m: int = 1
) -> frozenset[str]:
    """Union of the top-tw word lists of document d's m dominant topics.

    Dominant topics are ranked by the document's psi row, ties broken by
    ascending topic index.
    """
    if isinstance(d, str):
        try:
            d = model.doc_ids.index(d)
        except ValueError:
            raise KeyError(f"unknown document id {d!r}") from None
    if d < 0 or d >= model.num_docs:
        raise KeyError(f"document index {d} out of range")
    if m < 1 or m > model.num_topics:
        raise ValueError(f"m must be in [1, {model.num_topics}], got {m}")
    row = model.psi[d]
    order = sorted(range(model.num_topics), key=lambda j: (-row[j], j))
    out: set[str] = set()
    for j in order[:m]:
        out.update(term for term, _ in top_words(model, j, tw))
    return frozenset(out)


def lda_term_sets(model: LdaModel, tw: int, m: int = 1) -> list[frozenset[str]]:
    return [doc_topic_words_lda(model, d, tw, m) for d in range(model.num_docs)]


def tfidf_term_sets(
    rankings: TfidfTable | Mapping[str, Sequence[tuple[str, float]]],
    doc_ids: Sequence[str],
    tw: int,
) -> list[frozenset[str]]:
    """Per-document top-tw TF-IDF terms, from a fitted table or loaded rankings.

    A ranking file carries no rows for a document whose weights are all
    zero, so with a plain mapping an absent doc id means an empty term
    set, not an error.
    """
    sets = []
    for doc_id in doc_ids:
        if isinstance(rankings, TfidfTable):
            ranked = tfidf_top_terms(rankings, doc_id, tw)
        else:
            ranked = rankings.get(doc_id, [])[:tw]
        sets.append(frozenset(term for term, _ in ranked))
    return sets


def sweep_report(
    model: LdaModel,
    tfidf: TfidfTable | Mapping[str, Sequence[tuple[str, float]]],
    targets: TargetList,
    tw_values: Sequence[int],
    tg_values: Sequence[int],
    m: int = 1,
) -> EvalReport:
    """Precision grid over topic-word-list and target-list sizes.

    Rows come out model-major ("lda" then "tfidf"), then by tw ascending,
    then tg ascending. Every tg must fit within the target list.
    """
    tw_values = sorted(set(tw_values))
    tg_values = sorted(set(tg_values))
    if not tw_values or not tg_values:
        raise ValueError("need at least one tw and one tg value")
    if tw_values[0] < 1:
        raise ValueError(f"tw values must be >= 1, got {tw_values[0]}")
    if tg_values[0] < 1 or tg_values[-1] > len(targets):
        raise ValueError(
            f"tg values must lie in [1, {len(targets)}] "
            f"(target list has {len(targets)} usable entries)"
        )
    rows: list[EvalRow] = []
    for model_name in ("lda", "tfidf"):
        for tw in tw_values:
            if model_name == "lda":
                term_sets = lda_term_sets(model, tw, m)
            else:
                term_sets = tfidf_term_sets(tfidf, model.doc_ids, tw)
            for tg in tg_values:
                n_correct, n_total, prec = precision(term_sets, targets.prefix(tg))
                rows.append(
                    EvalRow(
                        model=model_name,
                        tw=tw,
                        tg=tg,
                        n_correct=n_correct,
                        n_total=n_total,
                        precision=prec,
                    )
                )
    return EvalReport(rows=rows)
