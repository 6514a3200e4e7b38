"""Text ingestion and the sparse bag-of-words corpus format.

A corpus is stored on disk as three files in one directory:

* ``vocab.txt``    one term per line, line number = term id (0-based)
* ``corpus.txt``   one line per document: ``N id:count,id:count,...``
                   where N is the number of unique terms in the document
* ``manifest.json`` document id order plus the ids dropped as empty

All files are UTF-8 with LF newlines and are written deterministically.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from . import porter

MANIFEST_FORMAT = "topicforge-corpus v1"

_TOKEN_RE = re.compile(r"[a-z]+")
_HEADER_LINE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9-]*:")
_ENTRY_RE = re.compile(r"(\d+):(\d+)\Z")


class ParseError(ValueError):
    """Malformed sparse corpus line or corpus file."""


@dataclass(frozen=True)
class RawDocument:
    """A source file before preprocessing: id is the filename, body the text."""

    id: str
    body: str


@dataclass
class Vocabulary:
    """Bijection between terms and dense 0-based term ids, in insertion order."""

    terms: list[str] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "Vocabulary":
        vocab = cls()
        for term in terms:
            vocab.add(term)
        return vocab

    def add(self, term: str) -> int:
        """Return the id of ``term``, inserting it on first sight."""
        tid = self.index.get(term)
        if tid is None:
            tid = len(self.terms)
            self.terms.append(term)
            self.index[term] = tid
        return tid

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


@dataclass
class Document:
    """One document as (term-id, count) entries with strictly ascending ids."""

    id: str
    entries: list[tuple[int, int]]

    @property
    def length(self) -> int:
        """Token count N_d (sum of entry counts)."""
        return sum(count for _, count in self.entries)

    def validate(self) -> None:
        if not self.entries:
            raise ValueError(f"document {self.id!r} has no entries")
        prev = -1
        for tid, count in self.entries:
            if tid <= prev:
                raise ValueError(
                    f"document {self.id!r}: term ids not strictly ascending"
                )
            if count < 1:
                raise ValueError(f"document {self.id!r}: count {count} < 1")
            prev = tid


@dataclass
class Corpus:
    vocabulary: Vocabulary
    documents: list[Document]

    @property
    def num_docs(self) -> int:
        return len(self.documents)

    @property
    def num_tokens(self) -> int:
        return sum(doc.length for doc in self.documents)

    def validate(self) -> None:
        if not self.documents:
            raise ValueError("corpus has no documents")
        vocab_size = len(self.vocabulary)
        for doc in self.documents:
            doc.validate()
            if doc.entries and doc.entries[-1][0] >= vocab_size:
                raise ValueError(
                    f"document {doc.id!r} references term id outside vocabulary"
                )


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword list (one term per line, '#' comments); bundled list by default."""
    if path is None:
        text = (
            resources.files("topicforge").joinpath("data/stopwords_en.txt").read_text(
                encoding="utf-8"
            )
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def strip_header_block(body: str) -> str:
    """Drop a leading header block (``Name: value`` lines up to the first blank line)."""
    lines = body.split("\n")
    if not lines or not _HEADER_LINE_RE.match(lines[0]):
        return body
    for i, line in enumerate(lines):
        if line.strip() == "":
            return "\n".join(lines[i + 1 :])
    return ""


def ingest(
    directory: str | Path, strip_headers: bool = False
) -> tuple[list[RawDocument], list[tuple[str, str]]]:
    """Read every regular file in ``directory``, sorted by filename.

    Returns the documents plus a list of (filename, message) pairs for files
    that could not be read; unreadable files do not abort the batch. Invalid
    UTF-8 bytes are replaced with U+FFFD.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    paths = sorted((p for p in directory.iterdir() if p.is_file()), key=lambda p: p.name)
    if not paths:
        raise ValueError(f"no regular files in directory: {directory}")
    documents: list[RawDocument] = []
    errors: list[tuple[str, str]] = []
    for path in paths:
        try:
            body = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            errors.append((path.name, str(exc)))
            continue
        if strip_headers:
            body = strip_header_block(body)
        documents.append(RawDocument(id=path.name, body=body))
    return documents, errors


def preprocess(doc: RawDocument | str, stopwords: frozenset[str]) -> list[str]:
    """Turn raw text into stemmed tokens.

    Fixed pipeline: lowercase, split on maximal ASCII letter runs, drop
    tokens shorter than two letters, drop stopwords (on surface forms),
    then stem. Deterministic and locale independent.
    """
    text = doc.body if isinstance(doc, RawDocument) else doc
    out = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if len(tok) < 2 or tok in stopwords:
            continue
        out.append(porter.stem(tok))
    return out


def preprocess_all(
    docs: Sequence[RawDocument],
    stopwords: frozenset[str],
    workers: int = 1,
) -> list[tuple[str, list[str]]]:
    """Preprocess a batch of documents, optionally with a worker pool.

    Per-document preprocessing is pure, so results are identical for any
    worker count; order follows the input order.
    """
    if workers <= 1 or len(docs) <= 1:
        return [(doc.id, preprocess(doc, stopwords)) for doc in docs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        token_lists = list(pool.map(lambda d: preprocess(d, stopwords), docs))
    return [(doc.id, tokens) for doc, tokens in zip(docs, token_lists)]


def build_corpus(
    token_lists: Sequence[tuple[str, Sequence[str]]],
) -> tuple[Corpus, list[str]]:
    """Assemble a corpus from (doc-id, tokens) pairs.

    The vocabulary is built in first-occurrence order over the pairs as
    given. Documents left with zero tokens are dropped and their ids
    returned as the second element.
    """
    vocab = Vocabulary()
    documents: list[Document] = []
    dropped: list[str] = []
    for doc_id, tokens in token_lists:
        if not tokens:
            dropped.append(doc_id)
            continue
        counts: dict[int, int] = {}
        for tok in tokens:
            tid = vocab.add(tok)
            counts[tid] = counts.get(tid, 0) + 1
        entries = sorted(counts.items())
        documents.append(Document(id=doc_id, entries=entries))
    if not documents:
        raise ValueError("all documents empty after preprocessing")
    return Corpus(vocabulary=vocab, documents=documents), dropped


def encode_sparse(doc: Document) -> str:
    """Render a document as ``N id:count,id:count,...``."""
    doc.validate()
    body = ",".join(f"{tid}:{count}" for tid, count in doc.entries)
    return f"{len(doc.entries)} {body}"


def decode_sparse(
    line: str, doc_id: str | None = None, line_number: int | None = None
) -> Document:
    """Parse one sparse line; raises ParseError on any malformed input."""

    def fail(message: str) -> ParseError:
        where = f" (line {line_number})" if line_number is not None else ""
        return ParseError(f"{message}{where}: {line!r}")

    head, sep, rest = line.partition(" ")
    if not sep or not rest:
        raise fail("expected 'N id:count,...'")
    if not head.isdigit():
        raise fail(f"bad unique-term count {head!r}")
    n = int(head)
    if n < 1:
        raise fail("unique-term count must be >= 1")
    entries: list[tuple[int, int]] = []
    prev = -1
    for part in rest.split(","):
        m = _ENTRY_RE.match(part)
        if m is None:
            raise fail(f"bad entry {part!r}")
        tid, count = int(m.group(1)), int(m.group(2))
        if count < 1:
            raise fail(f"count must be >= 1 in entry {part!r}")
        if tid <= prev:
            raise fail("term ids not strictly ascending")
        entries.append((tid, count))
        prev = tid
    if len(entries) != n:
        raise fail(f"declared {n} entries, found {len(entries)}")
    if doc_id is None:
        doc_id = f"doc-{line_number}" if line_number is not None else "doc"
    return Document(id=doc_id, entries=entries)


def corpus_tokens(corpus: Corpus) -> list[str]:
    """Flatten a corpus back to term strings (document order, counts expanded)."""
    terms = corpus.vocabulary.terms
    out: list[str] = []
    for doc in corpus.documents:
        for tid, count in doc.entries:
            out.extend([terms[tid]] * count)
    return out


def save_corpus(
    corpus: Corpus, out_dir: str | Path, dropped: Sequence[str] = ()
) -> None:
    """Write vocab.txt, corpus.txt and manifest.json into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "vocab.txt", "w", encoding="utf-8", newline="\n") as fh:
        for term in corpus.vocabulary.terms:
            fh.write(term + "\n")
    with open(out_dir / "corpus.txt", "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            fh.write(encode_sparse(doc) + "\n")
    manifest = {
        "format": MANIFEST_FORMAT,
        "documents": [doc.id for doc in corpus.documents],
        "dropped": list(dropped),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_corpus_dir(path: str | Path) -> Path:
    path = Path(path)
    if path.is_file():
        return path.parent
    return path


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus from its directory (or from the corpus.txt path inside it)."""
    root = _resolve_corpus_dir(path)
    vocab_path = root / "vocab.txt"
    corpus_path = root / "corpus.txt"
    if not corpus_path.is_file() or not vocab_path.is_file():
        raise FileNotFoundError(f"no corpus.txt/vocab.txt under {root}")
    terms = vocab_path.read_text(encoding="utf-8").splitlines()
    vocab = Vocabulary.from_terms(terms)
    if len(vocab) != len(terms):
        raise ParseError(f"duplicate terms in {vocab_path}")

    doc_ids: list[str] | None = None
    manifest_path = root / "manifest.json"
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        doc_ids = list(manifest.get("documents", []))

    documents: list[Document] = []
    with open(corpus_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id = None
            if doc_ids is not None:
                if len(documents) >= len(doc_ids):
                    raise ParseError(
                        f"{corpus_path}: more documents than manifest lists"
                    )
                doc_id = doc_ids[len(documents)]
            documents.append(decode_sparse(line, doc_id=doc_id, line_number=lineno))
    if doc_ids is not None and len(documents) != len(doc_ids):
        raise ParseError(f"{corpus_path}: fewer documents than manifest lists")
    corpus = Corpus(vocabulary=vocab, documents=documents)
    corpus.validate()
    return corpus
