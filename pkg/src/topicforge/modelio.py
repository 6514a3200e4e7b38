"""On-disk formats for trained models and chain traces.

The model file is a versioned plain-text format: a header of hyperparams
and dimensions, the vocabulary, the document ids, then phi and psi as
row-major tables of decimal floats printed with 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import ParseError
from .gibbs import ChainTrace, Hyperparams, LdaModel

MODEL_FORMAT = "topicforge-model v1"
TRACE_HEADER = "chain_id,iteration,log_likelihood"


def save_model(model: LdaModel, path: str | Path) -> None:
    hp = model.hyperparams
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MODEL_FORMAT + "\n")
        fh.write(f"topics {hp.topics}\n")
        fh.write(f"alpha {hp.alpha:.17g}\n")
        fh.write(f"chi {hp.chi:.17g}\n")
        fh.write(f"iterations {hp.iterations}\n")
        fh.write(f"burn_in {hp.burn_in}\n")
        fh.write(f"seed {hp.seed}\n")
        fh.write(f"documents {model.num_docs}\n")
        fh.write(f"vocabulary {model.vocab_size}\n")
        fh.write("terms\n")
        for term in model.terms:
            fh.write(term + "\n")
        fh.write("doc_ids\n")
        for doc_id in model.doc_ids:
            fh.write(doc_id + "\n")
        fh.write("phi\n")
        for row in model.phi:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        fh.write("psi\n")
        for row in model.psi:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_model(path: str | Path) -> LdaModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MODEL_FORMAT:
        raise ParseError(f"{path}: not a {MODEL_FORMAT} file")

    fields: dict[str, str] = {}
    i = 1
    while i < len(lines) and lines[i] != "terms":
        key, sep, value = lines[i].partition(" ")
        if not sep:
            raise ParseError(f"{path}: bad header line {i + 1}: {lines[i]!r}")
        fields[key] = value
        i += 1
    try:
        hp = Hyperparams(
            topics=int(fields["topics"]),
            alpha=float(fields["alpha"]),
            chi=float(fields["chi"]),
            iterations=int(fields["iterations"]),
            burn_in=int(fields["burn_in"]),
            seed=int(fields["seed"]),
        )
        num_docs = int(fields["documents"])
        vocab_size = int(fields["vocabulary"])
    except KeyError as exc:
        raise ParseError(f"{path}: missing header field {exc}") from None
    except ValueError as exc:
        raise ParseError(f"{path}: bad header value ({exc})") from None

    def expect(marker: str, at: int) -> int:
        if at >= len(lines) or lines[at] != marker:
            raise ParseError(f"{path}: expected {marker!r} section at line {at + 1}")
        return at + 1

    def read_block(start: int, count: int) -> tuple[list[str], int]:
        if start + count > len(lines):
            raise ParseError(f"{path}: truncated file")
        return lines[start : start + count], start + count

    def read_matrix(start: int, rows: int, cols: int) -> tuple[np.ndarray, int]:
        raw, end = read_block(start, rows)
        data = np.empty((rows, cols), dtype=np.float64)
        for r, line in enumerate(raw):
            parts = line.split()
            if len(parts) != cols:
                raise ParseError(
                    f"{path}: row at line {start + r + 1} has {len(parts)} "
                    f"values, expected {cols}"
                )
            data[r] = [float(x) for x in parts]
        return data, end

    i = expect("terms", i)
    terms, i = read_block(i, vocab_size)
    i = expect("doc_ids", i)
    doc_ids, i = read_block(i, num_docs)
    i = expect("phi", i)
    phi, i = read_matrix(i, hp.topics, vocab_size)
    i = expect("psi", i)
    psi, i = read_matrix(i, num_docs, hp.topics)
    model = LdaModel(phi=phi, psi=psi, hyperparams=hp, terms=terms, doc_ids=doc_ids)
    model.validate()
    return model


def write_traces(traces: Sequence[ChainTrace], path: str | Path) -> None:
    """Write traces as CSV rows of chain_id,iteration,log_likelihood."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER + "\n")
        for trace in traces:
            for it, ll in zip(trace.iterations, trace.log_likelihoods):
                fh.write(f"{trace.chain_id},{it},{ll:.17g}\n")


def read_traces(path: str | Path) -> list[ChainTrace]:
    traces: dict[int, ChainTrace] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise ParseError(f"{path}: unexpected trace header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError(f"{path}: line {lineno}: expected 3 columns")
            try:
                cid, it, ll = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: bad value") from None
            trace = traces.setdefault(cid, ChainTrace(chain_id=cid))
            trace.iterations.append(it)
            trace.log_likelihoods.append(ll)
    return [traces[cid] for cid in sorted(traces)]
