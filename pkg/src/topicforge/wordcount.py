"""Shard-parallel word counting with a map and a reduce phase.

The token stream is split into contiguous shards. Each mapper emits one
(token, 1) pair per token; the reducer folds pairs into counts and partial
counts are merged in shard order. The merged result is equal to a single
serial count for every shard number, which the tests enforce; parallelism
only changes wall-clock time.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence


@dataclass(frozen=True)
class Shard:
    shard_id: int
    tokens: Sequence[str]


@dataclass
class WordcountReport:
    """Wall-clock timings (seconds) for one parallel_wordcount run."""

    num_shards: int
    num_tokens: int
    map_seconds: float
    reduce_seconds: float
    total_seconds: float
    shard_sizes: list[int] = field(default_factory=list)


def make_shards(tokens: Sequence[str], num_shards: int) -> list[Shard]:
    """Split tokens into ``num_shards`` contiguous, near-equal shards.

    Sizes differ by at most one; empty shards are allowed when there are
    fewer tokens than shards.
    """
    if num_shards < 1:
        raise ValueError(f"num_shards must be >= 1, got {num_shards}")
    n = len(tokens)
    base, extra = divmod(n, num_shards)
    shards = []
    start = 0
    for i in range(num_shards):
        size = base + (1 if i < extra else 0)
        shards.append(Shard(shard_id=i, tokens=tokens[start : start + size]))
        start += size
    return shards


def map_phase(shard: Shard) -> list[tuple[str, int]]:
    """Emit one (token, 1) pair per token, in stream order."""
    return [(tok, 1) for tok in shard.tokens]


def reduce_phase(pairs: Sequence[tuple[str, int]]) -> Counter:
    counts: Counter = Counter()
    for token, k in pairs:
        counts[token] += k
    return counts


def merge_counts(partials: Sequence[Counter]) -> Counter:
    merged: Counter = Counter()
    for partial in partials:
        merged.update(partial)
    return merged


def serial_wordcount(tokens: Sequence[str]) -> Counter:
    """Reference single-pass count used to cross-check the sharded path."""
    return Counter(tokens)


def parallel_wordcount(
    tokens: Sequence[str], num_shards: int, workers: int | None = None
) -> tuple[Counter, WordcountReport]:
    """Count tokens via sharded map/reduce; returns (counts, timing report).

    ``workers`` caps the mapper pool (default: one per shard). Counts are
    independent of both shard number and worker count.
    """
    t0 = time.perf_counter()
    shards = make_shards(tokens, num_shards)
    if num_shards == 1:
        pair_lists = [map_phase(shards[0])]
    else:
        pool_size = min(num_shards, workers) if workers else num_shards
        with ThreadPoolExecutor(max_workers=pool_size) as pool:
            pair_lists = list(pool.map(map_phase, shards))
    t1 = time.perf_counter()
    partials = [reduce_phase(pairs) for pairs in pair_lists]
    merged = merge_counts(partials)
    t2 = time.perf_counter()
    report = WordcountReport(
        num_shards=num_shards,
        num_tokens=len(tokens),
        map_seconds=t1 - t0,
        reduce_seconds=t2 - t1,
        total_seconds=t2 - t0,
        shard_sizes=[len(s.tokens) for s in shards],
    )
    return merged, report


def format_counts_tsv(counts: Counter) -> str:
    """Render counts as TSV lines sorted by count descending, then token ascending."""
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return "".join(f"{token}\t{count}\n" for token, count in rows)
