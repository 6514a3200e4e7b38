"""Command-line entry point.

Exit codes: 0 success, 1 usage error (bad flags), 2 data error (unreadable
or malformed inputs). All progress and timing chatter goes to stderr;
output files and stdout payloads are byte-deterministic given the same
inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import baselines, corpus as corpus_mod, evaluation, gibbs, modelio, synth
from . import wordcount as wc
from .corpus import ParseError


class UsageError(Exception):
    """Bad flag combination detected after parsing; maps to exit 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems by default; this CLI reserves 2
    # for data errors, so route parser failures to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_int_list(text: str, flag: str) -> list[int]:
    """Parse '5,10,15' or '1..15' into a sorted list of positive ints."""
    text = text.strip()
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                raise ValueError
            values = list(range(lo, hi + 1))
        else:
            values = [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(
            f"{flag} expects comma-separated integers or 'a..b', got {text!r}"
        ) from None
    if not values or min(values) < 1:
        raise UsageError(f"{flag} values must be >= 1")
    return sorted(set(values))


def _load_corpus_or_textdir(
    path_s: str, stopwords_path: str | None, strip_headers: bool, workers: int
) -> tuple[corpus_mod.Corpus, list[str]]:
    """Resolve --input: an existing corpus, or a directory of raw text files."""
    path = Path(path_s)
    if path.is_file() or (path / "corpus.txt").is_file():
        return corpus_mod.load_corpus(path), []
    stopwords = corpus_mod.load_stopwords(stopwords_path)
    docs, read_errors = corpus_mod.ingest(path, strip_headers=strip_headers)
    for name, message in read_errors:
        print(f"warning: skipped {name}: {message}", file=sys.stderr)
    token_lists = corpus_mod.preprocess_all(docs, stopwords, workers=workers)
    built, dropped = corpus_mod.build_corpus(token_lists)
    return built, dropped


def _cmd_preprocess(args) -> int:
    stopwords = corpus_mod.load_stopwords(args.stopwords)
    docs, read_errors = corpus_mod.ingest(args.input, strip_headers=args.strip_headers)
    for name, message in read_errors:
        print(f"warning: skipped {name}: {message}", file=sys.stderr)
    token_lists = corpus_mod.preprocess_all(docs, stopwords, workers=args.workers)
    built, dropped = corpus_mod.build_corpus(token_lists)
    corpus_mod.save_corpus(built, args.out, dropped=dropped)
    print(
        f"preprocess: {built.num_docs} documents kept, {len(dropped)} dropped, "
        f"|V|={len(built.vocabulary)}, {built.num_tokens} tokens -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_wordcount(args) -> int:
    if args.shards < 1:
        raise UsageError("--shards must be >= 1")
    built, _ = _load_corpus_or_textdir(
        args.input, args.stopwords, args.strip_headers, args.workers
    )
    tokens = corpus_mod.corpus_tokens(built)
    counts, report = wc.parallel_wordcount(tokens, args.shards, workers=args.workers)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(wc.format_counts_tsv(counts))
    print(
        f"wordcount: {report.num_tokens} tokens, {report.num_shards} shards, "
        f"map {report.map_seconds:.4f}s, reduce {report.reduce_seconds:.4f}s, "
        f"total {report.total_seconds:.4f}s -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_synth(args) -> int:
    config = synth.SynthConfig(
        topics=args.topics,
        docs=args.docs,
        doc_len=args.doc_len,
        vocab_size=args.vocab,
        seed=args.seed,
        doc_topic_alpha=args.doc_topic_alpha,
    )
    result = synth.generate(config)
    corpus_mod.save_corpus(result.corpus, args.out)
    planted_path = args.planted or str(Path(args.out) / "planted.txt")
    synth.save_planted(result, planted_path)
    print(
        f"synth: {config.docs} docs x {config.doc_len} tokens, "
        f"T={config.topics}, |V|={config.vocab_size} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_train(args) -> int:
    if args.chains < 1:
        raise UsageError("--chains must be >= 1")
    if args.trace_every < 1:
        raise UsageError("--trace-every must be >= 1")
    if args.average_every < 0:
        raise UsageError("--average-every must be >= 0")
    try:
        hp = gibbs.Hyperparams(
            topics=args.topics,
            alpha=args.alpha,
            chi=args.chi,
            iterations=args.iters,
            burn_in=args.burn_in,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    built = corpus_mod.load_corpus(args.corpus)
    t0 = time.perf_counter()
    results = gibbs.train_chains(
        built,
        hp,
        chains=args.chains,
        trace_every=args.trace_every,
        average_every=args.average_every,
        workers=args.workers,
    )
    elapsed = time.perf_counter() - t0
    modelio.save_model(results[0].model, args.out)
    trace_path = args.trace or f"{args.out}.trace.csv"
    modelio.write_traces([r.trace for r in results], trace_path)
    final_ll = results[0].trace.log_likelihoods[-1]
    print(
        f"train: {args.chains} chain(s) x {hp.iterations} sweeps on "
        f"{built.num_docs} docs ({built.num_tokens} tokens) in {elapsed:.2f}s, "
        f"final ln P(w|z) = {final_ll:.4f} -> {args.out}",
        file=sys.stderr,
    )
    if args.chains > 1:
        report = gibbs.convergence_report(
            [r.trace for r in results], window=args.window
        )
        where = (
            f"iteration {report.converged_at}"
            if report.converged_at is not None
            else "not reached"
        )
        print(
            f"train: cross-chain rel spread < {report.threshold:g} "
            f"for {report.window} records: {where}",
            file=sys.stderr,
        )
    return 0


def _cmd_topics(args) -> int:
    if args.top_k < 1:
        raise UsageError("--top-k must be >= 1")
    model = modelio.load_model(args.model)
    k = min(args.top_k, model.vocab_size)
    lines = []
    for j in range(model.num_topics):
        for rank, (term, prob) in enumerate(gibbs.top_words(model, j, k), start=1):
            lines.append(f"{j}\t{rank}\t{term}\t{prob:.17g}")
    payload = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_tfidf(args) -> int:
    if args.top_k < 1:
        raise UsageError("--top-k must be >= 1")
    built = corpus_mod.load_corpus(args.corpus)
    table = baselines.fit_tfidf(built)
    baselines.write_tfidf_tsv(table, args.top_k, args.out)
    print(
        f"tfidf: {built.num_docs} documents, top-{args.top_k} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_eval(args) -> int:
    tw_values = _parse_int_list(args.tw, "--tw")
    tg_values = _parse_int_list(args.tg, "--tg")
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    model = modelio.load_model(args.model)
    rankings = baselines.read_tfidf_tsv(args.tfidf)
    stopwords = corpus_mod.load_stopwords(args.stopwords)
    targets = evaluation.TargetList.from_file(args.targets, stopwords)
    if not targets.entries:
        raise ValueError(f"{args.targets}: no usable target entries")
    if tg_values[-1] > len(targets):
        raise ValueError(
            f"--tg max {tg_values[-1]} exceeds target list size {len(targets)}"
        )
    if args.m > model.num_topics:
        raise ValueError(
            f"--m {args.m} exceeds the model's {model.num_topics} topics"
        )
    report = evaluation.sweep_report(
        model, rankings, targets, tw_values, tg_values, m=args.m
    )
    report.write_csv(args.out)
    print(
        f"eval: {len(report.rows)} rows over |TW| in {tw_values} and "
        f"|TG| in [{tg_values[0]}, {tg_values[-1]}] -> {args.out}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="topicforge",
        description=(
            "Corpus preprocessing, map-reduce word counts, collapsed Gibbs "
            "LDA, TF-IDF, and target-list precision evaluation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("preprocess", help="turn a directory of text files into a corpus")
    p.add_argument("--input", required=True, help="directory of UTF-8 text files")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--stopwords", default=None, help="stopword list (default: bundled)")
    p.add_argument("--strip-headers", action="store_true",
                   help="drop a leading 'Name: value' header block per file")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("wordcount", help="shard-parallel word count")
    p.add_argument("--shards", type=int, required=True)
    p.add_argument("--input", required=True,
                   help="corpus directory/file, or a directory of raw text files")
    p.add_argument("--out", required=True, help="output TSV path")
    p.add_argument("--stopwords", default=None)
    p.add_argument("--strip-headers", action="store_true")
    p.add_argument("--workers", type=int, default=0,
                   help="mapper threads (default: one per shard)")
    p.set_defaults(func=_cmd_wordcount)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted topics")
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--doc-len", type=int, required=True)
    p.add_argument("--vocab", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--doc-topic-alpha", type=float, default=0.3)
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--planted", default=None,
                   help="planted-model path (default: <out>/planted.txt)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train LDA by collapsed Gibbs sampling")
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None,
                   help="document-topic smoothing (default: 50/topics)")
    p.add_argument("--chi", type=float, default=gibbs.DEFAULT_CHI)
    p.add_argument("--iters", type=int, default=gibbs.DEFAULT_ITERATIONS)
    p.add_argument("--burn-in", type=int, default=gibbs.DEFAULT_BURN_IN)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1,
                   help="independent chains; chain i uses seed+i, model from chain 0")
    p.add_argument("--trace-every", type=int, default=gibbs.DEFAULT_TRACE_EVERY)
    p.add_argument("--average-every", type=int, default=0,
                   help="average estimates every N post-burn-in sweeps (0: final state)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--trace", default=None,
                   help="trace CSV path (default: <out>.trace.csv)")
    p.add_argument("--window", type=int, default=5,
                   help="records required below threshold in the convergence note")
    p.add_argument("--workers", type=int, default=1, help="concurrent chains")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("topics", help="print a model's top words per topic")
    p.add_argument("--model", required=True)
    p.add_argument("--top-k", type=int, default=15)
    p.add_argument("--out", default=None, help="write TSV here instead of stdout")
    p.set_defaults(func=_cmd_topics)

    p = sub.add_parser("tfidf", help="rank each document's terms by tf-idf")
    p.add_argument("--corpus", required=True)
    p.add_argument("--top-k", type=int, required=True)
    p.add_argument("--out", required=True, help="output TSV path")
    p.set_defaults(func=_cmd_tfidf)

    p = sub.add_parser("eval", help="target-list precision sweep for LDA and TF-IDF")
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument("--tfidf", required=True, help="tf-idf rankings TSV")
    p.add_argument("--targets", required=True, help="correct list, one entry per line")
    p.add_argument("--tw", default="5,10,15", help="topic-word-list sizes, e.g. 5,10,15")
    p.add_argument("--tg", default="1..15", help="target-list sizes, e.g. 1..15")
    p.add_argument("--m", type=int, default=1, help="dominant topics per document")
    p.add_argument("--stopwords", default=None)
    p.add_argument("--out", required=True, help="report CSV path")
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"topicforge {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, OSError, KeyError, ValueError) as exc:
        print(f"topicforge {args.command}: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
