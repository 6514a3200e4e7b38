"""Collapsed Gibbs sampler for latent Dirichlet allocation.

The sampler keeps the usual four count tables over token-level topic
assignments z and resamples every token once per sweep from its full
conditional

    P(z_i = j | z_-i, v_i)  propto  (n_wt[v_i,j] + chi) / (n_t[j] + V*chi)
                                  * (n_dt[d_i,j] + alpha) / (n_d[d_i] + T*alpha)

where the counts exclude token i. Point estimates for the topic-term rows
(phi) and document-topic rows (psi) are read off a single state with the
same smoothing, and chain health is tracked through the collapsed
topic-word log likelihood ln P(w|z).

Sweeps run inside a compiled kernel for speed. All randomness comes from
a seeded numpy PCG64 generator outside the kernel (one uniform per token
per sweep), so results are reproducible bit for bit; a pure-Python sweep
with identical arithmetic is kept alongside and the tests hold the two
paths to exact agreement.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit
from scipy.special import gammaln

from .corpus import Corpus

DEFAULT_CHI = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_BURN_IN = 500
DEFAULT_TRACE_EVERY = 10


@dataclass(frozen=True)
class Hyperparams:
    """Sampler settings; ``alpha=None`` selects the 50/T heuristic."""

    topics: int
    alpha: float | None = None
    chi: float = DEFAULT_CHI
    iterations: int = DEFAULT_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0

    def __post_init__(self):
        if self.topics < 1:
            raise ValueError(f"topics must be >= 1, got {self.topics}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.topics)
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.chi > 0:
            raise ValueError(f"chi must be > 0, got {self.chi}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.iterations < self.burn_in:
            raise ValueError(
                f"iterations ({self.iterations}) < burn_in ({self.burn_in})"
            )


@dataclass
class GibbsState:
    """Token-level assignments plus the four tally tables they imply.

    z[p] is the topic of token p in the flattened stream (document order,
    entry order, counts expanded); doc_of/term_of give its document and
    term id, doc_offsets[d]:doc_offsets[d+1] spans document d. The tables
    n_wt (V x T), n_dt (D x T), n_t (T,), n_d (D,) must stay exactly the
    tallies implied by z; recount_tables/validate audit that.
    """

    z: np.ndarray
    doc_of: np.ndarray
    term_of: np.ndarray
    doc_offsets: np.ndarray
    n_wt: np.ndarray
    n_dt: np.ndarray
    n_t: np.ndarray
    n_d: np.ndarray
    rng: np.random.Generator

    @property
    def num_tokens(self) -> int:
        return int(self.z.shape[0])

    @property
    def num_docs(self) -> int:
        return int(self.n_dt.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.n_wt.shape[0])

    def recount_tables(self):
        """Recompute all four tables from z (the audit oracle)."""
        V, T = self.n_wt.shape
        D = self.num_docs
        n_wt = np.zeros((V, T), dtype=np.int64)
        n_dt = np.zeros((D, T), dtype=np.int64)
        np.add.at(n_wt, (self.term_of, self.z), 1)
        np.add.at(n_dt, (self.doc_of, self.z), 1)
        return n_wt, n_dt, n_wt.sum(axis=0), n_dt.sum(axis=1)

    def validate(self) -> None:
        n_wt, n_dt, n_t, n_d = self.recount_tables()
        if not (
            np.array_equal(n_wt, self.n_wt)
            and np.array_equal(n_dt, self.n_dt)
            and np.array_equal(n_t, self.n_t)
            and np.array_equal(n_d, self.n_d)
        ):
            raise ValueError("count tables inconsistent with z")


@dataclass
class LdaModel:
    """Smoothed point estimates: phi is T x V, psi is D x T, rows sum to 1."""

    phi: np.ndarray
    psi: np.ndarray
    hyperparams: Hyperparams
    terms: list[str]
    doc_ids: list[str]

    @property
    def num_topics(self) -> int:
        return int(self.phi.shape[0])

    @property
    def vocab_size(self) -> int:
        return int(self.phi.shape[1])

    @property
    def num_docs(self) -> int:
        return int(self.psi.shape[0])

    def validate(self, tol: float = 1e-12) -> None:
        for name, mat in (("phi", self.phi), ("psi", self.psi)):
            if not np.all(mat > 0):
                raise ValueError(f"{name} has non-positive entries")
            err = np.max(np.abs(mat.sum(axis=1) - 1.0))
            if err > tol:
                raise ValueError(f"{name} rows deviate from 1 by {err:.3e}")
        if self.phi.shape[1] != len(self.terms):
            raise ValueError("phi width does not match vocabulary size")
        if self.psi.shape[0] != len(self.doc_ids):
            raise ValueError("psi height does not match document count")


@dataclass
class ChainTrace:
    """Recorded ln P(w|z) values for one chain (iteration 0 = initial state)."""

    chain_id: int
    iterations: list[int] = field(default_factory=list)
    log_likelihoods: list[float] = field(default_factory=list)


@dataclass
class TrainResult:
    model: LdaModel
    trace: ChainTrace
    state: GibbsState


@dataclass
class ConvergenceReport:
    """Cross-chain dispersion of ln P(w|z) per recorded iteration.

    rel[k] = spread[k] / |mean[k]| (0 when the spread is exactly 0, inf
    when the mean is 0 with nonzero spread). converged_at is the first
    recorded iteration from which rel stays below the threshold for
    `window` consecutive records, or None.
    """

    iterations: list[int]
    spreads: list[float]
    means: list[float]
    rel_spreads: list[float]
    window: int
    threshold: float
    converged_at: int | None


def flatten_corpus(corpus: Corpus):
    """Expand a sparse corpus to token-instance arrays (doc_of, term_of, doc_offsets)."""
    doc_of = []
    term_of = []
    offsets = [0]
    for d, doc in enumerate(corpus.documents):
        for tid, count in doc.entries:
            doc_of.extend([d] * count)
            term_of.extend([tid] * count)
        offsets.append(len(doc_of))
    return (
        np.asarray(doc_of, dtype=np.int64),
        np.asarray(term_of, dtype=np.int64),
        np.asarray(offsets, dtype=np.int64),
    )


def init_state(corpus: Corpus, hp: Hyperparams) -> GibbsState:
    """Assign every token a uniform random topic and tally the tables."""
    if not corpus.documents:
        raise ValueError("corpus has no documents")
    doc_of, term_of, offsets = flatten_corpus(corpus)
    V = len(corpus.vocabulary)
    D = corpus.num_docs
    T = hp.topics
    rng = np.random.default_rng(hp.seed)
    z = rng.integers(0, T, size=doc_of.shape[0], dtype=np.int64)
    n_wt = np.zeros((V, T), dtype=np.int64)
    n_dt = np.zeros((D, T), dtype=np.int64)
    np.add.at(n_wt, (term_of, z), 1)
    np.add.at(n_dt, (doc_of, z), 1)
    return GibbsState(
        z=z,
        doc_of=doc_of,
        term_of=term_of,
        doc_offsets=offsets,
        n_wt=n_wt,
        n_dt=n_dt,
        n_t=n_wt.sum(axis=0),
        n_d=n_dt.sum(axis=1),
        rng=rng,
    )


def decrement_token(state: GibbsState, pos: int) -> int:
    """Remove token ``pos`` from all four tables; returns its old topic."""
    j = int(state.z[pos])
    v = state.term_of[pos]
    d = state.doc_of[pos]
    state.n_wt[v, j] -= 1
    state.n_dt[d, j] -= 1
    state.n_t[j] -= 1
    state.n_d[d] -= 1
    return j


def increment_token(state: GibbsState, pos: int, topic: int) -> None:
    v = state.term_of[pos]
    d = state.doc_of[pos]
    state.n_wt[v, topic] += 1
    state.n_dt[d, topic] += 1
    state.n_t[topic] += 1
    state.n_d[d] += 1
    state.z[pos] = topic


def full_conditional(
    state: GibbsState, hp: Hyperparams, d: int, i: int
) -> np.ndarray:
    """Resampling distribution for token i of document d.

    Expects the token's own assignment to have been decremented from all
    four tables already; any negative count is treated as a caller bug.
    Returns a length-T vector summing to 1 within 1e-12.
    """
    if d < 0 or d >= state.num_docs:
        raise ValueError(f"document index {d} out of range")
    pos = int(state.doc_offsets[d]) + i
    if i < 0 or pos >= int(state.doc_offsets[d + 1]):
        raise ValueError(f"token position {i} out of range for document {d}")
    v = state.term_of[pos]
    if (
        state.n_d[d] < 0
        or np.any(state.n_wt[v] < 0)
        or np.any(state.n_dt[d] < 0)
        or np.any(state.n_t < 0)
    ):
        raise ValueError("negative count: token was not decremented correctly")
    T = hp.topics
    V = state.vocab_size
    chi, alpha = hp.chi, hp.alpha
    v_chi = V * chi
    t_alpha = T * alpha
    # Scalar accumulation, in topic order, mirrors the compiled sweep kernel
    # exactly so both paths round identically.
    weights = np.empty(T, dtype=np.float64)
    total = 0.0
    for j in range(T):
        w = ((state.n_wt[v, j] + chi) / (state.n_t[j] + v_chi)) * (
            (state.n_dt[d, j] + alpha) / (state.n_d[d] + t_alpha)
        )
        weights[j] = w
        total += w
    return weights / total


@njit(cache=True, nogil=True)
def _sweep_kernel(z, doc_of, term_of, n_wt, n_dt, n_t, n_d, chi, alpha, uniforms):
    num_tokens = z.shape[0]
    V, T = n_wt.shape
    v_chi = V * chi
    t_alpha = T * alpha
    weights = np.empty(T, dtype=np.float64)
    for pos in range(num_tokens):
        v = term_of[pos]
        d = doc_of[pos]
        old = z[pos]
        n_wt[v, old] -= 1
        n_dt[d, old] -= 1
        n_t[old] -= 1
        n_d[d] -= 1
        total = 0.0
        for j in range(T):
            w = ((n_wt[v, j] + chi) / (n_t[j] + v_chi)) * (
                (n_dt[d, j] + alpha) / (n_d[d] + t_alpha)
            )
            weights[j] = w
            total += w
        u = uniforms[pos]
        acc = 0.0
        new = T - 1
        for j in range(T):
            acc += weights[j] / total
            if u < acc:
                new = j
                break
        n_wt[v, new] += 1
        n_dt[d, new] += 1
        n_t[new] += 1
        n_d[d] += 1
        z[pos] = new


def sweep(state: GibbsState, hp: Hyperparams) -> GibbsState:
    """One full resampling pass over all tokens, in stream order, in place."""
    uniforms = state.rng.random(state.num_tokens)
    _sweep_kernel(
        state.z,
        state.doc_of,
        state.term_of,
        state.n_wt,
        state.n_dt,
        state.n_t,
        state.n_d,
        float(hp.chi),
        float(hp.alpha),
        uniforms,
    )
    return state


def sweep_reference(state: GibbsState, hp: Hyperparams) -> GibbsState:
    """Pure-Python sweep with the identical visit order, arithmetic and draws.

    Slow; exists so tests can pin the compiled kernel to a transparent
    implementation (the two must agree bit for bit on the same state).
    """
    uniforms = state.rng.random(state.num_tokens)
    T = hp.topics
    for d in range(state.num_docs):
        start = int(state.doc_offsets[d])
        stop = int(state.doc_offsets[d + 1])
        for pos in range(start, stop):
            decrement_token(state, pos)
            probs = full_conditional(state, hp, d, pos - start)
            u = uniforms[pos]
            acc = 0.0
            new = T - 1
            for j in range(T):
                acc += probs[j]
                if u < acc:
                    new = j
                    break
            increment_token(state, pos, new)
    return state


def per_topic_log_likelihood(state: GibbsState, hp: Hyperparams) -> np.ndarray:
    """Each topic's term of ln P(w|z); an empty topic contributes exactly 0.0.

    Per topic j the value is
        sum_v [lnG(n_wt[v,j]+chi) - lnG(chi)]  +  lnG(V*chi) - lnG(n_t[j]+V*chi)
    which equals the usual lnG(V*chi) - V lnG(chi) + sum_v lnG(n_wt[v,j]+chi)
    - lnG(n_t[j]+V*chi) but cancels termwise when every count is zero.
    """
    V = state.vocab_size
    chi = hp.chi
    base = float(gammaln(V * chi))
    ln_g_chi = float(gammaln(chi))
    out = np.zeros(hp.topics, dtype=np.float64)
    for j in range(hp.topics):
        col = state.n_wt[:, j]
        nz = col[col > 0]
        word_part = float(np.sum(gammaln(nz + chi) - ln_g_chi)) if nz.size else 0.0
        out[j] = word_part + (base - float(gammaln(state.n_t[j] + V * chi)))
    return out


def log_likelihood(state: GibbsState, hp: Hyperparams) -> float:
    """Collapsed topic-word log likelihood ln P(w|z) of the current state."""
    return float(np.sum(per_topic_log_likelihood(state, hp)))


def estimate(
    state: GibbsState,
    hp: Hyperparams,
    terms: Sequence[str],
    doc_ids: Sequence[str],
) -> LdaModel:
    """Read smoothed phi and psi off the current state."""
    phi, psi = _phi_psi(state, hp)
    model = LdaModel(
        phi=phi,
        psi=psi,
        hyperparams=hp,
        terms=list(terms),
        doc_ids=list(doc_ids),
    )
    model.validate()
    return model


def _phi_psi(state: GibbsState, hp: Hyperparams):
    V = state.vocab_size
    T = hp.topics
    phi = (state.n_wt.T + hp.chi) / (state.n_t[:, None] + V * hp.chi)
    psi = (state.n_dt + hp.alpha) / (state.n_d[:, None] + T * hp.alpha)
    return phi, psi


def train(
    corpus: Corpus,
    hp: Hyperparams,
    trace_every: int = DEFAULT_TRACE_EVERY,
    chain_id: int = 0,
    average_every: int = 0,
) -> TrainResult:
    """Run one chain: init, `iterations` sweeps, estimate from the final state.

    The trace records ln P(w|z) at iteration 0, then after every
    trace_every-th sweep, plus the final sweep. With average_every > 0 the
    returned phi/psi are instead the mean of the point estimates taken
    every that many sweeps after burn-in (the final state is always
    included as a sample); the default keeps the single-final-state rule.
    """
    if trace_every < 1:
        raise ValueError(f"trace_every must be >= 1, got {trace_every}")
    if average_every < 0:
        raise ValueError(f"average_every must be >= 0, got {average_every}")
    state = init_state(corpus, hp)
    trace = ChainTrace(chain_id=chain_id)
    trace.iterations.append(0)
    trace.log_likelihoods.append(log_likelihood(state, hp))
    phi_acc = psi_acc = None
    samples = 0
    for it in range(1, hp.iterations + 1):
        sweep(state, hp)
        if it % trace_every == 0 or it == hp.iterations:
            trace.iterations.append(it)
            trace.log_likelihoods.append(log_likelihood(state, hp))
        if (
            average_every > 0
            and it > hp.burn_in
            and (it - hp.burn_in) % average_every == 0
            and it < hp.iterations
        ):
            phi, psi = _phi_psi(state, hp)
            if phi_acc is None:
                phi_acc, psi_acc = phi, psi
            else:
                phi_acc += phi
                psi_acc += psi
            samples += 1
    terms = corpus.vocabulary.terms
    doc_ids = [doc.id for doc in corpus.documents]
    if average_every > 0:
        phi, psi = _phi_psi(state, hp)
        if phi_acc is not None:
            phi = (phi_acc + phi) / (samples + 1)
            psi = (psi_acc + psi) / (samples + 1)
        model = LdaModel(
            phi=phi, psi=psi, hyperparams=hp, terms=list(terms), doc_ids=doc_ids
        )
        model.validate()
    else:
        model = estimate(state, hp, terms, doc_ids)
    return TrainResult(model=model, trace=trace, state=state)


def train_chains(
    corpus: Corpus,
    hp: Hyperparams,
    chains: int,
    trace_every: int = DEFAULT_TRACE_EVERY,
    average_every: int = 0,
    workers: int = 1,
) -> list[TrainResult]:
    """Run independent chains with seeds hp.seed + chain_id; ordered by chain id."""
    if chains < 1:
        raise ValueError(f"chains must be >= 1, got {chains}")

    def run(cid: int) -> TrainResult:
        chain_hp = Hyperparams(
            topics=hp.topics,
            alpha=hp.alpha,
            chi=hp.chi,
            iterations=hp.iterations,
            burn_in=hp.burn_in,
            seed=hp.seed + cid,
        )
        return train(
            corpus,
            chain_hp,
            trace_every=trace_every,
            chain_id=cid,
            average_every=average_every,
        )

    if workers <= 1 or chains == 1:
        return [run(cid) for cid in range(chains)]
    with ThreadPoolExecutor(max_workers=min(workers, chains)) as pool:
        return list(pool.map(run, range(chains)))


def convergence_report(
    traces: Sequence[ChainTrace], window: int, threshold: float = 0.02
) -> ConvergenceReport:
    """Summarize cross-chain agreement of ln P(w|z) over recorded iterations."""
    if len(traces) < 2:
        raise ValueError("need at least 2 chains to compare")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    grid = traces[0].iterations
    for t in traces[1:]:
        if t.iterations != grid:
            raise ValueError("chains recorded different iteration grids")
    values = np.asarray([t.log_likelihoods for t in traces], dtype=np.float64)
    spreads = values.max(axis=0) - values.min(axis=0)
    means = values.mean(axis=0)
    rel = np.empty_like(spreads)
    for k in range(spreads.shape[0]):
        if spreads[k] == 0.0:
            rel[k] = 0.0
        elif means[k] == 0.0:
            rel[k] = np.inf
        else:
            rel[k] = spreads[k] / abs(means[k])
    converged_at = None
    ok = rel < threshold
    for k in range(len(grid) - window + 1):
        if np.all(ok[k : k + window]):
            converged_at = grid[k]
            break
    return ConvergenceReport(
        iterations=list(grid),
        spreads=[float(s) for s in spreads],
        means=[float(m) for m in means],
        rel_spreads=[float(r) for r in rel],
        window=window,
        threshold=threshold,
        converged_at=converged_at,
    )


def top_words(model: LdaModel, topic: int, k: int) -> list[tuple[str, float]]:
    """The k most probable terms of one topic row, ties broken by ascending id."""
    if topic < 0 or topic >= model.num_topics:
        raise ValueError(f"topic {topic} out of range [0, {model.num_topics})")
    if k < 1 or k > model.vocab_size:
        raise ValueError(f"k must be in [1, {model.vocab_size}], got {k}")
    row = model.phi[topic]
    order = sorted(range(model.vocab_size), key=lambda v: (-row[v], v))
    return [(model.terms[v], float(row[v])) for v in order[:k]]
