"""topicforge: sparse bag-of-words corpora, collapsed Gibbs LDA, and baselines."""

from .corpus import (
    Corpus,
    Document,
    ParseError,
    RawDocument,
    Vocabulary,
    build_corpus,
    decode_sparse,
    encode_sparse,
    ingest,
    load_corpus,
    load_stopwords,
    preprocess,
    save_corpus,
)
from .gibbs import (
    ChainTrace,
    ConvergenceReport,
    GibbsState,
    Hyperparams,
    LdaModel,
    TrainResult,
    convergence_report,
    estimate,
    full_conditional,
    init_state,
    log_likelihood,
    sweep,
    top_words,
    train,
    train_chains,
)
from .baselines import (
    TfidfTable,
    UnigramModel,
    fit_tfidf,
    tfidf_top_terms,
    unigram_log_prob,
)
from .evaluation import EvalReport, TargetList, precision, sweep_report
from .modelio import load_model, save_model
from .porter import stem
from .synth import SynthConfig, generate
from .wordcount import parallel_wordcount, serial_wordcount

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Document",
    "ParseError",
    "RawDocument",
    "Vocabulary",
    "build_corpus",
    "decode_sparse",
    "encode_sparse",
    "ingest",
    "load_corpus",
    "load_stopwords",
    "preprocess",
    "save_corpus",
    "ChainTrace",
    "ConvergenceReport",
    "GibbsState",
    "Hyperparams",
    "LdaModel",
    "TrainResult",
    "convergence_report",
    "estimate",
    "full_conditional",
    "init_state",
    "log_likelihood",
    "sweep",
    "top_words",
    "train",
    "train_chains",
    "TfidfTable",
    "UnigramModel",
    "fit_tfidf",
    "tfidf_top_terms",
    "unigram_log_prob",
    "EvalReport",
    "TargetList",
    "precision",
    "sweep_report",
    "load_model",
    "save_model",
    "stem",
    "SynthConfig",
    "generate",
    "parallel_wordcount",
    "serial_wordcount",
    "__version__",
]
