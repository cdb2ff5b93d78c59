use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by corpus loading, lexicon estimation, and metric
/// computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("duplicate utterance id '{0}'")]
    DuplicateId(String),

    #[error("utterance id must be non-empty ({path}:{line})")]
    EmptyId { path: String, line: usize },

    #[error("utterance '{id}' has no reference {side}")]
    MissingReference { id: String, side: &'static str },

    #[error("token sequence mode mismatch: expected {expected:?}, got {got:?}")]
    ModeMismatch {
        expected: crate::corpus::NormMode,
        got: crate::corpus::NormMode,
    },

    #[error("n-best list for '{id}' has no candidates")]
    EmptyNBest { id: String },

    #[error("n-best entry for '{id}' (rank {rank}) carries neither transcript nor translation")]
    EmptySidesNBest { id: String, rank: i64 },

    #[error("paired rescoring requires both texts per candidate; '{id}' rank {rank} is one-sided")]
    OneSidedCandidate { id: String, rank: i64 },

    #[error("cross rescoring for '{id}' has no {side} candidates")]
    MissingSide { id: String, side: &'static str },

    #[error("bitext is empty after dropping pairs with an empty side")]
    EmptyBitext,

    #[error("EM iteration count must be at least 1")]
    BadIterations,

    #[error("corrupt lexicon ({path}): {msg}")]
    LexiconCorrupt { path: String, msg: String },

    #[error("lexicon row for source word '{source_word}' sums to {sum} (expected 1 within {tol})")]
    LexiconNotNormalized {
        source_word: String,
        sum: f64,
        tol: f64,
    },

    #[error("input vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {need} items, got {got}")]
    TooFewItems { need: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("corpus has zero {side} words; metric undefined")]
    NoCorpusTokens { side: &'static str },

    #[error("corpus has zero total character length; metric undefined")]
    NoCorpusChars,

    #[error("smoothing strength must lie in [0,1], got {0}")]
    BadEpsilon(f64),

    #[error("smoothing with epsilon > 0 requires a non-empty opposite side")]
    EmptyOppositeSide,

    #[error("token '{0}' not in vocabulary")]
    TokenNotInVocab(String),

    #[error("unknown aggregator tag '{0}'")]
    UnknownAggregator(String),

    #[error("aggregator '{tag}' expects {expected} statistics per item, got {got}")]
    BadStatArity {
        tag: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("bootstrap requires at least {need} resamples, got {got}")]
    TooFewResamples { need: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
