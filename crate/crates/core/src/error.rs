use thiserror::Error;

/// Errors raised by the embedding, lexicon, association, debiasing and
/// statistics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("embedding source contains no vectors")]
    EmptySource,

    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vector for `{token}` has zero norm")]
    ZeroNorm { token: String },

    #[error("vector dimensions differ: {left} vs {right}")]
    VectorDimension { left: usize, right: usize },

    #[error("category `{name}` resolved to no in-vocabulary words (unmatched: {})", .missing.join(", "))]
    EmptyCategory { name: String, missing: Vec<String> },

    #[error("wildcard `{pattern}` matched {count} words, more than the cap of {cap}")]
    WildcardOverflow {
        pattern: String,
        count: usize,
        cap: usize,
    },

    #[error("line {line}: reflexive pair `{word},{word}`")]
    ReflexivePair { line: usize, word: String },

    #[error("occupation `{occupation}` has zero total workers")]
    ZeroTotal { occupation: String },

    #[error("line {line}: negative count for occupation `{occupation}`")]
    NegativeCount { line: usize, occupation: String },

    #[error("line {line}: duplicate occupation `{occupation}`")]
    DuplicateOccupation { line: usize, occupation: String },

    #[error("cannot take the centroid of an empty set")]
    EmptySet,

    #[error("set mean has near-zero norm ({norm:e})")]
    DegenerateSet { norm: f64 },

    #[error("target list `{list}` has no in-vocabulary words")]
    NoTargetsInVocabulary { list: String },

    #[error("`{left}` and `{right}` have identical vectors; no bias direction")]
    IdenticalWords { left: String, right: String },

    #[error("projection annihilates {}: vector parallel to the bias direction", .tokens.join(", "))]
    Annihilated { tokens: Vec<String> },

    #[error("no test pair has both words in the vocabulary")]
    NoResolvableTestPairs,

    #[error("no candidate pair yields a usable bias direction")]
    NoUsableCandidates,

    #[error("pair `{left},{right}` appears both as a candidate and as a test pair")]
    OverlappingPairs { left: String, right: String },

    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least 3 samples, got {n}")]
    TooFewSamples { n: usize },

    #[error("{series} has zero variance")]
    ZeroVariance { series: &'static str },

    #[error("gap must be a finite non-negative number, got {value}")]
    InvalidGap { value: f64 },

    #[error("baseline gap is zero; reduction is undefined")]
    ZeroBaseline,

    #[error("incomplete beta continued fraction did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
}

impl Error {
    /// True for failures of the numerical machinery itself rather than of
    /// the data handed to it.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
