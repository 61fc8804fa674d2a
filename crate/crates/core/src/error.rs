use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variants fall into three families which the command line maps onto exit
/// codes: file/format problems, violated method preconditions, and usage
/// mistakes. See [`Error::category`].
#[derive(Debug, Error)]
pub enum Error {
    // -- shape and content of in-memory data --
    #[error("embedding set is empty (n = {n}, d = {d})")]
    EmptySet { n: usize, d: usize },
    #[error("data length {len} does not match shape {n}x{d}")]
    ShapeMismatch { len: usize, n: usize, d: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("row {0} has (near) zero norm and cannot be normalized")]
    ZeroVector(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{labels} labels for {rows} rows")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("label {label} at row {row} is outside [0, {num_classes})")]
    LabelOutOfRange { row: usize, label: usize, num_classes: usize },
    #[error("class {0} has no samples")]
    MissingClass(usize),
    #[error("class {0} sums to a (near) zero vector; its centroid is undefined")]
    DegenerateClass(usize),
    #[error("at least 2 classes are required, found {0}")]
    TooFewClasses(usize),
    #[error("class {0} has a single member")]
    SingletonClass(usize),
    #[error("at least {needed} samples are required, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    // -- evaluation --
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("both inputs are constant; correlation is undefined")]
    ConstantInput,
    #[error("candidate {candidate:?} has no score for method {method}")]
    MissingScore { candidate: String, method: String },
    #[error("duplicate candidate id {0:?}")]
    DuplicateCandidate(String),
    #[error("class {class} is empty after subsampling candidate {candidate}")]
    EmptyClassAfterSubsample { candidate: usize, class: usize },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    // -- files --
    #[error("{path}: bad magic bytes")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported header ({detail})")]
    BadHeader { path: PathBuf, detail: String },
    #[error("{path}: truncated file, expected {expected} bytes, found {found}")]
    TruncatedFile { path: PathBuf, expected: u64, found: u64 },
    #[error("{path}: {extra} trailing bytes after payload")]
    TrailingData { path: PathBuf, extra: u64 },
    #[error("{path}: line {line} has {found} fields, expected {expected}")]
    RaggedCsv { path: PathBuf, line: usize, expected: usize, found: usize },
    #[error("{path}: line {line}: cannot parse {token:?}")]
    Parse { path: PathBuf, line: usize, token: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse grouping of errors, used for exit codes and machine-readable output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Precondition,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            ConfigInvalid(_) | UnknownMethod(_) => ErrorCategory::Usage,
            EmptySet { .. }
            | ShapeMismatch { .. }
            | NonFiniteValue { .. }
            | LabelCountMismatch { .. }
            | LabelOutOfRange { .. }
            | MissingClass(_)
            | DuplicateCandidate(_)
            | BadMagic { .. }
            | BadHeader { .. }
            | TruncatedFile { .. }
            | TrailingData { .. }
            | RaggedCsv { .. }
            | Parse { .. }
            | Io { .. }
            | Json(_) => ErrorCategory::Data,
            ZeroVector(_)
            | DimensionMismatch { .. }
            | DegenerateClass(_)
            | TooFewClasses(_)
            | SingletonClass(_)
            | TooFewSamples { .. }
            | LengthMismatch { .. }
            | ConstantInput
            | MissingScore { .. }
            | EmptyClassAfterSubsample { .. } => ErrorCategory::Precondition,
        }
    }

    /// Stable short identifier, e.g. `"TooFewClasses"`.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            EmptySet { .. } => "EmptySet",
            ShapeMismatch { .. } => "ShapeMismatch",
            NonFiniteValue { .. } => "NonFiniteValue",
            ZeroVector(_) => "ZeroVector",
            DimensionMismatch { .. } => "DimensionMismatch",
            LabelCountMismatch { .. } => "LabelCountMismatch",
            LabelOutOfRange { .. } => "LabelOutOfRange",
            MissingClass(_) => "MissingClass",
            DegenerateClass(_) => "DegenerateClass",
            TooFewClasses(_) => "TooFewClasses",
            SingletonClass(_) => "SingletonClass",
            TooFewSamples { .. } => "TooFewSamples",
            LengthMismatch { .. } => "LengthMismatch",
            ConstantInput => "ConstantInput",
            MissingScore { .. } => "MissingScore",
            DuplicateCandidate(_) => "DuplicateCandidate",
            EmptyClassAfterSubsample { .. } => "EmptyClassAfterSubsample",
            ConfigInvalid(_) => "ConfigInvalid",
            UnknownMethod(_) => "UnknownMethod",
            BadMagic { .. } => "BadMagic",
            BadHeader { .. } => "BadHeader",
            TruncatedFile { .. } => "TruncatedFile",
            TrailingData { .. } => "TrailingData",
            RaggedCsv { .. } => "RaggedCsv",
            Parse { .. } => "Parse",
            Io { .. } => "Io",
            Json(_) => "Json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
