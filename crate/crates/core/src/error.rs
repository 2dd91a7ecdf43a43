//! Error and validation-report types shared across the crate.

use std::fmt;

use thiserror::Error;

/// Convenience alias for results produced by this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Which coefficient family a validation issue refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFamily {
    A,
    B,
    C,
}

impl fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixFamily::A => write!(f, "A"),
            MatrixFamily::B => write!(f, "B"),
            MatrixFamily::C => write!(f, "C"),
        }
    }
}

/// A single defect found while validating model data.
///
/// Validation never stops at the first problem; a [`ValidationReport`] collects
/// every issue so a malformed file can be fixed in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// A coefficient list does not hold exactly `n_p + 1` matrices.
    MatrixListLength {
        family: MatrixFamily,
        expected: usize,
        got: usize,
    },
    /// A coefficient matrix has the wrong shape for its family.
    DimensionMismatch {
        family: MatrixFamily,
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A coefficient entry is NaN or infinite.
    NonFiniteEntry {
        family: MatrixFamily,
        index: usize,
        row: usize,
        col: usize,
    },
    /// A dimension that must be positive (`n_u`, `n_y`, or `n_p`) is zero.
    ZeroDimension { name: &'static str },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::MatrixListLength {
                family,
                expected,
                got,
            } => write!(
                f,
                "matrix list length: family {family} holds {got} matrices, expected {expected} (n_p + 1)"
            ),
            ValidationIssue::DimensionMismatch {
                family,
                index,
                expected,
                got,
            } => write!(
                f,
                "dimension mismatch: {family}[{index}] is {}x{}, expected {}x{}",
                got.0, got.1, expected.0, expected.1
            ),
            ValidationIssue::NonFiniteEntry {
                family,
                index,
                row,
                col,
            } => write!(
                f,
                "non-finite entry: {family}[{index}] at row {row}, column {col}"
            ),
            ValidationIssue::ZeroDimension { name } => {
                write!(f, "zero dimension: {name} must be at least 1")
            }
        }
    }
}

/// Every defect found in one validation pass over model data.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, issue: ValidationIssue) {
        self.issues.push(issue);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} issue(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Errors produced by model construction, enumeration, and reduction.
#[derive(Debug, Error)]
pub enum Error {
    /// Model data failed validation; the report lists every defect found.
    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),
    /// Mismatched operand dimensions (signals, scheduling vectors, model pairs).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A signal value passed into a computation is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// A time index beyond the supplied signal data.
    #[error("time index {t} out of range for signals of length {len}")]
    TimeOutOfRange { t: usize, len: usize },
    /// An index into a coefficient family or scheduling component out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// A requested enumeration would visit more sub-Markov parameters than the
    /// cap allows. Checked before anything is allocated.
    #[error(
        "enumeration of {required} sub-Markov parameters exceeds the cap of {cap}; \
         lower the depth or raise the cap"
    )]
    EnumerationTooLarge { required: u128, cap: u64 },
    /// An exact parameter count does not fit in 64 bits.
    #[error("sub-Markov parameter count for n_p = {n_p} at depth {depth} overflows a 64-bit integer")]
    CountOverflow { n_p: usize, depth: usize },
    /// An explicitly assembled matrix would exceed the entry cap. Carries the
    /// computed dimensions so callers can report how large the refused matrix
    /// would have been. Checked before anything is allocated.
    #[error(
        "refusing to assemble a {rows} x {cols} matrix ({entries} entries, cap {cap}); \
         lower the depth or raise the cap"
    )]
    MatrixTooLarge {
        rows: u128,
        cols: u128,
        entries: u128,
        cap: u64,
    },
    /// The two-sided projection is not well posed at the requested tolerance.
    #[error(
        "rank condition violated: rank(V) = {rank_v}, rank(W) = {rank_w}, rank(WV) = {rank_wv}; \
         two-sided reduction requires all three to agree"
    )]
    RankCondition {
        rank_v: usize,
        rank_w: usize,
        rank_wv: usize,
    },
    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A model file is not valid JSON for the documented schema.
    #[error("parse error: {0}")]
    Parse(String),
}
