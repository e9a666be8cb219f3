//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs or evaluating the
/// measure. Guard variants (`TooManyOutcomes`, `EnumerationTooLarge`) signal
/// resource limits rather than bad data; callers may want to distinguish
/// them (the CLI maps guards to a dedicated exit code).
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes are incompatible.
    DimensionMismatch { expected: usize, found: usize },
    /// `d = 1` systems (and below) are out of scope.
    BadDimension { dim: usize },
    /// Matrix contains NaN or infinite entries.
    NonFinite,
    /// ‖A − A*‖ exceeds the Hermiticity tolerance.
    NotHermitian { residual: f64 },
    /// ‖U*U − I‖ exceeds the unitarity tolerance.
    NotUnitary { residual: f64 },
    /// An eigenvalue below −tol_psd; `index` identifies the POVM element
    /// when applicable.
    NotPsd { index: Option<usize>, min_eigenvalue: f64 },
    /// Eigensolver hit its sweep limit.
    NoConvergence { sweeps: usize },
    /// POVM element `index` is numerically zero.
    ZeroElement { index: usize },
    /// POVM elements do not sum to the identity.
    SumNotIdentity { residual: f64 },
    /// Outcome symbol out of `1..=k` range.
    SymbolOutOfRange { symbol: usize, k: usize },
    /// The evolution map is undefined on this branch (`p_i(ρ)` at or below
    /// the zero-probability threshold).
    ZeroProbabilityBranch { symbol: usize, prob: f64 },
    /// Operation requires a different measurement class.
    WrongPovmKind { expected: &'static str },
    /// Subset search guard: 2^k enumeration refused.
    TooManyOutcomes { k: usize, max: usize },
    /// String enumeration guard: k^n too large.
    EnumerationTooLarge { total: u128, max: u128 },
    /// Empty string where a nonempty one is required.
    EmptyString,
    /// Subspace argument must be non-trivial (0 < dim < ambient).
    TrivialSubspace,
    /// Two routes that must agree per the underlying equivalence disagreed;
    /// indicates a tolerance breakdown, not bad input.
    CriterionMismatch { detail: String },
    /// Fixed-point iteration failed to reach the residual floor.
    NoFixedPoint { residual: f64 },
    /// Operator family violates Σ_i A_i·A_i* = I.
    InvalidFamily { residual: f64 },
    /// Outcome probabilities drifted too far from a unit sum to renormalize.
    ProbabilityNotNormalized { sum: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BadDimension { dim } => {
                write!(f, "bad dimension {dim}: need d >= 2")
            }
            Error::NonFinite => write!(f, "matrix has non-finite entries"),
            Error::NotHermitian { residual } => {
                write!(f, "matrix not Hermitian (relative residual {residual:.3e})")
            }
            Error::NotUnitary { residual } => {
                write!(f, "matrix not unitary (residual {residual:.3e})")
            }
            Error::NotPsd { index, min_eigenvalue } => match index {
                Some(i) => write!(
                    f,
                    "element {i} not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})"
                ),
                None => write!(
                    f,
                    "matrix not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})"
                ),
            },
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge within {sweeps} sweeps")
            }
            Error::ZeroElement { index } => write!(f, "POVM element {index} is zero"),
            Error::SumNotIdentity { residual } => {
                write!(f, "POVM elements do not sum to identity (residual {residual:.3e})")
            }
            Error::SymbolOutOfRange { symbol, k } => {
                write!(f, "outcome symbol {symbol} out of range 1..={k}")
            }
            Error::ZeroProbabilityBranch { symbol, prob } => {
                write!(
                    f,
                    "evolution undefined for outcome {} (probability {prob:.3e})",
                    symbol + 1
                )
            }
            Error::WrongPovmKind { expected } => {
                write!(f, "operation requires a {expected} measurement")
            }
            Error::TooManyOutcomes { k, max } => {
                write!(f, "subset search refused: k = {k} exceeds guard {max}")
            }
            Error::EnumerationTooLarge { total, max } => {
                write!(f, "enumeration of {total} strings exceeds guard {max}")
            }
            Error::EmptyString => write!(f, "outcome string must be nonempty"),
            Error::TrivialSubspace => write!(f, "subspace must be non-trivial"),
            Error::CriterionMismatch { detail } => {
                write!(f, "equivalent criteria disagreed: {detail}")
            }
            Error::NoFixedPoint { residual } => {
                write!(f, "no stationary density found (best residual {residual:.3e})")
            }
            Error::InvalidFamily { residual } => {
                write!(f, "operator family violates completeness (residual {residual:.3e})")
            }
            Error::ProbabilityNotNormalized { sum } => {
                write!(f, "outcome probabilities sum to {sum} (internal error)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
