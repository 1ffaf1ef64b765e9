use core::fmt;

use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Hermite degree above the configured maximum, or a value that left the
    /// double range.
    DegreeOverflow { n: usize, max: usize },
    /// Fock index outside `0..=nmax`.
    IndexOutOfRange { n: usize, nmax: usize },
    /// A parameter violates a documented precondition.
    InvalidParameter(&'static str),
    /// A series did not meet its tail bound within the term budget.
    NonConvergence { partial: C64, terms: usize },
    /// A recursion overflowed; `last_finite` is the last index with a finite value.
    Overflow { last_finite: usize },
    /// Probability leaked into the top of the truncated basis.
    GuardBand { leakage: f64, nmax: usize },
    /// Variance requested for an operator that is not Hermitian.
    NotHermitian { asymmetry: f64 },
    /// A superposition that should be normalised has zero norm.
    ZeroNorm,
    /// Squeezed-state parameters whose normalisation series diverges;
    /// `ratio` is the asymptotic term ratio `|ν/μ|^j`.
    NotNormalizable { ratio: f64 },
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Overflow { .. }
                | Error::GuardBand { .. }
                | Error::DegreeOverflow { .. }
                | Error::NotNormalizable { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeOverflow { n, max } => {
                write!(f, "Hermite degree {n} exceeds the supported maximum {max}")
            }
            Error::IndexOutOfRange { n, nmax } => {
                write!(f, "Fock index {n} is outside the truncated basis 0..={nmax}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonConvergence { partial, terms } => write!(
                f,
                "series did not converge after {terms} terms (partial sum {} + {}i)",
                partial.re, partial.im
            ),
            Error::Overflow { last_finite } => {
                write!(f, "recursion overflowed after index {last_finite}")
            }
            Error::GuardBand { leakage, nmax } => write!(
                f,
                "norm {leakage:e} leaked into the guard band of the basis (nmax = {nmax}); raise nmax"
            ),
            Error::NotHermitian { asymmetry } => {
                write!(f, "operator is not Hermitian (max asymmetry {asymmetry:e})")
            }
            Error::ZeroNorm => write!(f, "superposition has zero norm"),
            Error::NotNormalizable { ratio } => write!(
                f,
                "state is not normalisable: asymptotic ratio |ν/μ|^j = {ratio} is not below 1"
            ),
        }
    }
}

impl core::error::Error for Error {}
