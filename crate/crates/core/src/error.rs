//! Error type shared by every module in the crate.

use std::fmt;

/// Everything that can go wrong while evaluating series, deriving
/// parameters, or hunting for bound states.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The hypergeometric series did not meet its tolerance within the
    /// term cap.
    NonConvergent { terms: usize, tail: f64 },
    /// The lower parameter `c` is a nonpositive integer, so the series
    /// coefficients hit a pole.
    InvalidC { c: f64 },
    /// `Re(c - a - b) <= 0`, so the series diverges as `z -> 1`.
    DivergentAtOne { re_c_minus_a_minus_b: f64 },
    /// A gamma-function argument landed on a nonpositive integer.
    PoleAtNonPositiveInteger { arg: f64 },
    /// The requested evaluation point is outside the domain of the
    /// series or transformation.
    OutsideSeriesDomain { z: f64, domain: &'static str },
    /// The angular quantum number kappa must be a nonzero integer.
    ZeroKappa,
    /// A structural parameter failed validation (detail in the message).
    InvalidConfig { what: String },
    /// The bound-state exponent `mu` would not be real and positive at
    /// this energy: the radicand `m2` must be strictly positive.
    OutsideBoundDomain { energy: f64, m2: f64 },
    /// The radicand of `nu` is negative, so `nu` would be complex.
    ComplexNu { radicand: f64 },
    /// The decay parameter `A` is negative, so the outer exponent
    /// `lambda` would be imaginary.
    NegativeA { a: f64 },
    /// No energy admits real, positive derived parameters.
    EmptyWindow,
    /// The least-squares system for the centrifugal fit is numerically
    /// singular.
    IllConditionedFit { pivot: f64 },
    /// A refined root produced a wavefunction whose node count does not
    /// match its radial index.
    NodeCountMismatch {
        expected: usize,
        found: usize,
        energy: f64,
    },
    /// The sampled component has not decayed at the end of the grid, so
    /// the normalization integral would be truncated.
    NotDecaying { tail_ratio: f64 },
    /// The first-order coupling denominator `M + E - C` (or its
    /// pseudospin mirror) vanishes at this energy.
    EnergyAtDenominatorZero { denom: f64 },
    /// The shooting integration produced a non-finite value.
    NonFinite { r: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergent { terms, tail } => write!(
                f,
                "hypergeometric series still above tolerance after {terms} terms (tail bound {tail:.3e})"
            ),
            Error::InvalidC { c } => {
                write!(f, "lower parameter c = {c} is a nonpositive integer")
            }
            Error::DivergentAtOne { re_c_minus_a_minus_b } => write!(
                f,
                "series diverges at z = 1: Re(c - a - b) = {re_c_minus_a_minus_b} is not positive"
            ),
            Error::PoleAtNonPositiveInteger { arg } => {
                write!(f, "gamma function pole at nonpositive integer {arg}")
            }
            Error::OutsideSeriesDomain { z, domain } => {
                write!(f, "argument z = {z} outside {domain}")
            }
            Error::ZeroKappa => write!(f, "kappa must be a nonzero integer"),
            Error::InvalidConfig { what } => write!(f, "invalid configuration: {what}"),
            Error::OutsideBoundDomain { energy, m2 } => write!(
                f,
                "energy {energy} outside the bound domain (mu radicand {m2} <= 0)"
            ),
            Error::ComplexNu { radicand } => {
                write!(f, "nu radicand {radicand} is negative, nu would be complex")
            }
            Error::NegativeA { a } => {
                write!(f, "decay parameter A = {a} is negative")
            }
            Error::EmptyWindow => {
                write!(f, "no energy window with real bound-state parameters")
            }
            Error::IllConditionedFit { pivot } => write!(
                f,
                "centrifugal fit is numerically singular (pivot {pivot:.3e})"
            ),
            Error::NodeCountMismatch {
                expected,
                found,
                energy,
            } => write!(
                f,
                "state at E = {energy} has {found} nodes, expected {expected}"
            ),
            Error::NotDecaying { tail_ratio } => write!(
                f,
                "wavefunction tail is {tail_ratio:.3e} of its peak, grid too short to normalize"
            ),
            Error::EnergyAtDenominatorZero { denom } => write!(
                f,
                "coupling denominator {denom:.3e} vanishes, companion component undefined"
            ),
            Error::NonFinite { r } => {
                write!(f, "shooting integration became non-finite at r = {r}")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
