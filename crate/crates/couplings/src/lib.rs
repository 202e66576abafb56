//! Exact couplings of finite probability distributions.
//!
//! A coupling of two distributions `P` and `Q` is a joint distribution whose
//! marginals are `P` and `Q`. The set of all couplings is a transportation
//! polytope, and several classical questions about shared information reduce
//! to optimizing entropy-like functionals over that polytope:
//!
//! - the **maximal coupling** maximizes the probability that both coordinates
//!   agree, and its disagreement mass equals the total variation distance;
//! - the **minimum-entropy coupling** finds the most deterministic joint
//!   explanation of both marginals, and its Shannon or Rényi objective yields
//!   entropy-based pseudometrics between distributions;
//! - the **optimal channel** problem maximizes mutual information over all
//!   couplings of `P` with an output alphabet of fixed size.
//!
//! Everything combinatorial here is exact: masses are arbitrary-precision
//! rationals ([`BigRational`]), marginal constraints are checked by exact
//! equality, and solver decisions that certify a yes/no answer rest on exact
//! support structure rather than floating-point comparisons. Only the final
//! entropy values cross into `f64`, using compensated summation.
//!
//! # Modules
//!
//! - [`dist`]: validated distributions ([`Dist`]) and joints ([`Joint`]).
//! - [`measures`]: Shannon and Rényi entropies, divergences, total variation.
//! - [`polytope`]: coupling polytopes, exact vertex enumeration, structure
//!   predicates.
//! - [`solve`]: maximal coupling, exact and greedy minimum-entropy couplings,
//!   optimal channels, maximal normalized dependence.
//! - [`metrics`]: conditional-entropy pseudometrics and Fano-style bound
//!   reports.
//! - [`reductions`]: Subset Sum, Partition, and 3-Partition rephrased as
//!   coupling optimizations, with independent dynamic-programming oracles.
//! - [`unbounded`]: a one-parameter family of couplings whose Rényi entropy
//!   of order `alpha < 1` diverges while both marginals keep theirs finite.
//!
//! The crate is `no_std` (with `alloc`); float transcendentals come from
//! `libm` through `num-traits`.
//!
//! # Example
//!
//! ```
//! use couplings::{Dist, LogBase, OrderAlpha};
//! use couplings::solve::min_entropy_coupling_exact;
//!
//! let p = Dist::from_ratios(&[(1, 6), (1, 3), (1, 2)]).unwrap();
//! let q = Dist::from_ratios(&[(1, 2), (1, 2)]).unwrap();
//! let sol = min_entropy_coupling_exact(&p, &q, OrderAlpha::SHANNON, LogBase::BITS).unwrap();
//! // P refines Q here, so the best coupling is deterministic and its
//! // entropy collapses to H(P).
//! assert!((sol.objective_value - 1.4591479170272448).abs() < 1e-12);
//! assert!(sol.vertex);
//! ```

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![deny(missing_docs)]

extern crate alloc;

use alloc::string::String;
use core::fmt;

pub mod dist;
mod float;
pub mod measures;
pub mod metrics;
pub mod polytope;
pub mod reductions;
pub mod solve;
pub mod unbounded;

#[cfg(test)]
mod testutil;

pub use dist::{Dist, Joint, Support};
pub use measures::{Axis, LogBase, OrderAlpha};
pub use metrics::PNorm;

/// Re-export of the arbitrary-precision integer type used for masses.
pub use num_bigint::BigInt;
/// Re-export of the exact rational type used for masses.
pub use num_rational::BigRational;

/// Errors shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// A mass was negative where a probability was required.
    NegativeMass,
    /// Masses do not sum to exactly one; carries the offending total.
    NotNormalized(BigRational),
    /// An empty mass vector was supplied.
    ZeroLength,
    /// Two vectors that must have equal length do not.
    LengthMismatch {
        /// Length of the first operand.
        left: usize,
        /// Length of the second operand.
        right: usize,
    },
    /// A matrix has the wrong shape for the polytope or operation.
    DimensionMismatch {
        /// Shape the operation required, as (rows, columns).
        expected: (usize, usize),
        /// Shape actually supplied.
        found: (usize, usize),
    },
    /// Exact search exceeded its vertex / explored-node cap.
    VertexCapExceeded {
        /// The cap in force.
        cap: usize,
    },
    /// An exhaustive operation would exceed its work budget.
    BudgetExceeded {
        /// The budget in force.
        budget: u64,
        /// Work the operation would have needed.
        required: u64,
    },
    /// A marginal is degenerate (a point mass) where positive entropy is
    /// required.
    DegenerateMarginal,
    /// The norm order `p` is below one.
    InvalidP,
    /// A scalar parameter lies outside its admissible range.
    OutOfRange(&'static str),
    /// A structured input violates a documented instance invariant.
    InvariantViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeMass => write!(f, "masses must be nonnegative"),
            Error::NotNormalized(total) => {
                write!(f, "masses must sum to exactly 1, got {total}")
            }
            Error::ZeroLength => write!(f, "at least one mass is required"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::VertexCapExceeded { cap } => {
                write!(f, "exact search exceeded the cap of {cap} explored vertices")
            }
            Error::BudgetExceeded { budget, required } => {
                write!(f, "operation needs {required} steps, over the budget of {budget}")
            }
            Error::DegenerateMarginal => {
                write!(f, "marginal is a point mass; normalized dependence is undefined")
            }
            Error::InvalidP => write!(f, "norm order p must satisfy p >= 1"),
            Error::OutOfRange(what) => write!(f, "parameter out of range: {what}"),
            Error::InvariantViolation(msg) => write!(f, "invalid instance: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
