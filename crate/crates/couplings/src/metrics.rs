//! Entropy-based distances: the Δ pseudometrics on joints, their
//! minimized counterparts on pairs of marginals, and the total-variation
//! bound chain relating them.
//!
//! For a joint `S` with coordinates `X` (rows) and `Y` (columns),
//! `delta_p` combines the two conditional entropies `H(X|Y)` and `H(Y|X)`
//! through a p-norm. Minimizing over all couplings of two marginals gives
//! `delta_lower`, a pseudometric on distributions whose kernel is equality
//! up to permutation and zero masses; the minimum is attained at the
//! minimum-entropy coupling for every `p ≥ 1` because both conditional
//! entropies are `H(S)` minus a fixed marginal entropy.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Signed;

use crate::dist::{Dist, Joint};
use crate::float::rat_to_f64;
use crate::measures::{
    binary_entropy, conditional_entropy, shannon_entropy, total_variation, Axis, LogBase,
    OrderAlpha,
};
use crate::solve::min_entropy_coupling_exact;
use crate::{Error, Result};
// Needed for float math under no_std; whenever std is in the dependency
// graph (test builds pull it in), its inherent f64 methods shadow the
// trait and this import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;

/// Norm order for combining the two conditional entropies: any finite
/// `p ≥ 1`, or ∞ for the maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNorm {
    value: f64,
}

impl PNorm {
    /// p = 1: the sum of the two conditional entropies.
    pub const ONE: Self = Self { value: 1.0 };

    /// p = ∞: the larger of the two conditional entropies.
    pub const INFINITY: Self = Self {
        value: f64::INFINITY,
    };

    /// Validates `p ≥ 1` (∞ allowed, NaN rejected).
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::InvalidP);
        }
        Ok(Self { value })
    }

    /// The order as a float (`f64::INFINITY` for the maximum norm).
    pub fn value(self) -> f64 {
        self.value
    }

    /// True exactly for p = ∞.
    pub fn is_infinite(self) -> bool {
        self.value.is_infinite()
    }

    fn combine(self, a: f64, b: f64) -> f64 {
        if self.value == 1.0 {
            a + b
        } else if self.value.is_infinite() {
            a.max(b)
        } else {
            (a.powf(self.value) + b.powf(self.value)).powf(1.0 / self.value)
        }
    }
}

/// The p-norm of the two conditional entropies of `s`:
/// `(H(X|Y)ᵖ + H(Y|X)ᵖ)^(1/p)`, a pseudometric between the coupled
/// variables. Zero exactly when each variable determines the other.
pub fn delta_p(s: &Joint, p: PNorm, base: LogBase) -> f64 {
    let h_rows_given_cols = conditional_entropy(s, Axis::Columns, base);
    let h_cols_given_rows = conditional_entropy(s, Axis::Rows, base);
    p.combine(h_rows_given_cols, h_cols_given_rows)
}

/// The smallest `delta_p` over all couplings of `p` and `q`, attained at
/// the minimum-entropy coupling.
///
/// A pseudometric on distributions: symmetric (bit-for-bit, via a
/// canonical argument order), nonnegative, triangle inequality, and zero
/// exactly when the positive masses of `p` and `q` agree as multisets.
pub fn delta_lower(p: &Dist, q: &Dist, norm: PNorm, base: LogBase) -> Result<f64> {
    // Both orders describe the same quantity; solve the canonical one so
    // the float result is identical under argument swap.
    let (a, b) = if q.masses() < p.masses() {
        (q, p)
    } else {
        (p, q)
    };
    let mec = min_entropy_coupling_exact(a, b, OrderAlpha::SHANNON, base)?;
    Ok(delta_p(&mec.coupling, norm, base))
}

/// One recorded inequality of a [`BoundReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    /// What the inequality states, as a short stable label.
    pub name: &'static str,
    /// Left-hand side value.
    pub left: f64,
    /// Right-hand side value.
    pub right: f64,
}

impl BoundEntry {
    /// `right − left`; nonnegative (up to float tolerance) when the bound
    /// holds.
    pub fn slack(&self) -> f64 {
        self.right - self.left
    }
}

/// The evaluated chain of distance bounds produced by [`bound_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    entries: Vec<BoundEntry>,
}

impl BoundReport {
    /// The recorded inequalities, in chain order.
    pub fn entries(&self) -> &[BoundEntry] {
        &self.entries
    }

    /// True when every inequality holds with slack ≥ −`tol`.
    pub fn all_hold(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.slack() >= -tol)
    }
}

/// Evaluates the chain linking entropy difference, the minimized
/// conditional-entropy distances, and total variation:
///
/// 1. `|H(p) − H(q)| ≤ Δ̲_∞(p, q)`
/// 2. `Δ̲_∞(p, q) ≤ Δ̲_1(p, q)`
/// 3. `Δ̲_1(p, q) ≤ d_V · log(|p|·|q|) + 2·h(d_V)`
/// 4. `Δ̲_∞(p, q) ≤ d_V · log(max{|p|, |q|}) + h(d_V)`
///
/// where `d_V` is the total variation distance, `|·|` counts positive
/// masses, and `h` is the binary entropy rescaled to `base`. Support sizes
/// are at least one, so no logarithm sees zero.
pub fn bound_report(p: &Dist, q: &Dist, base: LogBase) -> Result<BoundReport> {
    let hp = shannon_entropy(p, base);
    let hq = shannon_entropy(q, base);
    let d1 = delta_lower(p, q, PNorm::ONE, base)?;
    let dinf = delta_lower(p, q, PNorm::INFINITY, base)?;
    let dv = rat_to_f64(&total_variation(p, q));
    let h_dv = base.from_bits(binary_entropy(dv).expect("total variation lies in [0,1]"));
    let np = p.support_size() as f64;
    let nq = q.support_size() as f64;
    let entries = alloc::vec![
        BoundEntry {
            name: "entropy-difference",
            left: (hp - hq).abs(),
            right: dinf,
        },
        BoundEntry {
            name: "norm-monotonicity",
            left: dinf,
            right: d1,
        },
        BoundEntry {
            name: "sum-distance-by-variation",
            left: d1,
            right: dv * base.log(np * nq) + 2.0 * h_dv,
        },
        BoundEntry {
            name: "max-distance-by-variation",
            left: dinf,
            right: dv * base.log(np.max(nq)) + h_dv,
        },
    ];
    Ok(BoundReport { entries })
}

/// Checks, on one joint, that the distance from a joint to its own row
/// marginal is the conditional entropy of the column variable given the
/// row variable.
///
/// The row variable `X` and the pair `(X, Y)` admit exactly one coupling
/// consistent with their shared coordinate; its `delta_p` collapses to
/// `H(Y|X)` for every `p`. The first component materializes that forced
/// coupling (rows indexed by `X`, columns by the flattened pair) and
/// evaluates it; the second computes `H(Y|X)` directly. They agree by
/// construction; both are returned so either path can be regression-tested
/// against the other.
pub fn conditional_entropy_distance_check(s: &Joint, base: LogBase) -> (f64, f64) {
    let (rows, cols) = (s.rows(), s.cols());
    let mut cells: Vec<(usize, usize, BigRational)> = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let w = s.get(i, j);
            if w.is_positive() {
                cells.push((i, i * cols + j, w.clone()));
            }
        }
    }
    let forced = Joint::from_cells_unchecked(rows, rows * cols, &cells);
    let via_coupling = delta_p(&forced, PNorm::ONE, base);
    let direct = conditional_entropy(s, Axis::Rows, base);
    (via_coupling, direct)
}
