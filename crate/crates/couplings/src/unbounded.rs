//! A family of couplings with identical marginals whose order-α entropy
//! grows without bound even though the marginal's entropy is finite, for
//! any order α strictly between 0 and 1.
//!
//! The marginal is a power-law `p_i ∝ i^(−β)` truncated to `N` points.
//! Stage `n` of the family spreads a thin constant layer `κ = p_n · n^(−r)`
//! over the top-left `n×n` corner, tops it up with a rank-one residual
//! term to restore the marginals exactly, and keeps everything past `n` on
//! the diagonal. The corner alone contributes at least `n²·κ^α` to the
//! power sum, which gives the closed-form lower bound
//! `(1/(1−α))·log(n²·κ^α)` on the stage's entropy — a quantity that grows
//! like `(2 − (r+β)α)/(1−α) · log n`, hence diverges whenever
//! `r + β < 2/α`, while `β·α > 1` keeps the marginal entropy finite.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
// Needed for float math under no_std; whenever std is in the dependency
// graph (test builds pull it in), its inherent f64 methods shadow the
// trait and this import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, Zero};

use crate::dist::Joint;
use crate::float::{rat_to_f64, Kahan};
use crate::measures::{renyi_of_f64_masses, LogBase, OrderAlpha};
use crate::{Error, Result};

/// Parameters of the unbounded-entropy coupling family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnboundedFamilyParams {
    alpha: f64,
    beta: f64,
    r: f64,
}

impl UnboundedFamilyParams {
    /// Validates the parameter triple.
    ///
    /// Requires `0 < α < 1` (the divergence mechanism is specific to
    /// sub-unit orders), `β > 1` and `r > 1` (summable weights,
    /// sub-marginal corner layer), plus the two regime constraints:
    /// `β·α > 1` so the marginal's order-α entropy stays finite, and
    /// `r + β < 2/α` so the stage lower bounds actually diverge.
    pub fn new(alpha: f64, beta: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvariantViolation(String::from(
                "order must lie strictly between 0 and 1",
            )));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvariantViolation(String::from(
                "weight exponent must be finite and greater than 1",
            )));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::InvariantViolation(String::from(
                "corner exponent must be finite and greater than 1",
            )));
        }
        if !(beta * alpha > 1.0) {
            return Err(Error::InvariantViolation(String::from(
                "finite marginal entropy needs beta * alpha > 1",
            )));
        }
        if !(r + beta < 2.0 / alpha) {
            return Err(Error::InvariantViolation(String::from(
                "divergence needs r + beta < 2 / alpha",
            )));
        }
        Ok(Self { alpha, beta, r })
    }

    /// The entropy order α.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The power-law exponent β of the marginal weights.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The corner-layer exponent r.
    pub fn r(&self) -> f64 {
        self.r
    }
}

/// One row of a divergence trace: the stage index, the stage coupling's
/// order-α entropy, its closed-form lower bound, and the marginal's
/// order-α entropy for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRow {
    /// The stage index `n` (corner size).
    pub n: usize,
    /// The order-α entropy of the stage coupling.
    pub coupling_entropy: f64,
    /// The closed-form lower bound `(1/(1−α))·log(n²·κ^α)`.
    pub lower_bound: f64,
    /// The order-α entropy of the marginal, identical across stages.
    pub marginal_entropy: f64,
}

/// Exact power-law weight `i^(−β)` for the 1-based index `i`.
///
/// Integral exponents give the exact rational `1/i^β`; otherwise the
/// nearest `f64` of `i^(−β)` is taken, a dyadic rational that is then
/// carried exactly. Either way the construction downstream is exact.
fn exact_weight(i: usize, beta: f64) -> BigRational {
    if beta.fract() == 0.0 && beta <= u32::MAX as f64 {
        let denom = num_bigint::BigInt::from(i).pow(beta as u32);
        BigRational::new(num_bigint::BigInt::from(1), denom)
    } else {
        BigRational::from_float((i as f64).powf(-beta))
            .expect("a positive power of a positive integer is finite")
    }
}

/// Builds stage `n` of the family over a marginal truncated to
/// `truncation` points, entirely in exact rationals, and returns the
/// coupling together with the closed-form lower bound on its order-α
/// entropy.
///
/// The returned matrix is `truncation × truncation`, has both marginals
/// exactly equal to the truncated power law, and carries the constant
/// corner layer `κ = p_n · fl(n^(−r))` plus the normalized product of the
/// row and column residuals (the rank-one completion that restores the
/// marginals). The bound is evaluated on the κ actually built, so the
/// inequality `H_α(stage) ≥ bound` holds by cell-wise monotonicity rather
/// than only up to rounding of `n^(−r)`.
///
/// Materializes the full matrix: meant for desk-scale `truncation`. Use
/// [`divergence_trace`] for large stages.
pub fn build_stage(
    params: &UnboundedFamilyParams,
    n: usize,
    truncation: usize,
    base: LogBase,
) -> Result<(Joint, f64)> {
    if n == 0 || n > truncation {
        return Err(Error::InvariantViolation(String::from(
            "stage index must satisfy 1 <= n <= truncation",
        )));
    }
    let weights: Vec<BigRational> = (1..=truncation)
        .map(|i| exact_weight(i, params.beta))
        .collect();
    let total: BigRational = weights.iter().sum();
    if !total.is_positive() {
        return Err(Error::InvariantViolation(String::from(
            "marginal weights underflowed to zero",
        )));
    }
    let p: Vec<BigRational> = weights.iter().map(|w| w / &total).collect();

    let rho = BigRational::from_float((n as f64).powf(-params.r))
        .expect("a positive power of a positive integer is finite");
    let kappa = &p[n - 1] * &rho;
    let layer = &kappa * BigRational::from_integer(num_bigint::BigInt::from(n));
    let residuals: Vec<BigRational> = p[..n].iter().map(|pi| pi - &layer).collect();
    if residuals.iter().any(|a| a.is_negative()) {
        return Err(Error::InvariantViolation(String::from(
            "corner layer exceeds a marginal mass; r > 1 should prevent this",
        )));
    }
    let residual_total: BigRational = residuals.iter().sum();

    let zero = BigRational::zero();
    let mut matrix = vec![vec![zero; truncation]; truncation];
    for (i, row) in matrix.iter_mut().enumerate().take(n) {
        for (j, cell) in row.iter_mut().enumerate().take(n) {
            *cell = if residual_total.is_positive() {
                &kappa + &residuals[i] * &residuals[j] / &residual_total
            } else {
                kappa.clone()
            };
        }
    }
    for (i, row) in matrix.iter_mut().enumerate().skip(n) {
        row[i] = p[i].clone();
    }
    let joint = Joint::new(matrix)?;
    let bound = stage_bound(params.alpha, n, rat_to_f64(&kappa), base);
    Ok((joint, bound))
}

/// The closed-form stage bound `(1/(1−α))·log(n²·κ^α)`, evaluated in log
/// space so extreme magnitudes of κ cannot overflow.
fn stage_bound(alpha: f64, n: usize, kappa: f64, base: LogBase) -> f64 {
    (2.0 * base.log(n as f64) + alpha * base.log(kappa)) / (1.0 - alpha)
}

/// Cells of the `n×n` corner block, streamed row-major without
/// materializing the matrix.
struct CornerCells<'a> {
    residuals: &'a [f64],
    kappa: f64,
    inv_total: f64,
    idx: usize,
}

impl Iterator for CornerCells<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.residuals.len();
        if self.idx >= n * n {
            return None;
        }
        let (i, j) = (self.idx / n, self.idx % n);
        self.idx += 1;
        Some(self.kappa + self.residuals[i] * self.residuals[j] * self.inv_total)
    }
}

/// Runs the family over increasing stages and reports, per stage, the
/// coupling's order-α entropy, its lower bound, and the marginal's
/// order-α entropy.
///
/// Works in floating point throughout and streams the `n²` corner cells,
/// so stages far beyond what [`build_stage`] can materialize are fine
/// (the cost is `O(n²)` time but `O(truncation)` memory). Stages must be
/// strictly increasing and lie in `1..=truncation`.
pub fn divergence_trace(
    params: &UnboundedFamilyParams,
    stages: &[usize],
    truncation: usize,
    base: LogBase,
) -> Result<Vec<StageRow>> {
    for (k, &n) in stages.iter().enumerate() {
        if n == 0 || n > truncation {
            return Err(Error::InvariantViolation(String::from(
                "every stage must satisfy 1 <= n <= truncation",
            )));
        }
        if k > 0 && stages[k - 1] >= n {
            return Err(Error::InvariantViolation(String::from(
                "stages must be strictly increasing",
            )));
        }
    }

    let integral = params.beta.fract() == 0.0 && params.beta <= i32::MAX as f64;
    let weights: Vec<f64> = (1..=truncation)
        .map(|i| {
            if integral {
                (i as f64).powi(params.beta as i32).recip()
            } else {
                (i as f64).powf(-params.beta)
            }
        })
        .collect();
    let mut z = Kahan::new();
    for &w in &weights {
        z.add(w);
    }
    let total = z.total();
    let p: Vec<f64> = weights.iter().map(|w| w / total).collect();

    let alpha = OrderAlpha::new(params.alpha).expect("validated at construction");
    let marginal_entropy = renyi_of_f64_masses(p.iter().copied(), alpha, base);

    let mut rows = Vec::with_capacity(stages.len());
    for &n in stages {
        let kappa = p[n - 1] * (n as f64).powf(-params.r);
        let layer = kappa * n as f64;
        let residuals: Vec<f64> = p[..n].iter().map(|pi| (pi - layer).max(0.0)).collect();
        let mut c = Kahan::new();
        for &a in &residuals {
            c.add(a);
        }
        let residual_total = c.total();
        let corner = CornerCells {
            residuals: &residuals,
            kappa,
            inv_total: if residual_total > 0.0 {
                residual_total.recip()
            } else {
                0.0
            },
            idx: 0,
        };
        let coupling_entropy =
            renyi_of_f64_masses(corner.chain(p[n..].iter().copied()), alpha, base);
        rows.push(StageRow {
            n,
            coupling_entropy,
            lower_bound: stage_bound(params.alpha, n, kappa, base),
            marginal_entropy,
        });
    }
    Ok(rows)
}
