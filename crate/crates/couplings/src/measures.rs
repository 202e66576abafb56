//! Entropy, divergence, and distance measures.
//!
//! Inputs are exact rational distributions; measure values are `f64`.
//! Every sum is compensated, and logarithm arguments are formed as exact
//! rational ratios before conversion, so structural identities hold
//! exactly in the output: independent couplings have mutual information
//! `0.0`, functional couplings have conditional entropy `0.0`, and
//! `kl_divergence(p, p)` is `0.0`, all without tolerance.

use num_rational::BigRational;
// Needed for float math under no_std; whenever std is in the dependency
// graph (test builds pull it in), its inherent f64 methods shadow the
// trait and this import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, Zero};

use crate::dist::{Dist, Joint};
use crate::float::{rat_to_f64, Kahan};
use crate::{Error, Result};

/// Base of the logarithm shared by all measures, any real greater than 1.
///
/// The choice only rescales values; [`LogBase::BITS`] is the conventional
/// default throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase {
    base: f64,
}

impl LogBase {
    /// Base-2 logarithms; entropies in bits.
    pub const BITS: Self = Self { base: 2.0 };

    /// Natural logarithms; entropies in nats.
    pub const NATS: Self = Self {
        base: core::f64::consts::E,
    };

    /// Validates `base > 1` (finite).
    pub fn new(base: f64) -> Result<Self> {
        if !base.is_finite() || base <= 1.0 {
            return Err(Error::OutOfRange(
                "logarithm base must be a finite real greater than 1",
            ));
        }
        Ok(Self { base })
    }

    /// The base as a float.
    pub fn value(self) -> f64 {
        self.base
    }

    /// The base-`self` logarithm of a positive `x`.
    pub(crate) fn log(self, x: f64) -> f64 {
        if self.base == 2.0 {
            x.log2()
        } else {
            x.ln() / self.base.ln()
        }
    }

    /// Rescales a base-2 quantity (bits) into this base.
    pub(crate) fn from_bits(self, bits: f64) -> f64 {
        if self.base == 2.0 {
            bits
        } else {
            bits / self.base.log2()
        }
    }
}

/// Order parameter for the one-parameter entropy family: any finite α ≥ 0,
/// or ∞.
///
/// α = 1 (the [`OrderAlpha::SHANNON`] constant) selects Shannon entropy,
/// α = 0 the logarithm of the support size, and α = ∞
/// ([`OrderAlpha::INFINITY`]) the min-entropy −log max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderAlpha {
    value: f64,
}

impl OrderAlpha {
    /// α = 1: Shannon entropy.
    pub const SHANNON: Self = Self { value: 1.0 };

    /// α = ∞: min-entropy, −log of the largest mass.
    pub const INFINITY: Self = Self {
        value: f64::INFINITY,
    };

    /// Validates α ≥ 0 (∞ allowed, NaN rejected).
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::OutOfRange(
                "entropy order must be a nonnegative real or infinity",
            ));
        }
        Ok(Self { value })
    }

    /// The order as a float (`f64::INFINITY` for the min-entropy order).
    pub fn value(self) -> f64 {
        self.value
    }

    /// True exactly for α = 1.
    pub fn is_shannon(self) -> bool {
        self.value == 1.0
    }

    /// True exactly for α = ∞.
    pub fn is_infinite(self) -> bool {
        self.value.is_infinite()
    }

    pub(crate) fn class(self) -> AlphaClass {
        if self.value == 0.0 {
            AlphaClass::Zero
        } else if self.value == 1.0 {
            AlphaClass::Shannon
        } else if self.value.is_infinite() {
            AlphaClass::Infinity
        } else if self.value < 1.0 {
            AlphaClass::Below(self.value)
        } else {
            AlphaClass::Above(self.value)
        }
    }
}

/// The five regimes of the order parameter, split where the defining
/// formula changes.
#[derive(Debug, Clone, Copy)]
pub(crate) enum AlphaClass {
    Zero,
    Below(f64),
    Shannon,
    Above(f64),
    Infinity,
}

/// Selects the conditioning variable of a [`Joint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Condition on the row variable.
    Rows,
    /// Condition on the column variable.
    Columns,
}

/// Shannon entropy −Σ p log p, with 0·log 0 = 0.
pub fn shannon_entropy(p: &Dist, base: LogBase) -> f64 {
    shannon_of_rationals(p.masses(), base)
}

/// Entropy of a joint read as one distribution over all cells.
pub fn joint_entropy(s: &Joint, base: LogBase) -> f64 {
    shannon_of_rationals(s.masses(), base)
}

fn shannon_of_rationals(masses: &[BigRational], base: LogBase) -> f64 {
    let mut acc = Kahan::new();
    for m in masses {
        if m.is_positive() {
            let x = rat_to_f64(m);
            acc.add(-x * base.log(x));
        }
    }
    acc.total()
}

/// Entropy of one variable of a joint given the other:
/// Σ s · log(marginal / s) over the conditioning axis.
///
/// Each ratio is formed exactly before taking the logarithm, so the result
/// is a sum of nonnegative terms and is exactly `0.0` whenever the
/// non-conditioning variable is a function of the conditioning one.
pub fn conditional_entropy(s: &Joint, given: Axis, base: LogBase) -> f64 {
    let (rows, cols) = s.marginals();
    let marginal = match given {
        Axis::Rows => rows,
        Axis::Columns => cols,
    };
    let mut acc = Kahan::new();
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            let cell = s.get(i, j);
            if !cell.is_positive() {
                continue;
            }
            let m = match given {
                Axis::Rows => &marginal[i],
                Axis::Columns => &marginal[j],
            };
            let ratio = m / cell;
            acc.add(rat_to_f64(cell) * base.log(rat_to_f64(&ratio)));
        }
    }
    acc.total()
}

/// Mutual information Σ s · log(s / (p·q)) against the product of the
/// marginals.
///
/// Ratios are exact, so independent couplings yield exactly `0.0`. Tiny
/// negative rounding residue is clamped to zero; the true value is never
/// negative.
pub fn mutual_information(s: &Joint, base: LogBase) -> f64 {
    let (p, q) = s.marginals();
    let mut acc = Kahan::new();
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            let cell = s.get(i, j);
            if !cell.is_positive() {
                continue;
            }
            let ratio = cell / (&p[i] * &q[j]);
            acc.add(rat_to_f64(cell) * base.log(rat_to_f64(&ratio)));
        }
    }
    acc.total().max(0.0)
}

/// Relative entropy Σ p · log(p / q) of `p` against `q` on a common
/// alphabet.
///
/// Returns `+∞` when `p` puts mass where `q` has none, and exactly `0.0`
/// when `p == q`.
pub fn kl_divergence(p: &Dist, q: &Dist, base: LogBase) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = Kahan::new();
    for i in 0..p.len() {
        if !p[i].is_positive() {
            continue;
        }
        if !q[i].is_positive() {
            return Ok(f64::INFINITY);
        }
        let ratio = &p[i] / &q[i];
        acc.add(rat_to_f64(&p[i]) * base.log(rat_to_f64(&ratio)));
    }
    Ok(acc.total().max(0.0))
}

/// Entropy of order α: `(1/(1−α)) log Σ pᵅ`, with the three limiting
/// orders evaluated by their closed forms (support size at α = 0, Shannon
/// at α = 1, −log max at α = ∞).
pub fn renyi_entropy(p: &Dist, alpha: OrderAlpha, base: LogBase) -> f64 {
    match alpha.class() {
        AlphaClass::Zero => base.log(p.support_size() as f64),
        AlphaClass::Shannon => shannon_entropy(p, base),
        AlphaClass::Infinity => {
            let max = p
                .masses()
                .iter()
                .max()
                .expect("a distribution has at least one mass");
            -base.log(rat_to_f64(max))
        }
        AlphaClass::Below(a) | AlphaClass::Above(a) => {
            let mut acc = Kahan::new();
            for m in p.masses() {
                if m.is_positive() {
                    acc.add(rat_to_f64(m).powf(a));
                }
            }
            base.log(acc.total()) / (1.0 - a)
        }
    }
}

/// Entropy of order α for a stream of float masses (zeros allowed and
/// skipped); used where materializing exact masses would be wasteful.
pub(crate) fn renyi_of_f64_masses<I>(masses: I, alpha: OrderAlpha, base: LogBase) -> f64
where
    I: IntoIterator<Item = f64>,
{
    match alpha.class() {
        AlphaClass::Zero => {
            let count = masses.into_iter().filter(|&x| x > 0.0).count();
            base.log(count as f64)
        }
        AlphaClass::Shannon => {
            let mut acc = Kahan::new();
            for x in masses {
                if x > 0.0 {
                    acc.add(-x * base.log(x));
                }
            }
            acc.total()
        }
        AlphaClass::Infinity => {
            let mut max = 0.0f64;
            for x in masses {
                if x > max {
                    max = x;
                }
            }
            -base.log(max)
        }
        AlphaClass::Below(a) | AlphaClass::Above(a) => {
            let mut acc = Kahan::new();
            for x in masses {
                if x > 0.0 {
                    acc.add(x.powf(a));
                }
            }
            base.log(acc.total()) / (1.0 - a)
        }
    }
}

/// The binary entropy function −x·log₂x − (1−x)·log₂(1−x), in bits by
/// definition.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(
            "binary entropy argument must lie in [0, 1]",
        ));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Total variation distance `(1/2) Σ |p − q|`, exact.
///
/// The shorter distribution is padded with zeros, so alphabets of
/// different lengths compare by their common extension.
pub fn total_variation(p: &Dist, q: &Dist) -> BigRational {
    let len = p.len().max(q.len());
    let zero = BigRational::zero();
    let mut sum = BigRational::zero();
    for i in 0..len {
        let a = if i < p.len() { &p[i] } else { &zero };
        let b = if i < q.len() { &q[i] } else { &zero };
        sum += (a - b).abs();
    }
    sum / BigRational::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_dist, arb_joint, close, rational};
    use proptest::prelude::*;

    fn example_joint() -> Joint {
        Joint::new(vec![
            vec![rational(1, 4), rational(1, 4)],
            vec![rational(1, 2), rational(0, 1)],
        ])
        .unwrap()
    }

    fn diagonal(p: &Dist) -> Joint {
        let n = p.len();
        let cells: Vec<(usize, usize, BigRational)> =
            (0..n).map(|i| (i, i, p[i].clone())).collect();
        Joint::from_cells_unchecked(n, n, &cells)
    }

    #[test]
    fn shannon_pins() {
        let b = LogBase::BITS;
        assert_eq!(
            shannon_entropy(&Dist::from_ratios(&[(1, 1), (0, 1), (0, 1)]).unwrap(), b),
            0.0
        );
        assert_eq!(
            shannon_entropy(&Dist::from_ratios(&[(1, 2), (1, 2)]).unwrap(), b),
            1.0
        );
        assert!(close(
            shannon_entropy(
                &Dist::from_ratios(&[(1, 2), (1, 4), (1, 4)]).unwrap(),
                b
            ),
            1.5,
            1e-12
        ));
    }

    #[test]
    fn base_changes_only_rescale() {
        let p = Dist::from_ratios(&[(1, 2), (1, 4), (1, 4)]).unwrap();
        let bits = shannon_entropy(&p, LogBase::BITS);
        let nats = shannon_entropy(&p, LogBase::NATS);
        let ten = shannon_entropy(&p, LogBase::new(10.0).unwrap());
        assert!(close(nats, bits * core::f64::consts::LN_2, 1e-12));
        assert!(close(ten, bits * 2.0f64.log10(), 1e-12));
        assert!(LogBase::new(1.0).is_err());
        assert!(LogBase::new(f64::NAN).is_err());
    }

    #[test]
    fn joint_and_conditional_pins() {
        let s = example_joint();
        let b = LogBase::BITS;
        assert!(close(joint_entropy(&s, b), 1.5, 1e-12));
        let h_q = shannon_entropy(&Dist::from_ratios(&[(3, 4), (1, 4)]).unwrap(), b);
        assert!(close(
            conditional_entropy(&s, Axis::Columns, b),
            1.5 - h_q,
            1e-12
        ));
        assert!(close(conditional_entropy(&s, Axis::Rows, b), 0.5, 1e-12));
    }

    #[test]
    fn functional_coupling_has_zero_conditional_entropy_exactly() {
        let p = Dist::from_ratios(&[(1, 2), (1, 3), (1, 6)]).unwrap();
        let d = diagonal(&p);
        assert_eq!(conditional_entropy(&d, Axis::Rows, LogBase::BITS), 0.0);
        assert_eq!(conditional_entropy(&d, Axis::Columns, LogBase::BITS), 0.0);
    }

    #[test]
    fn independence_has_zero_mutual_information_exactly() {
        let p = Dist::from_ratios(&[(1, 2), (1, 3), (1, 6)]).unwrap();
        let q = Dist::from_ratios(&[(3, 4), (1, 4)]).unwrap();
        assert_eq!(mutual_information(&Joint::product(&p, &q), LogBase::BITS), 0.0);
        assert!(close(
            conditional_entropy(&Joint::product(&p, &q), Axis::Columns, LogBase::BITS),
            shannon_entropy(&p, LogBase::BITS),
            1e-12
        ));
    }

    #[test]
    fn mutual_information_pin() {
        let s = example_joint();
        let (p, q) = s.marginals();
        let b = LogBase::BITS;
        let composed = shannon_entropy(&p, b) + shannon_entropy(&q, b) - joint_entropy(&s, b);
        let direct = mutual_information(&s, b);
        assert!(close(direct, composed, 1e-9));
        assert!(close(direct, 0.31127812445913283, 1e-9));
    }

    #[test]
    fn kl_pins() {
        let b = LogBase::BITS;
        let p = Dist::from_ratios(&[(1, 1), (0, 1)]).unwrap();
        let u = Dist::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        assert_eq!(kl_divergence(&u, &u, b).unwrap(), 0.0);
        assert!(close(kl_divergence(&p, &u, b).unwrap(), 1.0, 1e-12));
        assert_eq!(kl_divergence(&u, &p, b).unwrap(), f64::INFINITY);
        assert!(matches!(
            kl_divergence(&p, &Dist::uniform(3).unwrap(), b),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn renyi_pins() {
        let b = LogBase::BITS;
        let half = Dist::from_ratios(&[(1, 2), (1, 2), (0, 1)]).unwrap();
        assert!(close(
            renyi_entropy(&half, OrderAlpha::new(0.0).unwrap(), b),
            1.0,
            1e-12
        ));
        let u2 = Dist::uniform(2).unwrap();
        assert!(close(
            renyi_entropy(&u2, OrderAlpha::new(2.0).unwrap(), b),
            1.0,
            1e-12
        ));
        let skew = Dist::from_ratios(&[(3, 4), (1, 4)]).unwrap();
        assert!(close(
            renyi_entropy(&skew, OrderAlpha::INFINITY, b),
            0.4150374992788438,
            1e-12
        ));
        assert_eq!(
            renyi_entropy(&skew, OrderAlpha::SHANNON, b),
            shannon_entropy(&skew, b)
        );
        let u4 = Dist::uniform(4).unwrap();
        assert!(close(
            renyi_entropy(&u4, OrderAlpha::new(0.5).unwrap(), b),
            2.0,
            1e-12
        ));
        assert!(OrderAlpha::new(-0.5).is_err());
        assert!(OrderAlpha::new(f64::NAN).is_err());
    }

    #[test]
    fn binary_entropy_pins() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(close(binary_entropy(0.5).unwrap(), 1.0, 1e-12));
        assert!(close(binary_entropy(0.25).unwrap(), 0.8112781244591328, 1e-12));
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn total_variation_pins() {
        let u = Dist::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let v = Dist::from_ratios(&[(1, 4), (3, 4)]).unwrap();
        assert_eq!(total_variation(&u, &u), rational(0, 1));
        assert_eq!(total_variation(&u, &v), rational(1, 4));
        let a = Dist::from_ratios(&[(1, 1), (0, 1)]).unwrap();
        let b = Dist::from_ratios(&[(0, 1), (1, 1)]).unwrap();
        assert_eq!(total_variation(&a, &b), rational(1, 1));
        let point = Dist::from_ratios(&[(1, 1)]).unwrap();
        assert_eq!(total_variation(&point, &u), rational(1, 2));
    }

    proptest! {
        #[test]
        fn entropy_bounds_and_alpha_monotonicity(p in arb_dist(6, 8)) {
            let b = LogBase::BITS;
            let h = shannon_entropy(&p, b);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (p.len() as f64).log2() + 1e-9);
            let grid = [0.0, 0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 4.0];
            let mut prev = f64::INFINITY;
            for a in grid {
                let ha = renyi_entropy(&p, OrderAlpha::new(a).unwrap(), b);
                prop_assert!(ha <= prev + 1e-9, "order {} gave {} > {}", a, ha, prev);
                prev = ha;
            }
            let hinf = renyi_entropy(&p, OrderAlpha::INFINITY, b);
            prop_assert!(hinf <= prev + 1e-9);
        }

        #[test]
        fn joint_identities(s in arb_joint(5, 5, 8)) {
            let b = LogBase::BITS;
            let (p, q) = s.marginals();
            let hs = joint_entropy(&s, b);
            let hp = shannon_entropy(&p, b);
            let hq = shannon_entropy(&q, b);
            let h_rows_given_cols = conditional_entropy(&s, Axis::Columns, b);
            let h_cols_given_rows = conditional_entropy(&s, Axis::Rows, b);
            // chain rule in both directions
            prop_assert!(close(hs, hq + h_rows_given_cols, 1e-9));
            prop_assert!(close(hs, hp + h_cols_given_rows, 1e-9));
            // joint entropy sandwiched between max marginal and sum
            prop_assert!(hs >= hp.max(hq) - 1e-9);
            prop_assert!(hs <= hp + hq + 1e-9);
            // mutual information nonnegative, symmetric in the two routes
            let i = mutual_information(&s, b);
            prop_assert!(i >= 0.0);
            prop_assert!(close(i, hp + hq - hs, 1e-9));
            prop_assert!(i <= hp.min(hq) + 1e-9);
        }

        #[test]
        fn total_variation_is_a_metric(
            p in arb_dist(5, 8),
            q in arb_dist(5, 8),
            r in arb_dist(5, 8),
        ) {
            let pq = total_variation(&p, &q);
            prop_assert_eq!(&pq, &total_variation(&q, &p));
            prop_assert!(pq >= BigRational::zero());
            prop_assert!(pq <= BigRational::from_integer(1.into()));
            let pr = total_variation(&p, &r);
            let rq = total_variation(&r, &q);
            prop_assert!(pq <= pr + rq);
        }
    }
}
