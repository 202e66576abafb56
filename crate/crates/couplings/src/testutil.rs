//! Helpers shared by the unit-test modules: exact-rational literals and
//! weight-based random generators for distributions and joints.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use crate::dist::{Dist, Joint};

/// Shorthand for an exact rational literal.
pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Absolute-tolerance comparison for measure values.
pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Normalizes nonnegative integer weights (not all zero) into a
/// distribution.
pub(crate) fn dist_from_weights(weights: &[u32]) -> Dist {
    let total: u64 = weights.iter().map(|&w| u64::from(w)).sum();
    let masses = weights
        .iter()
        .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    Dist::new(masses).expect("normalized weights form a distribution")
}

/// Normalizes a row-major weight grid into a joint.
pub(crate) fn joint_from_weights(rows: usize, cols: usize, weights: &[u32]) -> Joint {
    let total: u64 = weights.iter().map(|&w| u64::from(w)).sum();
    let masses = weights
        .iter()
        .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    Joint::from_flat(rows, cols, masses).expect("normalized weights form a joint")
}

/// Random distribution with up to `max_len` points and integer weights in
/// `0..=max_w` (zero masses allowed, total forced positive).
pub(crate) fn arb_dist(max_len: usize, max_w: u32) -> impl Strategy<Value = Dist> {
    proptest::collection::vec(0..=max_w, 1..=max_len)
        .prop_filter("total weight must be positive", |w| {
            w.iter().any(|&x| x > 0)
        })
        .prop_map(|w| dist_from_weights(&w))
}

/// Random joint with bounded shape and integer cell weights.
pub(crate) fn arb_joint(
    max_rows: usize,
    max_cols: usize,
    max_w: u32,
) -> impl Strategy<Value = Joint> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..=max_w, r * c)
            .prop_filter("total weight must be positive", |w| {
                w.iter().any(|&x| x > 0)
            })
            .prop_map(move |w| joint_from_weights(r, c, &w))
    })
}
