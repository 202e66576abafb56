//! Controlled crossings from exact rationals into `f64`.
//!
//! Entropy values are irrational almost everywhere, so they are reported as
//! floats. Two things keep that boundary tame: a rational-to-float conversion
//! that stays accurate for numerators and denominators far beyond the `f64`
//! exponent range, and compensated summation for entropy accumulations.

use num_bigint::BigUint;
use num_rational::BigRational;
// Needed for float math under no_std; whenever std is in the dependency
// graph (test builds pull it in), its inherent f64 methods shadow the
// trait and this import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, ToPrimitive, Zero};

/// Converts an exact rational to the nearest-ish `f64`.
///
/// The naive `numer as f64 / denom as f64` overflows to `inf/inf = NaN` once
/// either side exceeds ~1e308, which happens routinely for dyadic masses with
/// thousand-bit denominators. This scales both sides so the quotient is
/// computed at 55 bits of precision and then rebuilds the exponent, keeping
/// the relative error within a couple of ulps for any magnitude representable
/// in `f64` (and flushing to 0 or +/-inf beyond that).
pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let shift: i64 = 55 - (num.bits() as i64 - den.bits() as i64);
    let q: BigUint = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    // q has 54..=56 significant bits, so this conversion is exact up to the
    // final rounding of the division above.
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * 2.0f64.powi(-shift as i32);
    if neg {
        -mag
    } else {
        mag
    }
}

/// Neumaier-compensated accumulator for sums of `f64` terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
