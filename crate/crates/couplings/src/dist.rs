//! Validated finite distributions and joint distributions.
//!
//! Masses are exact [`BigRational`]s and every constructor enforces the
//! simplex invariants, so downstream code never re-checks nonnegativity or
//! normalization. Zero masses are legal and retained: a distribution keeps
//! its declared alphabet length, and support-sensitive operations look at
//! [`Dist::support`] instead of the raw length.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A probability distribution on the alphabet `{0, .., n-1}`.
///
/// Invariants, enforced at construction:
/// - at least one mass,
/// - every mass nonnegative,
/// - masses sum to exactly `1` as rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist {
    masses: Vec<BigRational>,
}

impl Dist {
    /// Builds a distribution from exact masses, validating the invariants.
    pub fn new(masses: Vec<BigRational>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::ZeroLength);
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(Error::NegativeMass);
        }
        let total: BigRational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { masses })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self> {
        let masses = ratios
            .iter()
            .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        Self::new(masses)
    }

    /// The uniform distribution on `m` points.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroLength);
        }
        let mass = BigRational::new(BigInt::one(), BigInt::from(m));
        Self::new(vec![mass; m])
    }

    /// Alphabet length, including zero-mass points.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    /// Always false: a valid distribution has at least one mass.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The masses, in alphabet order.
    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> Support {
        Support {
            indices: (0..self.len()).filter(|&i| self.masses[i].is_positive()).collect(),
        }
    }

    /// Number of strictly positive masses.
    pub fn support_size(&self) -> usize {
        self.masses.iter().filter(|m| m.is_positive()).count()
    }

    /// True when all mass sits on one point.
    pub fn is_point_mass(&self) -> bool {
        self.support_size() == 1
    }

    /// True when the positive masses of `self` and `other` coincide as
    /// multisets; alphabet lengths and zero padding are ignored.
    ///
    /// This is exactly the kernel of the conditional-entropy pseudometrics:
    /// two distributions at distance zero are permutations of each other up
    /// to zero masses.
    pub fn is_permutation_of(&self, other: &Dist) -> bool {
        let mut a: Vec<&BigRational> =
            self.masses.iter().filter(|m| m.is_positive()).collect();
        let mut b: Vec<&BigRational> =
            other.masses.iter().filter(|m| m.is_positive()).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

impl Index<usize> for Dist {
    type Output = BigRational;

    fn index(&self, i: usize) -> &BigRational {
        &self.masses[i]
    }
}

/// The index set of strictly positive masses of a [`Dist`], ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    /// The indices, in ascending order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// A valid distribution always has nonempty support.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A joint distribution on `{0, .., rows-1} x {0, .., cols-1}`, stored
/// row-major.
///
/// Invariants match [`Dist`]: nonnegative exact masses summing to one, with
/// at least one cell. Shape is part of the value: two joints compare equal
/// only if their shapes and all cells agree exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Joint {
    rows: usize,
    cols: usize,
    masses: Vec<BigRational>,
}

impl Joint {
    /// Builds a joint from a rectangular matrix of exact masses.
    pub fn new(matrix: Vec<Vec<BigRational>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::ZeroLength);
        }
        let rows = matrix.len();
        let cols = matrix[0].len();
        for row in &matrix {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: (rows, cols),
                    found: (rows, row.len()),
                });
            }
        }
        let masses: Vec<BigRational> = matrix.into_iter().flatten().collect();
        Self::from_flat(rows, cols, masses)
    }

    /// Builds a joint from a row-major mass vector of length `rows * cols`.
    pub fn from_flat(rows: usize, cols: usize, masses: Vec<BigRational>) -> Result<Self> {
        if rows == 0 || cols == 0 || masses.is_empty() {
            return Err(Error::ZeroLength);
        }
        if masses.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (masses.len() / cols.max(1), cols),
            });
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(Error::NegativeMass);
        }
        let total: BigRational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { rows, cols, masses })
    }

    /// The independent coupling of `p` and `q`: cell `(i, j)` carries
    /// `p[i] * q[j]`.
    pub fn product(p: &Dist, q: &Dist) -> Self {
        let mut masses = Vec::with_capacity(p.len() * q.len());
        for pi in p.masses() {
            for qj in q.masses() {
                masses.push(pi * qj);
            }
        }
        Self {
            rows: p.len(),
            cols: q.len(),
            masses,
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The mass at `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.masses[i * self.cols + j]
    }

    /// All masses, row-major.
    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    /// Both marginals, computed by exact row and column sums.
    pub fn marginals(&self) -> (Dist, Dist) {
        let mut row = vec![BigRational::zero(); self.rows];
        let mut col = vec![BigRational::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let m = self.get(i, j);
                row[i] += m;
                col[j] += m;
            }
        }
        let p = Dist::new(row).expect("row sums of a valid joint form a distribution");
        let q = Dist::new(col).expect("column sums of a valid joint form a distribution");
        (p, q)
    }

    /// Reads the joint as a distribution on the flattened alphabet, in
    /// row-major order. Entropies of the flattening are entropies of the
    /// joint.
    pub fn flatten(&self) -> Dist {
        Dist::new(self.masses.clone()).expect("a valid joint flattens to a distribution")
    }

    /// Cells with strictly positive mass, row-major.
    pub fn positive_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j).is_positive() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub(crate) fn from_cells_unchecked(
        rows: usize,
        cols: usize,
        cells: &[(usize, usize, BigRational)],
    ) -> Self {
        let mut masses = vec![BigRational::zero(); rows * cols];
        for (i, j, w) in cells {
            masses[i * cols + j] = w.clone();
        }
        debug_assert!(masses.iter().sum::<BigRational>().is_one());
        Self { rows, cols, masses }
    }
}
