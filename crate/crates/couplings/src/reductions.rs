//! Encodings of classical weight-splitting decision problems — subset sum,
//! partition, and 3-partition — as coupling optimization instances, with
//! decision procedures driven by the exact solvers.
//!
//! Each decision rests on exact rational structure of the optimizer's
//! output (a functional support, or exactly equal column sums), never on
//! comparing floating-point entropy values. Classical bitset
//! dynamic-programming oracles are provided as independent ground truth
//! for cross-checking.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::dist::Dist;
use crate::measures::{Axis, LogBase, OrderAlpha};
use crate::polytope::is_functional;
use crate::solve::{
    min_entropy_coupling_exact_with_budget, optimal_channel_with_budget, CouplingSolution,
    DEFAULT_CHANNEL_BUDGET, DEFAULT_SEARCH_BUDGET,
};
use crate::{Error, Result};

/// Largest table size (in reachable-sum entries) the dynamic-programming
/// oracles will allocate before failing with [`Error::BudgetExceeded`].
pub const DP_TABLE_CAP: u64 = 1 << 24;

/// Slack for the corroborating floating-point objective tests; the
/// decisions themselves are made on exact rational structure.
const VALUE_TOL: f64 = 1e-9;

/// A subset-sum question: is there a subset of the weights summing to the
/// target?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    weights: Vec<u64>,
    target: u64,
}

impl SubsetSumInstance {
    /// Validates and builds an instance.
    ///
    /// Requires at least two weights, every weight positive, and
    /// `1 <= target < total`: a target of zero is trivially reachable and
    /// a target at or above the total is trivially unreachable (equality
    /// would make one marginal mass vanish in the encoding).
    pub fn new(weights: Vec<u64>, target: u64) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvariantViolation(String::from(
                "subset-sum instance needs at least two weights",
            )));
        }
        if weights.iter().any(|&d| d == 0) {
            return Err(Error::InvariantViolation(String::from(
                "subset-sum weights must all be positive",
            )));
        }
        let total: u64 = weights.iter().sum();
        if target == 0 || target >= total {
            return Err(Error::InvariantViolation(String::from(
                "subset-sum target must satisfy 1 <= target < total weight",
            )));
        }
        Ok(Self { weights, target })
    }

    /// The weights.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// The target sum.
    pub fn target(&self) -> u64 {
        self.target
    }

    /// The total weight.
    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }
}

/// A 3-partition question: can the `3m` weights be split into `m` groups
/// of equal sum `k`?
///
/// The window constraint `k/4 < d < k/2` on every weight forces any
/// equal-sum group to contain exactly three weights (two sum below `k`,
/// four above), so "equal column sums" and "groups of three" coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    weights: Vec<u64>,
    bound: u64,
}

impl ThreePartitionInstance {
    /// Validates and builds an instance: the weight count must be a
    /// positive multiple of three, every weight must lie strictly inside
    /// `(k/4, k/2)`, and the weights must sum to `m·k`.
    pub fn new(weights: Vec<u64>, bound: u64) -> Result<Self> {
        if weights.is_empty() || weights.len() % 3 != 0 {
            return Err(Error::InvariantViolation(String::from(
                "3-partition weight count must be a positive multiple of three",
            )));
        }
        if bound == 0 {
            return Err(Error::InvariantViolation(String::from(
                "3-partition bound must be positive",
            )));
        }
        let k = u128::from(bound);
        if weights
            .iter()
            .any(|&d| 4 * u128::from(d) <= k || 2 * u128::from(d) >= k)
        {
            return Err(Error::InvariantViolation(String::from(
                "3-partition weights must lie strictly between a quarter and a half of the bound",
            )));
        }
        let m = (weights.len() / 3) as u128;
        let total: u128 = weights.iter().map(|&d| u128::from(d)).sum();
        if total != m * k {
            return Err(Error::InvariantViolation(String::from(
                "3-partition weights must sum to the bound times the group count",
            )));
        }
        Ok(Self { weights, bound })
    }

    /// The weights (`3m` of them).
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// The common group sum `k`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// The number of groups `m`.
    pub fn groups(&self) -> usize {
        self.weights.len() / 3
    }
}

/// A reduction-driven decision together with the solver artifact that
/// certifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutcome {
    answer: bool,
    selection: Option<Vec<usize>>,
    solution: CouplingSolution,
}

impl ReductionOutcome {
    /// The YES/NO answer.
    pub fn answer(&self) -> bool {
        self.answer
    }

    /// A witness extracted from the solver's coupling when the answer is
    /// YES: for subset sum, the indices of a subset hitting the target;
    /// for partition, the indices of one side of an equal split; for
    /// 3-partition, the group index assigned to each weight.
    pub fn selection(&self) -> Option<&[usize]> {
        self.selection.as_deref()
    }

    /// The optimizer's solution the decision was read off of.
    pub fn solution(&self) -> &CouplingSolution {
        &self.solution
    }
}

fn ratio_dist(weights: &[u64]) -> Dist {
    let total: u64 = weights.iter().sum();
    let total = BigInt::from(total);
    let masses = weights
        .iter()
        .map(|&d| BigRational::new(BigInt::from(d), total.clone()))
        .collect();
    Dist::new(masses).expect("positive integer ratios normalize exactly")
}

/// Encodes a subset-sum instance as a pair of marginals: `P` carries the
/// weights normalized by the total `D`, and `Q = (s/D, 1 - s/D)` carries
/// the target.
///
/// A coupling of `P` and `Q` in which every row has a single positive
/// cell splits the weights into a side summing to `s` and a side summing
/// to `D - s`, so the instance is a YES exactly when such a coupling
/// exists.
pub fn encode_subset_sum(inst: &SubsetSumInstance) -> (Dist, Dist) {
    let p = ratio_dist(inst.weights());
    let total = BigInt::from(inst.total());
    let hit = BigRational::new(BigInt::from(inst.target()), total);
    let miss = BigRational::from(BigInt::from(1)) - hit.clone();
    let q = Dist::new(vec![hit, miss]).expect("target strictly inside (0, total)");
    (p, q)
}

/// Decides a subset-sum instance through the minimum-entropy coupling
/// solver with the default node budget. See [`subset_sum_outcome`].
pub fn decide_subset_sum(inst: &SubsetSumInstance) -> Result<bool> {
    Ok(subset_sum_outcome(inst, DEFAULT_SEARCH_BUDGET)?.answer())
}

/// Decides a subset-sum instance and returns the certifying coupling.
///
/// Runs the exact minimum-entropy solver on [`encode_subset_sum`]'s
/// marginals and answers YES exactly when the optimal coupling's columns
/// are a function of its rows (one positive cell per row). The check is
/// purely structural: when a subset exists a functional coupling attains
/// the minimum, and when none exists no coupling of these marginals is
/// functional, so the float objective never has to be compared against an
/// irrational threshold.
pub fn subset_sum_outcome(inst: &SubsetSumInstance, budget: usize) -> Result<ReductionOutcome> {
    let (p, q) = encode_subset_sum(inst);
    let solution =
        min_entropy_coupling_exact_with_budget(&p, &q, OrderAlpha::SHANNON, LogBase::BITS, budget)?;
    let answer = is_functional(&solution.coupling, Axis::Rows);
    let selection = answer.then(|| {
        (0..solution.coupling.rows())
            .filter(|&i| solution.coupling.get(i, 0).is_positive())
            .collect()
    });
    Ok(ReductionOutcome {
        answer,
        selection,
        solution,
    })
}

/// Encodes a partition instance: `P` carries the weights normalized by
/// their total, and the channel output alphabet has `m = 2` symbols.
///
/// Requires at least two positive weights.
pub fn encode_partition(weights: &[u64]) -> Result<(Dist, usize)> {
    if weights.len() < 2 {
        return Err(Error::InvariantViolation(String::from(
            "partition instance needs at least two weights",
        )));
    }
    if weights.iter().any(|&d| d == 0) {
        return Err(Error::InvariantViolation(String::from(
            "partition weights must all be positive",
        )));
    }
    Ok((ratio_dist(weights), 2))
}

/// Decides whether the weights split into two subsets of equal sum, using
/// the optimal-channel solver with the default budget. See
/// [`partition_outcome`].
pub fn decide_partition(weights: &[u64]) -> Result<bool> {
    Ok(partition_outcome(weights, DEFAULT_CHANNEL_BUDGET)?.answer())
}

/// Decides a partition instance and returns the certifying assignment.
///
/// Maximizes mutual information over deterministic two-output channels
/// fed with the normalized weights; the maximum reaches one bit exactly
/// when some assignment balances the two output masses. The answer is
/// read off the optimizer's assignment: YES exactly when its two column
/// sums are equal as rationals (with the one-bit float test corroborating
/// but never overriding the exact comparison).
pub fn partition_outcome(weights: &[u64], budget: u64) -> Result<ReductionOutcome> {
    let (p, m) = encode_partition(weights)?;
    let solution = optimal_channel_with_budget(&p, m, LogBase::BITS, budget)?;
    let (_, induced) = solution.coupling.marginals();
    let balanced = induced.masses()[0] == induced.masses()[1];
    let answer = balanced && solution.objective_value >= 1.0 - VALUE_TOL;
    let selection = answer.then(|| {
        (0..solution.coupling.rows())
            .filter(|&i| solution.coupling.get(i, 0).is_positive())
            .collect()
    });
    Ok(ReductionOutcome {
        answer,
        selection,
        solution,
    })
}

/// Decides a 3-partition instance through the optimal-channel solver with
/// the default budget. See [`three_partition_outcome`].
pub fn decide_3partition(inst: &ThreePartitionInstance) -> Result<bool> {
    Ok(three_partition_outcome(inst, DEFAULT_CHANNEL_BUDGET)?.answer())
}

/// Decides a 3-partition instance and returns the certifying assignment.
///
/// Maximizes mutual information over deterministic `m`-output channels
/// fed with the normalized weights. The answer is YES exactly when the
/// optimizer's assignment gives every output column the mass `1/m` as an
/// exact rational — equivalently, when the induced output is uniform, the
/// information-theoretic maximum. The weight window forces each such
/// group to hold exactly three weights.
pub fn three_partition_outcome(
    inst: &ThreePartitionInstance,
    budget: u64,
) -> Result<ReductionOutcome> {
    let p = ratio_dist(inst.weights());
    let m = inst.groups();
    let solution = optimal_channel_with_budget(&p, m, LogBase::BITS, budget)?;
    let (_, induced) = solution.coupling.marginals();
    let share = BigRational::new(BigInt::from(1), BigInt::from(m as u64));
    let answer = induced.masses().iter().all(|mass| *mass == share);
    let selection = answer.then(|| {
        (0..solution.coupling.rows())
            .map(|i| {
                (0..solution.coupling.cols())
                    .find(|&j| solution.coupling.get(i, j).is_positive())
                    .expect("every weight is positive, so every row is assigned")
            })
            .collect()
    });
    Ok(ReductionOutcome {
        answer,
        selection,
        solution,
    })
}

/// Reachable-subset-sums bitset: bit `t` of the result is set exactly
/// when some subset of the weights sums to `t`.
fn reachable_sums(weights: &[u64], total: u64) -> Vec<u64> {
    let words = (total / 64 + 1) as usize;
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &d in weights {
        let word_shift = (d / 64) as usize;
        let bit_shift = (d % 64) as u32;
        for w in (word_shift..words).rev() {
            let mut shifted = bits[w - word_shift] << bit_shift;
            if bit_shift > 0 && w > word_shift {
                shifted |= bits[w - word_shift - 1] >> (64 - bit_shift);
            }
            bits[w] |= shifted;
        }
    }
    bits
}

fn sum_reachable(bits: &[u64], t: u64) -> bool {
    bits[(t / 64) as usize] >> (t % 64) & 1 == 1
}

/// Classical pseudo-polynomial dynamic program for subset sum: ground
/// truth for cross-checking [`decide_subset_sum`].
///
/// Fails with [`Error::BudgetExceeded`] when the reachable-sums table
/// would exceed [`DP_TABLE_CAP`] entries.
pub fn dp_oracle_subset_sum(inst: &SubsetSumInstance) -> Result<bool> {
    let total = inst.total();
    if total + 1 > DP_TABLE_CAP {
        return Err(Error::BudgetExceeded {
            budget: DP_TABLE_CAP,
            required: total + 1,
        });
    }
    let bits = reachable_sums(inst.weights(), total);
    Ok(sum_reachable(&bits, inst.target()))
}

/// Classical pseudo-polynomial dynamic program for partition: ground
/// truth for cross-checking [`decide_partition`].
///
/// An odd total is an immediate NO; otherwise the answer is whether half
/// the total is a reachable subset sum. Fails with
/// [`Error::BudgetExceeded`] when the table would exceed
/// [`DP_TABLE_CAP`] entries.
pub fn dp_oracle_partition(weights: &[u64]) -> Result<bool> {
    if weights.len() < 2 {
        return Err(Error::InvariantViolation(String::from(
            "partition instance needs at least two weights",
        )));
    }
    if weights.iter().any(|&d| d == 0) {
        return Err(Error::InvariantViolation(String::from(
            "partition weights must all be positive",
        )));
    }
    let total: u64 = weights.iter().sum();
    if total % 2 == 1 {
        return Ok(false);
    }
    if total + 1 > DP_TABLE_CAP {
        return Err(Error::BudgetExceeded {
            budget: DP_TABLE_CAP,
            required: total + 1,
        });
    }
    let bits = reachable_sums(weights, total);
    Ok(sum_reachable(&bits, total / 2))
}
