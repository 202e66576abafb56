//! Optimal-coupling solvers: maximal coupling, minimum-entropy coupling
//! (exact and greedy), the best channel with a fixed input marginal, and
//! normalized maximal dependence.
//!
//! The exact minimum-entropy solver is a depth-first branch-and-bound over
//! the same crossing-out tree that generates polytope vertices. Every leaf
//! is a vertex, minimizers are always vertices, and three devices keep the
//! tree small: a greedy incumbent, a per-axis lower bound on the residual
//! objective (split each residual line mass into pieces no larger than the
//! biggest residual on the opposite axis), and dominance pruning of
//! revisited residual states. All pruning carries a `1e-12` slack so exact
//! ties survive to the deterministic tie-break: the lexicographically
//! smallest matrix in row-major order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::BigRational;
// Needed for float math under no_std; whenever std is in the dependency
// graph (test builds pull it in), its inherent f64 methods shadow the
// trait and this import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dist::{Dist, Joint};
use crate::float::rat_to_f64;
use crate::measures::{shannon_entropy, renyi_entropy, AlphaClass, LogBase, OrderAlpha};
use crate::polytope::acyclic_support;
use crate::{Error, Result};

/// Default ceiling on explored branch-and-bound nodes for the exact
/// minimum-entropy solver.
pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

/// Default ceiling on the number of row-deterministic matrices the channel
/// search may enumerate.
pub const DEFAULT_CHANNEL_BUDGET: u64 = 1_000_000;

/// Comparison slack for floating objective values; candidates within this
/// margin count as tied and fall through to the lexicographic tie-break.
const TIE_SLACK: f64 = 1e-12;

/// How a solution's optimality is warranted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// The value is a proven global optimum of its objective.
    Exact,
    /// The value comes from a heuristic; it bounds the optimum from the
    /// suboptimal side but need not attain it.
    Heuristic,
}

/// A coupling returned by one of the solvers, with its objective value and
/// provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSolution {
    /// The joint distribution found.
    pub coupling: Joint,
    /// The solver's objective at `coupling`: an entropy for the
    /// minimum-entropy solvers, mutual information for the channel solver,
    /// and the mismatch probability for the maximal coupling.
    pub objective_value: f64,
    /// Whether the value is a proven optimum.
    pub certificate: Certificate,
    /// True when the coupling is a vertex of its polytope (acyclic
    /// support).
    pub vertex: bool,
}

/// The coupling of `p` and `q` minimizing the mismatch probability
/// `P(X ≠ Y)`, built in closed form: the diagonal carries
/// `min(p_i, q_i)` and the leftover masses couple by the normalized
/// product of the residuals.
///
/// The minimized mismatch probability equals the total variation distance
/// exactly; it is returned as `objective_value`. When the alphabets have
/// different lengths the shorter marginal is zero-padded and the coupling
/// is square.
pub fn maximal_coupling(p: &Dist, q: &Dist) -> CouplingSolution {
    let len = p.len().max(q.len());
    let zero = BigRational::zero();
    let mass = |d: &Dist, i: usize| -> BigRational {
        if i < d.len() {
            d[i].clone()
        } else {
            zero.clone()
        }
    };
    let mut cells: Vec<(usize, usize, BigRational)> = Vec::new();
    let mut overlap = BigRational::zero();
    for i in 0..len {
        let c = mass(p, i).min(mass(q, i));
        if c.is_positive() {
            overlap += &c;
            cells.push((i, i, c));
        }
    }
    let slack = BigRational::one() - &overlap;
    if slack.is_positive() {
        for i in 0..len {
            let a = mass(p, i) - mass(p, i).min(mass(q, i));
            if !a.is_positive() {
                continue;
            }
            for j in 0..len {
                let b = mass(q, j) - mass(p, j).min(mass(q, j));
                if !b.is_positive() {
                    continue;
                }
                cells.push((i, j, a.clone() * b / &slack));
            }
        }
    }
    let coupling = Joint::from_cells_unchecked(len, len, &cells);
    let vertex = acyclic_support(&coupling);
    CouplingSolution {
        objective_value: rat_to_f64(&slack),
        vertex,
        coupling,
        certificate: Certificate::Exact,
    }
}

/// Global minimizer of the order-α entropy over all couplings of `p` and
/// `q`, with the default node budget of [`DEFAULT_SEARCH_BUDGET`].
pub fn min_entropy_coupling_exact(
    p: &Dist,
    q: &Dist,
    alpha: OrderAlpha,
    base: LogBase,
) -> Result<CouplingSolution> {
    min_entropy_coupling_exact_with_budget(p, q, alpha, base, DEFAULT_SEARCH_BUDGET)
}

/// Global minimizer of the order-α entropy over all couplings of `p` and
/// `q`.
///
/// The returned coupling is always a polytope vertex; among optima tied
/// within `1e-12` in the objective surrogate, the lexicographically
/// smallest matrix (row-major) is returned. Fails with
/// [`Error::VertexCapExceeded`] if the search explores more than `budget`
/// nodes.
pub fn min_entropy_coupling_exact_with_budget(
    p: &Dist,
    q: &Dist,
    alpha: OrderAlpha,
    base: LogBase,
    budget: usize,
) -> Result<CouplingSolution> {
    let class = alpha.class();
    let greedy_cells = greedy_trace(p, q);
    let greedy_cost = cells_cost(class, &greedy_cells);
    let mut search = MinEntropySearch {
        class,
        rows_total: p.len(),
        cols_total: q.len(),
        budget,
        nodes: 0,
        best_cost: greedy_cost,
        best: Joint::from_cells_unchecked(p.len(), q.len(), &greedy_cells),
        memo: BTreeMap::new(),
    };
    let rows: Vec<(usize, BigRational)> = p
        .support()
        .indices()
        .iter()
        .map(|&i| (i, p[i].clone()))
        .collect();
    let cols: Vec<(usize, BigRational)> = q
        .support()
        .indices()
        .iter()
        .map(|&j| (j, q[j].clone()))
        .collect();
    let mut cells: Vec<(usize, usize, BigRational)> = Vec::new();
    search.explore(&rows, &cols, EMPTY_COST, &mut cells, ROOT_PIVOT)?;
    let coupling = search.best;
    let objective_value = renyi_entropy(&coupling.flatten(), alpha, base);
    Ok(CouplingSolution {
        coupling,
        objective_value,
        certificate: Certificate::Exact,
        vertex: true,
    })
}

/// Heuristic low-entropy coupling: repeatedly give the pair of currently
/// largest residual masses as much weight as possible (ties broken to the
/// lowest index). Runs in `O((n+m)·nm)`; its entropy is an upper bound on
/// the exact minimum.
pub fn min_entropy_coupling_greedy(p: &Dist, q: &Dist, base: LogBase) -> CouplingSolution {
    let cells = greedy_trace(p, q);
    let coupling = Joint::from_cells_unchecked(p.len(), q.len(), &cells);
    let objective_value = shannon_entropy(&coupling.flatten(), base);
    CouplingSolution {
        objective_value,
        vertex: acyclic_support(&coupling),
        coupling,
        certificate: Certificate::Heuristic,
    }
}

/// The coupling of `p` with `m` output symbols maximizing mutual
/// information, by exhaustive search over the `m^n'` row-deterministic
/// matrices (the vertices of the one-marginal polytope), with the default
/// budget of [`DEFAULT_CHANNEL_BUDGET`].
pub fn optimal_channel(p: &Dist, m: usize, base: LogBase) -> Result<CouplingSolution> {
    optimal_channel_with_budget(p, m, base, DEFAULT_CHANNEL_BUDGET)
}

/// The coupling of `p` with `m` output symbols maximizing mutual
/// information.
///
/// For a row-deterministic matrix the mutual information equals the
/// entropy of the induced column marginal, which is what is maximized and
/// returned. Ties keep the first maximizer in enumeration order (row
/// choices counting up column indices like digits). Fails with
/// [`Error::BudgetExceeded`] when `m^n'` exceeds `budget`.
pub fn optimal_channel_with_budget(
    p: &Dist,
    m: usize,
    base: LogBase,
    budget: u64,
) -> Result<CouplingSolution> {
    if m == 0 {
        return Err(Error::OutOfRange(
            "a channel needs at least one output symbol",
        ));
    }
    let required = (m as u64)
        .checked_pow(p.support_size() as u32)
        .unwrap_or(u64::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { budget, required });
    }
    let mut best: Option<(f64, Joint)> = None;
    for s in crate::polytope::row_deterministic_couplings(p, m) {
        let (_, induced) = s.marginals();
        let value = shannon_entropy(&induced, base);
        match &best {
            Some((best_value, _)) if value <= best_value + TIE_SLACK => {}
            _ => best = Some((value, s)),
        }
    }
    let (objective_value, coupling) =
        best.expect("the one-marginal polytope always has at least one vertex");
    Ok(CouplingSolution {
        coupling,
        objective_value,
        certificate: Certificate::Exact,
        vertex: true,
    })
}

/// Maximal normalized dependence between marginals `p` and `q`: the
/// largest value of `I / min{H(p), H(q)}` over all couplings, attained at
/// the minimum-entropy coupling.
///
/// Lies in `[0, 1]` and equals 1 exactly when some coupling makes one
/// variable a function of the other. Point-mass marginals have zero
/// entropy and are rejected with [`Error::DegenerateMarginal`].
pub fn max_dependence(p: &Dist, q: &Dist, base: LogBase) -> Result<f64> {
    if p.is_point_mass() || q.is_point_mass() {
        return Err(Error::DegenerateMarginal);
    }
    let hp = shannon_entropy(p, base);
    let hq = shannon_entropy(q, base);
    let mec = min_entropy_coupling_exact(p, q, OrderAlpha::SHANNON, base)?;
    let i_max = hp + hq - mec.objective_value;
    Ok((i_max / hp.min(hq)).clamp(0.0, 1.0))
}

const ROOT_PIVOT: (usize, usize) = (usize::MAX, usize::MAX);

/// Surrogate cost of an empty assignment. The additive surrogates start
/// from an empty sum; the min-entropy-order surrogate is −(largest piece
/// so far), which any first piece immediately lowers.
const EMPTY_COST: f64 = 0.0;

/// Surrogate cost of one assigned piece, oriented so that smaller total
/// cost always means smaller order-α entropy.
fn piece_cost(class: AlphaClass, mass: &BigRational) -> f64 {
    let x = rat_to_f64(mass);
    match class {
        AlphaClass::Shannon => -x * x.log2(),
        AlphaClass::Below(a) => x.powf(a),
        AlphaClass::Above(a) => -x.powf(a),
        AlphaClass::Zero => 1.0,
        AlphaClass::Infinity => -x,
    }
}

fn accumulate(class: AlphaClass, cost: f64, mass: &BigRational) -> f64 {
    match class {
        AlphaClass::Infinity => cost.min(piece_cost(class, mass)),
        _ => cost + piece_cost(class, mass),
    }
}

fn cells_cost(class: AlphaClass, cells: &[(usize, usize, BigRational)]) -> f64 {
    let mut cost = EMPTY_COST;
    for (_, _, w) in cells {
        cost = accumulate(class, cost, w);
    }
    cost
}

/// Smallest possible Shannon surrogate for splitting mass `u` into pieces
/// each at most `cap`: concentrate into full-cap pieces plus a remainder.
fn min_split_shannon(u: f64, cap: f64) -> f64 {
    let phi = |w: f64| if w > 0.0 { -w * w.log2() } else { 0.0 };
    if u <= cap {
        return phi(u);
    }
    let k = (u / cap).floor();
    let r = u - k * cap;
    if r < 1e-15 {
        -u * cap.log2()
    } else {
        -k * cap * cap.log2() + phi(r)
    }
}

/// Extreme value of `Σ pieceᵃ` when splitting `u` into pieces at most
/// `cap`: full-cap pieces plus remainder. This concentration is the
/// minimum for `a < 1` and the maximum for `a > 1`.
fn concentrated_power_sum(u: f64, cap: f64, a: f64) -> f64 {
    if u <= cap {
        return u.powf(a);
    }
    let k = (u / cap).floor();
    let r = u - k * cap;
    if r < 1e-15 {
        (u / cap) * cap.powf(a)
    } else {
        k * cap.powf(a) + r.powf(a)
    }
}

/// Minimum number of pieces covering mass `u` with pieces at most `cap`,
/// exactly.
fn min_piece_count(u: &BigRational, cap: &BigRational) -> f64 {
    let count = (u / cap).ceil();
    count
        .to_integer()
        .to_f64()
        .expect("piece counts are tiny integers")
}

struct MinEntropySearch {
    class: AlphaClass,
    rows_total: usize,
    cols_total: usize,
    budget: usize,
    nodes: usize,
    best_cost: f64,
    best: Joint,
    /// Smallest surrogate cost seen for a residual state under the same
    /// pivot-ordering constraint. States revisited strictly worse than the
    /// stored cost (beyond slack) cannot improve the incumbent or its
    /// tie-break.
    memo: BTreeMap<StateKey, f64>,
}

type StateKey = (
    Vec<(usize, BigRational)>,
    Vec<(usize, BigRational)>,
    (usize, usize),
);

impl MinEntropySearch {
    fn leaf(&mut self, cost: f64, cells: &[(usize, usize, BigRational)]) {
        let better = cost < self.best_cost - TIE_SLACK;
        let tied = (cost - self.best_cost).abs() <= TIE_SLACK;
        if !better && !tied {
            return;
        }
        let joint = Joint::from_cells_unchecked(self.rows_total, self.cols_total, cells);
        if better || joint < self.best {
            self.best_cost = self.best_cost.min(cost);
            self.best = joint;
        }
    }

    /// Lower bound on the final surrogate cost reachable from a node with
    /// accumulated cost `cost` and the given residual lines.
    fn node_bound(
        &self,
        cost: f64,
        rows: &[(usize, BigRational)],
        cols: &[(usize, BigRational)],
    ) -> f64 {
        let max_u = rows.iter().map(|(_, u)| u).max().expect("nonempty rows");
        let max_v = cols.iter().map(|(_, v)| v).max().expect("nonempty cols");
        match self.class {
            AlphaClass::Shannon => {
                let cap_r = rat_to_f64(max_v);
                let cap_c = rat_to_f64(max_u);
                let by_rows: f64 = rows
                    .iter()
                    .map(|(_, u)| min_split_shannon(rat_to_f64(u), cap_r))
                    .sum();
                let by_cols: f64 = cols
                    .iter()
                    .map(|(_, v)| min_split_shannon(rat_to_f64(v), cap_c))
                    .sum();
                cost + by_rows.max(by_cols)
            }
            AlphaClass::Below(a) => {
                let cap_r = rat_to_f64(max_v);
                let cap_c = rat_to_f64(max_u);
                let by_rows: f64 = rows
                    .iter()
                    .map(|(_, u)| concentrated_power_sum(rat_to_f64(u), cap_r, a))
                    .sum();
                let by_cols: f64 = cols
                    .iter()
                    .map(|(_, v)| concentrated_power_sum(rat_to_f64(v), cap_c, a))
                    .sum();
                cost + by_rows.max(by_cols)
            }
            AlphaClass::Above(a) => {
                // Cost is −Σ pieceᵃ; the residual sum is at most the
                // concentrated value along either axis, so the cost is at
                // least −min of the two.
                let cap_r = rat_to_f64(max_v);
                let cap_c = rat_to_f64(max_u);
                let by_rows: f64 = rows
                    .iter()
                    .map(|(_, u)| concentrated_power_sum(rat_to_f64(u), cap_r, a))
                    .sum();
                let by_cols: f64 = cols
                    .iter()
                    .map(|(_, v)| concentrated_power_sum(rat_to_f64(v), cap_c, a))
                    .sum();
                cost - by_rows.min(by_cols)
            }
            AlphaClass::Zero => {
                let by_rows: f64 = rows.iter().map(|(_, u)| min_piece_count(u, max_v)).sum();
                let by_cols: f64 = cols.iter().map(|(_, v)| min_piece_count(v, max_u)).sum();
                cost + by_rows.max(by_cols)
            }
            AlphaClass::Infinity => {
                // No future piece exceeds min(max_u, max_v).
                let reachable = rat_to_f64(max_u.min(max_v));
                cost.min(-reachable)
            }
        }
    }

    fn explore(
        &mut self,
        rows: &[(usize, BigRational)],
        cols: &[(usize, BigRational)],
        cost: f64,
        cells: &mut Vec<(usize, usize, BigRational)>,
        last: (usize, usize),
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::VertexCapExceeded { cap: self.budget });
        }

        // One line left: the rest of the assignment is forced.
        if rows.len() == 1 {
            let i = rows[0].0;
            let start = cells.len();
            let mut total = cost;
            for (j, v) in cols {
                total = accumulate(self.class, total, v);
                cells.push((i, *j, v.clone()));
            }
            self.leaf(total, cells);
            cells.truncate(start);
            return Ok(());
        }
        if cols.len() == 1 {
            let j = cols[0].0;
            let start = cells.len();
            let mut total = cost;
            for (i, u) in rows {
                total = accumulate(self.class, total, u);
                cells.push((*i, j, u.clone()));
            }
            self.leaf(total, cells);
            cells.truncate(start);
            return Ok(());
        }

        if self.node_bound(cost, rows, cols) > self.best_cost + TIE_SLACK {
            return Ok(());
        }

        // Dominance on revisited residual states. The max-piece surrogate
        // is not additive, so its ties are not preserved under dominance;
        // skip the memo there.
        if !matches!(self.class, AlphaClass::Infinity) {
            let key: StateKey = (rows.to_vec(), cols.to_vec(), last);
            match self.memo.get(&key) {
                Some(&stored) if cost > stored + TIE_SLACK => return Ok(()),
                Some(&stored) if cost >= stored => {}
                _ => {
                    self.memo.insert(key, cost);
                }
            }
        }

        // Children: all pivots on active lines, except those that merely
        // permute a previous pivot on disjoint lines (normal-form
        // ordering); largest assignable mass first.
        let mut children: Vec<(BigRational, usize, usize)> = Vec::new();
        for &(i, ref u) in rows {
            for &(j, ref v) in cols {
                if last != ROOT_PIVOT && i != last.0 && j != last.1 && (i, j) < last {
                    continue;
                }
                children.push((u.clone().min(v.clone()), i, j));
            }
        }
        children.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        for (w, i, j) in children {
            let next_rows: Vec<(usize, BigRational)> = rows
                .iter()
                .filter_map(|(x, u)| {
                    let left = if *x == i { u - &w } else { u.clone() };
                    left.is_positive().then_some((*x, left))
                })
                .collect();
            let next_cols: Vec<(usize, BigRational)> = cols
                .iter()
                .filter_map(|(y, v)| {
                    let left = if *y == j { v - &w } else { v.clone() };
                    left.is_positive().then_some((*y, left))
                })
                .collect();
            let next_cost = accumulate(self.class, cost, &w);
            cells.push((i, j, w));
            self.explore(&next_rows, &next_cols, next_cost, cells, (i, j))?;
            cells.pop();
        }
        Ok(())
    }
}

/// The greedy pairing trace: both residual pools start at the positive
/// masses; each round couples the largest residual row with the largest
/// residual column (lowest index on ties) at their minimum.
fn greedy_trace(p: &Dist, q: &Dist) -> Vec<(usize, usize, BigRational)> {
    let mut rows: Vec<(usize, BigRational)> = p
        .support()
        .indices()
        .iter()
        .map(|&i| (i, p[i].clone()))
        .collect();
    let mut cols: Vec<(usize, BigRational)> = q
        .support()
        .indices()
        .iter()
        .map(|&j| (j, q[j].clone()))
        .collect();
    let mut cells = Vec::new();
    while !rows.is_empty() {
        let bi = argmax_residual(&rows);
        let bj = argmax_residual(&cols);
        let w = rows[bi].1.clone().min(cols[bj].1.clone());
        cells.push((rows[bi].0, cols[bj].0, w.clone()));
        rows[bi].1 -= &w;
        cols[bj].1 -= &w;
        rows.retain(|(_, u)| u.is_positive());
        cols.retain(|(_, v)| v.is_positive());
    }
    cells
}

fn argmax_residual(pool: &[(usize, BigRational)]) -> usize {
    let mut best = 0;
    for k in 1..pool.len() {
        if pool[k].1 > pool[best].1 {
            best = k;
        }
    }
    best
}
