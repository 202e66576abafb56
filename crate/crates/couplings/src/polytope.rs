//! Coupling polytopes and exact vertex enumeration.
//!
//! A coupling of two distributions is a joint matrix with those
//! distributions as marginals; the feasible set is a transportation
//! polytope. This module represents the two flavors used throughout the
//! crate — both marginals fixed, or one marginal fixed with only the
//! column count of the other prescribed — and enumerates polytope vertices
//! exactly.
//!
//! Vertices of the both-marginals polytope are exactly the feasible
//! matrices whose positive cells form a spanning forest of the bipartite
//! row/column graph. They are generated by a crossing-out search: pick a
//! cell, assign it the minimum of its residual row and column sums, and
//! delete whichever line is exhausted. Every leaf of that search is a
//! vertex and every vertex is reached. Consecutive pivots on disjoint
//! lines commute, so the search keeps only lexicographically sorted runs
//! of such pivots (a normal form per equivalence class), which cuts the
//! path count by orders of magnitude without losing any vertex; results
//! are deduplicated by exact matrix equality.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::dist::{Dist, Joint};
use crate::measures::Axis;
use crate::{Error, Result};

/// Default ceiling on the number of distinct vertices enumerated before
/// giving up.
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// The feasible set being optimized over: either all couplings of two
/// given marginals, or all couplings of one marginal with a free column
/// distribution on `m` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CouplingSpec {
    /// All joints with row marginal `p` and column marginal `q`.
    BothMarginals {
        /// Row marginal.
        p: Dist,
        /// Column marginal.
        q: Dist,
    },
    /// All joints with row marginal `p` and `m` columns, the column
    /// marginal unconstrained.
    OneMarginal {
        /// Row marginal.
        p: Dist,
        /// Number of columns (at least 1).
        m: usize,
    },
}

impl CouplingSpec {
    /// The polytope of all couplings of `p` and `q`. Nonempty for every
    /// pair (the independent coupling always belongs).
    pub fn both_marginals(p: Dist, q: Dist) -> Self {
        Self::BothMarginals { p, q }
    }

    /// The polytope of couplings of `p` with an unconstrained column
    /// marginal on `m ≥ 1` points.
    pub fn one_marginal(p: Dist, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange(
                "a one-marginal polytope needs at least one column",
            ));
        }
        Ok(Self::OneMarginal { p, m })
    }

    /// The matrix shape of members of this polytope.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::BothMarginals { p, q } => (p.len(), q.len()),
            Self::OneMarginal { p, m } => (p.len(), *m),
        }
    }

    /// Exact membership test: the marginal equality constraints hold as
    /// rationals (rows and columns, or rows only for the one-marginal
    /// polytope).
    pub fn contains(&self, s: &Joint) -> Result<bool> {
        let (rows, cols) = self.shape();
        if (s.rows(), s.cols()) != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (s.rows(), s.cols()),
            });
        }
        let (sp, sq) = s.marginals();
        Ok(match self {
            Self::BothMarginals { p, q } => sp == *p && sq == *q,
            Self::OneMarginal { p, .. } => sp == *p,
        })
    }
}

/// A vertex of a both-marginals coupling polytope.
///
/// Invariants: the joint satisfies both marginal constraints exactly, and
/// its positive cells form an acyclic bipartite graph (at most
/// `rows + cols − 1` of them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportVertex {
    joint: Joint,
    support_edges: Vec<(usize, usize)>,
}

impl TransportVertex {
    fn from_joint(joint: Joint) -> Self {
        let support_edges = joint.positive_cells();
        Self {
            joint,
            support_edges,
        }
    }

    /// The vertex as a joint distribution.
    pub fn joint(&self) -> &Joint {
        &self.joint
    }

    /// The positive cells, row-major; acyclic as bipartite edges.
    pub fn support_edges(&self) -> &[(usize, usize)] {
        &self.support_edges
    }

    /// Consumes the vertex, keeping the joint.
    pub fn into_joint(self) -> Joint {
        self.joint
    }
}

/// All vertices of the coupling polytope of `p` and `q`, each exactly once,
/// sorted by matrix content.
///
/// Fails with [`Error::VertexCapExceeded`] once more than `cap` distinct
/// vertices have been found; [`DEFAULT_VERTEX_CAP`] is a reasonable
/// ceiling for desk-scale instances.
pub fn enumerate_vertices(p: &Dist, q: &Dist, cap: usize) -> Result<Vec<TransportVertex>> {
    let mut search = VertexSearch {
        rows: p.len(),
        cols: q.len(),
        cap,
        found: BTreeSet::new(),
    };
    let mut u: Vec<BigRational> = p.masses().to_vec();
    let mut v: Vec<BigRational> = q.masses().to_vec();
    let active_r: Vec<usize> = p.support().indices().to_vec();
    let active_c: Vec<usize> = q.support().indices().to_vec();
    let mut cells: Vec<(usize, usize, BigRational)> = Vec::new();
    search.explore(&mut u, &mut v, &active_r, &active_c, &mut cells, None)?;
    Ok(search
        .found
        .into_iter()
        .map(TransportVertex::from_joint)
        .collect())
}

struct VertexSearch {
    rows: usize,
    cols: usize,
    cap: usize,
    found: BTreeSet<Joint>,
}

impl VertexSearch {
    fn emit(&mut self, cells: &[(usize, usize, BigRational)]) -> Result<()> {
        let joint = Joint::from_cells_unchecked(self.rows, self.cols, cells);
        self.found.insert(joint);
        if self.found.len() > self.cap {
            return Err(Error::VertexCapExceeded { cap: self.cap });
        }
        Ok(())
    }

    fn explore(
        &mut self,
        u: &mut [BigRational],
        v: &mut [BigRational],
        active_r: &[usize],
        active_c: &[usize],
        cells: &mut Vec<(usize, usize, BigRational)>,
        last: Option<(usize, usize)>,
    ) -> Result<()> {
        // With a single active line left, the rest of the assignment is
        // forced: the remaining residuals land on that line.
        if active_r.len() == 1 {
            let i = active_r[0];
            let start = cells.len();
            for &j in active_c {
                cells.push((i, j, v[j].clone()));
            }
            self.emit(cells)?;
            cells.truncate(start);
            return Ok(());
        }
        if active_c.len() == 1 {
            let j = active_c[0];
            let start = cells.len();
            for &i in active_r {
                cells.push((i, j, u[i].clone()));
            }
            self.emit(cells)?;
            cells.truncate(start);
            return Ok(());
        }

        for &i in active_r {
            for &j in active_c {
                // Pivots touching disjoint lines commute with the previous
                // pivot; keep only the sorted representative of each run.
                if let Some((pi, pj)) = last {
                    if i != pi && j != pj && (i, j) < (pi, pj) {
                        continue;
                    }
                }
                let w = u[i].clone().min(v[j].clone());
                u[i] -= &w;
                v[j] -= &w;
                cells.push((i, j, w.clone()));
                let kill_row = u[i].is_zero();
                let kill_col = v[j].is_zero();
                let next_r: Vec<usize> = if kill_row {
                    active_r.iter().copied().filter(|&r| r != i).collect()
                } else {
                    active_r.to_vec()
                };
                let next_c: Vec<usize> = if kill_col {
                    active_c.iter().copied().filter(|&c| c != j).collect()
                } else {
                    active_c.to_vec()
                };
                self.explore(u, v, &next_r, &next_c, cells, Some((i, j)))?;
                cells.pop();
                u[i] += &w;
                v[j] += &w;
            }
        }
        Ok(())
    }
}

/// Iterator over the vertices of the one-marginal polytope: every matrix
/// placing each positive mass `p[i]` into exactly one of `m` columns.
///
/// Zero-mass rows stay all-zero, so the iterator yields `m^n'` matrices
/// where `n'` is the support size of `p`. Yields nothing for `m = 0`.
pub fn row_deterministic_couplings(p: &Dist, m: usize) -> RowDeterministic {
    RowDeterministic {
        p: p.clone(),
        m,
        positive_rows: p.support().indices().to_vec(),
        choice: Vec::new(),
        done: m == 0,
        started: false,
    }
}

/// Iterator produced by [`row_deterministic_couplings`].
#[derive(Debug, Clone)]
pub struct RowDeterministic {
    p: Dist,
    m: usize,
    positive_rows: Vec<usize>,
    choice: Vec<usize>,
    done: bool,
    started: bool,
}

impl RowDeterministic {
    fn current(&self) -> Joint {
        let cells: Vec<(usize, usize, BigRational)> = self
            .positive_rows
            .iter()
            .zip(&self.choice)
            .map(|(&i, &j)| (i, j, self.p[i].clone()))
            .collect();
        Joint::from_cells_unchecked(self.p.len(), self.m, &cells)
    }

    fn advance(&mut self) -> bool {
        for slot in self.choice.iter_mut().rev() {
            *slot += 1;
            if *slot < self.m {
                return true;
            }
            *slot = 0;
        }
        false
    }
}

impl Iterator for RowDeterministic {
    type Item = Joint;

    fn next(&mut self) -> Option<Joint> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.choice = alloc::vec![0; self.positive_rows.len()];
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// True when the positive cells of `s` are acyclic as bipartite edges —
/// the support shape of a transportation-polytope vertex. A feasible
/// matrix with acyclic support is always a vertex.
pub(crate) fn acyclic_support(s: &Joint) -> bool {
    let rows = s.rows();
    let mut parent: Vec<usize> = (0..rows + s.cols()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for (i, j) in s.positive_cells() {
        let a = find(&mut parent, i);
        let b = find(&mut parent, rows + j);
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// True when the non-`given` variable is a deterministic function of the
/// `given` one: conditioning on rows, every row has at most one positive
/// cell; conditioning on columns, every column does.
///
/// Exactly the couplings with zero conditional entropy in that direction.
pub fn is_functional(s: &Joint, given: Axis) -> bool {
    match given {
        Axis::Rows => (0..s.rows())
            .all(|i| (0..s.cols()).filter(|&j| s.get(i, j).is_positive()).count() <= 1),
        Axis::Columns => (0..s.cols())
            .all(|j| (0..s.rows()).filter(|&i| s.get(i, j).is_positive()).count() <= 1),
    }
}

/// The northwest-corner vertex of the coupling polytope of `p` and `q`:
/// scan cells from the top-left, greedily assigning the minimum of the
/// residual row and column sums.
pub fn northwest_corner(p: &Dist, q: &Dist) -> TransportVertex {
    let mut u: Vec<BigRational> = p.masses().to_vec();
    let mut v: Vec<BigRational> = q.masses().to_vec();
    let mut cells: Vec<(usize, usize, BigRational)> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < u.len() && j < v.len() {
        let w = u[i].clone().min(v[j].clone());
        if w.is_positive() {
            u[i] -= &w;
            v[j] -= &w;
            cells.push((i, j, w));
        }
        if u[i].is_zero() {
            i += 1;
        } else {
            j += 1;
        }
    }
    TransportVertex::from_joint(Joint::from_cells_unchecked(p.len(), q.len(), &cells))
}
