//! Independent brute-force ground truth: exhaustive enumeration of all
//! E-grids over small prime fields satisfying the twisting axioms, with
//! sound constraint pruning, plus canonical set comparison.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algebra::Algebra;
use crate::field::FieldSpec;
use crate::linalg::{compose, Matrix};
use crate::twist::{check_axioms, EGrid};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget of {budget} node visits exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("brute force requires a finite field")]
    InfiniteField,
}

/// Search dimensions plus the pruning and budget configuration.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    pub n: usize,
    pub m: usize,
    pub field: FieldSpec,
    /// candidate filtering (unit rows, idempotency) and per-column
    /// orthogonality checks; disabling only changes speed, never the result
    pub prune: bool,
    pub budget: u64,
}

impl SearchSpace {
    pub fn new(n: usize, m: usize, field: FieldSpec) -> Self {
        SearchSpace {
            n,
            m,
            field,
            prune: true,
            budget: budget_from_env(),
        }
    }
}

/// The configured budget cap, overridable through TWISTLAB_BUDGET.
pub fn budget_from_env() -> u64 {
    std::env::var("TWISTLAB_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// A duplicate-free list of grids in canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    pub grids: Vec<EGrid>,
}

impl GridSet {
    pub fn from_grids(mut grids: Vec<EGrid>) -> Self {
        grids.sort_by(|a, b| a.sort_key().cmp(b.sort_key()));
        grids.dedup();
        GridSet { grids }
    }

    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn contains(&self, g: &EGrid) -> bool {
        self.grids
            .binary_search_by(|x| x.sort_key().cmp(g.sort_key()))
            .is_ok()
    }
}

/// Symmetric difference with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub only_left: Vec<EGrid>,
    pub only_right: Vec<EGrid>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

pub fn compare_sets(left: &GridSet, right: &GridSet) -> DiffReport {
    DiffReport {
        only_left: left
            .grids
            .iter()
            .filter(|g| !right.contains(g))
            .cloned()
            .collect(),
        only_right: right
            .grids
            .iter()
            .filter(|g| !left.contains(g))
            .cloned()
            .collect(),
    }
}

/// |{u : {1..m} -> {1..m} with u o u = u}| by exhaustion.
pub fn count_idempotent_functions(m: usize) -> u64 {
    crate::classify::idempotent_functions(m).len() as u64
}

/// All m x m matrices over the prime field; with `prune`, restricted to the
/// sound candidate set for off-diagonal entries: zero row sums (from the
/// unit axiom) and idempotency (from the orthogonality axiom with i = j).
fn entry_candidates(field: FieldSpec, m: usize, prune: bool) -> Vec<Matrix> {
    let elements = field.elements().expect("finite field");
    let e = elements.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m * m];
    loop {
        let mat = Matrix::from_fn(field, m, m, |i, j| elements[idx[i * m + j]].clone());
        let keep = if prune {
            let rows_ok = (0..m).all(|i| {
                let mut s = field.zero();
                for j in 0..m {
                    s = s.add_ref(mat.get(i, j));
                }
                s.is_zero()
            });
            rows_ok && mat.mul(&mat) == mat
        } else {
            true
        };
        if keep {
            out.push(mat);
        }
        let mut k = m * m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < e {
                break;
            }
            idx[k] = 0;
        }
    }
}

struct Searcher<'a> {
    n: usize,
    m: usize,
    field: FieldSpec,
    algebra: Algebra,
    /// off-diagonal positions in column-major order
    positions: Vec<(usize, usize)>,
    candidates: &'a [Matrix],
    prune: bool,
    budget: u64,
    visited: &'a AtomicU64,
}

impl<'a> Searcher<'a> {
    fn tick(&self) -> Result<(), OracleError> {
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(OracleError::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Fills the implied diagonal entry of column j and, when pruning,
    /// checks the per-column orthogonality axiom on the completed column.
    fn complete_column(
        &self,
        entries: &mut [Option<Matrix>],
        j: usize,
    ) -> Result<bool, OracleError> {
        let mut diag = Matrix::identity(self.field, self.m);
        for i in 0..self.n {
            if i != j {
                diag = diag.sub(entries[i * self.n + j].as_ref().unwrap());
            }
        }
        entries[j * self.n + j] = Some(diag);
        if !self.prune {
            return Ok(true);
        }
        self.tick()?;
        let col: Vec<&Matrix> = (0..self.n)
            .map(|i| entries[i * self.n + j].as_ref().unwrap())
            .collect();
        for (a, ea) in col.iter().enumerate() {
            for (b, eb) in col.iter().enumerate() {
                let prod = compose(ea, eb).unwrap();
                let ok = if a == b { prod == **ea } else { prod.is_zero() };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn dfs(
        &self,
        entries: &mut Vec<Option<Matrix>>,
        k: usize,
        out: &mut Vec<EGrid>,
    ) -> Result<(), OracleError> {
        if k == self.positions.len() {
            self.tick()?;
            let full: Vec<Matrix> = entries.iter().map(|e| e.clone().unwrap()).collect();
            let g = EGrid::new(self.algebra.clone(), self.n, full);
            if check_axioms(&g).passed() {
                out.push(g);
            }
            return Ok(());
        }
        let (i, j) = self.positions[k];
        let column_done = k + 1 == self.positions.len() || self.positions[k + 1].1 != j;
        for cand in self.candidates {
            self.tick()?;
            entries[i * self.n + j] = Some(cand.clone());
            if column_done {
                if self.complete_column(entries, j)? {
                    self.dfs(entries, k + 1, out)?;
                }
                entries[j * self.n + j] = None;
            } else {
                self.dfs(entries, k + 1, out)?;
            }
            entries[i * self.n + j] = None;
        }
        Ok(())
    }
}

/// Exhaustively enumerates all grids passing the twisting axioms, by
/// depth-first assignment of off-diagonal entries column by column, the
/// diagonal entry of each column being implied by the column-sum axiom.
pub fn brute_force_with(space: &SearchSpace) -> Result<GridSet, OracleError> {
    if space.field.elements().is_err() {
        return Err(OracleError::InfiniteField);
    }
    let candidates = entry_candidates(space.field, space.m, space.prune);
    let visited = AtomicU64::new(0);
    let searcher = Searcher {
        n: space.n,
        m: space.m,
        field: space.field,
        algebra: Algebra::split(space.field, space.m),
        positions: (0..space.n)
            .flat_map(|j| (0..space.n).filter(move |&i| i != j).map(move |i| (i, j)))
            .collect(),
        candidates: &candidates,
        prune: space.prune,
        budget: space.budget,
        visited: &visited,
    };
    let n = space.n;
    let grids = if searcher.positions.is_empty() {
        let mut entries = vec![None; n * n];
        let mut out = Vec::new();
        if searcher.complete_column(&mut entries, 0)? {
            searcher.dfs(&mut entries, 0, &mut out)?;
        }
        out
    } else {
        // split the search at the first decision level
        let branch = |first: &Matrix| -> Result<Vec<EGrid>, OracleError> {
            let (i, j) = searcher.positions[0];
            let mut entries: Vec<Option<Matrix>> = vec![None; n * n];
            entries[i * n + j] = Some(first.clone());
            let mut out = Vec::new();
            let column_done = searcher.positions.len() == 1 || searcher.positions[1].1 != j;
            if column_done {
                if searcher.complete_column(&mut entries, j)? {
                    searcher.dfs(&mut entries, 1, &mut out)?;
                }
            } else {
                searcher.dfs(&mut entries, 1, &mut out)?;
            }
            Ok(out)
        };
        #[cfg(feature = "parallel")]
        let branches: Result<Vec<Vec<EGrid>>, OracleError> =
            candidates.par_iter().map(branch).collect();
        #[cfg(not(feature = "parallel"))]
        let branches: Result<Vec<Vec<EGrid>>, OracleError> =
            candidates.iter().map(branch).collect();
        branches?.into_iter().flatten().collect()
    };
    Ok(GridSet::from_grids(grids))
}

/// Brute force with pruning and the configured default budget.
pub fn brute_force_twisting_maps(
    n: usize,
    m: usize,
    field: FieldSpec,
) -> Result<GridSet, OracleError> {
    brute_force_with(&SearchSpace::new(n, m, field))
}
