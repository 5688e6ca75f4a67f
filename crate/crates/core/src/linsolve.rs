//! Sparse Gauss-Jordan elimination over Q(q).

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// A sparse row: column index to nonzero coefficient.
pub type Row = BTreeMap<usize, Scalar>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    Inconsistent,
    /// The solution set is an affine space of the given dimension.
    Underdetermined(usize),
}

/// Incremental reduced row echelon form. Pivot rows are kept mutually
/// reduced, so eliminating a new row takes one pass over its pivot columns.
#[derive(Debug, Clone, Default)]
pub struct Eliminator {
    nvars: usize,
    pivots: BTreeMap<usize, (Row, Scalar)>,
    inconsistent: bool,
}

impl Eliminator {
    pub fn new(nvars: usize) -> Self {
        Eliminator { nvars, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Add the equation `row · x = rhs`.
    pub fn push(&mut self, mut row: Row, mut rhs: Scalar) {
        row.retain(|_, c| !c.is_zero());
        let hits: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for col in hits {
            let Some(f) = row.get(&col).cloned() else { continue };
            let (prow, prhs) = &self.pivots[&col];
            for (c, v) in prow {
                let e = row.entry(*c).or_insert_with(Scalar::zero);
                *e -= &(&f * v);
                if e.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &(&f * prhs);
        }
        if row.is_empty() {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        }
        let (&pcol, _) = row.iter().min_by_key(|(c, v)| (v.weight(), **c)).unwrap();
        let inv = row[&pcol].inv().expect("nonzero pivot");
        for v in row.values_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(f) = prow.get(&pcol).cloned() {
                for (c, v) in &row {
                    let e = prow.entry(*c).or_insert_with(Scalar::zero);
                    *e -= &(&f * v);
                    if e.is_zero() {
                        prow.remove(c);
                    }
                }
                *prhs -= &(&f * &rhs);
            }
        }
        self.pivots.insert(pcol, (row, rhs));
    }

    pub fn solve(&self) -> Solution {
        if self.inconsistent {
            return Solution::Inconsistent;
        }
        if self.pivots.len() < self.nvars {
            return Solution::Underdetermined(self.nvars - self.pivots.len());
        }
        let mut x = vec![Scalar::zero(); self.nvars];
        for (col, (_, rhs)) in &self.pivots {
            x[*col] = rhs.clone();
        }
        Solution::Unique(x)
    }
}

pub fn solve(nvars: usize, equations: impl IntoIterator<Item = (Row, Scalar)>) -> Solution {
    let mut e = Eliminator::new(nvars);
    for (row, rhs) in equations {
        e.push(row, rhs);
    }
    e.solve()
}
