//! Exact sparse Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::arith::Rat;

pub type SparseVec = BTreeMap<usize, Rat>;

/// Reduced row echelon form of a sparse system `A x = b`.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub ncols: usize,
    /// `(pivot column, reduced row, reduced rhs)`, in pivot order.
    pub pivots: Vec<(usize, SparseVec, Rat)>,
    /// Right-hand side left on rows without a pivot; nonzero means inconsistent.
    pub residual: Vec<Rat>,
}

impl Elimination {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.residual.iter().all(|r| r.is_zero())
    }

    /// Basic solution with every free variable set to zero.
    pub fn basic_solution(&self) -> Option<Vec<Rat>> {
        if !self.is_consistent() {
            return None;
        }
        let mut x = vec![Rat::zero(); self.ncols];
        for (col, _, rhs) in &self.pivots {
            x[*col] = rhs.clone();
        }
        Some(x)
    }
}

fn axpy(target: &mut SparseVec, f: &Rat, src: &SparseVec) {
    for (k, v) in src {
        let e = target.entry(*k).or_insert_with(Rat::zero);
        *e -= f * v;
        if e.is_zero() {
            target.remove(k);
        }
    }
}

/// Eliminates columns in index order; the pivot row for a column is the
/// lowest-index remaining row with a nonzero entry there.
pub fn eliminate(ncols: usize, rows: Vec<SparseVec>, rhs: Vec<Rat>) -> Elimination {
    assert_eq!(rows.len(), rhs.len());
    let mut rows: Vec<Option<(SparseVec, Rat)>> = rows.into_iter().zip(rhs).map(Some).collect();
    let mut pivots: Vec<(usize, SparseVec, Rat)> = Vec::new();
    for col in 0..ncols {
        let Some(pr) = rows
            .iter()
            .position(|r| r.as_ref().is_some_and(|(v, _)| v.contains_key(&col)))
        else {
            continue;
        };
        let (mut prow, mut prhs) = rows[pr].take().expect("present");
        let inv = Rat::one() / prow[&col].clone();
        for v in prow.values_mut() {
            *v *= &inv;
        }
        prhs *= &inv;
        for slot in rows.iter_mut().flatten() {
            if let Some(f) = slot.0.get(&col).cloned() {
                axpy(&mut slot.0, &f, &prow);
                slot.1 -= &f * &prhs;
            }
        }
        for (_, row, r) in pivots.iter_mut() {
            if let Some(f) = row.get(&col).cloned() {
                axpy(row, &f, &prow);
                *r -= &f * &prhs;
            }
        }
        prow.retain(|_, v| !v.is_zero());
        pivots.push((col, prow, prhs));
    }
    let residual = rows.into_iter().flatten().map(|(_, r)| r).collect();
    Elimination {
        ncols,
        pivots,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn row(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, v)| (k, rat(v))).collect()
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1
        let e = eliminate(
            2,
            vec![row(&[(0, 1), (1, 1)]), row(&[(0, 1), (1, -1)])],
            vec![rat(3), rat(1)],
        );
        assert_eq!(e.basic_solution(), Some(vec![rat(2), rat(1)]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn free_variables_are_zero() {
        // x + y + z = 1, 2y + 2z = 1
        let e = eliminate(
            3,
            vec![row(&[(0, 1), (1, 1), (2, 1)]), row(&[(1, 2), (2, 2)])],
            vec![rat(1), rat(1)],
        );
        assert_eq!(
            e.basic_solution(),
            Some(vec![ratio(1, 2), ratio(1, 2), rat(0)])
        );
    }

    #[test]
    fn detects_inconsistency() {
        let e = eliminate(
            1,
            vec![row(&[(0, 1)]), row(&[(0, 2)])],
            vec![rat(1), rat(3)],
        );
        assert!(!e.is_consistent());
        assert_eq!(e.basic_solution(), None);
    }
}
