//! Dense linear algebra over Q(w_m), plus a small floating-point layer.
//!
//! Everything decision-critical (rank, singularity, solves) runs in exact
//! cyclotomic arithmetic; the [`float`] submodule exists for cross-checks
//! against the exact answers and for the approximate solve path used with
//! non-exact moment providers.

// Elimination kernels touch two rows at the same column index; index loops
// keep that symmetry visible.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::cyclo::CycNum;
use crate::{Error, Result};

/// A dense row-major matrix with entries in Q(w_m). All entries share the
/// modulus fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycMatrix {
    modulus: u32,
    rows: usize,
    cols: usize,
    data: Vec<CycNum>,
}

impl CycMatrix {
    pub fn from_fn(
        modulus: u32,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CycNum,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                assert_eq!(v.modulus(), modulus, "matrix entry modulus mismatch");
                data.push(v);
            }
        }
        CycMatrix {
            modulus,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(modulus: u32, rows: usize, cols: usize) -> Self {
        Self::from_fn(modulus, rows, cols, |_, _| CycNum::zero(modulus))
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &CycNum {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CycNum) {
        assert_eq!(v.modulus(), self.modulus);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[CycNum] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<CycNum> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> CycMatrix {
        CycMatrix::from_fn(self.modulus, self.cols, self.rows, |r, c| {
            self.get(c, r).clone()
        })
    }

    pub fn matmul(&self, other: &CycMatrix) -> Result<CycMatrix> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = CycMatrix::zeros(self.modulus, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).clone() + a.try_mul(b)?;
                    out.set(r, c, cur);
                }
            }
        }
        Ok(out)
    }

    /// Exact rank via Gaussian elimination over the field Q(w_m), pivoting on
    /// the first nonzero entry of each column.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<CycNum>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0usize;
        for col in 0..self.cols {
            let pivot = (rank..work.len()).find(|&r| !work[r][col].is_zero());
            let Some(p) = pivot else { continue };
            work.swap(rank, p);
            let pivot_val = work[rank][col].clone();
            for r in rank + 1..work.len() {
                if work[r][col].is_zero() {
                    continue;
                }
                let factor = work[r][col].try_div(&pivot_val).expect("pivot nonzero");
                for c in col..self.cols {
                    let delta = factor.try_mul(&work[rank][c]).expect("same modulus");
                    work[r][c] = work[r][c].clone() - delta;
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// Solve `self^T * x = rhs` exactly. `self` must be square and
    /// nonsingular; the returned vector has one entry per row of `self`.
    pub fn solve_transposed(&self, rhs: &[CycNum]) -> Result<Vec<CycNum>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        if rhs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: rhs.len(),
            });
        }
        let n = self.rows;
        // Augmented rows of the transposed system.
        let mut aug: Vec<Vec<CycNum>> = (0..n)
            .map(|r| {
                let mut row: Vec<CycNum> = (0..n).map(|c| self.get(c, r).clone()).collect();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !aug[r][col].is_zero());
            let Some(p) = pivot else {
                return Err(Error::SingularMatrix { rank: col, size: n });
            };
            aug.swap(col, p);
            let pivot_val = aug[col][col].clone();
            for r in 0..n {
                if r == col || aug[r][col].is_zero() {
                    continue;
                }
                let factor = aug[r][col].try_div(&pivot_val)?;
                for c in col..=n {
                    let delta = factor.try_mul(&aug[col][c])?;
                    aug[r][c] = aug[r][c].clone() - delta;
                }
            }
        }
        let mut x = Vec::with_capacity(n);
        for (i, row) in aug.iter().enumerate() {
            x.push(row[n].try_div(&row[i])?);
        }
        Ok(x)
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.to_complex()).collect())
            .collect()
    }
}

/// Incremental exact row echelon used for span membership tests.
///
/// Vectors are inserted one at a time; each kept vector is stored reduced
/// against all earlier kept vectors, so testing a candidate is a single
/// forward reduction. Supports removal of the most recent vector, which makes
/// it usable as a backtracking stack in subset searches.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(Vec<CycNum>, usize)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: vec![] }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn reduce(&self, v: &mut [CycNum]) {
        for (row, pivot) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].try_div(&row[*pivot]).expect("pivot nonzero");
            for c in 0..self.dim {
                if row[c].is_zero() {
                    continue;
                }
                let delta = factor.try_mul(&row[c]).expect("same modulus");
                v[c] = v[c].clone() - delta;
            }
        }
    }

    /// True when `v` lies in the span of the kept vectors.
    pub fn contains(&self, v: &[CycNum]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|c| c.is_zero())
    }

    /// Insert `v` if it is independent of the kept vectors. Returns whether
    /// it was kept.
    pub fn try_insert(&mut self, v: &[CycNum]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        match w.iter().position(|c| !c.is_zero()) {
            Some(pivot) => {
                self.rows.push((w, pivot));
                true
            }
            None => false,
        }
    }

    /// Drop the most recently kept vector.
    pub fn pop(&mut self) {
        self.rows.pop();
    }
}

/// Floating-point kernels over complex matrices.
pub mod float {
    use num_complex::Complex64;

    /// Rank by Gaussian elimination with partial pivoting; a pivot counts
    /// when its modulus exceeds `tol`.
    pub fn rank(mat: &[Vec<Complex64>], tol: f64) -> usize {
        if mat.is_empty() {
            return 0;
        }
        let cols = mat[0].len();
        let mut work: Vec<Vec<Complex64>> = mat.to_vec();
        let mut rank = 0usize;
        for col in 0..cols {
            let (best, best_norm) = (rank..work.len())
                .map(|r| (r, work[r][col].norm()))
                .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_norm <= tol {
                continue;
            }
            work.swap(rank, best);
            let pivot = work[rank][col];
            for r in rank + 1..work.len() {
                let factor = work[r][col] / pivot;
                if factor.norm() == 0.0 {
                    continue;
                }
                for c in col..cols {
                    let delta = factor * work[rank][c];
                    work[r][c] -= delta;
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// Solve a square complex system by partial-pivot elimination. Returns
    /// `None` when a pivot degenerates to zero.
    pub fn solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = a.len();
        let mut aug: Vec<Vec<Complex64>> = a
            .iter()
            .zip(b)
            .map(|(row, rhs)| {
                let mut r = row.clone();
                r.push(*rhs);
                r
            })
            .collect();
        for col in 0..n {
            let (best, best_norm) = (col..n)
                .map(|r| (r, aug[r][col].norm()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_norm == 0.0 {
                return None;
            }
            aug.swap(col, best);
            let pivot = aug[col][col];
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug[r][col] / pivot;
                if factor.norm() == 0.0 {
                    continue;
                }
                for c in col..=n {
                    let delta = factor * aug[col][c];
                    aug[r][c] -= delta;
                }
            }
        }
        Some((0..n).map(|i| aug[i][n] / aug[i][i]).collect())
    }
}
