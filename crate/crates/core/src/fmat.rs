//! Small dense matrices over GF(2^T) and their determinants.

use crate::gf2m::{FieldContext, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, ctx: &FieldContext, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        FieldMatrix::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).map(|k| ctx.mul(self.get(r, k), other.get(k, c))).sum()
        })
    }

    /// The submatrix keeping the listed columns.
    pub fn select_cols(&self, cols: &[usize]) -> FieldMatrix {
        FieldMatrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    /// The submatrix keeping the listed rows.
    pub fn select_rows(&self, rows: &[usize]) -> FieldMatrix {
        FieldMatrix::from_fn(rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    /// Determinant by Gaussian elimination. In characteristic 2 row swaps do
    /// not change the sign.
    pub fn det(&self, ctx: &FieldContext) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
                return FieldElement::ZERO;
            };
            if p != c {
                for k in 0..n {
                    a.data.swap(p * n + k, c * n + k);
                }
            }
            let pivot = a.get(c, c);
            det = ctx.mul(det, pivot);
            let inv = ctx.inv(pivot).expect("nonzero pivot");
            for r in c + 1..n {
                let factor = ctx.mul(a.get(r, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = a.get(r, k) + ctx.mul(factor, a.get(c, k));
                    a.set(r, k, v);
                }
            }
        }
        det
    }

    /// Rank over GF(2^T).
    pub fn rank(&self, ctx: &FieldContext) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a.get(r, c).is_zero()) else {
                continue;
            };
            for k in 0..self.cols {
                a.data.swap(p * self.cols + k, rank * self.cols + k);
            }
            let inv = ctx.inv(a.get(rank, c)).expect("nonzero pivot");
            for r in rank + 1..self.rows {
                let factor = ctx.mul(a.get(r, c), inv);
                for k in c..self.cols {
                    let v = a.get(r, k) + ctx.mul(factor, a.get(rank, k));
                    a.set(r, k, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// All `m`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    if m > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..m).rev().find(|&i| cur[i] < n - m + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn det_of_singular_and_identity() {
        let ctx = FieldContext::new(5, 0x37).unwrap();
        let a = ctx.alpha();
        let id = FieldMatrix::from_fn(3, 3, |r, c| if r == c { FieldElement::ONE } else { FieldElement::ZERO });
        assert_eq!(id.det(&ctx), FieldElement::ONE);
        let sing = FieldMatrix::from_fn(2, 2, |r, _| ctx.pow(a, r as u64));
        assert_eq!(sing.det(&ctx), FieldElement::ZERO);
        assert_eq!(sing.rank(&ctx), 1);
        // [[a, 1], [1, a]] has determinant a^2 + 1.
        let m = FieldMatrix::from_fn(2, 2, |r, c| if r == c { a } else { FieldElement::ONE });
        assert_eq!(m.det(&ctx), ctx.square(a) + FieldElement::ONE);
    }
}
