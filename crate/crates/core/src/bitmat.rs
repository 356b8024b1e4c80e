//! Dense matrices over GF(2) with rows packed into 64-bit words.

use std::fmt;

/// Rank of a set of rows of at most 64 columns each. The slice is used as
/// scratch space and left in an unspecified order.
pub fn rank_of_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    while let Some(p) = rows[rank..].iter().position(|&r| r != 0) {
        rows.swap(rank, rank + p);
        let pivot = rows[rank];
        let bit = pivot & pivot.wrapping_neg();
        for r in rows[rank + 1..].iter_mut() {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BinaryMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows given as bit masks (bit `c` is column `c`).
    /// Bits at or above `cols` are dropped.
    pub fn from_row_masks(cols: usize, masks: &[u64]) -> Self {
        assert!(cols <= 64, "from_row_masks supports at most 64 columns");
        let keep = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
        let mut m = Self::zeros(masks.len(), cols);
        for (i, &mask) in masks.iter().enumerate() {
            if m.stride > 0 {
                m.words[i * m.stride] = mask & keep;
            }
        }
        m
    }

    /// Builds a matrix from nested boolean-like rows.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v != 0);
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

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Row `r` as a mask; only valid for matrices with at most 64 columns.
    pub fn row_mask(&self, r: usize) -> u64 {
        assert!(self.cols <= 64);
        if self.stride == 0 {
            0
        } else {
            self.words[r * self.stride]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Entrywise sum (XOR).
    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.stride {
                        out.words[r * out.stride + w] ^= other.words[k * other.stride + w];
                    }
                }
            }
        }
        out
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        for w in 0..s {
            let v = self.words[src * s + w];
            self.words[dst * s + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for w in 0..s {
            self.words.swap(a * s + w, b * s + w);
        }
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// nonzero row, in order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.cols <= 64 {
            let mut rows: Vec<u64> = (0..self.rows).map(|r| self.row_mask(r)).collect();
            return rank_of_rows(&mut rows);
        }
        self.clone().rref_in_place().len()
    }

    /// Basis of the right kernel `{x : M x = 0}`, one vector per free column,
    /// each returned as a `1 x cols` matrix row of the result.
    pub fn kernel(&self) -> BinaryMatrix {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = BinaryMatrix::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            basis.set(k, f, true);
            for (row, &pc) in pivots.iter().enumerate() {
                if m.get(row, f) {
                    basis.set(k, pc, true);
                }
            }
        }
        basis
    }

    /// Dimension of `{y : y^t M = 0}`.
    pub fn left_nullity(&self) -> usize {
        self.rows - self.rank()
    }

    pub fn inverse(&self) -> Option<BinaryMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = BinaryMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = BinaryMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Overwrites row `dst` with `src` from another matrix of equal width.
    pub fn copy_row_from(&mut self, dst: usize, other: &BinaryMatrix, src: usize) {
        assert_eq!(self.cols, other.cols);
        let s = self.stride;
        self.row_words_mut(dst).copy_from_slice(&other.words[src * s..(src + 1) * s]);
    }

    /// Row-major bits packed LSB-first (bit `r*cols + c`) and printed as hex,
    /// most significant nibble first, zero-padded to `ceil(rows*cols/4)` digits.
    pub fn to_hex(&self) -> String {
        let n = self.rows * self.cols;
        let digits = n.div_ceil(4).max(1);
        let mut nibbles = vec![0u8; digits];
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    let k = r * self.cols + c;
                    nibbles[k / 4] |= 1 << (k % 4);
                }
            }
        }
        nibbles
            .iter()
            .rev()
            .map(|&d| char::from_digit(d as u32, 16).unwrap())
            .collect()
    }

    /// Inverse of [`to_hex`](Self::to_hex). Leading zeros may be omitted; bits
    /// beyond `rows*cols` must be zero.
    pub fn from_hex(rows: usize, cols: usize, hex: &str) -> Option<BinaryMatrix> {
        let n = rows * cols;
        let mut m = BinaryMatrix::zeros(rows, cols);
        for (i, ch) in hex.chars().rev().enumerate() {
            let d = ch.to_digit(16)?;
            for b in 0..4 {
                if d >> b & 1 == 1 {
                    let k = 4 * i + b;
                    if k >= n {
                        return None;
                    }
                    m.set(k / cols, k % cols, true);
                }
            }
        }
        Some(m)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c) as u8)?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
                if c + 1 < self.cols {
                    write!(f, " ")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rank by brute force: log2 of the size of the row space.
    fn rank_by_span(m: &BinaryMatrix) -> usize {
        let rows: Vec<u64> = (0..m.rows()).map(|r| m.row_mask(r)).collect();
        let mut span = std::collections::HashSet::new();
        for sel in 0u32..(1 << rows.len()) {
            let v = (0..rows.len())
                .filter(|i| sel >> i & 1 == 1)
                .fold(0u64, |a, i| a ^ rows[i]);
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn trivial_ranks() {
        assert_eq!(BinaryMatrix::zeros(3, 7).rank(), 0);
        for n in [1, 5, 64, 70, 130] {
            assert_eq!(BinaryMatrix::identity(n).rank(), n);
        }
    }

    #[test]
    fn hex_layout() {
        let m = BinaryMatrix::from_rows(&[[1u8, 0, 0, 0, 0], [0, 0, 1, 0, 0]]);
        assert_eq!(m.to_hex(), "081");
        assert_eq!(BinaryMatrix::from_hex(2, 5, "081"), Some(m.clone()));
        assert_eq!(BinaryMatrix::from_hex(2, 5, "81"), Some(m));
        assert_eq!(BinaryMatrix::from_hex(2, 5, "481"), None);
        assert_eq!(BinaryMatrix::from_hex(2, 5, "0g1"), None);
    }

    #[test]
    fn inverse_of_singular() {
        let m = BinaryMatrix::from_rows(&[[1u8, 1], [1, 1]]);
        assert!(m.inverse().is_none());
        let m = BinaryMatrix::from_rows(&[[1u8, 1], [0, 1]]);
        assert_eq!(m.mul(&m.inverse().unwrap()), BinaryMatrix::identity(2));
    }

    proptest! {
        #[test]
        fn rank_matches_span(rows in prop::collection::vec(any::<u64>(), 1..10), cols in 1usize..=64) {
            let m = BinaryMatrix::from_row_masks(cols, &rows);
            prop_assert_eq!(m.rank(), rank_by_span(&m));
            prop_assert_eq!(m.rank(), m.clone().rref_in_place().len());
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn kernel_is_annihilated(rows in prop::collection::vec(any::<u64>(), 0..12), cols in 1usize..=40) {
            let m = BinaryMatrix::from_row_masks(cols, &rows);
            let k = m.kernel();
            prop_assert_eq!(k.rows(), cols - m.rank());
            prop_assert_eq!(k.rank(), k.rows());
            prop_assert!(m.mul(&k.transpose()).is_zero());
        }

        #[test]
        fn wide_rank_agrees(seed in any::<u64>()) {
            // 6 x 150 matrix built from 3 independent rows repeated; rank <= 3.
            let mut state = seed | 1;
            let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; state };
            let mut base = BinaryMatrix::zeros(3, 150);
            for r in 0..3 { for c in 0..150 { base.set(r, c, next() & 1 == 1); } }
            let mut m = BinaryMatrix::zeros(6, 150);
            for r in 0..6 {
                for c in 0..150 {
                    let v = base.get(r % 3, c) ^ (r >= 3 && base.get((r + 1) % 3, c));
                    m.set(r, c, v);
                }
            }
            let small = base.transpose();
            prop_assert_eq!(m.rank(), base.rank());
            prop_assert_eq!(small.rank(), base.rank());
        }

        #[test]
        fn hex_round_trip(rows in 1usize..5, cols in 1usize..13, seed in any::<u64>()) {
            let masks: Vec<u64> = (0..rows).map(|r| seed.rotate_left(r as u32 * 7)).collect();
            let m = BinaryMatrix::from_row_masks(cols, &masks);
            prop_assert_eq!(BinaryMatrix::from_hex(rows, cols, &m.to_hex()), Some(m));
        }
    }
}
