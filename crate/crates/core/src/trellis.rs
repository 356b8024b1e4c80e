//! Zero-tailed convolutional construction with monomial generators.
//!
//! With `xi = D^{(nu+1)(2^R-1)}` the generator entry for input `l` and antenna
//! `q` (both 0-based here) is `xi^{q 2^l}`, a monomial of degree
//! `(nu+1)(2^R-1) q 2^l`. Antenna `q` sends the coefficients of
//! `p_q(D) = sum_l D^{deg(l,q)} u_l(D)`. Message polynomials are short enough
//! that the last `nu` coefficients of every `p_q` vanish.
//!
//! Binary polynomials are `u64` masks with bit `j` the coefficient of `D^j`,
//! so the block length is limited to 64.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmat::BinaryMatrix;
use crate::par::{chunked_reduce, Execution};
use crate::rank_codes::{lifted_rank_wide, RankReport};

/// Message spaces up to this size are scanned exhaustively by default.
pub const DEFAULT_MESSAGE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrellisError {
    #[error("block length {t} is below the required {required}")]
    BlockTooShort { t: u32, required: i64 },
    #[error("message polynomial {index} has degree {degree}, above the bound {bound}")]
    MessageDegreeTooHigh { index: usize, degree: u32, bound: i64 },
    #[error("message space of 2^{bits} exceeds the limit of {limit}")]
    EnumerationTooLarge { bits: u32, limit: u64 },
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisGenerator {
    pub m_t: usize,
    pub nu: usize,
    pub r: usize,
    pub t: u32,
    /// `degrees[l][q]`, the exponent of `D` in `g_l^{(q)}`.
    pub degrees: Vec<Vec<u32>>,
}

/// `(2^R-1) nu + (2^R-1)(nu+1)((M_t-2)(2^R-1) + R)`.
pub fn trellis_threshold(m_t: usize, nu: usize, r: usize) -> i64 {
    crate::minimal_basis::detp_threshold(m_t, nu, r)
}

pub fn build_generator(m_t: usize, r: usize, nu: usize, t: u32) -> Result<TrellisGenerator, TrellisError> {
    if m_t == 0 || !(1..=m_t).contains(&r) || r > 8 {
        return Err(TrellisError::ParamsOutOfRange(format!("M_t = {m_t}, R = {r}")));
    }
    if t > 64 {
        return Err(TrellisError::ParamsOutOfRange(format!("T = {t} exceeds 64")));
    }
    if (nu + 1) * m_t > 128 {
        return Err(TrellisError::ParamsOutOfRange("(nu+1) M_t exceeds 128".into()));
    }
    let required = trellis_threshold(m_t, nu, r);
    if (t as i64) < required {
        return Err(TrellisError::BlockTooShort { t, required });
    }
    let step = ((nu + 1) * ((1 << r) - 1)) as u32;
    let degrees = (0..r)
        .map(|l| (0..m_t).map(|q| step * q as u32 * (1 << l)).collect())
        .collect();
    let gen = TrellisGenerator { m_t, nu, r, t, degrees };
    if gen.message_len() < 0 {
        return Err(TrellisError::BlockTooShort { t, required: (nu as i64) + gen.max_degree() as i64 + 1 });
    }
    Ok(gen)
}

impl TrellisGenerator {
    /// `(nu+1)(M_t-1)(2^R-1) 2^{R-1}`.
    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Coefficients per message polynomial, `T - nu - max_degree`.
    pub fn message_len(&self) -> i64 {
        self.t as i64 - self.nu as i64 - self.max_degree() as i64
    }

    /// Total message bits, `R (T - nu - max_degree)`.
    pub fn message_bits(&self) -> u32 {
        (self.r as i64 * self.message_len()).max(0) as u32
    }

    /// `R (T - nu - max_degree) / T` bits per transmission.
    pub fn effective_rate(&self) -> Ratio<u64> {
        Ratio::new(self.message_bits() as u64, self.t as u64)
    }

    /// Message bits per transmission per input stream (`effective_rate / R`).
    pub fn rate_per_stream(&self) -> Ratio<u64> {
        self.effective_rate() / Ratio::from_integer(self.r as u64)
    }

    /// Largest allowed message degree, `T - 1 - nu - max_degree`.
    pub fn message_degree_bound(&self) -> i64 {
        self.message_len() - 1
    }

    fn check_messages(&self, u: &[u64]) -> Result<(), TrellisError> {
        if u.len() != self.r {
            return Err(TrellisError::ParamsOutOfRange(format!("{} message polynomials for R = {}", u.len(), self.r)));
        }
        let bound = self.message_degree_bound();
        for (index, &p) in u.iter().enumerate() {
            if p != 0 {
                let degree = 63 - p.leading_zeros();
                if degree as i64 > bound {
                    return Err(TrellisError::MessageDegreeTooHigh { index, degree, bound });
                }
            }
        }
        Ok(())
    }

    /// Rows `p_q` of the code matrix as coefficient masks.
    pub fn encode_rows(&self, u: &[u64]) -> Result<Vec<u64>, TrellisError> {
        self.check_messages(u)?;
        Ok((0..self.m_t)
            .map(|q| (0..self.r).fold(0u64, |acc, l| acc ^ (u[l] << self.degrees[l][q])))
            .collect())
    }

    /// The `M_t x T` code matrix `P`.
    pub fn encode(&self, u: &[u64]) -> Result<BinaryMatrix, TrellisError> {
        Ok(rows_to_matrix(&self.encode_rows(u)?, self.t as usize))
    }

    /// Messages for index `i`: bits `l*n .. (l+1)*n` form `u_l`, `n = message_len`.
    pub fn messages_for_index(&self, i: u64) -> Vec<u64> {
        let n = self.message_len().max(0) as u32;
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        (0..self.r).map(|l| (i >> (l as u32 * n)) & mask).collect()
    }

    /// Degree of the lifted generator entry for input `l` and column
    /// `s M_t + q`: `D^s g_l^{(q)}`.
    pub fn lifted_degree(&self, l: usize, col: usize) -> u32 {
        (col / self.m_t) as u32 + self.degrees[l][col % self.m_t]
    }

    /// `Omega(G~^t u)`, the coefficient matrix of the lifted generator
    /// applied to `u`, computed column by column of `G~`.
    pub fn lifted_product(&self, u: &[u64]) -> Result<BinaryMatrix, TrellisError> {
        self.check_messages(u)?;
        let rows: Vec<u64> = (0..(self.nu + 1) * self.m_t)
            .map(|col| (0..self.r).fold(0u64, |acc, l| acc ^ (u[l] << self.lifted_degree(l, col))))
            .collect();
        Ok(rows_to_matrix(&rows, self.t as usize))
    }

    /// Text export: header `M_t nu R T`, then one row of `M_t` degrees per input.
    pub fn export(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.m_t, self.nu, self.r, self.t);
        for row in &self.degrees {
            let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }
}

fn rows_to_matrix(rows: &[u64], t: usize) -> BinaryMatrix {
    let mut m = BinaryMatrix::zeros(rows.len(), t);
    for (r, &row) in rows.iter().enumerate() {
        for c in 0..t {
            if row >> c & 1 == 1 {
                m.set(r, c, true);
            }
        }
    }
    m
}

/// Minimum lifted rank over all nonzero messages.
pub fn verify_trellis_rank(gen: &TrellisGenerator, claimed: usize, limit: u64, exec: Execution) -> Result<RankReport, TrellisError> {
    let bits = gen.message_bits();
    let n = 1u64.checked_shl(bits).filter(|&n| n <= limit).ok_or(TrellisError::EnumerationTooLarge { bits, limit })?;
    let full = (gen.nu + 1) * gen.m_t;
    type Acc = (Option<(usize, u64)>, u64, Vec<u64>);
    let (min, scanned, histogram) = chunked_reduce(
        exec,
        n,
        (n / 256).clamp(1, 1 << 12),
        (None, 0, vec![0u64; full + 1]),
        |range| {
            let mut acc: Acc = (None, 0, vec![0u64; full + 1]);
            for i in range.filter(|&i| i != 0) {
                let rows = gen.encode_rows(&gen.messages_for_index(i)).expect("index within the message space");
                let rank = lifted_rank_wide(&rows, gen.nu);
                acc.1 += 1;
                acc.2[rank] += 1;
                if acc.0.is_none_or(|m| (rank, i) < m) {
                    acc.0 = Some((rank, i));
                }
            }
            acc
        },
        |mut a: Acc, b: Acc| {
            a.0 = match (a.0, b.0) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
            a.1 += b.1;
            for (x, y) in a.2.iter_mut().zip(&b.2) {
                *x += y;
            }
            a
        },
    );
    Ok(RankReport {
        claimed,
        min_rank: min.map(|m| m.0),
        witness: min.map(|m| m.1),
        scanned,
        skipped: 0,
        histogram,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_degrees() {
        let g = build_generator(2, 1, 1, 5).unwrap();
        assert_eq!(g.degrees, vec![vec![0, 2]]);
        let g = build_generator(2, 2, 0, 12).unwrap();
        assert_eq!(g.degrees, vec![vec![0, 3], vec![0, 6]]);
        assert_eq!(g.max_degree(), 6);
    }

    #[test]
    fn too_short() {
        assert_eq!(build_generator(2, 1, 1, 2), Err(TrellisError::BlockTooShort { t: 2, required: 3 }));
    }

    #[test]
    fn encode_unit_message() {
        let g = build_generator(2, 1, 1, 5).unwrap();
        let p = g.encode(&[1]).unwrap();
        assert_eq!(p, BinaryMatrix::from_rows(&[[1u8, 0, 0, 0, 0], [0, 0, 1, 0, 0]]));
        assert!(g.encode(&[0]).unwrap().is_zero());
        assert!(matches!(g.encode(&[0b100]), Err(TrellisError::MessageDegreeTooHigh { .. })));
    }

    #[test]
    fn rates() {
        let g = build_generator(2, 1, 1, 5).unwrap();
        assert_eq!(g.effective_rate(), Ratio::new(2, 5));
        let g = build_generator(1, 1, 0, 7).unwrap();
        assert_eq!(g.effective_rate(), Ratio::from_integer(1));
    }

    #[test]
    fn export_format() {
        let g = build_generator(2, 2, 0, 12).unwrap();
        assert_eq!(g.export(), "2 0 2 12\n0 3\n0 6\n");
    }
}
