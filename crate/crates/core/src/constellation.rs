//! Set-partitioned PSK and QAM labelings.
//!
//! A label is an `L`-bit word; bit `l` of the word is `b_l`, and `b_0` selects
//! the coarsest partition level.
//!
//! * PSK: `s = prod_l (zeta^{2^l})^{b_l}` with `zeta = exp(2 pi i / 2^L)`, i.e.
//!   the point `exp(2 pi i n / 2^L)` with `n = sum_l b_l 2^l`.
//! * QAM (even `L = 2m`): `s - c = sum_l b_l (1-i)^l mod (1-i)^L` with
//!   `c = (1+i)/2`. Since `(1-i)^2 = -2i`, reduction modulo `(1-i)^{2m}` is
//!   reduction of both coordinates modulo `2^m`; the representative is taken
//!   in `[-2^{m-1}, 2^{m-1})`.
//!
//! Transmitted symbols are translated so that the all-zero label sits at the
//! origin and then scaled to unit average energy over all `2^L` labels.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstellationError {
    #[error("unsupported level count L = {levels} for {kind}")]
    UnsupportedL { kind: ConstellationKind, levels: u32 },
    #[error("label {label:#b} does not fit in {levels} bits")]
    LabelLengthMismatch { label: u32, levels: u32 },
    #[error("invalid constellation `{0}` (expected psk:L or qam:L)")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Psk,
    Qam,
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstellationKind::Psk => "psk",
            ConstellationKind::Qam => "qam",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapperConfig {
    pub kind: ConstellationKind,
    pub levels: u32,
    /// Scale applied after translating the zero label to the origin.
    pub normalization: f64,
}

impl MapperConfig {
    pub fn new(kind: ConstellationKind, levels: u32) -> Result<Self, ConstellationError> {
        let ok = match kind {
            ConstellationKind::Psk => (1..=8).contains(&levels),
            ConstellationKind::Qam => levels.is_multiple_of(2) && (2..=16).contains(&levels),
        };
        if !ok {
            return Err(ConstellationError::UnsupportedL { kind, levels });
        }
        let mut cfg = MapperConfig { kind, levels, normalization: 1.0 };
        let origin = cfg.raw_point(0);
        let energy = (0..cfg.size()).map(|b| (cfg.raw_point(b) - origin).norm_sqr()).sum::<f64>() / cfg.size() as f64;
        cfg.normalization = 1.0 / energy.sqrt();
        Ok(cfg)
    }

    pub fn psk(levels: u32) -> Result<Self, ConstellationError> {
        Self::new(ConstellationKind::Psk, levels)
    }

    pub fn qam(levels: u32) -> Result<Self, ConstellationError> {
        Self::new(ConstellationKind::Qam, levels)
    }

    /// Number of labels, `2^L`.
    pub fn size(&self) -> u32 {
        1 << self.levels
    }

    fn raw_point(&self, bits: u32) -> Complex64 {
        match self.kind {
            ConstellationKind::Psk => {
                let n = bits as f64;
                Complex64::from_polar(1.0, 2.0 * PI * n / self.size() as f64)
            }
            ConstellationKind::Qam => {
                let (re, im) = qam_residue(bits, self.levels);
                Complex64::new(re as f64 + 0.5, im as f64 + 0.5)
            }
        }
    }

    fn check(&self, bits: u32) -> Result<(), ConstellationError> {
        if bits >> self.levels != 0 {
            return Err(ConstellationError::LabelLengthMismatch { label: bits, levels: self.levels });
        }
        Ok(())
    }

    /// Un-normalized constellation point of a label.
    pub fn map_bits(&self, bits: u32) -> Result<Complex64, ConstellationError> {
        self.check(bits)?;
        Ok(self.raw_point(bits))
    }

    /// Transmitted value: translated so label 0 maps to 0, then normalized.
    pub fn symbol(&self, bits: u32) -> Result<Complex64, ConstellationError> {
        self.check(bits)?;
        Ok((self.raw_point(bits) - self.raw_point(0)) * self.normalization)
    }

    /// Entrywise [`symbol`](Self::symbol) of a row-major label matrix.
    pub fn map_matrix(&self, labels: &[u32]) -> Result<Vec<Complex64>, ConstellationError> {
        labels.iter().map(|&b| self.symbol(b)).collect()
    }
}

impl FromStr for MapperConfig {
    type Err = ConstellationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ConstellationError::Parse(s.to_string());
        let (kind, levels) = s.split_once(':').ok_or_else(err)?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "psk" => ConstellationKind::Psk,
            "qam" => ConstellationKind::Qam,
            _ => return Err(err()),
        };
        let levels: u32 = levels.trim().parse().map_err(|_| err())?;
        MapperConfig::new(kind, levels)
    }
}

impl fmt::Display for MapperConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.levels)
    }
}

/// `sum_l b_l (1-i)^l` reduced coordinatewise modulo `2^{L/2}` into
/// `[-2^{L/2-1}, 2^{L/2-1})`.
fn qam_residue(bits: u32, levels: u32) -> (i64, i64) {
    let (mut re, mut im) = (0i64, 0i64);
    let (mut pr, mut pi) = (1i64, 0i64);
    for l in 0..levels {
        if bits >> l & 1 == 1 {
            re += pr;
            im += pi;
        }
        // (pr + pi i)(1 - i) = (pr + pi) + (pi - pr) i
        (pr, pi) = (pr + pi, pi - pr);
    }
    let modulus = 1i64 << (levels / 2);
    let half = modulus / 2;
    let wrap = |v: i64| (v + half).rem_euclid(modulus) - half;
    (wrap(re), wrap(im))
}

/// QPSK labeling shown alongside the partition figure, keyed by the label
/// string `b_0 b_1`: `1 -> 00`, `-1 -> 01`, `i -> 11`, `-i -> 10`. It differs
/// from the product formula by a relabeling and is kept for reference only.
pub fn figure_qpsk_point(b0: bool, b1: bool) -> Complex64 {
    match (b0, b1) {
        (false, false) => Complex64::new(1.0, 0.0),
        (false, true) => Complex64::new(-1.0, 0.0),
        (true, true) => Complex64::new(0.0, 1.0),
        (true, false) => Complex64::new(0.0, -1.0),
    }
}
