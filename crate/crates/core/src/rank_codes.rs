//! Binary rank-distance code sets from linearized polynomials.
//!
//! A codeword is the `M_t x T` binary matrix whose row `j` holds the
//! coordinates of `f(p_j)`, where `f(x) = sum_l f_l x^{2^l}` and the `p_j` are
//! the evaluation points. In ISI mode the points are powers of
//! `xi = alpha^{(2^R-1)(nu+1)}` and `f` is restricted to the set `S` of
//! polynomials whose codewords end in `nu` zero columns. `S` is the kernel of
//! a GF(2) linear system in the `R*T` coefficient bits of `f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmat::{rank_of_rows, BinaryMatrix};
use crate::gf2m::{FieldContext, FieldElement, FieldError};
use crate::par::{chunked_reduce, Execution};

/// Default ceiling on exhaustive enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 24;

/// Largest lifted matrix (rows) handled by the fast rank path.
const MAX_LIFTED_ROWS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("enumeration of 2^{dimension} elements exceeds the limit of {limit}")]
    EnumerationTooLarge { dimension: u32, limit: u64 },
    #[error("polynomial does not produce a zero-tailed codeword")]
    NotZeroTailed,
    #[error("the last {nu} columns of the matrix are not zero")]
    TailNotZero { nu: usize },
    #[error("field degree {field} does not match block length {t}")]
    FieldMismatch { field: u32, t: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Points `xi^0 .. xi^{M_t-1}`, zero-tail constraints active.
    Isi,
    /// Points `alpha^0 .. alpha^{M_t-1}`, no constraints (classical flat-fading codes).
    Flat,
}

impl std::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalMode::Isi => "isi",
            EvalMode::Flat => "flat",
        })
    }
}

impl std::str::FromStr for EvalMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "isi" => Ok(EvalMode::Isi),
            "flat" => Ok(EvalMode::Flat),
            other => Err(format!("unknown evaluation mode `{other}` (expected isi or flat)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub m_t: usize,
    pub m_r: usize,
    pub nu: usize,
    pub t: u32,
    pub r: usize,
    pub mode: EvalMode,
}

impl CodeParams {
    /// Validates the parameters. ISI mode needs `T >= (nu+1) M_t` so that a
    /// lifted codeword can have full row rank at all.
    pub fn new(m_t: usize, m_r: usize, nu: usize, t: u32, r: usize, mode: EvalMode) -> Result<Self, CodeError> {
        let p = CodeParams { m_t, m_r, nu, t, r, mode };
        p.validate()?;
        Ok(p)
    }

    pub fn isi(m_t: usize, nu: usize, t: u32, r: usize) -> Result<Self, CodeError> {
        Self::new(m_t, 1, nu, t, r, EvalMode::Isi)
    }

    pub fn flat(m_t: usize, t: u32, r: usize) -> Result<Self, CodeError> {
        Self::new(m_t, 1, 0, t, r, EvalMode::Flat)
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        let bad = |msg: String| Err(CodeError::ParamsOutOfRange(msg));
        if self.m_t == 0 || self.m_r == 0 {
            return bad("antenna counts must be positive".into());
        }
        if !(1..=32).contains(&self.t) {
            return bad(format!("block length T = {} outside 1..=32", self.t));
        }
        if !(1..=self.m_t).contains(&self.r) {
            return bad(format!("rate R = {} outside 1..=M_t = {}", self.r, self.m_t));
        }
        if self.r * self.t as usize > 128 {
            return bad(format!("R T = {} exceeds 128 coefficient bits", self.r * self.t as usize));
        }
        if (self.nu as u32) >= self.t {
            return bad(format!("memory nu = {} must be below T = {}", self.nu, self.t));
        }
        if self.mode == EvalMode::Isi && (self.t as usize) < (self.nu + 1) * self.m_t {
            return bad(format!(
                "ISI mode needs T >= (nu+1) M_t = {}, got T = {}",
                (self.nu + 1) * self.m_t,
                self.t
            ));
        }
        if (self.nu + 1) * self.m_t > MAX_LIFTED_ROWS {
            return bad(format!("(nu+1) M_t exceeds {MAX_LIFTED_ROWS}"));
        }
        Ok(())
    }

    /// Rank-distance parameter `d = M_t - R + 1`.
    pub fn d(&self) -> usize {
        self.m_t - self.r + 1
    }

    /// `R nu + (M_t - 1)(nu + 1)(2^R - 1)`, the block length above which the
    /// rank guarantee holds.
    pub fn t_thr(&self) -> u64 {
        let q = (1u64 << self.r) - 1;
        (self.r * self.nu) as u64 + (self.m_t as u64 - 1) * (self.nu as u64 + 1) * q
    }

    /// Guaranteed binary rank of every nonzero lifted codeword, `d (nu+1)`.
    pub fn target_rank(&self) -> usize {
        self.d() * (self.nu + 1)
    }

    /// Maximum possible rank of a lifted codeword, `(nu+1) M_t`.
    pub fn full_rank(&self) -> usize {
        (self.nu + 1) * self.m_t
    }

    /// Lower bound `R T - nu M_t` on the dimension of `S` (ISI mode).
    pub fn dimension_bound(&self) -> i64 {
        match self.mode {
            EvalMode::Isi => (self.r as i64) * self.t as i64 - (self.nu * self.m_t) as i64,
            EvalMode::Flat => (self.r as i64) * self.t as i64,
        }
    }

    /// `xi = alpha^{(2^R - 1)(nu + 1)}`.
    pub fn xi(&self, ctx: &FieldContext) -> FieldElement {
        ctx.alpha_pow((((1i64) << self.r) - 1) * (self.nu as i64 + 1))
    }

    /// Evaluation points `p_0 .. p_{M_t-1}`.
    pub fn points(&self, ctx: &FieldContext) -> Vec<FieldElement> {
        let base = match self.mode {
            EvalMode::Isi => self.xi(ctx),
            EvalMode::Flat => ctx.alpha(),
        };
        (0..self.m_t).map(|j| ctx.pow(base, j as u64)).collect()
    }

    fn check_field(&self, ctx: &FieldContext) -> Result<(), CodeError> {
        if ctx.degree() != self.t {
            return Err(CodeError::FieldMismatch { field: ctx.degree(), t: self.t });
        }
        Ok(())
    }
}

/// `f(x) = sum_l f_l x^{2^l}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearizedPolynomial {
    pub coeffs: Vec<FieldElement>,
}

impl LinearizedPolynomial {
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        LinearizedPolynomial { coeffs }
    }

    pub fn zero(r: usize) -> Self {
        LinearizedPolynomial { coeffs: vec![FieldElement::ZERO; r] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, ctx: &FieldContext, x: FieldElement) -> FieldElement {
        let mut power = x;
        let mut acc = FieldElement::ZERO;
        for &c in &self.coeffs {
            acc += ctx.mul(c, power);
            power = ctx.square(power);
        }
        acc
    }

    /// Coefficient bits, bit `l*T + b` being coordinate `b` of `f_l`.
    pub fn to_bits(&self, t: u32) -> u128 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(0u128, |acc, (l, c)| acc | (c.bits() as u128) << (l as u32 * t))
    }

    pub fn from_bits(bits: u128, t: u32, r: usize) -> Self {
        let mask = if t == 32 { u32::MAX as u128 } else { (1u128 << t) - 1 };
        LinearizedPolynomial {
            coeffs: (0..r)
                .map(|l| FieldElement::from_bits((bits >> (l as u32 * t) & mask) as u32))
                .collect(),
        }
    }
}

/// Free-function form of [`LinearizedPolynomial::eval`].
pub fn eval_linpoly(ctx: &FieldContext, f: &LinearizedPolynomial, x: FieldElement) -> FieldElement {
    f.eval(ctx, x)
}

/// The `nu M_t x R T` system whose right kernel is `S`. Row `j*nu + (i - T + nu)`
/// states `Tr(theta_i f(p_j)) = 0` for the last `nu` coordinates `i`.
pub fn build_constraint_system(ctx: &FieldContext, params: &CodeParams) -> Result<BinaryMatrix, CodeError> {
    params.validate()?;
    params.check_field(ctx)?;
    let t = params.t as usize;
    let nu = match params.mode {
        EvalMode::Isi => params.nu,
        EvalMode::Flat => 0,
    };
    let mut m = BinaryMatrix::zeros(nu * params.m_t, params.r * t);
    let theta = ctx.dual_basis();
    for (j, &p) in params.points(ctx).iter().enumerate() {
        let mut p_pow = p;
        for l in 0..params.r {
            for b in 0..t {
                let v = ctx.mul(ctx.alpha_pow(b as i64), p_pow);
                for (k, i) in (t - nu..t).enumerate() {
                    m.set(j * nu + k, l * t + b, ctx.trace(ctx.mul(theta[i], v)));
                }
            }
            p_pow = ctx.square(p_pow);
        }
    }
    Ok(m)
}

/// Rows of a codeword as `T`-bit masks (bit `c` = column `c`).
pub fn codeword_rows(ctx: &FieldContext, params: &CodeParams, f: &LinearizedPolynomial) -> Vec<u32> {
    params.points(ctx).iter().map(|&p| ctx.expand(f.eval(ctx, p))).collect()
}

fn tail_mask(t: u32, nu: usize) -> u64 {
    if nu == 0 {
        0
    } else {
        ((1u64 << nu) - 1) << (t as usize - nu)
    }
}

/// `C_f`; in ISI mode fails with [`CodeError::NotZeroTailed`] when `f` is not in `S`.
pub fn codeword_matrix(ctx: &FieldContext, f: &LinearizedPolynomial, params: &CodeParams) -> Result<BinaryMatrix, CodeError> {
    params.check_field(ctx)?;
    let rows = codeword_rows(ctx, params, f);
    if params.mode == EvalMode::Isi {
        let tail = tail_mask(params.t, params.nu);
        if rows.iter().any(|&r| r as u64 & tail != 0) {
            return Err(CodeError::NotZeroTailed);
        }
    }
    let masks: Vec<u64> = rows.iter().map(|&r| r as u64).collect();
    Ok(BinaryMatrix::from_row_masks(params.t as usize, &masks))
}

/// The lift `Theta(B)`: block row `r` is `B` shifted right by `r` columns,
/// giving row `r*M_t + k` = row `k` of `B` delayed by `r`.
pub fn theta_lift(b: &BinaryMatrix, nu: usize) -> Result<BinaryMatrix, CodeError> {
    let (m, t) = (b.rows(), b.cols());
    if nu > t {
        return Err(CodeError::TailNotZero { nu });
    }
    for k in 0..m {
        if (t - nu..t).any(|c| b.get(k, c)) {
            return Err(CodeError::TailNotZero { nu });
        }
    }
    let mut out = BinaryMatrix::zeros((nu + 1) * m, t);
    for r in 0..=nu {
        for k in 0..m {
            for c in 0..t - r {
                if b.get(k, c) {
                    out.set(r * m + k, c + r, true);
                }
            }
        }
    }
    Ok(out)
}

pub fn binary_rank(m: &BinaryMatrix) -> usize {
    m.rank()
}

/// Rank of `Theta(C)` for a zero-tailed codeword given by row masks.
pub fn lifted_rank(rows: &[u32], nu: usize) -> usize {
    let n = rows.len() * (nu + 1);
    assert!(n <= MAX_LIFTED_ROWS);
    let mut buf = [0u64; MAX_LIFTED_ROWS];
    for r in 0..=nu {
        for (k, &row) in rows.iter().enumerate() {
            buf[r * rows.len() + k] = (row as u64) << r;
        }
    }
    rank_of_rows(&mut buf[..n])
}

/// [`lifted_rank`] for zero-tailed rows of up to 64 columns.
pub fn lifted_rank_wide(rows: &[u64], nu: usize) -> usize {
    let n = rows.len() * (nu + 1);
    assert!(n <= MAX_LIFTED_ROWS);
    let mut buf = [0u64; MAX_LIFTED_ROWS];
    for r in 0..=nu {
        for (k, &row) in rows.iter().enumerate() {
            buf[r * rows.len() + k] = row << r;
        }
    }
    rank_of_rows(&mut buf[..n])
}

/// A code set `S` with a kernel basis; member `index` is the sum of the basis
/// polynomials selected by the bits of `index`.
#[derive(Debug, Clone)]
pub struct CodeSet {
    ctx: FieldContext,
    params: CodeParams,
    basis: Vec<LinearizedPolynomial>,
    basis_rows: Vec<Vec<u32>>,
}

impl CodeSet {
    pub fn new(ctx: &FieldContext, params: CodeParams) -> Result<Self, CodeError> {
        let system = build_constraint_system(ctx, &params)?;
        let kernel = system.kernel();
        let t = params.t;
        let basis: Vec<LinearizedPolynomial> = (0..kernel.rows())
            .map(|k| {
                let bits = (0..kernel.cols())
                    .filter(|&c| kernel.get(k, c))
                    .fold(0u128, |acc, c| acc | 1u128 << c);
                LinearizedPolynomial::from_bits(bits, t, params.r)
            })
            .collect();
        let basis_rows = basis.iter().map(|f| codeword_rows(ctx, &params, f)).collect();
        Ok(CodeSet {
            ctx: ctx.clone(),
            params,
            basis,
            basis_rows,
        })
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn basis(&self) -> &[LinearizedPolynomial] {
        &self.basis
    }

    /// Exact kernel dimension; `|S| = 2^dimension`.
    pub fn dimension(&self) -> u32 {
        self.basis.len() as u32
    }

    /// `|S|` when it fits in a `u64`.
    pub fn len(&self) -> Option<u64> {
        1u64.checked_shl(self.dimension())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_index(&self, index: u64) {
        assert!(
            self.dimension() >= 64 || index >> self.dimension() == 0,
            "index {index} outside the code set"
        );
    }

    pub fn polynomial(&self, index: u64) -> LinearizedPolynomial {
        self.check_index(index);
        let mut coeffs = vec![FieldElement::ZERO; self.params.r];
        for (k, f) in self.basis.iter().enumerate() {
            if index >> k & 1 == 1 {
                for (c, &b) in coeffs.iter_mut().zip(&f.coeffs) {
                    *c += b;
                }
            }
        }
        LinearizedPolynomial::new(coeffs)
    }

    /// Rows of codeword `index` as `T`-bit masks, built from the basis codewords.
    pub fn codeword_rows(&self, index: u64) -> Vec<u32> {
        self.check_index(index);
        let mut rows = vec![0u32; self.params.m_t];
        for (k, br) in self.basis_rows.iter().enumerate() {
            if index >> k & 1 == 1 {
                for (r, b) in rows.iter_mut().zip(br) {
                    *r ^= b;
                }
            }
        }
        rows
    }

    pub fn codeword(&self, index: u64) -> BinaryMatrix {
        let masks: Vec<u64> = self.codeword_rows(index).iter().map(|&r| r as u64).collect();
        BinaryMatrix::from_row_masks(self.params.t as usize, &masks)
    }

    /// Whether codeword `index` ends in `nu` zero columns.
    pub fn is_zero_tailed(&self, index: u64) -> bool {
        let tail = tail_mask(self.params.t, self.params.nu);
        self.codeword_rows(index).iter().all(|&r| r as u64 & tail == 0)
    }

    /// All members in index order, or [`CodeError::EnumerationTooLarge`].
    pub fn enumerate(&self, limit: u64) -> Result<impl Iterator<Item = (u64, LinearizedPolynomial)> + '_, CodeError> {
        let n = self.checked_len(limit)?;
        Ok((0..n).map(move |i| (i, self.polynomial(i))))
    }

    fn checked_len(&self, limit: u64) -> Result<u64, CodeError> {
        match self.len() {
            Some(n) if n <= limit => Ok(n),
            _ => Err(CodeError::EnumerationTooLarge {
                dimension: self.dimension(),
                limit,
            }),
        }
    }

    /// Uniformly random member indices (with replacement) from a seeded stream.
    pub fn sample_indices(&self, count: u64, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.dimension();
        (0..count)
            .map(|_| if dim == 0 { 0 } else { rng.random::<u64>() >> (64 - dim.min(64)) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Exhaustive scan up to this many codewords.
    pub limit: u64,
    /// Beyond the limit: number of random nonzero codewords to test, or `None`
    /// to fail with [`CodeError::EnumerationTooLarge`].
    pub samples: Option<u64>,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            limit: DEFAULT_ENUMERATION_LIMIT,
            samples: None,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub claimed: usize,
    /// Smallest lifted rank over the scanned nonzero codewords
    /// (`None` if nothing was scanned).
    pub min_rank: Option<usize>,
    /// Lowest index attaining `min_rank`.
    pub witness: Option<u64>,
    /// Number of nonzero codewords whose rank was measured.
    pub scanned: u64,
    /// Nonzero codewords skipped because they are not zero-tailed (flat mode).
    pub skipped: u64,
    /// `histogram[r]` counts scanned codewords with lifted rank `r`.
    pub histogram: Vec<u64>,
    /// False when the verdict comes from random sampling.
    pub exhaustive: bool,
}

impl RankReport {
    pub fn holds(&self) -> bool {
        self.min_rank.is_none_or(|m| m >= self.claimed)
    }
}

#[derive(Clone)]
struct Tally {
    min: Option<(usize, u64)>,
    scanned: u64,
    skipped: u64,
    hist: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally { min: None, scanned: 0, skipped: 0, hist: vec![0; n + 1] }
    }

    fn record(&mut self, rank: usize, index: u64) {
        self.scanned += 1;
        self.hist[rank] += 1;
        if self.min.is_none_or(|m| (rank, index) < m) {
            self.min = Some((rank, index));
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.scanned += other.scanned;
        self.skipped += other.skipped;
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Minimum lifted rank `rank(Theta(C_f))` over nonzero members of `S`.
///
/// By linearity this is the minimum rank distance. In flat mode only
/// zero-tailed codewords can be lifted; the others are counted as skipped.
pub fn verify_rank_distance(code: &CodeSet, claimed: usize, opts: &VerifyOptions) -> Result<RankReport, CodeError> {
    let p = code.params;
    let nu = p.nu;
    let tail = tail_mask(p.t, nu);
    let full = p.full_rank();

    let scan = |rows: &[u32], index: u64, tally: &mut Tally| {
        if rows.iter().all(|&r| r == 0) {
            return;
        }
        if rows.iter().any(|&r| r as u64 & tail != 0) {
            tally.skipped += 1;
            return;
        }
        tally.record(lifted_rank(rows, nu), index);
    };

    let (tally, exhaustive) = match code.checked_len(opts.limit) {
        Ok(n) => {
            let chunk = (n / 256).clamp(1, 1 << 14);
            let t = chunked_reduce(
                opts.exec,
                n,
                chunk,
                Tally::new(full),
                |range| {
                    let mut tally = Tally::new(full);
                    let mut rows = code.codeword_rows(range.start);
                    for i in range.clone() {
                        if i > range.start {
                            // Flip the basis vectors whose selection bits changed.
                            let flipped = (i - 1) ^ i;
                            for k in 0..64 - flipped.leading_zeros() as usize {
                                if flipped >> k & 1 == 1 {
                                    for (r, b) in rows.iter_mut().zip(&code.basis_rows[k]) {
                                        *r ^= b;
                                    }
                                }
                            }
                        }
                        scan(&rows, i, &mut tally);
                    }
                    tally
                },
                Tally::merge,
            );
            (t, true)
        }
        Err(e) => {
            let Some(samples) = opts.samples else { return Err(e) };
            let indices = code.sample_indices(samples, opts.seed);
            let t = chunked_reduce(
                opts.exec,
                indices.len() as u64,
                1024,
                Tally::new(full),
                |range| {
                    let mut tally = Tally::new(full);
                    for k in range {
                        let i = indices[k as usize];
                        scan(&code.codeword_rows(i), i, &mut tally);
                    }
                    tally
                },
                Tally::merge,
            );
            (t, false)
        }
    };
    Ok(RankReport {
        claimed,
        min_rank: tally.min.map(|m| m.0),
        witness: tally.min.map(|m| m.1),
        scanned: tally.scanned,
        skipped: tally.skipped,
        histogram: tally.hist,
        exhaustive,
    })
}
