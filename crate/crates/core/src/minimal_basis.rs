//! Degree-bounded solution sets and minimal basis vectors.
//!
//! `Gamma` is the set of field elements `sum_{t<=nu} delta_t alpha^t`. For a
//! codeword with evaluations `c_f`, `G_f` collects the vectors `g` in
//! `Gamma^{M_t}` with `g . c_f = 0`; through `Psi` these are exactly the left
//! null vectors of the lifted codeword `U_f`. A minimal basis is a short list
//! of vectors generating `G_f` under degree-respecting `Gamma` combinations.
//! It is built here by repeatedly adding a missing vector and then restoring
//! the independence (tilde) and no-degree-collapse (hat) properties, every step
//! strictly lowering some degree.
//!
//! The module also hosts the determinant identities used by the rank argument:
//! Cauchy–Binet and non-singularity of the matrix `P`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmat::{combinations, FieldMatrix};
use crate::gf2m::{FieldContext, FieldElement};
use crate::par::{chunked_reduce, Execution};
use crate::rank_codes::{lifted_rank, CodeError, CodeSet};

/// Largest search space (log2) scanned exhaustively.
pub const MAX_SEARCH_BITS: usize = 24;

/// Highest supported memory for the degree machinery.
pub const MAX_NU: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("search space of 2^{bits} candidates is too large")]
    SpaceTooLarge { bits: usize },
    #[error("minimal basis construction failed: {0}")]
    NotRepresentable(String),
    #[error("block length {t} is below the required {required}")]
    ThresholdNotMet { t: u32, required: i64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("memory nu = {0} exceeds the supported maximum")]
    UnsupportedMemory(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Degree of a `Gamma` element or vector; `None` stands for the zero element
/// and orders below every real degree.
pub type Degree = Option<u32>;

pub fn is_gamma(x: FieldElement, nu: usize) -> bool {
    x.bits() >> (nu + 1) == 0
}

/// A row vector in `Gamma^{1 x M_t}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaVector(pub Vec<FieldElement>);

impl GammaVector {
    pub fn zero(m_t: usize) -> Self {
        GammaVector(vec![FieldElement::ZERO; m_t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn in_gamma(&self, nu: usize) -> bool {
        self.0.iter().all(|&e| is_gamma(e, nu))
    }

    /// Largest degree over the entries.
    pub fn degree(&self) -> Degree {
        self.0.iter().map(|e| e.degree()).max().flatten()
    }

    /// The constant coefficients `delta_{k,0}` as a bit mask over `k`.
    pub fn phi(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (k, e)| acc | ((e.bits() & 1) as u64) << k)
    }

    pub fn add(&self, other: &GammaVector) -> GammaVector {
        GammaVector(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    /// Entrywise field product `gamma * g`.
    pub fn scale(&self, ctx: &FieldContext, gamma: FieldElement) -> GammaVector {
        GammaVector(self.0.iter().map(|&e| ctx.mul(gamma, e)).collect())
    }

    /// `g . c`.
    pub fn dot(&self, ctx: &FieldContext, c: &[FieldElement]) -> FieldElement {
        self.0.iter().zip(c).map(|(&g, &x)| ctx.mul(g, x)).sum()
    }

    /// Lowest power of `alpha` dividing every entry (as polynomials of degree <= nu).
    fn common_alpha_power(&self) -> Option<u32> {
        self.0.iter().filter(|e| !e.is_zero()).map(|e| e.bits().trailing_zeros()).min()
    }
}

impl fmt::Debug for GammaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:#x}", e.bits())?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for GammaVector {
    /// One entry per group, listing `delta_{k,0} .. delta_{k,nu}` as a bit string
    /// (constant coefficient first).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.0.iter().map(|e| 32 - e.bits().leading_zeros()).max().unwrap_or(0).max(1);
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            for t in 0..width {
                write!(f, "{}", e.bits() >> t & 1)?;
            }
        }
        Ok(())
    }
}

/// `Psi(b)`: entry `k` is `sum_i b_{i M_t + k} alpha^i`, reading `b` as a bit
/// mask of length `(nu+1) M_t`.
pub fn psi(b: u64, m_t: usize, nu: usize) -> GammaVector {
    GammaVector(
        (0..m_t)
            .map(|k| {
                let bits = (0..=nu)
                    .filter(|i| b >> (i * m_t + k) & 1 == 1)
                    .fold(0u32, |acc, i| acc | 1 << i);
                FieldElement::from_bits(bits)
            })
            .collect(),
    )
}

/// Inverse of [`psi`]; also serves as the canonical ordering key.
pub fn psi_inverse(g: &GammaVector, nu: usize) -> u64 {
    let m_t = g.len();
    let mut b = 0u64;
    for (k, e) in g.0.iter().enumerate() {
        for i in 0..=nu {
            if e.bits() >> i & 1 == 1 {
                b |= 1 << (i * m_t + k);
            }
        }
    }
    b
}

fn check_shape(m_t: usize, nu: usize) -> Result<usize, BasisError> {
    if nu > MAX_NU {
        return Err(BasisError::UnsupportedMemory(nu));
    }
    let bits = (nu + 1) * m_t;
    if bits > MAX_SEARCH_BITS {
        return Err(BasisError::SpaceTooLarge { bits });
    }
    Ok(bits)
}

/// All `g` in `Gamma^{M_t}` with `g . c_f = 0`, by exhaustive scan, ordered by
/// [`psi_inverse`].
pub fn enumerate_gf(ctx: &FieldContext, nu: usize, c_f: &[FieldElement]) -> Result<Vec<GammaVector>, BasisError> {
    let m_t = c_f.len();
    let bits = check_shape(m_t, nu)?;
    if nu as u32 >= ctx.degree() {
        return Err(BasisError::ShapeMismatch(format!("nu = {nu} not below T = {}", ctx.degree())));
    }
    // g . c_f is GF(2)-linear in the bits of g; tabulate the image of each bit.
    let images: Vec<u32> = (0..bits)
        .map(|j| psi(1 << j, m_t, nu).dot(ctx, c_f).bits())
        .collect();
    let mut out = Vec::new();
    let mut acc = 0u32;
    for b in 0u64..1 << bits {
        if b > 0 {
            // Gray-code walk: flip exactly one bit.
            let flip = b.trailing_zeros() as usize;
            acc ^= images[flip];
        }
        if acc == 0 {
            let gray = b ^ (b >> 1);
            out.push(psi(gray, m_t, nu));
        }
    }
    out.sort_by_key(|g| psi_inverse(g, nu));
    Ok(out)
}

/// Elements `gamma` of `Gamma` (including 0) with `gamma * g` in `Gamma^{M_t}`.
pub fn admissible_multipliers(ctx: &FieldContext, nu: usize, g: &GammaVector) -> Vec<FieldElement> {
    (0u32..1 << (nu + 1))
        .map(FieldElement::from_bits)
        .filter(|&gamma| g.scale(ctx, gamma).in_gamma(nu))
        .collect()
}

/// Calls `f` on every tuple picking one element from each list.
fn for_each_tuple<B>(lists: &[Vec<FieldElement>], mut f: impl FnMut(&[FieldElement]) -> ControlFlow<B>) -> Option<B> {
    if lists.iter().any(|l| l.is_empty()) {
        return None;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut cur: Vec<FieldElement> = lists.iter().map(|l| l[0]).collect();
    loop {
        if let ControlFlow::Break(b) = f(&cur) {
            return Some(b);
        }
        let mut pos = 0;
        loop {
            if pos == lists.len() {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                cur[pos] = lists[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            cur[pos] = lists[pos][0];
            pos += 1;
        }
    }
}

fn tuple_space_bits(lists: &[Vec<FieldElement>]) -> usize {
    lists.iter().map(|l| (l.len() as f64).log2().ceil() as usize).sum()
}

/// `D(g_1..g_d)`: all `sum gamma_i g_i` with `gamma_i` in `Gamma` and every
/// `gamma_i g_i` in `Gamma^{M_t}`. Ordered by [`psi_inverse`].
pub fn span_d(ctx: &FieldContext, nu: usize, m_t: usize, vectors: &[GammaVector]) -> Result<Vec<GammaVector>, BasisError> {
    let lists: Vec<_> = vectors.iter().map(|g| admissible_multipliers(ctx, nu, g)).collect();
    let bits = tuple_space_bits(&lists);
    if bits > MAX_SEARCH_BITS {
        return Err(BasisError::SpaceTooLarge { bits });
    }
    let mut keys = BTreeSet::new();
    for_each_tuple::<()>(&lists, |gammas| {
        let sum = vectors
            .iter()
            .zip(gammas)
            .fold(GammaVector::zero(m_t), |acc, (g, &gm)| acc.add(&g.scale(ctx, gm)));
        keys.insert(psi_inverse(&sum, nu));
        ControlFlow::Continue(())
    });
    Ok(keys.into_iter().map(|k| psi(k, m_t, nu)).collect())
}

/// Whether `g` is a `Gamma` combination of `vectors` in the sense of [`span_d`].
pub fn in_span_d(ctx: &FieldContext, nu: usize, vectors: &[GammaVector], g: &GammaVector) -> bool {
    let m_t = g.len();
    let lists: Vec<_> = vectors.iter().map(|v| admissible_multipliers(ctx, nu, v)).collect();
    for_each_tuple(&lists, |gammas| {
        let sum = vectors
            .iter()
            .zip(gammas)
            .fold(GammaVector::zero(m_t), |acc, (v, &gm)| acc.add(&v.scale(ctx, gm)));
        if &sum == g {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_some()
}

/// A combination `sum gamma_i g_i` whose degree falls below the largest
/// `deg(gamma_i g_i)`, i.e. a failure of property (iii).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCollapse {
    pub gammas: Vec<FieldElement>,
}

/// Exhaustive search for a property (iii) violation over all subsets and
/// admissible nonzero multipliers. Returns the first in enumeration order.
pub fn find_degree_collapse(ctx: &FieldContext, nu: usize, vectors: &[GammaVector]) -> Result<Option<DegreeCollapse>, BasisError> {
    let Some(m_t) = vectors.first().map(|g| g.len()) else {
        return Ok(None);
    };
    let lists: Vec<_> = vectors.iter().map(|g| admissible_multipliers(ctx, nu, g)).collect();
    let bits = tuple_space_bits(&lists);
    if bits > MAX_SEARCH_BITS {
        return Err(BasisError::SpaceTooLarge { bits });
    }
    Ok(for_each_tuple(&lists, |gammas| {
        if gammas.iter().all(|g| g.is_zero()) {
            return ControlFlow::Continue(());
        }
        let mut sum = GammaVector::zero(m_t);
        let mut top: Degree = None;
        for (g, &gm) in vectors.iter().zip(gammas) {
            let term = g.scale(ctx, gm);
            top = top.max(term.degree());
            sum = sum.add(&term);
        }
        if sum.degree() < top {
            ControlFlow::Break(DegreeCollapse { gammas: gammas.to_vec() })
        } else {
            ControlFlow::Continue(())
        }
    }))
}

/// A GF(2) dependency among the `Phi` images, as a mask over `vectors`.
fn phi_dependency(vectors: &[GammaVector]) -> Option<u64> {
    // Pivot rows carry (reduced phi, combination mask).
    let mut pivots: Vec<(u64, u64)> = Vec::new();
    for (i, g) in vectors.iter().enumerate() {
        let mut v = g.phi();
        let mut mask = 1u64 << i;
        for &(p, pm) in &pivots {
            let low = p & p.wrapping_neg();
            if v & low != 0 {
                v ^= p;
                mask ^= pm;
            }
        }
        if v == 0 {
            return Some(mask);
        }
        pivots.push((v, mask));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalBasis {
    pub vectors: Vec<GammaVector>,
    /// Number of add / tilde / hat steps performed.
    pub steps: usize,
}

impl MinimalBasis {
    pub fn d(&self) -> usize {
        self.vectors.len()
    }
}

/// Builds minimal basis vectors for `gf`, which must be a `G_f` set as returned
/// by [`enumerate_gf`] (sorted, containing 0).
pub fn find_minimal_basis(ctx: &FieldContext, nu: usize, gf: &[GammaVector]) -> Result<MinimalBasis, BasisError> {
    let Some(m_t) = gf.first().map(|g| g.len()) else {
        return Err(BasisError::NotRepresentable("empty solution set".into()));
    };
    check_shape(m_t, nu)?;
    let bound = (nu + 1) * m_t * (1 << (nu + 1));
    let fail = |msg: String| Err(BasisError::NotRepresentable(msg));
    let mut basis: Vec<GammaVector> = Vec::new();
    let mut steps = 0usize;
    let tick = |steps: &mut usize| -> Result<(), BasisError> {
        *steps += 1;
        if *steps > bound {
            return Err(BasisError::NotRepresentable(format!("no termination within {bound} steps")));
        }
        Ok(())
    };

    loop {
        let covered: BTreeSet<u64> = span_d(ctx, nu, m_t, &basis)?.iter().map(|g| psi_inverse(g, nu)).collect();
        let Some(missing) = gf.iter().find(|g| !covered.contains(&psi_inverse(g, nu))) else {
            break;
        };
        tick(&mut steps)?;
        let t = missing.common_alpha_power().expect("zero vector is always covered");
        let stripped = missing.scale(ctx, ctx.alpha_pow(-(t as i64)));
        if !stripped.in_gamma(nu) || stripped.phi() == 0 {
            return fail(format!("stripping alpha^{t} from {missing:?} left Gamma"));
        }
        basis.push(stripped);

        loop {
            if let Some(w) = phi_dependency(&basis) {
                tick(&mut steps)?;
                // Tilde step: replace the highest-degree member of the
                // dependency (smallest index on ties).
                let members: Vec<usize> = (0..basis.len()).filter(|i| w >> i & 1 == 1).collect();
                let top = members.iter().map(|&i| basis[i].degree()).max().expect("dependency is nonempty");
                let k = members.iter().copied().find(|&i| basis[i].degree() == top).unwrap();
                let s = members
                    .iter()
                    .fold(GammaVector::zero(m_t), |acc, &i| acc.add(&basis[i]));
                if s.is_zero() {
                    basis.remove(k);
                    continue;
                }
                let t = s.common_alpha_power().unwrap();
                if t == 0 {
                    return fail(format!("Phi dependency without common alpha factor: {s:?}"));
                }
                let reduced = s.scale(ctx, ctx.alpha_pow(-(t as i64)));
                if !reduced.in_gamma(nu) || reduced.degree() >= basis[k].degree() {
                    return fail(format!("tilde step did not lower the degree of {:?}", basis[k]));
                }
                basis[k] = reduced;
                continue;
            }
            if let Some(collapse) = find_degree_collapse(ctx, nu, &basis)? {
                tick(&mut steps)?;
                basis = apply_hat_step(ctx, nu, &basis, &collapse)?;
                continue;
            }
            break;
        }
    }
    Ok(MinimalBasis { vectors: basis, steps })
}

/// Turns a degree collapse into a degree reduction of one member.
fn apply_hat_step(
    ctx: &FieldContext,
    nu: usize,
    basis: &[GammaVector],
    collapse: &DegreeCollapse,
) -> Result<Vec<GammaVector>, BasisError> {
    let terms: Vec<Degree> = basis
        .iter()
        .zip(&collapse.gammas)
        .map(|(g, &gm)| g.scale(ctx, gm).degree())
        .collect();
    let top = terms.iter().copied().max().flatten().expect("collapse has a nonzero term");
    let tops: Vec<usize> = (0..basis.len()).filter(|&i| terms[i] == Some(top)).collect();
    let gamma_deg = |i: usize| collapse.gammas[i].degree().expect("nonzero multiplier");
    let w = tops.iter().map(|&i| gamma_deg(i)).min().unwrap();
    let k = tops.iter().copied().find(|&i| gamma_deg(i) == w).unwrap();
    let mut hat = basis[k].clone();
    for &i in tops.iter().filter(|&&i| i != k) {
        let coeff = ctx.alpha_pow((gamma_deg(i) - w) as i64);
        hat = hat.add(&basis[i].scale(ctx, coeff));
    }
    if hat.is_zero() || !hat.in_gamma(nu) || hat.degree() >= basis[k].degree() {
        return Err(BasisError::NotRepresentable(format!(
            "hat step did not lower the degree of {:?}",
            basis[k]
        )));
    }
    let mut out = basis.to_vec();
    out[k] = hat;
    Ok(out)
}

/// Independent check of properties (i)–(iv) for candidate basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub nonzero_phi: bool,
    pub phi_independent: bool,
    pub no_degree_collapse: bool,
    pub spans_gf: bool,
    pub members_in_gf: bool,
}

impl PropertyReport {
    pub fn all(&self) -> bool {
        self.nonzero_phi && self.phi_independent && self.no_degree_collapse && self.spans_gf && self.members_in_gf
    }
}

pub fn check_properties(ctx: &FieldContext, nu: usize, vectors: &[GammaVector], gf: &[GammaVector]) -> Result<PropertyReport, BasisError> {
    let m_t = gf.first().map_or(0, |g| g.len());
    let gf_keys: BTreeSet<u64> = gf.iter().map(|g| psi_inverse(g, nu)).collect();
    // Independence by brute force over all nonempty GF(2) combinations.
    let n = vectors.len();
    let phi_independent = n <= 63
        && (1u64..1 << n).all(|sel| {
            (0..n)
                .filter(|i| sel >> i & 1 == 1)
                .fold(0u64, |acc, i| acc ^ vectors[i].phi())
                != 0
        });
    let span: BTreeSet<u64> = span_d(ctx, nu, m_t, vectors)?.iter().map(|g| psi_inverse(g, nu)).collect();
    Ok(PropertyReport {
        nonzero_phi: vectors.iter().all(|g| g.phi() != 0),
        phi_independent,
        no_degree_collapse: find_degree_collapse(ctx, nu, vectors)?.is_none(),
        spans_gf: span == gf_keys,
        members_in_gf: vectors.iter().all(|g| gf_keys.contains(&psi_inverse(g, nu))),
    })
}

/// Evaluation vector `c_f` from the rows of a codeword.
pub fn evaluations_from_rows(ctx: &FieldContext, rows: &[u32]) -> Vec<FieldElement> {
    rows.iter().map(|&r| ctx.recombine(r)).collect()
}

/// Summary of the minimal-basis checks over a whole code set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisScanReport {
    pub scanned: u64,
    /// `d_histogram[d]` counts codewords whose minimal basis has `d` vectors.
    pub d_histogram: Vec<u64>,
    pub max_d: usize,
    /// Codewords where `|G_f|` differs from `2^(left nullity of U_f)`.
    pub nullspace_mismatches: u64,
    /// Codewords where some property (i)–(iv) failed.
    pub property_failures: u64,
    /// Codewords where the construction itself reported an error.
    pub construction_failures: u64,
    /// Lowest index of a failing codeword, with a description.
    pub first_failure: Option<(u64, String)>,
}

impl BasisScanReport {
    fn empty(m_t: usize) -> Self {
        BasisScanReport {
            scanned: 0,
            d_histogram: vec![0; m_t + 1],
            max_d: 0,
            nullspace_mismatches: 0,
            property_failures: 0,
            construction_failures: 0,
            first_failure: None,
        }
    }

    fn merge(mut self, o: BasisScanReport) -> Self {
        self.scanned += o.scanned;
        for (a, b) in self.d_histogram.iter_mut().zip(&o.d_histogram) {
            *a += b;
        }
        self.max_d = self.max_d.max(o.max_d);
        self.nullspace_mismatches += o.nullspace_mismatches;
        self.property_failures += o.property_failures;
        self.construction_failures += o.construction_failures;
        self.first_failure = match (self.first_failure, o.first_failure) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    /// True when every codeword passed and every basis has at most `max_allowed` vectors.
    pub fn holds(&self, max_allowed: usize) -> bool {
        self.nullspace_mismatches == 0
            && self.property_failures == 0
            && self.construction_failures == 0
            && self.max_d <= max_allowed
    }
}

/// For every nonzero zero-tailed codeword: enumerate `G_f`, compare its size
/// with the left null space of `U_f`, build a minimal basis and re-check its
/// properties.
pub fn scan_code_set(code: &CodeSet, limit: u64, exec: Execution) -> Result<BasisScanReport, BasisError> {
    let p = *code.params();
    let ctx = code.ctx();
    check_shape(p.m_t, p.nu)?;
    let n = code.len().filter(|&n| n <= limit).ok_or(CodeError::EnumerationTooLarge {
        dimension: code.dimension(),
        limit,
    })?;
    let full = p.full_rank();
    let report = chunked_reduce(
        exec,
        n,
        64,
        BasisScanReport::empty(p.m_t),
        |range| {
            let mut rep = BasisScanReport::empty(p.m_t);
            for i in range {
                let rows = code.codeword_rows(i);
                let tail = if p.nu == 0 { 0 } else { ((1u32 << p.nu) - 1) << (p.t as usize - p.nu) };
                if rows.iter().all(|&r| r == 0) || rows.iter().any(|&r| r & tail != 0) {
                    continue;
                }
                rep.scanned += 1;
                let note = |rep: &mut BasisScanReport, msg: String| {
                    if rep.first_failure.is_none() {
                        rep.first_failure = Some((i, msg));
                    }
                };
                let c_f = evaluations_from_rows(ctx, &rows);
                let gf = match enumerate_gf(ctx, p.nu, &c_f) {
                    Ok(g) => g,
                    Err(e) => {
                        rep.construction_failures += 1;
                        note(&mut rep, e.to_string());
                        continue;
                    }
                };
                let nullity = full - lifted_rank(&rows, p.nu);
                if gf.len() as u64 != 1u64 << nullity {
                    rep.nullspace_mismatches += 1;
                    note(&mut rep, format!("|G_f| = {} but left nullity {nullity}", gf.len()));
                }
                match find_minimal_basis(ctx, p.nu, &gf) {
                    Ok(mb) => {
                        rep.d_histogram[mb.d().min(p.m_t)] += 1;
                        rep.max_d = rep.max_d.max(mb.d());
                        match check_properties(ctx, p.nu, &mb.vectors, &gf) {
                            Ok(pr) if pr.all() => {}
                            Ok(pr) => {
                                rep.property_failures += 1;
                                note(&mut rep, format!("properties failed: {pr:?}"));
                            }
                            Err(e) => {
                                rep.property_failures += 1;
                                note(&mut rep, e.to_string());
                            }
                        }
                    }
                    Err(e) => {
                        rep.construction_failures += 1;
                        note(&mut rep, e.to_string());
                    }
                }
            }
            rep
        },
        BasisScanReport::merge,
    );
    Ok(report)
}

/// Text dump of `G_f` and a minimal basis, one vector per line.
pub fn dump_basis(gf: &[GammaVector], basis: &MinimalBasis) -> String {
    let mut s = format!("# G_f ({} vectors)\n", gf.len());
    for g in gf {
        s.push_str(&format!("{g}\n"));
    }
    s.push_str(&format!("# minimal basis (d = {})\n", basis.d()));
    for g in &basis.vectors {
        s.push_str(&format!("{g}\n"));
    }
    s
}

/// Evaluates both sides of the Cauchy–Binet formula for `A` (`m x n`) and
/// `B` (`n x m`) and reports whether they agree.
pub fn cauchy_binet_check(ctx: &FieldContext, a: &FieldMatrix, b: &FieldMatrix) -> Result<bool, BasisError> {
    let (m, n) = (a.rows(), a.cols());
    if b.rows() != n || b.cols() != m || m > n {
        return Err(BasisError::ShapeMismatch(format!(
            "A is {m}x{n}, B is {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let lhs = a.mul(ctx, b).det(ctx);
    let rhs: FieldElement = combinations(n, m)
        .iter()
        .map(|s| ctx.mul(a.select_cols(s).det(ctx), b.select_rows(s).det(ctx)))
        .sum();
    Ok(lhs == rhs)
}

/// Smallest block length for which `det(P) != 0` is guaranteed:
/// `(2^R-1) nu + (2^R-1)(nu+1)((M_t-2)(2^R-1) + R)`.
pub fn detp_threshold(m_t: usize, nu: usize, r: usize) -> i64 {
    let q = (1i64 << r) - 1;
    let (m_t, nu, r) = (m_t as i64, nu as i64, r as i64);
    q * nu + q * (nu + 1) * ((m_t - 2) * q + r)
}

/// The `R x R` matrix `P = [g_1; ..; g_R] W` with
/// `W[q][c] = (xi^q)^{2^{R-1-c}}` and `xi = alpha^{(2^R-1)(nu+1)}`.
pub fn build_p(ctx: &FieldContext, nu: usize, vectors: &[GammaVector]) -> FieldMatrix {
    let r = vectors.len();
    let m_t = vectors.first().map_or(0, |g| g.len());
    let xi = ctx.alpha_pow(((1i64 << r) - 1) * (nu as i64 + 1));
    let w = FieldMatrix::from_fn(m_t, r, |q, c| ctx.pow(ctx.pow(xi, q as u64), 1u64 << (r - 1 - c)));
    let g = FieldMatrix::from_fn(r, m_t, |i, k| vectors[i].0[k]);
    g.mul(ctx, &w)
}

/// Block length accepted by [`verify_detp`]: [`detp_threshold`], raised to
/// `(nu+1) M_t`. For `R = 1` the formula equals `(nu+1) M_t - 1`, where
/// `det(P)` can vanish (`M_t = 2, nu = 1, T = 3, g = (1 + alpha, alpha)`).
pub fn detp_required_t(m_t: usize, nu: usize, r: usize) -> i64 {
    detp_threshold(m_t, nu, r).max(((nu + 1) * m_t) as i64)
}

/// `det(P) != 0` for `R` vectors in `Gamma^{M_t}`. Fails when the block length
/// is below [`detp_required_t`].
pub fn verify_detp(ctx: &FieldContext, nu: usize, vectors: &[GammaVector]) -> Result<bool, BasisError> {
    let r = vectors.len();
    let m_t = vectors.first().map_or(0, |g| g.len());
    if r == 0 || vectors.iter().any(|g| g.len() != m_t || !g.in_gamma(nu)) {
        return Err(BasisError::ShapeMismatch("need R >= 1 vectors in Gamma^{M_t}".into()));
    }
    let required = detp_required_t(m_t, nu, r);
    if (ctx.degree() as i64) < required {
        return Err(BasisError::ThresholdNotMet { t: ctx.degree(), required });
    }
    Ok(!build_p(ctx, nu, vectors).det(ctx).is_zero())
}
