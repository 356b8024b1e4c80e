//! Arithmetic in GF(2^T) for 1 <= T <= 32.
//!
//! Elements are stored in the polynomial basis `alpha^0 .. alpha^{T-1}` of a
//! primitive element `alpha`, packed into the low `T` bits of a `u32`. Bit `k`
//! is the coordinate of `alpha^k`, so addition is XOR and multiplication is a
//! carry-less product reduced by the primitive polynomial.
//!
//! Primitive polynomials are written as bitmasks where bit `k` is the
//! coefficient of `x^k`; `x^5 + x^4 + x^2 + x + 1` is `0x37`.

use std::fmt;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::bitmat::BinaryMatrix;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 32;

/// Default primitive polynomials indexed by extension degree.
///
/// `T = 5` uses `x^5 + x^4 + x^2 + x + 1` so that the worked examples of the
/// construction are reproduced bit for bit.
const DEFAULT_PRIMITIVE: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xb,
    0x13,
    0x37,
    0x43,
    0x83,
    0x11d,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201b,
    0x4443,
    0x8003,
    0x1100b,
    0x20009,
    0x40081,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x1000087,
    0x2000009,
    0x4000047,
    0x8000027,
    0x10000009,
    0x20000005,
    0x40800007,
    0x80000009,
    0x100400007,
];

/// Returns the built-in primitive polynomial for degree `t`.
pub fn default_primitive_poly(t: u32) -> Option<u64> {
    (1..=MAX_DEGREE)
        .contains(&t)
        .then(|| DEFAULT_PRIMITIVE[t as usize])
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} is outside 1..=32")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} has degree {found}, expected {expected}")]
    DegreeMismatch { poly: u64, expected: u32, found: i32 },
    #[error("polynomial {poly:#x} is not primitive (order of its root: {})", order.map_or("undefined".to_string(), |o| o.to_string()))]
    PolynomialNotPrimitive { poly: u64, order: Option<u64> },
    #[error("trace Gram matrix is singular")]
    SingularGramMatrix,
}

/// An element of GF(2^T) in the `alpha` polynomial basis.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps raw coordinates. The caller is responsible for staying below `2^T`;
    /// [`FieldContext::element`] checks the bound.
    pub const fn from_bits(bits: u32) -> Self {
        FieldElement(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Index of the highest nonzero coordinate, `None` for zero.
    pub fn degree(self) -> Option<u32> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({:#x})", self.0)
    }
}

// Addition in characteristic 2 is XOR.
impl Add for FieldElement {
    type Output = FieldElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(iter: I) -> FieldElement {
        iter.fold(FieldElement::ZERO, |a, b| a + b)
    }
}

/// GF(2^T) defined by a primitive polynomial, together with the trace-dual
/// basis of `alpha^0 .. alpha^{T-1}`.
///
/// Immutable after construction; share it freely across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldContext {
    degree: u32,
    poly: u64,
    alpha: FieldElement,
    dual: Vec<FieldElement>,
}

impl FieldContext {
    /// Builds the field for `degree` from `poly`, checking that its root has
    /// multiplicative order `2^T - 1`.
    pub fn new(degree: u32, poly: u64) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(FieldError::UnsupportedDegree(degree));
        }
        let found = 63 - poly.leading_zeros() as i32;
        if poly == 0 || found != degree as i32 {
            return Err(FieldError::DegreeMismatch {
                poly,
                expected: degree,
                found: if poly == 0 { -1 } else { found },
            });
        }
        let mut ctx = FieldContext {
            degree,
            poly,
            alpha: FieldElement::ZERO,
            dual: Vec::new(),
        };
        ctx.alpha = ctx.reduce(0b10);
        let order = ctx.multiplicative_order(ctx.alpha);
        if order != Some(ctx.group_order()) {
            return Err(FieldError::PolynomialNotPrimitive { poly, order });
        }
        ctx.dual = ctx.compute_dual_basis()?;
        Ok(ctx)
    }

    /// Builds the field from the built-in primitive polynomial table.
    pub fn with_default_poly(degree: u32) -> Result<Self, FieldError> {
        let poly = default_primitive_poly(degree).ok_or(FieldError::UnsupportedDegree(degree))?;
        Self::new(degree, poly)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// The primitive element (the class of `x`).
    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// `theta_0 .. theta_{T-1}` with `Tr(theta_i alpha^j) = [i == j]`.
    pub fn dual_basis(&self) -> &[FieldElement] {
        &self.dual
    }

    /// Number of field elements, `2^T`.
    pub fn size(&self) -> u64 {
        1u64 << self.degree
    }

    /// `2^T - 1`.
    pub fn group_order(&self) -> u64 {
        self.size() - 1
    }

    fn mask(&self) -> u32 {
        if self.degree == 32 {
            u32::MAX
        } else {
            (1u32 << self.degree) - 1
        }
    }

    /// Checked constructor for an element from raw coordinates.
    pub fn element(&self, bits: u64) -> Option<FieldElement> {
        (bits < self.size()).then_some(FieldElement(bits as u32))
    }

    /// Iterator over all `2^T` elements in coordinate order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(|b| FieldElement(b as u32))
    }

    fn reduce(&self, mut v: u64) -> FieldElement {
        let t = self.degree;
        while v >> t != 0 {
            let top = 63 - v.leading_zeros();
            v ^= self.poly << (top - t);
        }
        FieldElement(v as u32)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut acc = 0u64;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            x <<= 1;
            y >>= 1;
        }
        self.reduce(acc)
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// `alpha^k` for any integer `k` (negative exponents wrap modulo `2^T - 1`).
    pub fn alpha_pow(&self, k: i64) -> FieldElement {
        let n = self.group_order() as i64;
        self.pow(self.alpha, k.rem_euclid(n) as u64)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        (!a.is_zero()).then(|| self.pow(a, self.group_order() - 1))
    }

    /// Order of `a` in the multiplicative group, or `None` when `a^(2^T-1) != 1`.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u64> {
        let n = self.group_order();
        if self.pow(a, n) != FieldElement::ONE {
            return None;
        }
        let mut order = n;
        for p in prime_factors(n) {
            while order.is_multiple_of(p) && self.pow(a, order / p) == FieldElement::ONE {
                order /= p;
            }
        }
        Some(order)
    }

    /// Absolute trace `x + x^2 + x^4 + ... + x^{2^{T-1}}`, which lies in GF(2).
    pub fn trace(&self, x: FieldElement) -> bool {
        let mut acc = FieldElement::ZERO;
        let mut term = x;
        for _ in 0..self.degree {
            acc += term;
            term = self.square(term);
        }
        debug_assert!(acc.0 <= 1, "trace left GF(2)");
        acc.0 == 1
    }

    /// Coordinates of `x` in the `alpha` basis computed through the dual basis:
    /// bit `i` of the result is `Tr(theta_i x)`.
    pub fn expand(&self, x: FieldElement) -> u32 {
        self.dual
            .iter()
            .enumerate()
            .filter(|(_, &th)| self.trace(self.mul(th, x)))
            .fold(0u32, |acc, (i, _)| acc | (1 << i))
    }

    /// `sum_i bits_i alpha^i`.
    pub fn recombine(&self, bits: u32) -> FieldElement {
        FieldElement(bits & self.mask())
    }

    fn compute_dual_basis(&self) -> Result<Vec<FieldElement>, FieldError> {
        let t = self.degree as usize;
        let powers: Vec<FieldElement> = (0..t).map(|i| self.alpha_pow(i as i64)).collect();
        let mut gram = BinaryMatrix::zeros(t, t);
        for i in 0..t {
            for j in 0..t {
                gram.set(i, j, self.trace(self.mul(powers[i], powers[j])));
            }
        }
        // Tr(theta_i alpha^j) = (M G)_{ij} for theta_i = sum_k M_ik alpha^k, so M = G^{-1}.
        let inv = gram.inverse().ok_or(FieldError::SingularGramMatrix)?;
        Ok((0..t)
            .map(|i| {
                (0..t)
                    .filter(|&k| inv.get(i, k))
                    .map(|k| powers[k])
                    .sum()
            })
            .collect())
    }
}

/// Distinct prime factors of `n` by trial division (`n < 2^33`, so at most
/// ~92k candidate divisors).
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}
