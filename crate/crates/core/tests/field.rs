use isicode::gf2m::{default_primitive_poly, FieldContext, FieldElement, FieldError};
use proptest::prelude::*;

/// Carry-less multiply followed by reduction, bit by bit.
fn slow_mul(a: u64, b: u64, poly: u64, t: u32) -> u64 {
    let mut acc = 0u128;
    for i in 0..t {
        if b >> i & 1 == 1 {
            acc ^= (a as u128) << i;
        }
    }
    for i in (t..2 * t).rev() {
        if acc >> i & 1 == 1 {
            acc ^= (poly as u128) << (i - t);
        }
    }
    acc as u64
}

#[test]
fn default_polynomials_are_primitive() {
    for t in 2..=20 {
        let ctx = FieldContext::with_default_poly(t).unwrap();
        assert_eq!(ctx.multiplicative_order(ctx.alpha()), Some(ctx.group_order()), "T = {t}");
    }
    for t in [24, 31, 32] {
        assert!(FieldContext::with_default_poly(t).is_ok(), "T = {t}");
    }
    assert_eq!(default_primitive_poly(8), Some(0x11d));
    assert_eq!(default_primitive_poly(33), None);
}

#[test]
fn example_field_powers() {
    // x^5 + x^4 + x^2 + x + 1: alpha^5 = alpha^4 + alpha^2 + alpha + 1.
    let ctx = FieldContext::new(5, 0x37).unwrap();
    assert_eq!(ctx.alpha_pow(5).bits(), 0b10111);
    assert_eq!(ctx.alpha_pow(31), FieldElement::ONE);
    assert_eq!(ctx.alpha_pow(-1), ctx.inv(ctx.alpha()).unwrap());
}

#[test]
fn rejects_bad_polynomials() {
    assert!(matches!(FieldContext::new(5, 0x3f), Err(FieldError::PolynomialNotPrimitive { .. })));
    assert!(matches!(FieldContext::new(5, 0x13), Err(FieldError::DegreeMismatch { .. })));
    assert!(matches!(FieldContext::new(33, 0), Err(FieldError::UnsupportedDegree(33))));
}

#[test]
fn trace_counts_and_dual_basis() {
    for t in [3u32, 5, 7, 8] {
        let ctx = FieldContext::with_default_poly(t).unwrap();
        let ones = ctx.elements().filter(|&x| ctx.trace(x)).count() as u64;
        assert_eq!(ones, ctx.size() / 2);
        let dual = ctx.dual_basis();
        for (i, &theta) in dual.iter().enumerate() {
            for j in 0..t as usize {
                let v = ctx.trace(ctx.mul(theta, ctx.alpha_pow(j as i64)));
                assert_eq!(v, i == j);
            }
        }
    }
}

proptest! {
    #[test]
    fn mul_matches_schoolbook(a in 0u64..1 << 13, b in 0u64..1 << 13) {
        let ctx = FieldContext::with_default_poly(13).unwrap();
        let got = ctx.mul(ctx.element(a).unwrap(), ctx.element(b).unwrap()).bits() as u64;
        prop_assert_eq!(got, slow_mul(a, b, ctx.poly(), 13));
    }

    #[test]
    fn field_axioms(a in 1u64..1 << 8, b in 0u64..1 << 8, c in 0u64..1 << 8) {
        let ctx = FieldContext::with_default_poly(8).unwrap();
        let (a, b, c) = (ctx.element(a).unwrap(), ctx.element(b).unwrap(), ctx.element(c).unwrap());
        prop_assert_eq!(ctx.mul(a, b + c), ctx.mul(a, b) + ctx.mul(a, c));
        prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElement::ONE);
        prop_assert_eq!(ctx.trace(b + c), ctx.trace(b) ^ ctx.trace(c));
        prop_assert_eq!(ctx.square(b + c), ctx.square(b) + ctx.square(c));
    }

    #[test]
    fn expand_recombine(x in 0u64..1 << 11) {
        let ctx = FieldContext::with_default_poly(11).unwrap();
        let e = ctx.element(x).unwrap();
        prop_assert_eq!(ctx.recombine(ctx.expand(e)), e);
    }
}
