use std::collections::BTreeSet;

use isicode::rank_codes::{
    codeword_matrix, theta_lift, verify_rank_distance, CodeParams, CodeSet, EvalMode, LinearizedPolynomial, VerifyOptions,
};
use isicode::{BinaryMatrix, Execution, FieldContext, FieldElement};
use proptest::prelude::*;

fn ex3() -> CodeSet {
    let ctx = FieldContext::new(5, 0x37).unwrap();
    CodeSet::new(&ctx, CodeParams::isi(2, 1, 5, 1).unwrap()).unwrap()
}

const EX3_CODEWORDS: [[[u8; 5]; 2]; 8] = [
    [[0, 0, 0, 0, 0], [0, 0, 0, 0, 0]],
    [[1, 0, 0, 0, 0], [0, 0, 1, 0, 0]],
    [[0, 1, 0, 0, 0], [0, 0, 0, 1, 0]],
    [[1, 1, 0, 0, 0], [0, 0, 1, 1, 0]],
    [[0, 0, 1, 1, 0], [1, 1, 1, 0, 0]],
    [[1, 0, 1, 1, 0], [1, 1, 0, 0, 0]],
    [[0, 1, 1, 1, 0], [1, 1, 1, 1, 0]],
    [[1, 1, 1, 1, 0], [1, 1, 0, 1, 0]],
];

#[test]
fn example_three_set_and_codewords() {
    let code = ex3();
    let ctx = code.ctx();
    assert_eq!(code.len(), Some(8));
    let got: BTreeSet<u32> = code.enumerate(8).unwrap().map(|(_, f)| f.coeffs[0].bits()).collect();
    let mut expected: BTreeSet<u32> = [1, 17, 19, 21, 24, 26, 31].iter().map(|&k| ctx.alpha_pow(k).bits()).collect();
    expected.insert(0);
    assert_eq!(got, expected);

    let got: BTreeSet<String> = (0..8).map(|i| format!("{:?}", code.codeword(i))).collect();
    let expected: BTreeSet<String> = EX3_CODEWORDS.iter().map(|c| format!("{:?}", BinaryMatrix::from_rows(c))).collect();
    assert_eq!(got, expected);
}

#[test]
fn example_one_flat_counterexample() {
    let ctx = FieldContext::new(5, 0x37).unwrap();
    let p = CodeParams::new(2, 1, 1, 5, 1, EvalMode::Flat).unwrap();
    let c = codeword_matrix(&ctx, &LinearizedPolynomial::new(vec![FieldElement::ONE]), &p).unwrap();
    assert_eq!(c, BinaryMatrix::from_rows(&[[1u8, 0, 0, 0, 0], [0, 1, 0, 0, 0]]));
    assert_eq!(theta_lift(&c, 1).unwrap().rank(), 3);

    let rep = verify_rank_distance(&CodeSet::new(&ctx, p).unwrap(), 4, &VerifyOptions::default()).unwrap();
    assert_eq!(rep.min_rank, Some(3));
    assert!(!rep.holds());
}

#[test]
fn example_two_flat_counterexample() {
    let ctx = FieldContext::new(7, 0x83).unwrap();
    let p = CodeParams::new(3, 1, 1, 7, 2, EvalMode::Flat).unwrap();
    // (f_1, f_0) = (0, 1): rows 1, alpha, alpha^2.
    let f = LinearizedPolynomial::new(vec![FieldElement::ONE, FieldElement::ZERO]);
    let c = codeword_matrix(&ctx, &f, &p).unwrap();
    assert_eq!(theta_lift(&c, 1).unwrap().rank(), 4);
    assert!(4 < p.full_rank());

    let rep = verify_rank_distance(&CodeSet::new(&ctx, p).unwrap(), p.target_rank(), &VerifyOptions::default()).unwrap();
    assert!(rep.exhaustive);
    assert!(rep.min_rank.unwrap() < p.target_rank());
}

fn assert_full_rank(t: u32, nu: usize) {
    let ctx = FieldContext::with_default_poly(t).unwrap();
    let p = CodeParams::isi(2, nu, t, 1).unwrap();
    let code = CodeSet::new(&ctx, p).unwrap();
    let rep = verify_rank_distance(&code, p.full_rank(), &VerifyOptions::default()).unwrap();
    assert_eq!(rep.scanned, code.len().unwrap() - 1);
    assert_eq!(rep.histogram[p.full_rank()], rep.scanned, "T = {t}, nu = {nu}");
}

#[test]
fn maximal_rank_small_cases() {
    assert_full_rank(5, 1);
    assert_full_rank(6, 2);
}

#[test]
fn general_rank_at_threshold() {
    let ctx = FieldContext::with_default_poly(8).unwrap();
    let p = CodeParams::isi(2, 1, 8, 2).unwrap();
    assert_eq!(p.t_thr(), 8);
    let code = CodeSet::new(&ctx, p).unwrap();
    assert!(code.dimension() >= 14);
    let rep = verify_rank_distance(&code, p.target_rank(), &VerifyOptions::default()).unwrap();
    assert!(rep.scanned >= 16383);
    assert!(rep.holds());
}

#[test]
fn dimension_bound_grid() {
    for m_t in 2..=3 {
        for nu in 0..=2 {
            for r in 1..=2 {
                let probe = CodeParams::isi(m_t, nu, 32, r).unwrap();
                let start = (probe.t_thr() as u32).max(((nu + 1) * m_t + 1) as u32);
                for t in start..=start + 4 {
                    let ctx = FieldContext::with_default_poly(t).unwrap();
                    let p = CodeParams::isi(m_t, nu, t, r).unwrap();
                    let code = CodeSet::new(&ctx, p).unwrap();
                    assert!(code.dimension() as i64 >= p.dimension_bound(), "{p:?}");
                }
            }
        }
    }
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let ctx = FieldContext::with_default_poly(8).unwrap();
    let code = CodeSet::new(&ctx, CodeParams::isi(2, 1, 8, 2).unwrap()).unwrap();
    let run = |exec| verify_rank_distance(&code, 2, &VerifyOptions { exec, ..Default::default() }).unwrap();
    assert_eq!(run(Execution::Parallel), run(Execution::Sequential));
}

proptest! {
    #[test]
    fn members_are_linear_and_zero_tailed(i in 0u64..1 << 14, j in 0u64..1 << 14) {
        let ctx = FieldContext::with_default_poly(8).unwrap();
        let code = CodeSet::new(&ctx, CodeParams::isi(2, 1, 8, 2).unwrap()).unwrap();
        let mask = code.len().unwrap() - 1;
        let (i, j) = (i & mask, j & mask);
        prop_assert!(code.is_zero_tailed(i));
        let sum: Vec<u32> = code.codeword_rows(i).iter().zip(code.codeword_rows(j)).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(code.codeword_rows(i ^ j), sum);
        let f = code.polynomial(i);
        prop_assert_eq!(codeword_matrix(&ctx, &f, code.params()).unwrap(), code.codeword(i));
    }
}
