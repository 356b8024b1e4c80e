use isicode::rank_codes::{lifted_rank_wide, theta_lift};
use isicode::trellis::{build_generator, verify_trellis_rank, TrellisError, DEFAULT_MESSAGE_LIMIT};
use isicode::Execution;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn formula_rate(m_t: u64, nu: u64, r: u32, t: u64) -> Ratio<u64> {
    let q = (1u64 << r) - 1;
    Ratio::new(r as u64 * (t - nu - (nu + 1) * (m_t - 1) * q * (1 << (r - 1))), t)
}

#[test]
fn rate_formula_and_rank_for_small_blocks() {
    for t in [5u32, 8] {
        let g = build_generator(2, 1, 1, t).unwrap();
        assert_eq!(g.effective_rate(), formula_rate(2, 1, 1, t as u64));
        let rep = verify_trellis_rank(&g, 4, DEFAULT_MESSAGE_LIMIT, Execution::Parallel).unwrap();
        assert_eq!(rep.min_rank, Some(4));
        assert_eq!(rep.scanned, (1u64 << g.message_bits()) - 1);
    }
    assert_eq!(build_generator(2, 1, 1, 5).unwrap().message_bits(), 2);
    assert_eq!(build_generator(2, 1, 1, 8).unwrap().message_bits(), 5);
}

#[test]
fn rate_gap_shrinks_with_block_length() {
    let gap = |t| Ratio::from_integer(2u64) - build_generator(2, 2, 0, t).unwrap().effective_rate();
    assert_eq!(gap(12) / gap(48), Ratio::from_integer(4));
}

#[test]
fn lifted_generator_matches_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m_t, r, nu, t) in [(2, 1, 1, 5), (2, 1, 1, 8), (2, 2, 0, 20), (3, 2, 1, 60)] {
        let g = build_generator(m_t, r, nu, t).unwrap();
        let n = g.message_len() as u32;
        for _ in 0..200 {
            let u: Vec<u64> = (0..r).map(|_| rng.random::<u64>() >> (64 - n)).collect();
            let p = g.encode(&u).unwrap();
            assert_eq!(theta_lift(&p, nu).unwrap(), g.lifted_product(&u).unwrap());
        }
    }
}

#[test]
fn encoding_is_linear_and_zero_tailed() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = build_generator(3, 2, 1, 40).unwrap();
    let n = g.message_len() as u32;
    let tail = ((1u64 << g.nu) - 1) << (g.t as usize - g.nu);
    for _ in 0..200 {
        let u: Vec<u64> = (0..2).map(|_| rng.random::<u64>() >> (64 - n)).collect();
        let v: Vec<u64> = (0..2).map(|_| rng.random::<u64>() >> (64 - n)).collect();
        let w: Vec<u64> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
        let (pu, pv, pw) = (g.encode_rows(&u).unwrap(), g.encode_rows(&v).unwrap(), g.encode_rows(&w).unwrap());
        assert!(pw.iter().zip(pu.iter().zip(&pv)).all(|(w, (a, b))| *w == a ^ b));
        assert!(pw.iter().all(|row| row & tail == 0));
    }
}

#[test]
fn larger_code_meets_rank_guarantee() {
    // M_t = 2, R = 2, nu = 0: d = 1, claimed rank 1; M_t = 3, R = 1, nu = 0: full rank 3.
    let g = build_generator(3, 1, 0, 9).unwrap();
    let rep = verify_trellis_rank(&g, 3, DEFAULT_MESSAGE_LIMIT, Execution::Sequential).unwrap();
    assert!(rep.holds());
    let g = build_generator(2, 2, 0, 14).unwrap();
    let rep = verify_trellis_rank(&g, 1, DEFAULT_MESSAGE_LIMIT, Execution::Parallel).unwrap();
    assert!(rep.holds());
    // Directly: a single message bit on the top coefficient is still zero-tailed.
    let g = build_generator(2, 1, 1, 8).unwrap();
    let rows = g.encode_rows(&[1 << g.message_degree_bound()]).unwrap();
    assert_eq!(lifted_rank_wide(&rows, 1), 4);
}

#[test]
fn errors() {
    assert_eq!(build_generator(2, 1, 1, 2).unwrap_err(), TrellisError::BlockTooShort { t: 2, required: 3 });
    let g = build_generator(2, 1, 1, 64).unwrap();
    assert!(matches!(
        verify_trellis_rank(&g, 4, 1 << 20, Execution::Sequential),
        Err(TrellisError::EnumerationTooLarge { .. })
    ));
    assert!(build_generator(2, 3, 1, 20).is_err());
}
