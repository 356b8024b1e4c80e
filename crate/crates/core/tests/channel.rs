use isicode::channel::{
    convolve, estimate_slope, ml_decode, result_csv, run_monte_carlo, sample_channel, simulate_point, toeplitz, transmit,
    trial_rng, ChannelError, ChannelRealization, Codebook, SimConfig, SlopeWindow, SnrPoint,
};
use isicode::multilevel::{full_codebook, LayerSpec};
use isicode::rank_codes::{CodeParams, CodeSet};
use isicode::{Execution, FieldContext, MapperConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ex3_codebook(mapper: &str, layers: usize) -> Codebook {
    let ctx = FieldContext::new(5, 0x37).unwrap();
    let layer = LayerSpec::from_code_set(&CodeSet::new(&ctx, CodeParams::isi(2, 1, 5, 1).unwrap()).unwrap(), 64).unwrap();
    let mapper: MapperConfig = mapper.parse().unwrap();
    let words = full_codebook(&vec![layer; layers], &mapper, 1 << 12, Execution::Sequential).unwrap();
    Codebook::from_multilevel(&words, 1).unwrap()
}

#[test]
fn channel_entries_are_standard_complex_gaussian() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    let draws: Vec<Complex64> = (0..n).map(|_| sample_channel(1, 1, 0, &mut rng).taps[0][0]).collect();
    let mean = draws.iter().sum::<Complex64>() / n as f64;
    let var = draws.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / n as f64;
    assert!(mean.norm() < 0.02, "{mean}");
    assert!((var - 1.0).abs() < 0.02, "{var}");
    let a = sample_channel(2, 3, 2, &mut trial_rng(9, 1, 4));
    let b = sample_channel(2, 3, 2, &mut trial_rng(9, 1, 4));
    assert_eq!(a, b);
    assert_eq!(a.taps.len(), 3);
}

#[test]
fn convolution_matches_toeplitz_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let (m_r, m_t, nu) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(0..=2));
        let t = rng.random_range(nu + 1..=8);
        let h = sample_channel(m_r, m_t, nu, &mut rng);
        let x: Vec<Complex64> = (0..m_t * t).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let direct = convolve(&x, t, &h).unwrap();
        let (hs, tx) = (h.stacked(), toeplitz(&x, m_t, t, nu));
        let w = (nu + 1) * m_t;
        for r in 0..m_r {
            for n in 0..t {
                let v: Complex64 = (0..w).map(|k| hs[r * w + k] * tx[k * t + n]).sum();
                assert!((v - direct[r * t + n]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn transmit_requires_zero_tail() {
    let h = ChannelRealization { m_r: 1, m_t: 1, taps: vec![vec![Complex64::new(1.0, 0.0)]; 2] };
    let x = vec![Complex64::new(1.0, 0.0); 3];
    assert!(matches!(transmit(&x, 3, &h, 0.0, &mut trial_rng(0, 0, 0)), Err(ChannelError::ShapeMismatch(_))));
}

#[test]
fn zero_noise_decoding_recovers_every_codeword() {
    let cb = ex3_codebook("qam:2", 2).normalized();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let h = sample_channel(1, 2, 1, &mut rng);
        for (i, w) in cb.words.iter().enumerate() {
            let y = transmit(w, cb.t, &h, 0.0, &mut rng).unwrap();
            assert_eq!(ml_decode(&y, &h, &cb).unwrap(), i);
        }
    }
}

#[test]
fn identity_taps_and_perturbation() {
    let cb = ex3_codebook("psk:1", 1);
    let id = ChannelRealization {
        m_r: 2,
        m_t: 2,
        taps: vec![
            vec![Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default(), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.5, 0.0); 4],
        ],
    };
    for i in 0..8 {
        let mut y = convolve(&cb.words[i], cb.t, &id).unwrap();
        assert_eq!(ml_decode(&y, &id, &cb).unwrap(), i);
        if i == 5 {
            y[0] += Complex64::new(1e-9, -1e-9);
            assert_eq!(ml_decode(&y, &id, &cb).unwrap(), 5);
        }
    }
    let single = Codebook::new(2, 5, 1, vec![cb.words[3].clone()], vec![vec![0]]).unwrap();
    let y = vec![Complex64::new(7.0, 1.0); 10];
    assert_eq!(ml_decode(&y, &id, &single).unwrap(), 0);
}

#[test]
fn no_errors_without_noise() {
    let cb = ex3_codebook("qam:2", 2).normalized();
    let (trials, errors, layers) = simulate_point(&cb, 1, 1, 0.0, 2000, 500, None, 1, 0, Execution::Parallel);
    assert_eq!((trials, errors), (2000, 0));
    assert_eq!(layers, vec![0, 0]);
}

fn small_config() -> SimConfig {
    SimConfig {
        snr_grid_db: vec![0.0, 6.0, 12.0],
        trials_per_snr: 3000,
        seed: 42,
        min_errors: 10,
        target_errors: Some(200),
        batch: 1000,
        m_r: 1,
        nu: 1,
        window: SlopeWindow { pe_min: 1e-4, pe_max: 0.5, min_errors: 10 },
    }
}

#[test]
fn monte_carlo_is_deterministic_across_modes() {
    let cb = ex3_codebook("qam:2", 2);
    let cfg = small_config();
    let a = run_monte_carlo(&cb, &cfg, Execution::Parallel).unwrap();
    let b = run_monte_carlo(&cb, &cfg, Execution::Sequential).unwrap();
    let c = run_monte_carlo(&cb, &cfg, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(result_csv(&a), result_csv(&c));
    // Early stop lands on a batch boundary.
    assert!(a.points.iter().all(|p| p.trials % 1000 == 0));
    assert!(a.points[0].pe >= a.points[2].pe);
    for p in &a.points {
        assert!(p.layer_errors.iter().all(|&e| e <= p.errors));
    }
    let (payload, all) = a.energy_per_use;
    assert!((payload - 1.0).abs() < 1e-12);
    assert!((all - 0.8).abs() < 1e-12);
}

#[test]
fn config_errors() {
    let cb = ex3_codebook("psk:1", 1);
    let mut cfg = small_config();
    cfg.trials_per_snr = 0;
    assert!(matches!(run_monte_carlo(&cb, &cfg, Execution::Sequential), Err(ChannelError::InvalidConfig(_))));
    let mut cfg = small_config();
    cfg.nu = 2;
    assert!(matches!(run_monte_carlo(&cb, &cfg, Execution::Sequential), Err(ChannelError::ShapeMismatch(_))));
    assert!(matches!(Codebook::new(1, 1, 0, vec![], vec![]), Err(ChannelError::EmptyCodebook)));
}

#[test]
fn slope_fit_on_noisy_power_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let points: Vec<SnrPoint> = (0..8)
            .map(|i| {
                let snr_db = 5.0 + 2.5 * i as f64;
                let pe = 10f64.powf(-3.0 * snr_db / 10.0) * rng.random_range(0.9..1.1);
                SnrPoint { snr_db, sigma2: 0.0, trials: 1, errors: 500, pe, layer_errors: vec![] }
            })
            .collect();
        let fit = estimate_slope(&points, &SlopeWindow { pe_min: 0.0, pe_max: 1.0, min_errors: 100 }).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.3, "{}", fit.slope);
    }
}
