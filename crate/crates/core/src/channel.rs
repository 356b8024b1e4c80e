//! Quasi-static Rayleigh MIMO channel with inter-symbol interference, joint
//! ML decoding and Monte Carlo error-rate estimation.
//!
//! The received block is `Y[n] = sum_l H_l x[n-l] + Z[n]` for `n < T`, which
//! equals `[H_0 .. H_nu] * Toeplitz(X1) + Z`.
//!
//! SNR is `P / sigma^2` with total transmit power `P = 1`: codebooks are
//! scaled to unit average energy per non-tail channel use summed over the
//! transmit antennas, and `sigma^2` is the complex noise variance per receive
//! antenna.
//!
//! Randomness: every trial owns its generator. For SNR point `k` the key is
//! `splitmix64(seed ^ splitmix64(k))`, and trial `i` uses ChaCha8 stream `i`
//! under that key. Results therefore do not depend on the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multilevel::SpaceTimeCodeword;
use crate::par::{chunked_reduce, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("codeword {index} is not zero in its last {nu} columns")]
    NonZeroTail { index: usize, nu: usize },
    #[error("slope fit needs at least 2 qualifying points, found {found}")]
    InsufficientPoints { found: usize },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

/// Taps `H_0 .. H_nu`, each `M_r x M_t` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub m_r: usize,
    pub m_t: usize,
    pub taps: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    pub fn nu(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn tap(&self, l: usize, row: usize, col: usize) -> Complex64 {
        self.taps[l][row * self.m_t + col]
    }

    /// `[H_0 H_1 .. H_nu]`, `M_r x (nu+1) M_t` row-major.
    pub fn stacked(&self) -> Vec<Complex64> {
        let w = self.taps.len() * self.m_t;
        let mut out = vec![Complex64::default(); self.m_r * w];
        for (l, tap) in self.taps.iter().enumerate() {
            for r in 0..self.m_r {
                for c in 0..self.m_t {
                    out[r * w + l * self.m_t + c] = tap[r * self.m_t + c];
                }
            }
        }
        out
    }
}

/// A `CN(0, 1)` sample: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_channel<R: Rng + ?Sized>(m_r: usize, m_t: usize, nu: usize, rng: &mut R) -> ChannelRealization {
    let taps = (0..=nu)
        .map(|_| (0..m_r * m_t).map(|_| complex_gaussian(rng)).collect())
        .collect();
    ChannelRealization { m_r, m_t, taps }
}

/// The `(nu+1) M_t x T` block Toeplitz matrix; row `l M_t + k` is row `k` of
/// `X1` delayed by `l`.
pub fn toeplitz(x1: &[Complex64], m_t: usize, t: usize, nu: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); (nu + 1) * m_t * t];
    for l in 0..=nu {
        for k in 0..m_t {
            for n in l..t {
                out[(l * m_t + k) * t + n] = x1[k * t + n - l];
            }
        }
    }
    out
}

/// Noise-free output by direct convolution, written into `out` (`M_r x T`).
fn convolve_into(x1: &[Complex64], t: usize, h: &ChannelRealization, out: &mut [Complex64]) {
    out.fill(Complex64::default());
    for (l, tap) in h.taps.iter().enumerate() {
        for r in 0..h.m_r {
            let o = &mut out[r * t..(r + 1) * t];
            for k in 0..h.m_t {
                let g = tap[r * h.m_t + k];
                let x = &x1[k * t..(k + 1) * t];
                for n in l..t {
                    o[n] += g * x[n - l];
                }
            }
        }
    }
}

fn check_shape(x1: &[Complex64], t: usize, h: &ChannelRealization) -> Result<(), ChannelError> {
    if x1.len() != h.m_t * t {
        return Err(ChannelError::ShapeMismatch(format!(
            "X1 has {} entries, expected {} x {}",
            x1.len(),
            h.m_t,
            t
        )));
    }
    Ok(())
}

/// `sum_l H_l x[n-l]` for `n < T`.
pub fn convolve(x1: &[Complex64], t: usize, h: &ChannelRealization) -> Result<Vec<Complex64>, ChannelError> {
    check_shape(x1, t, h)?;
    let mut out = vec![Complex64::default(); h.m_r * t];
    convolve_into(x1, t, h, &mut out);
    Ok(out)
}

/// `Y = H X + Z` with `Z` i.i.d. complex Gaussian of variance `sigma2`.
pub fn transmit<R: Rng + ?Sized>(
    x1: &[Complex64],
    t: usize,
    h: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>, ChannelError> {
    let mut y = convolve(x1, t, h)?;
    let nu = h.nu();
    if nu > 0 && (0..h.m_t).any(|k| x1[k * t + t.saturating_sub(nu)..(k + 1) * t].iter().any(|v| v.norm_sqr() != 0.0)) {
        return Err(ChannelError::ShapeMismatch(format!("X1 lacks a zero tail of length {nu}")));
    }
    add_noise(&mut y, sigma2, rng);
    Ok(y)
}

fn add_noise<R: Rng + ?Sized>(y: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 > 0.0 {
        let s = sigma2.sqrt();
        for v in y {
            *v += complex_gaussian(rng) * s;
        }
    }
}

/// Complex codewords (`M_t x T` row-major) with the per-layer messages each
/// one carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub m_t: usize,
    pub t: usize,
    /// Length of the zero tail shared by all codewords.
    pub tail: usize,
    pub words: Vec<Vec<Complex64>>,
    pub messages: Vec<Vec<usize>>,
}

impl Codebook {
    /// Builds a codebook and checks shapes and zero tails.
    pub fn new(m_t: usize, t: usize, tail: usize, words: Vec<Vec<Complex64>>, messages: Vec<Vec<usize>>) -> Result<Self, ChannelError> {
        if words.is_empty() {
            return Err(ChannelError::EmptyCodebook);
        }
        if messages.len() != words.len() {
            return Err(ChannelError::ShapeMismatch("one message tuple per codeword required".into()));
        }
        let layers = messages[0].len();
        if messages.iter().any(|m| m.len() != layers) {
            return Err(ChannelError::ShapeMismatch("message tuples differ in length".into()));
        }
        if tail > t {
            return Err(ChannelError::ShapeMismatch(format!("tail {tail} longer than block {t}")));
        }
        for (index, w) in words.iter().enumerate() {
            if w.len() != m_t * t {
                return Err(ChannelError::ShapeMismatch(format!("codeword {index} has {} entries", w.len())));
            }
            if (0..m_t).any(|k| w[k * t + t - tail..(k + 1) * t].iter().any(|v| v.norm_sqr() != 0.0)) {
                return Err(ChannelError::NonZeroTail { index, nu: tail });
            }
        }
        Ok(Codebook { m_t, t, tail, words, messages })
    }

    /// Joint multi-level codewords; the messages are the layer indices.
    pub fn from_multilevel(words: &[SpaceTimeCodeword], tail: usize) -> Result<Self, ChannelError> {
        let first = words.first().ok_or(ChannelError::EmptyCodebook)?;
        Codebook::new(
            first.m_t,
            first.t as usize,
            tail,
            words.iter().map(|w| w.x1.clone()).collect(),
            words.iter().map(|w| w.messages.clone()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn layers(&self) -> usize {
        self.messages[0].len()
    }

    fn mean_energy(&self) -> f64 {
        self.words.iter().map(|w| w.iter().map(|v| v.norm_sqr()).sum::<f64>()).sum::<f64>() / self.len() as f64
    }

    /// Average energy per channel use, summed over antennas: over the
    /// `T - tail` payload uses, and over all `T` uses.
    pub fn energy_per_use(&self) -> (f64, f64) {
        let e = self.mean_energy();
        let payload = (self.t - self.tail).max(1) as f64;
        (e / payload, e / self.t as f64)
    }

    /// Scaled copy with unit average energy per payload channel use.
    pub fn normalized(&self) -> Codebook {
        let (e, _) = self.energy_per_use();
        let s = if e > 0.0 { 1.0 / e.sqrt() } else { 1.0 };
        let mut out = self.clone();
        for w in &mut out.words {
            for v in w.iter_mut() {
                *v *= s;
            }
        }
        out
    }
}

fn frobenius_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Index minimizing `||Y - H Toeplitz(X_c)||_F^2`; ties go to the lowest index.
pub fn ml_decode(y: &[Complex64], h: &ChannelRealization, codebook: &Codebook) -> Result<usize, ChannelError> {
    if codebook.is_empty() {
        return Err(ChannelError::EmptyCodebook);
    }
    if h.m_t != codebook.m_t || y.len() != h.m_r * codebook.t {
        return Err(ChannelError::ShapeMismatch(format!(
            "Y has {} entries, H is {} x {}, codebook is {} x {}",
            y.len(),
            h.m_r,
            h.m_t,
            codebook.m_t,
            codebook.t
        )));
    }
    let mut scratch = vec![Complex64::default(); y.len()];
    Ok(decode_with(y, h, codebook, &mut scratch))
}

fn decode_with(y: &[Complex64], h: &ChannelRealization, codebook: &Codebook, scratch: &mut [Complex64]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, w) in codebook.words.iter().enumerate() {
        convolve_into(w, codebook.t, h, scratch);
        let d = frobenius_distance(y, scratch);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub snr_grid_db: Vec<f64>,
    /// Upper bound on trials per SNR point.
    pub trials_per_snr: u64,
    pub seed: u64,
    /// Errors a point needs to enter the slope fit.
    pub min_errors: u64,
    /// Stop a point early once this many block errors are seen.
    #[serde(default)]
    pub target_errors: Option<u64>,
    /// Trials between early-stop checks.
    #[serde(default = "default_batch")]
    pub batch: u64,
    pub m_r: usize,
    /// Channel memory.
    pub nu: usize,
    #[serde(default)]
    pub window: SlopeWindow,
}

fn default_batch() -> u64 {
    10_000
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |s: &str| Err(ChannelError::InvalidConfig(s.into()));
        if self.trials_per_snr == 0 {
            return bad("trials_per_snr must be positive");
        }
        if self.batch == 0 {
            return bad("batch must be positive");
        }
        if self.m_r == 0 {
            return bad("M_r must be positive");
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR grid must be a nonempty list of finite values");
        }
        if self.snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return bad("SNR grid must be strictly increasing");
        }
        Ok(())
    }
}

/// `sigma^2 = P / SNR` with `P = 1`.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// The splitmix64 finalizer, used to derive per-point keys.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for trial `trial` at SNR point `point`.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(point)));
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub errors: u64,
    pub pe: f64,
    pub layer_errors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<SnrPoint>,
    /// Energy per channel use of the transmitted codebook, without and with
    /// the zero tail.
    pub energy_per_use: (f64, f64),
    pub slope: Option<SlopeFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeWindow {
    pub pe_min: f64,
    pub pe_max: f64,
    pub min_errors: u64,
}

impl Default for SlopeWindow {
    fn default() -> Self {
        SlopeWindow { pe_min: 1e-4, pe_max: 1e-2, min_errors: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// SNR values (dB) of the points used.
    pub snr_db: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Tally {
    trials: u64,
    errors: u64,
    layer_errors: Vec<u64>,
}

impl Tally {
    fn new(layers: usize) -> Self {
        Tally { trials: 0, errors: 0, layer_errors: vec![0; layers] }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.errors += other.errors;
        for (a, b) in self.layer_errors.iter_mut().zip(other.layer_errors) {
            *a += b;
        }
        self
    }
}

/// Runs trials `range` at one noise level. The codebook is used as given.
fn run_trials(codebook: &Codebook, m_r: usize, nu: usize, sigma2: f64, seed: u64, point: u64, range: std::ops::Range<u64>) -> Tally {
    let t = codebook.t;
    let mut tally = Tally::new(codebook.layers());
    let mut y = vec![Complex64::default(); m_r * t];
    let mut scratch = y.clone();
    for trial in range {
        let mut rng = trial_rng(seed, point, trial);
        let h = sample_channel(m_r, codebook.m_t, nu, &mut rng);
        let sent = rng.random_range(0..codebook.len());
        convolve_into(&codebook.words[sent], t, &h, &mut y);
        add_noise(&mut y, sigma2, &mut rng);
        let got = decode_with(&y, &h, codebook, &mut scratch);
        tally.trials += 1;
        if got != sent {
            tally.errors += 1;
            for (l, e) in tally.layer_errors.iter_mut().enumerate() {
                *e += u64::from(codebook.messages[got][l] != codebook.messages[sent][l]);
            }
        }
    }
    tally
}

/// Simulates one noise level: trials in fixed-size batches until `max_trials`
/// or `target_errors` is reached.
#[allow(clippy::too_many_arguments)]
pub fn simulate_point(
    codebook: &Codebook,
    m_r: usize,
    nu: usize,
    sigma2: f64,
    max_trials: u64,
    batch: u64,
    target_errors: Option<u64>,
    seed: u64,
    point: u64,
    exec: Execution,
) -> (u64, u64, Vec<u64>) {
    let mut total = Tally::new(codebook.layers());
    let batch = batch.max(1);
    while total.trials < max_trials && target_errors.is_none_or(|e| total.errors < e) {
        let start = total.trials;
        let n = batch.min(max_trials - start);
        let part = chunked_reduce(
            exec,
            n,
            (n / 64).max(64),
            Tally::new(codebook.layers()),
            |r| run_trials(codebook, m_r, nu, sigma2, seed, point, start + r.start..start + r.end),
            Tally::merge,
        );
        total = total.merge(part);
    }
    (total.trials, total.errors, total.layer_errors)
}

/// Monte Carlo over the SNR grid. The codebook is normalized first.
pub fn run_monte_carlo(codebook: &Codebook, cfg: &SimConfig, exec: Execution) -> Result<SimResult, ChannelError> {
    cfg.validate()?;
    if codebook.is_empty() {
        return Err(ChannelError::EmptyCodebook);
    }
    if codebook.tail < cfg.nu {
        return Err(ChannelError::ShapeMismatch(format!(
            "codebook tail {} shorter than channel memory {}",
            codebook.tail, cfg.nu
        )));
    }
    let cb = codebook.normalized();
    let points = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(k, &snr_db)| {
            let sigma2 = noise_variance(snr_db);
            let (trials, errors, layer_errors) = simulate_point(
                &cb,
                cfg.m_r,
                cfg.nu,
                sigma2,
                cfg.trials_per_snr,
                cfg.batch,
                cfg.target_errors,
                cfg.seed,
                k as u64,
                exec,
            );
            SnrPoint { snr_db, sigma2, trials, errors, pe: errors as f64 / trials as f64, layer_errors }
        })
        .collect::<Vec<_>>();
    let window = SlopeWindow { min_errors: cfg.min_errors, ..cfg.window };
    let slope = estimate_slope(&points, &window).ok();
    Ok(SimResult { points, energy_per_use: cb.energy_per_use(), slope })
}

/// Negated least-squares slope of `log10 Pe` against `log10 SNR` over points
/// inside the window.
pub fn estimate_slope(points: &[SnrPoint], window: &SlopeWindow) -> Result<SlopeFit, ChannelError> {
    let used: Vec<&SnrPoint> = points
        .iter()
        .filter(|p| p.errors >= window.min_errors && p.pe >= window.pe_min && p.pe <= window.pe_max && p.pe > 0.0)
        .collect();
    if used.len() < 2 {
        return Err(ChannelError::InsufficientPoints { found: used.len() });
    }
    let xs: Vec<f64> = used.iter().map(|p| p.snr_db / 10.0).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.pe.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(ChannelError::InsufficientPoints { found: 1 });
    }
    let b = sxy / sxx;
    Ok(SlopeFit { slope: -b, intercept: my - b * mx, snr_db: used.iter().map(|p| p.snr_db).collect() })
}

/// CSV with one row per SNR point and layer.
pub fn result_csv(result: &SimResult) -> String {
    let mut s = String::from("snr_db,trials,errors,pe,layer,layer_errors\n");
    for p in &result.points {
        for (l, e) in p.layer_errors.iter().enumerate() {
            s.push_str(&format!("{:.3},{},{},{:.6e},{},{}\n", p.snr_db, p.trials, p.errors, p.pe, l, e));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_channel_passes_input() {
        let h = ChannelRealization { m_r: 2, m_t: 2, taps: vec![vec![c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]] };
        let x: Vec<Complex64> = (0..6).map(|i| c(i as f64, -(i as f64))).collect();
        let mut rng = trial_rng(1, 0, 0);
        assert_eq!(transmit(&x, 3, &h, 0.0, &mut rng).unwrap(), x);
    }

    #[test]
    fn two_tap_convolution() {
        let h = ChannelRealization { m_r: 1, m_t: 1, taps: vec![vec![c(1., 0.)], vec![c(1., 0.)]] };
        let x = vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let y = convolve(&x, 4, &h).unwrap();
        assert_eq!(y, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(convolve(&x, 3, &h), Err(ChannelError::ShapeMismatch(_))));
    }

    #[test]
    fn slope_of_power_laws() {
        let pts = |f: &dyn Fn(f64) -> f64| -> Vec<SnrPoint> {
            (0..6)
                .map(|i| {
                    let snr_db = 10.0 + 2.0 * i as f64;
                    let pe = f(10f64.powf(snr_db / 10.0));
                    SnrPoint { snr_db, sigma2: 0.0, trials: 1, errors: 1000, pe, layer_errors: vec![] }
                })
                .collect()
        };
        let w = SlopeWindow { pe_min: 0.0, pe_max: 1.0, min_errors: 1 };
        let fit = estimate_slope(&pts(&|s| s.powi(-4)), &w).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-9);
        let fit = estimate_slope(&pts(&|s| 0.3 * s.powi(-2)), &w).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!(matches!(
            estimate_slope(&pts(&|s| s.powi(-4))[..1], &w),
            Err(ChannelError::InsufficientPoints { found: 1 })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SimConfig {
            snr_grid_db: vec![0.0, 5.0],
            trials_per_snr: 10,
            seed: 0,
            min_errors: 1,
            target_errors: None,
            batch: 10,
            m_r: 1,
            nu: 0,
            window: SlopeWindow::default(),
        };
        assert!(cfg.validate().is_ok());
        cfg.trials_per_snr = 0;
        assert!(cfg.validate().is_err());
        cfg.trials_per_snr = 1;
        cfg.snr_grid_db = vec![5.0, 5.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn codebook_rejects_bad_tail() {
        let w = vec![vec![c(0., 0.), c(1., 0.)]];
        assert!(matches!(Codebook::new(1, 2, 1, w, vec![vec![0]]), Err(ChannelError::NonZeroTail { .. })));
    }
}
