use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use isicode::channel::{result_csv, run_monte_carlo, Codebook, SimConfig};
use isicode::fmat::FieldMatrix;
use isicode::gf2m::default_primitive_poly;
use isicode::minimal_basis::{cauchy_binet_check, detp_required_t, scan_code_set, verify_detp, GammaVector};
use isicode::multilevel::{full_codebook, LayerSpec};
use isicode::par::chunked_reduce;
use isicode::rank_codes::{lifted_rank_wide, CodeParams, CodeSet, EvalMode};
use isicode::trellis::{build_generator, verify_trellis_rank};
use isicode::{Execution, FieldContext, FieldElement, FieldError, MapperConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::formats::{self, row_string};
use crate::manifest::Manifest;

/// Whether every checked guarantee held.
pub type Verdict = bool;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    write(path, &s)
}

fn parse_poly(s: &str) -> Result<u64, CliError> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(digits, 16).map_err(|_| CliError::Usage(format!("invalid hex polynomial `{s}`")))
}

fn field_for(t: u32, poly: Option<&str>) -> Result<FieldContext, CliError> {
    match poly {
        Some(p) => Ok(FieldContext::new(t, parse_poly(p)?)?),
        None => Ok(FieldContext::with_default_poly(t)?),
    }
}

/// Moves an output path into `dir`, keeping its file name.
fn redirect(path: &mut PathBuf, dir: &Path) {
    if let Some(name) = path.file_name() {
        *path = dir.join(name);
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub m_t: usize,
    #[arg(long, default_value_t = 1)]
    pub m_r: usize,
    #[arg(long)]
    pub nu: usize,
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub r: usize,
    /// Primitive polynomial in hex (default: built-in table).
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value = "isi")]
    pub mode: EvalMode,
    /// Largest code set written in full.
    #[arg(long, default_value_t = 1 << 20)]
    pub limit: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a multi-level codebook built from this code set.
    #[arg(long, requires = "constellation")]
    pub codebook: Option<PathBuf>,
    /// Constellation for the codebook, `psk:L` or `qam:L`.
    #[arg(long)]
    pub constellation: Option<String>,
    /// Number of layers (default: the constellation's L).
    #[arg(long)]
    pub layers: Option<usize>,
}

impl ConstructArgs {
    fn redirect(&mut self, dir: &Path) {
        redirect(&mut self.out, dir);
        if let Some(p) = &mut self.codebook {
            redirect(p, dir);
        }
    }
}

pub fn construct(args: &ConstructArgs, exec: Execution) -> Result<Verdict, CliError> {
    construct_as(args, Manifest::new("construct", args), exec)
}

fn construct_as(args: &ConstructArgs, manifest: Manifest, exec: Execution) -> Result<Verdict, CliError> {
    let ctx = field_for(args.t, args.poly.as_deref())?;
    let params = CodeParams::new(args.m_t, args.m_r, args.nu, args.t, args.r, args.mode)?;
    let code = CodeSet::new(&ctx, params)?;
    write(&args.out, &formats::write_code_set(&manifest, &code, args.limit)?)?;
    println!("code set: dimension {}, {} codewords -> {}", code.dimension(), code.len().unwrap_or(0), args.out.display());
    if let Some(path) = &args.codebook {
        let mapper: MapperConfig = args.constellation.as_deref().unwrap_or_default().parse()?;
        let layers = args.layers.unwrap_or(mapper.levels as usize);
        let layer = LayerSpec::from_code_set(&code, args.limit)?;
        let words = full_codebook(&vec![layer; layers], &mapper, args.limit, exec)?;
        let cb = Codebook::from_multilevel(&words, args.nu)?;
        write(path, &formats::write_codebook(&manifest, &cb, &mapper.to_string()))?;
        println!("codebook: {} codewords on {mapper} -> {}", cb.len(), path.display());
    }
    Ok(true)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    Rank,
    Basis,
    Trellis,
    CauchyBinet,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Code set file (rank, basis, cauchy-binet) or trellis generator file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: VerifyMode,
    /// JSON report path.
    #[arg(long)]
    pub report: PathBuf,
    /// Rank to check against (default: the guaranteed rank).
    #[arg(long)]
    pub claimed: Option<usize>,
    /// Largest enumeration for basis and trellis scans.
    #[arg(long, default_value_t = 1 << 20)]
    pub limit: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random instances for the Cauchy-Binet and lifted-generator checks.
    #[arg(long, default_value_t = 500)]
    pub instances: u64,
    /// Random independent sets for the det(P) check.
    #[arg(long, default_value_t = 200)]
    pub detp_instances: u64,
}

pub fn verify(args: &VerifyArgs, exec: Execution) -> Result<Verdict, CliError> {
    verify_as(args, Manifest::new("verify", args), exec)
}

fn verify_as(args: &VerifyArgs, manifest: Manifest, exec: Execution) -> Result<Verdict, CliError> {
    let text = read(&args.input)?;
    let (ok, body) = match args.mode {
        VerifyMode::Rank => verify_rank(args, &text, exec)?,
        VerifyMode::Basis => verify_basis(args, &text, exec)?,
        VerifyMode::Trellis => verify_trellis(args, &text, exec)?,
        VerifyMode::CauchyBinet => verify_cauchy_binet(args, &text)?,
    };
    let mut report = json!({ "manifest": manifest, "holds": ok });
    report.as_object_mut().unwrap().extend(body.as_object().cloned().unwrap_or_default());
    write_json(&args.report, &report)?;
    Ok(ok)
}

fn load_code_set(args: &VerifyArgs, text: &str) -> Result<(formats::CodeSetFile, FieldContext), CliError> {
    let file = formats::read_code_set(&args.input, text)?;
    let ctx = file.ctx()?;
    formats::check_code_set(&args.input, &file, &ctx)?;
    Ok((file, ctx))
}

fn verify_rank(args: &VerifyArgs, text: &str, exec: Execution) -> Result<(Verdict, Value), CliError> {
    let (file, _) = load_code_set(args, text)?;
    let p = file.params;
    let claimed = args.claimed.unwrap_or(p.target_rank());
    let tail = if p.nu == 0 { 0 } else { ((1u64 << p.nu) - 1) << (p.t as usize - p.nu) };
    let full = p.full_rank();
    type Acc = (Option<(usize, usize)>, u64, u64, Vec<u64>);
    let (min, scanned, skipped, histogram) = chunked_reduce(
        exec,
        file.members.len() as u64,
        256,
        (None, 0, 0, vec![0; full + 1]),
        |range| {
            let mut acc: Acc = (None, 0, 0, vec![0; full + 1]);
            for i in range.map(|i| i as usize) {
                let rows = &file.members[i].1;
                if rows.iter().all(|&r| r == 0) {
                    continue;
                }
                if rows.iter().any(|&r| r & tail != 0) {
                    acc.2 += 1;
                    continue;
                }
                let rank = lifted_rank_wide(rows, p.nu);
                acc.1 += 1;
                acc.3[rank] += 1;
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
            a.2 += b.2;
            a.3.iter_mut().zip(&b.3).for_each(|(x, y)| *x += y);
            a
        },
    );
    let ok = min.is_none_or(|m| m.0 >= claimed);
    let witness = min.map(|(rank, i)| {
        let (f, rows) = &file.members[i];
        json!({
            "index": i,
            "f_hex": format!("{f:x}"),
            "rows": rows.iter().map(|&r| row_string(r, p.t as usize)).collect::<Vec<_>>(),
            "lifted_rank": rank,
        })
    });
    println!("rank: min lifted rank {:?} over {scanned} codewords (claimed {claimed}, skipped {skipped})", min.map(|m| m.0));
    if !ok {
        if let Some(w) = &witness {
            println!("witness: {w}");
        }
    }
    Ok((
        ok,
        json!({
            "mode": "rank",
            "params": p,
            "claimed": claimed,
            "min_rank": min.map(|m| m.0),
            "witness": witness,
            "scanned": scanned,
            "skipped": skipped,
            "histogram": histogram,
        }),
    ))
}

fn verify_basis(args: &VerifyArgs, text: &str, exec: Execution) -> Result<(Verdict, Value), CliError> {
    let (file, ctx) = load_code_set(args, text)?;
    let p = file.params;
    if p.mode != EvalMode::Isi {
        return Err(CliError::Usage("basis verification needs an isi code set".into()));
    }
    let code = CodeSet::new(&ctx, p)?;
    let rep = scan_code_set(&code, args.limit, exec)?;
    let allowed = p.r - 1;
    let ok = rep.holds(allowed);
    println!(
        "basis: {} codewords, max d = {} (allowed {allowed}), {} null-space mismatches, {} property failures",
        rep.scanned, rep.max_d, rep.nullspace_mismatches, rep.property_failures
    );
    Ok((ok, json!({ "mode": "basis", "params": p, "max_allowed_d": allowed, "scan": rep })))
}

fn verify_trellis(args: &VerifyArgs, text: &str, exec: Execution) -> Result<(Verdict, Value), CliError> {
    let gen = formats::read_trellis(&args.input, text)?;
    let claimed = args.claimed.unwrap_or((gen.m_t - gen.r + 1) * (gen.nu + 1));
    let rep = verify_trellis_rank(&gen, claimed, args.limit, exec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = gen.message_len().max(0) as u32;
    let mut lift_mismatches = 0u64;
    for _ in 0..args.instances {
        let u: Vec<u64> = (0..gen.r).map(|_| if n == 0 { 0 } else { rng.random::<u64>() >> (64 - n) }).collect();
        let direct = isicode::rank_codes::theta_lift(&gen.encode(&u)?, gen.nu)?;
        if direct != gen.lifted_product(&u)? {
            lift_mismatches += 1;
        }
    }
    let ok = rep.holds() && lift_mismatches == 0;
    println!(
        "trellis: min lifted rank {:?} over {} messages (claimed {claimed}); rate {}; {lift_mismatches} lift mismatches",
        rep.min_rank,
        rep.scanned,
        gen.effective_rate()
    );
    Ok((
        ok,
        json!({
            "mode": "trellis",
            "generator": gen,
            "effective_rate": gen.effective_rate().to_string(),
            "rate_per_stream": gen.rate_per_stream().to_string(),
            "report": rep,
            "lift_instances": args.instances,
            "lift_mismatches": lift_mismatches,
        }),
    ))
}

fn verify_cauchy_binet(args: &VerifyArgs, text: &str) -> Result<(Verdict, Value), CliError> {
    let (file, ctx) = load_code_set(args, text)?;
    let p = file.params;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let random = |rows: usize, cols: usize, rng: &mut ChaCha8Rng| {
        FieldMatrix::from_fn(rows, cols, |_, _| ctx.element(rng.random_range(0..ctx.size())).unwrap())
    };
    let mut cb_failures = 0u64;
    for _ in 0..args.instances {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=n.min(4));
        let a = random(m, n, &mut rng);
        let b = random(n, m, &mut rng);
        if !cauchy_binet_check(&ctx, &a, &b)? {
            cb_failures += 1;
        }
    }
    let required = detp_required_t(p.m_t, p.nu, p.r);
    let (detp_checked, detp_failures) = if (p.t as i64) >= required {
        let mut failures = 0u64;
        for _ in 0..args.detp_instances {
            let vectors = loop {
                let v: Vec<GammaVector> = (0..p.r)
                    .map(|_| {
                        GammaVector(
                            (0..p.m_t)
                                .map(|_| FieldElement::from_bits(rng.random_range(0..1u32 << (p.nu + 1))))
                                .collect(),
                        )
                    })
                    .collect();
                if FieldMatrix::from_fn(p.r, p.m_t, |i, j| v[i].0[j]).rank(&ctx) == p.r {
                    break v;
                }
            };
            if !verify_detp(&ctx, p.nu, &vectors)? {
                failures += 1;
            }
        }
        (args.detp_instances, failures)
    } else {
        (0, 0)
    };
    let ok = cb_failures == 0 && detp_failures == 0;
    println!(
        "cauchy-binet: {cb_failures}/{} failures; det(P): {detp_failures}/{detp_checked} zero (T = {}, required {required})",
        args.instances, p.t
    );
    Ok((
        ok,
        json!({
            "mode": "cauchy-binet",
            "params": p,
            "cauchy_binet_instances": args.instances,
            "cauchy_binet_failures": cb_failures,
            "detp_required_t": required,
            "detp_instances": detp_checked,
            "detp_failures": detp_failures,
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// JSON simulation config.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output; the JSON summary goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
    /// Exit with code 1 unless the fitted slope lies in `LO:HI`.
    #[arg(long)]
    pub expect_slope: Option<String>,
}

impl SimulateArgs {
    fn summary_path(&self) -> PathBuf {
        self.out.with_extension("json")
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected LO:HI, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

pub fn simulate(args: &SimulateArgs, exec: Execution) -> Result<Verdict, CliError> {
    simulate_as(args, Manifest::new("simulate", args), exec)
}

fn simulate_as(args: &SimulateArgs, manifest: Manifest, exec: Execution) -> Result<Verdict, CliError> {
    let expect = args.expect_slope.as_deref().map(parse_range).transpose()?;
    let cb = formats::read_codebook(&args.codebook, &read(&args.codebook)?)?;
    let cfg_text = read(&args.config)?;
    let cfg: SimConfig = serde_json::from_str(&cfg_text).map_err(|e| CliError::Parse {
        path: args.config.display().to_string(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let result = run_monte_carlo(&cb, &cfg, exec)?;
    write(&args.out, &format!("{}{}", manifest.comment_line(), result_csv(&result)))?;
    let slope = result.slope.as_ref().map(|f| f.slope);
    let ok = match expect {
        Some((lo, hi)) => slope.is_some_and(|s| (lo..=hi).contains(&s)),
        None => true,
    };
    write_json(
        &args.summary_path(),
        &json!({
            "manifest": manifest,
            "config": cfg,
            "points": result.points,
            "energy_per_use": { "payload": result.energy_per_use.0, "with_tail": result.energy_per_use.1 },
            "slope": result.slope,
            "expected_slope": expect,
            "holds": ok,
        }),
    )?;
    for p in &result.points {
        println!("snr {:>6.2} dB: {} errors / {} trials (pe {:.3e})", p.snr_db, p.errors, p.trials, p.pe);
    }
    match &result.slope {
        Some(f) => println!("slope {:.3} over {:?} dB", f.slope, f.snr_db),
        None => println!("slope: not enough qualifying points"),
    }
    Ok(ok)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TrellisArgs {
    #[arg(long)]
    pub m_t: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub nu: usize,
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn trellis(args: &TrellisArgs) -> Result<Verdict, CliError> {
    trellis_as(args, Manifest::new("trellis", args))
}

fn trellis_as(args: &TrellisArgs, manifest: Manifest) -> Result<Verdict, CliError> {
    let gen = build_generator(args.m_t, args.r, args.nu, args.t)?;
    write(&args.out, &formats::write_trellis(&manifest, &gen))?;
    println!(
        "trellis: degrees {:?}, effective rate {} bits/transmission -> {}",
        gen.degrees,
        gen.effective_rate(),
        args.out.display()
    );
    Ok(true)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FieldCheckArgs {
    #[arg(long)]
    pub t: u32,
    /// Polynomial in hex (default: built-in table).
    #[arg(long)]
    pub poly: Option<String>,
    /// Optional JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn field_check(args: &FieldCheckArgs) -> Result<Verdict, CliError> {
    field_check_as(args, Manifest::new("field-check", args))
}

fn field_check_as(args: &FieldCheckArgs, manifest: Manifest) -> Result<Verdict, CliError> {
    let poly = match &args.poly {
        Some(p) => parse_poly(p)?,
        None => default_primitive_poly(args.t).ok_or(FieldError::UnsupportedDegree(args.t))?,
    };
    let (ok, body) = match FieldContext::new(args.t, poly) {
        Ok(ctx) => {
            let dual: Vec<String> = ctx.dual_basis().iter().map(|d| format!("{:x}", d.bits())).collect();
            println!("T = {}, poly {poly:#x}: primitive, order {}", args.t, ctx.group_order());
            println!("dual basis: {}", dual.join(" "));
            (true, json!({ "primitive": true, "order": ctx.group_order(), "dual_basis": dual }))
        }
        Err(FieldError::PolynomialNotPrimitive { order, .. }) => {
            match order {
                Some(o) => println!("T = {}, poly {poly:#x}: not primitive (x has order {o})", args.t),
                None => println!("T = {}, poly {poly:#x}: not primitive (x is not invertible)", args.t),
            }
            (false, json!({ "primitive": false, "order": order }))
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &args.report {
        write_json(path, &json!({ "manifest": manifest, "t": args.t, "poly": format!("{poly:x}"), "result": body }))?;
    }
    Ok(ok)
}

#[derive(Args, Debug, Clone)]
pub struct RerunArgs {
    /// Any output file with an embedded manifest.
    pub file: PathBuf,
    /// Write outputs into this directory instead of the recorded paths. The
    /// recorded manifest is kept, so replayed files match the originals.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn rerun(args: &RerunArgs, exec: Execution) -> Result<Verdict, CliError> {
    let text = read(&args.file)?;
    let m = Manifest::extract(&args.file.display().to_string(), &text)?;
    let bad = |e: serde_json::Error| CliError::Usage(format!("manifest arguments: {e}"));
    let dir = args.out_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|source| CliError::Io { path: d.display().to_string(), source })?;
    }
    let command = m.command.clone();
    match command.as_str() {
        "construct" => {
            let mut a: ConstructArgs = serde_json::from_value(m.args.clone()).map_err(bad)?;
            if let Some(d) = dir {
                a.redirect(d);
            }
            construct_as(&a, m, exec)
        }
        "verify" => {
            let mut a: VerifyArgs = serde_json::from_value(m.args.clone()).map_err(bad)?;
            if let Some(d) = dir {
                redirect(&mut a.report, d);
            }
            verify_as(&a, m, exec)
        }
        "simulate" => {
            let mut a: SimulateArgs = serde_json::from_value(m.args.clone()).map_err(bad)?;
            if let Some(d) = dir {
                redirect(&mut a.out, d);
            }
            simulate_as(&a, m, exec)
        }
        "trellis" => {
            let mut a: TrellisArgs = serde_json::from_value(m.args.clone()).map_err(bad)?;
            if let Some(d) = dir {
                redirect(&mut a.out, d);
            }
            trellis_as(&a, m)
        }
        "field-check" => {
            let mut a: FieldCheckArgs = serde_json::from_value(m.args.clone()).map_err(bad)?;
            if let (Some(d), Some(p)) = (dir, a.report.as_mut()) {
                redirect(p, d);
            }
            field_check_as(&a, m)
        }
        other => Err(CliError::Usage(format!("unknown command `{other}` in manifest"))),
    }
}
