//! Text formats for code sets, codebooks and trellis generators.
//!
//! Every file starts with a `# manifest: {json}` line. Other lines starting
//! with `#` and anything after a `#` on a data line are comments.

use std::fmt::Write as _;
use std::path::Path;

use isicode::channel::Codebook;
use isicode::rank_codes::{codeword_rows, CodeParams, CodeSet, EvalMode, LinearizedPolynomial};
use isicode::trellis::{build_generator, TrellisGenerator};
use isicode::FieldContext;
use num_complex::Complex64;

use crate::error::CliError;
use crate::manifest::Manifest;

/// Data lines with their 1-based line numbers, comments stripped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, tok: Option<&str>, what: &str) -> Result<T, CliError> {
    tok.and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(path, line, format!("expected {what}")))
}

pub fn row_string(row: u64, t: usize) -> String {
    (0..t).map(|c| if row >> c & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_row(s: &str, t: usize) -> Option<u64> {
    if s.len() != t {
        return None;
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (c, b)| match b {
        b'0' => Some(acc),
        b'1' => Some(acc | 1 << c),
        _ => None,
    })
}

/// A code set file: header parameters plus every member.
#[derive(Debug, Clone)]
pub struct CodeSetFile {
    pub params: CodeParams,
    pub poly: u64,
    /// `(coefficient bits of f, codeword rows)` in index order.
    pub members: Vec<(u128, Vec<u64>)>,
}

impl CodeSetFile {
    pub fn ctx(&self) -> Result<FieldContext, CliError> {
        Ok(FieldContext::new(self.params.t, self.poly)?)
    }
}

pub fn write_code_set(manifest: &Manifest, code: &CodeSet, limit: u64) -> Result<String, CliError> {
    let p = code.params();
    let ctx = code.ctx();
    let members = code.enumerate(limit)?;
    let mut s = manifest.comment_line();
    s.push_str("# M_t nu T R prim_poly_hex eval_mode\n");
    writeln!(s, "{} {} {} {} {:x} {}", p.m_t, p.nu, p.t, p.r, ctx.poly(), p.mode).unwrap();
    writeln!(s, "# dimension {}, {} codewords", code.dimension(), code.len().unwrap_or(0)).unwrap();
    s.push_str("# index f_hex rows (column 0 first)\n");
    for (i, f) in members {
        write!(s, "{i} {:x}", f.to_bits(p.t)).unwrap();
        for row in code.codeword_rows(i) {
            write!(s, " {}", row_string(row as u64, p.t as usize)).unwrap();
        }
        if p.r == 1 && p.t <= 16 {
            let c = f.coeffs[0];
            match (1..=ctx.group_order()).find(|&k| ctx.alpha_pow(k as i64) == c) {
                Some(k) => write!(s, " # alpha^{k}").unwrap(),
                None => s.push_str(" # 0"),
            }
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn read_code_set(path: &Path, text: &str) -> Result<CodeSetFile, CliError> {
    let mut lines = data_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 0, "missing header"))?;
    let mut tok = header.split_whitespace();
    let m_t: usize = field(path, ln, tok.next(), "M_t")?;
    let nu: usize = field(path, ln, tok.next(), "nu")?;
    let t: u32 = field(path, ln, tok.next(), "T")?;
    let r: usize = field(path, ln, tok.next(), "R")?;
    let poly = tok
        .next()
        .and_then(|s| u64::from_str_radix(s, 16).ok())
        .ok_or_else(|| parse_err(path, ln, "expected prim_poly_hex"))?;
    let mode: EvalMode = field(path, ln, tok.next(), "eval_mode")?;
    let params = CodeParams::new(m_t, 1, nu, t, r, mode).map_err(|e| parse_err(path, ln, e.to_string()))?;
    let mut members = Vec::new();
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        let index: usize = field(path, ln, tok.next(), "index")?;
        if index != members.len() {
            return Err(parse_err(path, ln, format!("expected index {}", members.len())));
        }
        let f = tok
            .next()
            .and_then(|s| u128::from_str_radix(s, 16).ok())
            .ok_or_else(|| parse_err(path, ln, "expected f_hex"))?;
        let rows = (0..m_t)
            .map(|_| tok.next().and_then(|s| parse_row(s, t as usize)))
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(|| parse_err(path, ln, format!("expected {m_t} rows of {t} bits")))?;
        if tok.next().is_some() {
            return Err(parse_err(path, ln, "trailing tokens"));
        }
        members.push((f, rows));
    }
    if members.is_empty() {
        return Err(parse_err(path, 0, "no codewords"));
    }
    Ok(CodeSetFile { params, poly, members })
}

/// Recomputes every listed codeword from its polynomial.
pub fn check_code_set(path: &Path, file: &CodeSetFile, ctx: &FieldContext) -> Result<(), CliError> {
    let p = &file.params;
    let limit = if p.r * p.t as usize >= 128 { u128::MAX } else { (1u128 << (p.r * p.t as usize)) - 1 };
    for (i, (f, rows)) in file.members.iter().enumerate() {
        if *f > limit {
            return Err(parse_err(path, 0, format!("codeword {i}: f_hex out of range")));
        }
        let poly = LinearizedPolynomial::from_bits(*f, p.t, p.r);
        let expect: Vec<u64> = codeword_rows(ctx, p, &poly).iter().map(|&r| r as u64).collect();
        if &expect != rows {
            return Err(parse_err(path, 0, format!("codeword {i} does not match its polynomial")));
        }
    }
    Ok(())
}

pub fn write_codebook(manifest: &Manifest, cb: &Codebook, constellation: &str) -> String {
    let mut s = manifest.comment_line();
    s.push_str("# M_t T tail layers constellation count\n");
    writeln!(s, "{} {} {} {} {} {}", cb.m_t, cb.t, cb.tail, cb.layers(), constellation, cb.len()).unwrap();
    s.push_str("# layer messages, then X1 row-major as re im pairs\n");
    for (w, m) in cb.words.iter().zip(&cb.messages) {
        let msgs: Vec<String> = m.iter().map(|x| x.to_string()).collect();
        s.push_str(&msgs.join(","));
        for z in w {
            write!(s, " {:?} {:?}", z.re, z.im).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn read_codebook(path: &Path, text: &str) -> Result<Codebook, CliError> {
    let mut lines = data_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 0, "missing header"))?;
    let mut tok = header.split_whitespace();
    let m_t: usize = field(path, ln, tok.next(), "M_t")?;
    let t: usize = field(path, ln, tok.next(), "T")?;
    let tail: usize = field(path, ln, tok.next(), "tail")?;
    let layers: usize = field(path, ln, tok.next(), "layers")?;
    let _constellation: String = field(path, ln, tok.next(), "constellation")?;
    let count: usize = field(path, ln, tok.next(), "count")?;
    let mut words = Vec::with_capacity(count);
    let mut messages = Vec::with_capacity(count);
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        let m = tok
            .next()
            .and_then(|s| s.split(',').map(|x| x.parse().ok()).collect::<Option<Vec<usize>>>())
            .filter(|m| m.len() == layers)
            .ok_or_else(|| parse_err(path, ln, format!("expected {layers} comma-separated messages")))?;
        let vals = tok.map(|s| s.parse::<f64>().ok()).collect::<Option<Vec<f64>>>();
        let vals = vals
            .filter(|v| v.len() == 2 * m_t * t && v.iter().all(|x| x.is_finite()))
            .ok_or_else(|| parse_err(path, ln, format!("expected {} finite numbers", 2 * m_t * t)))?;
        words.push(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
        messages.push(m);
    }
    if words.len() != count {
        return Err(parse_err(path, 0, format!("header says {count} codewords, found {}", words.len())));
    }
    Codebook::new(m_t, t, tail, words, messages).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn write_trellis(manifest: &Manifest, gen: &TrellisGenerator) -> String {
    let mut s = manifest.comment_line();
    writeln!(s, "# effective rate {} bits per transmission", gen.effective_rate()).unwrap();
    writeln!(s, "# rate per input stream {}", gen.rate_per_stream()).unwrap();
    writeln!(s, "# message bits {}, message degree bound {}", gen.message_bits(), gen.message_degree_bound()).unwrap();
    s.push_str("# M_t nu R T, then one row of M_t degrees per input\n");
    s.push_str(&gen.export());
    s
}

pub fn read_trellis(path: &Path, text: &str) -> Result<TrellisGenerator, CliError> {
    let mut lines = data_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 0, "missing header"))?;
    let mut tok = header.split_whitespace();
    let m_t: usize = field(path, ln, tok.next(), "M_t")?;
    let nu: usize = field(path, ln, tok.next(), "nu")?;
    let r: usize = field(path, ln, tok.next(), "R")?;
    let t: u32 = field(path, ln, tok.next(), "T")?;
    let gen = build_generator(m_t, r, nu, t).map_err(|e| parse_err(path, ln, e.to_string()))?;
    let mut degrees = Vec::new();
    for (ln, line) in lines {
        let row = line
            .split_whitespace()
            .map(|s| s.parse().ok())
            .collect::<Option<Vec<u32>>>()
            .filter(|r| r.len() == m_t)
            .ok_or_else(|| parse_err(path, ln, format!("expected {m_t} degrees")))?;
        degrees.push(row);
    }
    if degrees != gen.degrees {
        return Err(parse_err(path, 0, "degree matrix does not match the construction"));
    }
    Ok(gen)
}
