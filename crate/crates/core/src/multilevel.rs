//! Multi-level (diversity-embedded) space-time codes.
//!
//! Layer `l` contributes bit `l` of every label. Each layer draws a binary
//! `M_t x T` codeword from its own set; the per-entry labels are mapped through
//! a PSK/QAM labeling with `L` equal to the number of layers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmat::rank_of_rows;
use crate::constellation::{ConstellationError, MapperConfig};
use crate::par::{chunked_reduce, map_collect, Execution};
use crate::rank_codes::{CodeError, CodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultilevelError {
    #[error("message index {index} out of range for layer {layer} ({size} codewords)")]
    IndexOutOfRange { layer: usize, index: usize, size: usize },
    #[error("incompatible layers: {0}")]
    IncompatibleLayerParams(String),
    #[error("joint codebook of {size} codewords exceeds the limit of {limit}")]
    CodebookTooLarge { size: u128, limit: u64 },
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// One layer: a list of zero-tailed binary codewords (rows as bit masks) and
/// the diversity parameter `d_l` it is meant to guarantee.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub m_t: usize,
    pub t: u32,
    pub nu: usize,
    pub d: usize,
    /// Block length needed for the guarantee, if known.
    pub t_thr: Option<u64>,
    pub codewords: Vec<Vec<u64>>,
}

impl LayerSpec {
    /// All members of an ISI code set, in index order.
    pub fn from_code_set(code: &CodeSet, limit: u64) -> Result<Self, MultilevelError> {
        let p = code.params();
        let n = code.len().filter(|&n| n <= limit).ok_or(CodeError::EnumerationTooLarge {
            dimension: code.dimension(),
            limit,
        })?;
        Ok(LayerSpec {
            m_t: p.m_t,
            t: p.t,
            nu: p.nu,
            d: p.d(),
            t_thr: Some(p.t_thr()),
            codewords: (0..n)
                .map(|i| code.codeword_rows(i).iter().map(|&r| r as u64).collect())
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// `R_l = log2 |set| / T` in bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.t as f64
    }
}

/// An encoded codeword: `X1` row-major (`M_t x T`), the label matrix and the
/// per-layer message indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeCodeword {
    pub m_t: usize,
    pub t: u32,
    pub x1: Vec<Complex64>,
    pub labels: Vec<u32>,
    pub messages: Vec<usize>,
}

/// Checks that the layers can be stacked under `mapper`.
pub fn check_layers(layers: &[LayerSpec], mapper: &MapperConfig) -> Result<(), MultilevelError> {
    let bad = |s: String| Err(MultilevelError::IncompatibleLayerParams(s));
    if layers.is_empty() {
        return bad("no layers".into());
    }
    if layers.len() != mapper.levels as usize {
        return bad(format!("{} layers but the constellation has L = {}", layers.len(), mapper.levels));
    }
    let (m_t, t, nu) = (layers[0].m_t, layers[0].t, layers[0].nu);
    if t > 64 {
        return bad(format!("block length {t} exceeds 64"));
    }
    for (l, layer) in layers.iter().enumerate() {
        if (layer.m_t, layer.t, layer.nu) != (m_t, t, nu) {
            return bad(format!("layer {l} has (M_t, T, nu) = ({}, {}, {})", layer.m_t, layer.t, layer.nu));
        }
        if layer.is_empty() {
            return bad(format!("layer {l} is empty"));
        }
        if layer.codewords.iter().any(|c| c.len() != m_t) {
            return bad(format!("layer {l} has a codeword with the wrong number of rows"));
        }
    }
    // Mixed-diversity layers: the block length must satisfy every layer's threshold.
    if let Some(max_thr) = layers.iter().filter_map(|l| l.t_thr).max() {
        if (t as u64) < max_thr {
            return bad(format!("T = {t} below the largest layer threshold {max_thr}"));
        }
    }
    Ok(())
}

/// Stacks the selected layer codewords into labels and maps them.
pub fn encode(layers: &[LayerSpec], messages: &[usize], mapper: &MapperConfig) -> Result<SpaceTimeCodeword, MultilevelError> {
    check_layers(layers, mapper)?;
    if messages.len() != layers.len() {
        return Err(MultilevelError::IncompatibleLayerParams(format!(
            "{} messages for {} layers",
            messages.len(),
            layers.len()
        )));
    }
    let (m_t, t) = (layers[0].m_t, layers[0].t as usize);
    let mut labels = vec![0u32; m_t * t];
    for (l, (layer, &msg)) in layers.iter().zip(messages).enumerate() {
        let cw = layer.codewords.get(msg).ok_or(MultilevelError::IndexOutOfRange {
            layer: l,
            index: msg,
            size: layer.len(),
        })?;
        for (k, &row) in cw.iter().enumerate() {
            for c in 0..t {
                labels[k * t + c] |= ((row >> c & 1) as u32) << l;
            }
        }
    }
    Ok(SpaceTimeCodeword {
        m_t,
        t: t as u32,
        x1: mapper.map_matrix(&labels)?,
        labels,
        messages: messages.to_vec(),
    })
}

/// Per-layer messages of joint index `j`; layer 0 is most significant.
pub fn split_joint_index(layers: &[LayerSpec], mut j: usize) -> Vec<usize> {
    let mut out = vec![0; layers.len()];
    for (l, layer) in layers.iter().enumerate().rev() {
        out[l] = j % layer.len();
        j /= layer.len();
    }
    out
}

/// Every joint codeword in lexicographic message order.
pub fn full_codebook(
    layers: &[LayerSpec],
    mapper: &MapperConfig,
    limit: u64,
    exec: Execution,
) -> Result<Vec<SpaceTimeCodeword>, MultilevelError> {
    check_layers(layers, mapper)?;
    let size: u128 = layers.iter().map(|l| l.len() as u128).product();
    if size > limit as u128 {
        return Err(MultilevelError::CodebookTooLarge { size, limit });
    }
    map_collect(exec, size as usize, |j| encode(layers, &split_joint_index(layers, j), mapper))
        .into_iter()
        .collect()
}

/// Minimum over distinct codeword pairs of one layer of
/// `rank(Theta(K_a) - Theta(K_b))` over GF(2).
pub fn layer_min_pairwise_rank(layer: &LayerSpec, max_pairs: u64, exec: Execution) -> Result<Option<usize>, MultilevelError> {
    let n = layer.len() as u64;
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs > max_pairs {
        return Err(MultilevelError::CodebookTooLarge { size: pairs as u128, limit: max_pairs });
    }
    let nu = layer.nu;
    let rank_of = |a: &[u64], b: &[u64]| {
        let mut buf = Vec::with_capacity(a.len() * (nu + 1));
        for r in 0..=nu {
            buf.extend(a.iter().zip(b).map(|(x, y)| (x ^ y) << r));
        }
        rank_of_rows(&mut buf)
    };
    Ok(chunked_reduce(
        exec,
        n,
        1,
        None,
        |range| {
            let mut best: Option<usize> = None;
            for i in range {
                for j in i + 1..n {
                    let r = rank_of(&layer.codewords[i as usize], &layer.codewords[j as usize]);
                    best = Some(best.map_or(r, |b| b.min(r)));
                }
            }
            best
        },
        |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedRankReport {
    /// `(min pairwise lifted rank, required d_l (nu+1))` per layer.
    pub layers: Vec<(Option<usize>, usize)>,
}

impl EmbeddedRankReport {
    pub fn holds(&self) -> bool {
        self.layers.iter().all(|&(m, req)| m.is_none_or(|m| m >= req))
    }
}

/// Binary premise of the embedded diversity guarantee: in every layer, two
/// different codewords differ by a matrix whose lift has rank `>= d_l (nu+1)`.
pub fn verify_embedded_ranks(layers: &[LayerSpec], max_pairs: u64, exec: Execution) -> Result<EmbeddedRankReport, MultilevelError> {
    let mut out = Vec::new();
    for layer in layers {
        out.push((layer_min_pairwise_rank(layer, max_pairs, exec)?, layer.d * (layer.nu + 1)));
    }
    Ok(EmbeddedRankReport { layers: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2m::FieldContext;
    use crate::rank_codes::CodeParams;

    fn ex3_layer() -> LayerSpec {
        let ctx = FieldContext::new(5, 0x37).unwrap();
        let code = CodeSet::new(&ctx, CodeParams::isi(2, 1, 5, 1).unwrap()).unwrap();
        LayerSpec::from_code_set(&code, 1 << 10).unwrap()
    }

    #[test]
    fn zero_messages_give_zero_codeword() {
        let layer = ex3_layer();
        let cw = encode(&[layer], &[0], &MapperConfig::psk(1).unwrap()).unwrap();
        assert!(cw.x1.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn layer_count_must_match() {
        let layer = ex3_layer();
        let psk1 = MapperConfig::psk(1).unwrap();
        assert!(matches!(
            full_codebook(&[layer.clone(), layer.clone()], &psk1, 1000, Execution::Sequential),
            Err(MultilevelError::IncompatibleLayerParams(_))
        ));
        assert!(matches!(
            encode(&[layer], &[8], &psk1),
            Err(MultilevelError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn joint_index_order() {
        let layer = ex3_layer();
        let layers = [layer.clone(), layer];
        assert_eq!(split_joint_index(&layers, 0), vec![0, 0]);
        assert_eq!(split_joint_index(&layers, 1), vec![0, 1]);
        assert_eq!(split_joint_index(&layers, 8), vec![1, 0]);
        assert_eq!(split_joint_index(&layers, 63), vec![7, 7]);
    }

    #[test]
    fn rate_of_example_layer() {
        assert!((ex3_layer().rate() - 3.0 / 5.0).abs() < 1e-12);
    }
}
