use isicode::multilevel::{encode, full_codebook, verify_embedded_ranks, LayerSpec, MultilevelError};
use isicode::rank_codes::{CodeParams, CodeSet};
use isicode::{Execution, FieldContext, MapperConfig};

fn layer(t: u32, poly: u64, r: usize) -> LayerSpec {
    let ctx = FieldContext::new(t, poly).unwrap();
    LayerSpec::from_code_set(&CodeSet::new(&ctx, CodeParams::isi(2, 1, t, r).unwrap()).unwrap(), 1 << 16).unwrap()
}

#[test]
fn two_layer_qam_codebook() {
    let l = layer(5, 0x37, 1);
    let layers = [l.clone(), l];
    let qam = MapperConfig::qam(2).unwrap();
    let book = full_codebook(&layers, &qam, 1 << 10, Execution::Parallel).unwrap();
    assert_eq!(book.len(), 64);
    let seq = full_codebook(&layers, &qam, 1 << 10, Execution::Sequential).unwrap();
    assert_eq!(book, seq);
    // Tails stay silent and the labels combine bits from both layers.
    for cw in &book {
        assert!(cw.x1[4].norm() == 0.0 && cw.x1[9].norm() == 0.0);
    }
    let cw = encode(&layers, &[1, 2], &qam).unwrap();
    assert_eq!(&cw.labels[..5], &[1, 2, 0, 0, 0]);
    assert_eq!(book[8 + 2], cw);
    assert!(verify_embedded_ranks(&layers, 1 << 20, Execution::Parallel).unwrap().holds());
}

#[test]
fn mixed_diversity_layers_need_largest_threshold() {
    let full = layer(8, 0x11d, 1);
    let half = layer(8, 0x11d, 2);
    let report = verify_embedded_ranks(std::slice::from_ref(&full), 1 << 12, Execution::Parallel).unwrap();
    assert_eq!(report.layers[0], (Some(4), 4));
    assert!(report.holds());
    assert!(matches!(
        verify_embedded_ranks(std::slice::from_ref(&half), 1 << 12, Execution::Parallel),
        Err(MultilevelError::CodebookTooLarge { .. })
    ));
    // Shrinking the block length below a layer threshold is rejected.
    let mut short = half;
    short.t_thr = Some(9);
    let err = full_codebook(&[full, short], &MapperConfig::qam(2).unwrap(), 1 << 30, Execution::Sequential).unwrap_err();
    assert!(matches!(err, MultilevelError::IncompatibleLayerParams(_)));
}
