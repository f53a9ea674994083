use std::collections::BTreeSet;

use sparsepca::diagnostics::{macl, macs};
use sparsepca::simgen::{gen_nonorthogonal_spectra, gen_orthogonal_spectra};
use sparsepca::{calibrate_sparsity, fit_method, stats_report, Method, ScoreMode, SparsityKnob};

fn support(col: sparsepca::numerics::Vector) -> BTreeSet<usize> {
    col.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1e-12)
        .map(|(i, _)| i)
        .collect()
}

#[test]
fn orthogonal_spectra_are_recovered_exactly() {
    let d = gen_orthogonal_spectra();
    let blocks: Vec<BTreeSet<usize>> = vec![(0..10).collect(), (10..20).collect()];
    for m in Method::SPARSE {
        let c = calibrate_sparsity(m, &d.x, d.nnz_true, 2).unwrap();
        let mut found: Vec<_> = c
            .model
            .loadings
            .column_iter()
            .map(|c| support(c.into_owned()))
            .collect();
        found.sort();
        assert_eq!(found, blocks, "{m}");
        for mode in [ScoreMode::Naive, ScoreMode::Corrected] {
            let model = c.model.in_mode(&d.x, mode).unwrap();
            let r = model.residuals(&d.x).unwrap().norm() / d.x.norm();
            assert!(r <= 1e-6, "{m} {mode}: residual {r}");
        }
    }
}

#[test]
fn nonorthogonal_truth_correlations() {
    let d = gen_nonorthogonal_spectra();
    assert!((macs(&d.t_true).unwrap() - 0.43).abs() <= 0.005);
    assert!((macl(&d.p_true).unwrap() - 0.17).abs() <= 0.005);
}

#[test]
fn corrected_scores_close_the_pt_accounting() {
    let d = gen_nonorthogonal_spectra();
    for m in Method::SPARSE {
        let c = calibrate_sparsity(m, &d.x, d.nnz_true, 3).unwrap();
        let s = stats_report(&d.x, &c.model.with_corrected_scores(&d.x).unwrap()).unwrap();
        assert!((s.tot_pt - 1.0).abs() <= 1e-6, "{m}: {}", s.tot_pt);
    }
}

#[test]
fn orthogonalized_methods_keep_naive_accounting() {
    let d = gen_nonorthogonal_spectra();
    for m in [Method::PmdO, Method::GpcaO] {
        let c = calibrate_sparsity(m, &d.x, d.nnz_true, 3).unwrap();
        let s = stats_report(&d.x, &c.model).unwrap();
        assert!(s.macs <= 1e-9, "{m}: macs {}", s.macs);
        for v in [s.tot_qr, s.tot_t, s.tot_pt] {
            assert!((v - 1.0).abs() <= 1e-6, "{m}: {s:?}");
        }
    }
}

// Ten nonzeros per loading reproduces the published SPCA column to four decimals.
#[test]
fn spca_with_ten_nonzeros_per_loading() {
    let d = gen_nonorthogonal_spectra();
    let model = fit_method(Method::Spca, &d.x, 3, SparsityKnob::Cardinality(10)).unwrap();
    assert_eq!(model.nnz(), 30);
    let naive = stats_report(&d.x, &model).unwrap();
    let corrected = stats_report(&d.x, &model.with_corrected_scores(&d.x).unwrap()).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-4;
    assert!(close(naive.macs, 0.8446), "{naive:?}");
    assert!(close(naive.macl, 0.2124), "{naive:?}");
    assert!(close(naive.tot_qr, 1.2730), "{naive:?}");
    assert!(close(naive.tot_t, 1.7747), "{naive:?}");
    assert!(close(naive.tot_pt, 2.5494), "{naive:?}");
    assert!(close(corrected.tot_qr, 0.8241), "{corrected:?}");
    assert!(close(corrected.tot_t, 0.8606), "{corrected:?}");
}
