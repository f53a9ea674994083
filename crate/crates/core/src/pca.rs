//! Reference PCA through the SVD. No centering is applied.

use crate::error::{shape_err, Result};
use crate::model::{Deflation, FactorModel, Method, ScoreMode};
use crate::numerics::{svd, Matrix};

/// `P` = first `a` right singular vectors of `x`, `T = X P`.
pub fn fit_pca(x: &Matrix, a: usize) -> Result<FactorModel> {
    let max = x.nrows().min(x.ncols());
    if a == 0 || a > max {
        return Err(shape_err(format!(
            "component count {a} outside 1..={max} for a {}x{} matrix",
            x.nrows(),
            x.ncols()
        )));
    }
    let s = svd(x)?;
    let loadings = s.v.columns(0, a).into_owned();
    let scores = x * &loadings;
    Ok(FactorModel {
        scores,
        loadings,
        aux_loadings: None,
        method: Method::Pca,
        deflation: Deflation::None,
        score_mode: ScoreMode::Naive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{macl, macs, stats_report};
    use crate::numerics::{sum_of_squares, GaussianStream};
    use crate::simgen::{gen_nonorthogonal_spectra, gen_orthogonal_spectra};

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut g = GaussianStream::new(seed);
        Matrix::from_fn(rows, cols, |_, _| g.next_normal())
    }

    #[test]
    fn orthogonal_spectra_rank_two() {
        let d = gen_orthogonal_spectra();
        let m = fit_pca(&d.x, 2).unwrap();
        let e = m.residuals(&d.x).unwrap();
        assert!(e.norm() <= 1e-10);
    }

    #[test]
    fn nonorthogonal_spectra_rank_three() {
        let d = gen_nonorthogonal_spectra();
        let m = fit_pca(&d.x, 3).unwrap();
        assert!(m.residuals(&d.x).unwrap().norm() <= 1e-10);
        assert!(fit_pca(&d.x, 2).unwrap().residuals(&d.x).unwrap().norm() > 1e-3);
    }

    #[test]
    fn full_rank_reconstruction_and_totals() {
        let x = random(6, 4, 3);
        let m = fit_pca(&x, 4).unwrap();
        let r = stats_report(&x, &m).unwrap();
        assert!((r.tot_pt - 1.0).abs() < 1e-10);
        assert!(r.rss < 1e-20);
    }

    #[test]
    fn captured_variance_is_top_singular_energy() {
        let x = random(8, 5, 4);
        let s = svd(&x).unwrap();
        let m = fit_pca(&x, 2).unwrap();
        let captured = sum_of_squares(&m.scores);
        let expected: f64 = s.singular_values.iter().take(2).map(|v| v * v).sum();
        assert!((captured - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn uncorrelated_scores_and_orthonormal_loadings() {
        for seed in 0..5 {
            let x = random(10, 7, 20 + seed);
            let m = fit_pca(&x, 3).unwrap();
            assert!(macs(&m.scores).unwrap() < 1e-10);
            assert!(macl(&m.loadings).unwrap() < 1e-10);
            let ptp = m.loadings.transpose() * &m.loadings;
            assert!((ptp - Matrix::identity(3, 3)).abs().max() < 1e-10);
            let r = stats_report(&x, &m).unwrap();
            assert!((r.tot_qr - r.tot_t).abs() < 1e-10);
            assert!((r.tot_t - r.tot_pt).abs() < 1e-10);
        }
    }

    #[test]
    fn component_count_checked() {
        let x = random(3, 5, 1);
        assert!(fit_pca(&x, 0).is_err());
        assert!(fit_pca(&x, 4).is_err());
        assert!(fit_pca(&x, 3).is_ok());
    }
}
