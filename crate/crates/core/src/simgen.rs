//! Noise-free data generators with known sparse factors.

use crate::numerics::{count_nonzero, GaussianStream, Matrix};

/// Ten-point spectral profile used by both fixed examples.
pub const SPECTRAL_SHAPE: [f64; 10] = [0.1, 0.3, 0.5, 0.7, 0.9, 0.9, 0.7, 0.5, 0.3, 0.1];

pub const MONTECARLO_OBSERVATIONS: usize = 50;
pub const MONTECARLO_VARIABLES: usize = 200;
pub const MONTECARLO_COMPONENTS: usize = 5;
/// Loadings whose auxiliary draw falls below this value are zeroed.
pub const MONTECARLO_SPARSITY_CUT: f64 = 1.0;

/// Generated data `X = T P^T` together with its factors.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub x: Matrix,
    pub t_true: Matrix,
    pub p_true: Matrix,
    pub nnz_true: usize,
    pub seed: Option<u64>,
    /// Loading columns that came out all-zero and were redrawn.
    pub redrawn_columns: Vec<usize>,
}

impl SimulatedDataset {
    fn from_factors(t_true: Matrix, p_true: Matrix, seed: Option<u64>) -> Self {
        let x = &t_true * p_true.transpose();
        let nnz_true = count_nonzero(&p_true, 0.0);
        Self {
            x,
            t_true,
            p_true,
            nnz_true,
            seed,
            redrawn_columns: Vec::new(),
        }
    }

    pub fn n_components(&self) -> usize {
        self.p_true.ncols()
    }
}

/// Loading matrix with the spectral shape placed at each start offset.
fn spectral_loadings(n_vars: usize, starts: &[usize]) -> Matrix {
    let mut p = Matrix::zeros(n_vars, starts.len());
    for (j, &s) in starts.iter().enumerate() {
        for (k, &v) in SPECTRAL_SHAPE.iter().enumerate() {
            p[(s + k, j)] = v;
        }
    }
    p
}

/// Two compounds on disjoint variable blocks with orthogonal scores; 5×20, rank 2.
pub fn gen_orthogonal_spectra() -> SimulatedDataset {
    let p = spectral_loadings(20, &[0, 10]);
    #[rustfmt::skip]
    let t = Matrix::from_column_slice(5, 2, &[
        0.5, 0.0, 0.5, 0.0, 0.5,
        0.0, 0.25, 0.0, 0.25, 0.0,
    ]);
    SimulatedDataset::from_factors(t, p, None)
}

/// Three overlapping compounds with correlated scores; 5×20, rank 3.
pub fn gen_nonorthogonal_spectra() -> SimulatedDataset {
    let p = spectral_loadings(20, &[0, 5, 10]);
    #[rustfmt::skip]
    let t = Matrix::from_column_slice(5, 3, &[
        0.5, 0.5, 0.5, 0.5, 0.0,
        0.25, 0.0, 0.25, 0.0, 0.25,
        0.0, 0.125, 0.0, 0.125, 0.0,
    ]);
    SimulatedDataset::from_factors(t, p, None)
}

/// Random sparse factor data: 50×200 with 5 components.
pub fn gen_montecarlo(seed: u64) -> SimulatedDataset {
    gen_montecarlo_sized(
        seed,
        MONTECARLO_OBSERVATIONS,
        MONTECARLO_VARIABLES,
        MONTECARLO_COMPONENTS,
    )
}

/// Draw order from one [`GaussianStream`]: `P` column by column, then the
/// auxiliary mask `W` column by column, then `T` column by column. Entries of
/// `P` with `W < 1` are zeroed. Column `a` (zero-based) of `T` is scaled by
/// `2^-a`. A loading column left with no nonzero entry is redrawn (fresh `P`
/// column, then fresh `W` column) from the continuing stream.
pub fn gen_montecarlo_sized(seed: u64, n_obs: usize, n_vars: usize, n_comp: usize) -> SimulatedDataset {
    let mut g = GaussianStream::new(seed);
    let mut p = Matrix::from_fn(n_vars, n_comp, |_, _| 0.0);
    for j in 0..n_comp {
        for i in 0..n_vars {
            p[(i, j)] = g.next_normal();
        }
    }
    for j in 0..n_comp {
        for i in 0..n_vars {
            if g.next_normal() < MONTECARLO_SPARSITY_CUT {
                p[(i, j)] = 0.0;
            }
        }
    }
    let mut t = Matrix::zeros(n_obs, n_comp);
    for j in 0..n_comp {
        let scale = 0.5f64.powi(j as i32);
        for i in 0..n_obs {
            t[(i, j)] = g.next_normal() * scale;
        }
    }
    let mut redrawn = Vec::new();
    for j in 0..n_comp {
        while p.column(j).iter().all(|&v| v == 0.0) {
            if !redrawn.contains(&j) {
                redrawn.push(j);
            }
            for i in 0..n_vars {
                p[(i, j)] = g.next_normal();
            }
            for i in 0..n_vars {
                if g.next_normal() < MONTECARLO_SPARSITY_CUT {
                    p[(i, j)] = 0.0;
                }
            }
        }
    }
    if !redrawn.is_empty() {
        log::warn!("seed {seed}: redrew all-zero loading columns {redrawn:?}");
    }
    let mut d = SimulatedDataset::from_factors(t, p, Some(seed));
    d.redrawn_columns = redrawn;
    d
}
