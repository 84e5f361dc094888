//! Correlated Brownian paths of the normalised letter indicators and the
//! discretised maximum of their window increments over the max letters.

use crate::error::{Error, Result};
use crate::limits::hermitian::{eigen_hermitian, HermitianMatrix};
use crate::model::Distribution;
use crate::rng::UniformStream;

const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-10;
const FACTOR_RESIDUAL_LIMIT: f64 = 1e-9;

/// Covariance `Σ` of `(1{X=i}/σ_i)_i` and a factor `F` with `F Fᵀ = Σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceFactor {
    pub m: usize,
    /// Row-major `Σ`: 1 on the diagonal, `−p_i p_j/(σ_i σ_j)` elsewhere.
    pub sigma_matrix: Vec<f64>,
    /// Row-major `F`.
    pub factor: Vec<f64>,
}

impl CovarianceFactor {
    pub fn residual(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let fft: f64 = (0..m).map(|k| self.factor[i * m + k] * self.factor[j * m + k]).sum();
                worst = worst.max((fft - self.sigma_matrix[i * m + j]).abs());
            }
        }
        worst
    }
}

/// `Σ` is singular (`Σ σ = 0`), so it is factored through its spectral
/// decomposition; eigenvalues in `[−1e−10, 0)` are clamped to zero.
pub fn build_covariance_factor(dist: &Distribution) -> Result<CovarianceFactor> {
    let m = dist.m();
    let p = dist.p();
    let sigma = dist.sigma();
    let mut sigma_matrix = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            sigma_matrix[i * m + j] = if i == j {
                1.0
            } else {
                -p[i] * p[j] / (sigma[i] * sigma[j])
            };
        }
    }

    let (spectrum, vectors) = eigen_hermitian(&HermitianMatrix::from_real(m, &sigma_matrix)?)?;
    let mut factor = vec![0.0; m * m];
    for (col, (&lambda, v)) in spectrum.values.iter().zip(&vectors).enumerate() {
        if lambda < NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::Factorization(format!(
                "covariance eigenvalue {lambda:e} is negative"
            )));
        }
        let root = lambda.max(0.0).sqrt();
        for row in 0..m {
            factor[row * m + col] = v[row].re * root;
        }
    }

    let cf = CovarianceFactor {
        m,
        sigma_matrix,
        factor,
    };
    let residual = cf.residual();
    if residual > FACTOR_RESIDUAL_LIMIT {
        return Err(Error::Factorization(format!(
            "residual {residual:e} exceeds {FACTOR_RESIDUAL_LIMIT:e}"
        )));
    }
    Ok(cf)
}

/// Sampler for `max_{λ ∈ Λ'} Z'(λ)/√p_max` on a uniform grid of `G` steps.
#[derive(Clone, Debug)]
pub struct LimitBrownian {
    dist: Distribution,
    factor: CovarianceFactor,
    grid: usize,
}

impl LimitBrownian {
    pub fn new(dist: &Distribution, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::OutOfDomain {
                what: "grid",
                value: grid as f64,
                domain: "G ≥ 2",
            });
        }
        Ok(Self {
            dist: dist.clone(),
            factor: build_covariance_factor(dist)?,
            grid,
        })
    }

    /// One draw. The paths `W_j = σ_{i_j} B_{i_j}` of the max letters
    /// `i_1 < … < i_k` are advanced step by step while the split-point
    /// recursion `best_j(t) = W_j(t) + max_{s ≤ t}(best_{j−1}(s) − W_j(s))`
    /// is updated online, so memory is `O(m)`.
    pub fn sample(&self, seed: u64) -> f64 {
        let m = self.dist.m();
        let letters = self.dist.argmax_set();
        let k = letters.len();
        let step = (1.0 / self.grid as f64).sqrt();
        let mut stream = UniformStream::new(seed);

        let weights: Vec<f64> = letters.iter().map(|&l| self.dist.sigma()[l - 1] * step).collect();
        let mut xi = vec![0.0; m];
        let mut w = vec![0.0; k];
        // running[j] = max_{s ≤ t} (best_{j−1}(s) − W_j(s)); best_0 is 0 at s = 0 only
        let mut running = vec![0.0f64; k];
        let mut best = vec![0.0f64; k];

        for _ in 0..self.grid {
            for x in xi.iter_mut() {
                *x = stream.normal();
            }
            for (j, &l) in letters.iter().enumerate() {
                let row = &self.factor.factor[(l - 1) * m..l * m];
                let db: f64 = row.iter().zip(&xi).map(|(f, x)| f * x).sum();
                w[j] += weights[j] * db;
            }
            for j in 0..k {
                if j > 0 {
                    running[j] = running[j].max(best[j - 1] - w[j]);
                }
                best[j] = w[j] + running[j];
            }
        }
        best[k - 1] / self.dist.p_max().sqrt()
    }
}

pub fn sample_limit_brownian(dist: &Distribution, grid: usize, seed: u64) -> Result<f64> {
    Ok(LimitBrownian::new(dist, grid)?.sample(seed))
}
