//! Samplers for the limiting laws of the centered shape and of `LI_n`.
//!
//! * `J_{k,m}`: sum of the `k` largest eigenvalues of a traceless `m × m`
//!   GUE matrix.
//! * `J_k`: `J_{1,k} + √((1 − k p_max)/k) Z` with `Z` an independent
//!   standard normal, `k` the multiplicity of `p_max`.
//! * A discretised Brownian functional with the same law as `J_k`, kept as
//!   an independent cross-check.
//! * Tracy–Widom reference draws from the scaled top GUE eigenvalue.

mod brownian;
mod hermitian;
mod tridiagonal;

pub use brownian::{build_covariance_factor, sample_limit_brownian, CovarianceFactor, LimitBrownian};
pub use hermitian::{
    eigen_hermitian, eigenvalues_hermitian, sample_gue, traceless, HermitianMatrix, Spectrum,
};
pub use tridiagonal::{sample_gue_tridiagonal, SymTridiagonal};

use crate::error::{Error, Result};
use crate::model::Distribution;
use crate::rng::{mix64, UniformStream};

const GAUSSIAN_STREAM_SALT: u64 = 0x4a5f_2d17_93c1_b0e5;
pub const TW_REFERENCE_MIN_DIM: usize = 50;
pub const DENSE_J1M_MAX_DIM: usize = 8;

/// Sum of the `k` largest eigenvalues of a traceless `m × m` GUE draw.
pub fn sample_j_km(m: usize, k: usize, seed: u64) -> Result<f64> {
    if k == 0 || k > m {
        return Err(Error::OutOfDomain {
            what: "k",
            value: k as f64,
            domain: "1 ≤ k ≤ m",
        });
    }
    let spectrum = eigenvalues_hermitian(&traceless(&sample_gue(m, seed)))?;
    Ok(spectrum.top_sum(k))
}

/// All of `J_{1,m}, …, J_{m,m}` from one traceless GUE draw.
pub fn sample_j_all(m: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(eigenvalues_hermitian(&traceless(&sample_gue(m, seed)))?.partial)
}

/// `J_{1,m}` through the tridiagonal model: `λ_max(T) − tr(T)/m`.
/// Same law as [`sample_j_km`]`(m, 1, ·)`, linear cost in `m`.
pub fn sample_j1m_fast(m: usize, seed: u64) -> f64 {
    let t = sample_gue_tridiagonal(m, seed);
    t.kth_largest(1) - t.trace() / m as f64
}

/// `J_{1,m}`: dense eigensolver up to `m = 8`, tridiagonal model above.
pub fn sample_j1m(m: usize, seed: u64) -> Result<f64> {
    if m <= DENSE_J1M_MAX_DIM {
        sample_j_km(m, 1, seed)
    } else {
        Ok(sample_j1m_fast(m, seed))
    }
}

/// `J_k = J_{1,k} + √((1 − k p_max)/k) Z`.
pub fn sample_j_k(dist: &Distribution, seed: u64) -> Result<f64> {
    let k = dist.k_mult();
    let top = sample_j_km(k, 1, seed)?;
    let variance = ((1.0 - k as f64 * dist.p_max()) / k as f64).max(0.0);
    if variance == 0.0 {
        return Ok(top);
    }
    let z = UniformStream::new(mix64(seed ^ GAUSSIAN_STREAM_SALT)).normal();
    Ok(top + variance.sqrt() * z)
}

/// Upper bound on the density of `J_k`:
/// `D(1, p) = 1/√(2π(1 − p))` and, for `k ≥ 2`,
/// `D(k, p) = min{√(k/(2π(1 − kp))), k^{3k} (2πe²)^{k/2} √(e/π)}`.
pub fn density_bound(k: usize, p_max: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfDomain {
            what: "k",
            value: 0.0,
            domain: "k ≥ 1",
        });
    }
    if !(p_max > 0.0 && p_max <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "p_max",
            value: p_max,
            domain: "(0, 1]",
        });
    }
    let kf = k as f64;
    let slack = 1.0 - kf * p_max;
    if slack < -1e-12 {
        return Err(Error::OutOfDomain {
            what: "k·p_max",
            value: kf * p_max,
            domain: "k·p_max ≤ 1",
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let gaussian = if slack <= 1e-12 {
        f64::INFINITY
    } else {
        (kf / (two_pi * slack)).sqrt()
    };
    if k == 1 {
        return Ok(gaussian);
    }
    let e = std::f64::consts::E;
    let spectral = kf.powf(3.0 * kf) * (two_pi * e * e).powf(kf / 2.0) * (e / std::f64::consts::PI).sqrt();
    Ok(gaussian.min(spectral))
}

/// `(λ_max − 2√m) m^{1/6}` for a GUE draw of dimension `m_ref ≥ 50`.
pub fn sample_tw_reference(m_ref: usize, seed: u64) -> Result<f64> {
    if m_ref < TW_REFERENCE_MIN_DIM {
        return Err(Error::OutOfDomain {
            what: "m_ref",
            value: m_ref as f64,
            domain: "m_ref ≥ 50",
        });
    }
    let top = sample_gue_tridiagonal(m_ref, seed).kth_largest(1);
    Ok(tw_scale(top, m_ref))
}

/// `(x − 2√k) k^{1/6}`.
pub fn tw_scale(x: f64, k: usize) -> f64 {
    let kf = k as f64;
    (x - 2.0 * kf.sqrt()) * kf.powf(1.0 / 6.0)
}
