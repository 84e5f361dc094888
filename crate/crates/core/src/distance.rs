//! Empirical distributions: two-sample Kolmogorov–Smirnov distance, DKW
//! confidence radius, one-dimensional Wasserstein distance and log-log rate
//! fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty sample, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    /// Right-continuous ECDF `#{x_i ≤ x}/n`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// `sup_x |F_a(x) − F_b(x)|`, evaluated exactly by merging the two sorted
/// samples. Both ECDFs are step functions, so the supremum is attained at a
/// pooled sample point after all tied values there have been consumed.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64> {
    let (xa, xb) = (a.values(), b.values());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// Dvoretzky–Kiefer–Wolfowitz radius `√(ln(2/δ)/(2n))`.
pub fn dkw_band(n_samples: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n_samples as f64)).sqrt()
}

/// `W_p` between two equal-size samples via the sorted (quantile) coupling.
pub fn wasserstein_p(a: &EmpiricalSample, b: &EmpiricalSample, p: f64) -> Result<f64> {
    if a.n_samples() != b.n_samples() {
        return Err(Error::LengthMismatch(a.n_samples(), b.n_samples()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "p",
            value: p,
            domain: "[1, ∞)",
        });
    }
    let n = a.n_samples() as f64;
    let pairs = a.values().iter().zip(b.values());
    if p == 1.0 {
        return Ok(pairs.map(|(x, y)| (x - y).abs()).sum::<f64>() / n);
    }
    Ok((pairs.map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>() / n).powf(1.0 / p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub points: Vec<(usize, f64)>,
    /// Least-squares slope of `ln d` against `ln n`.
    pub slope: f64,
    /// `max_i d_i √n_i / (ln n_i)²`.
    pub c_hat: f64,
}

impl RateFit {
    /// `d √n / (ln n)²` at each point.
    pub fn normalized(&self) -> Vec<f64> {
        self.points.iter().map(|&(n, d)| normalized_constant(n, d)).collect()
    }
}

fn normalized_constant(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    d * nf.sqrt() / nf.ln().powi(2)
}

pub fn rate_fit(points: &[(usize, f64)]) -> Result<RateFit> {
    if points.iter().any(|&(_, d)| !(d > 0.0 && d.is_finite())) {
        return Err(Error::OutOfDomain {
            what: "distance",
            value: points
                .iter()
                .map(|&(_, d)| d)
                .find(|d| !(*d > 0.0 && d.is_finite()))
                .unwrap(),
            domain: "(0, ∞)",
        });
    }
    if points.iter().any(|&(n, _)| n < 2) {
        return Err(Error::DegenerateFit);
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, d)| d.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c_hat = points
        .iter()
        .map(|&(n, d)| normalized_constant(n, d))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RateFit {
        points: points.to_vec(),
        slope: sxy / sxx,
        c_hat,
    })
}
