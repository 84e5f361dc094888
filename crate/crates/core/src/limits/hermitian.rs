//! Dense Hermitian matrices, GUE draws and a cyclic complex Jacobi eigensolver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::UniformStream;

pub const MAX_DIMENSION: usize = 2048;
pub const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOLERANCE: f64 = 1e-10;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from row-major entries, rejecting non-Hermitian input.
    pub fn from_entries(m: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::LengthMismatch(entries.len(), m * m));
        }
        let h = Self { m, entries };
        let asym = h.asymmetry();
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian(asym));
        }
        Ok(h)
    }

    pub fn from_real(m: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(m, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let m = values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); m * m];
        for (i, &v) in values.iter().enumerate() {
            entries[i * m + i] = Complex64::new(v, 0.0);
        }
        Self { m, entries }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.m + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|H_ij − conj(H_ji)|`, diagonal imaginary parts included.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for j in i..self.m {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// GUE draw: real `N(0,1)` diagonal, off-diagonal real and imaginary parts
/// `N(0,1/2)`, so that the top eigenvalue sits near `2√m`.
pub fn sample_gue(m: usize, seed: u64) -> HermitianMatrix {
    let mut stream = UniformStream::new(seed);
    let mut entries = vec![Complex64::new(0.0, 0.0); m * m];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        entries[i * m + i] = Complex64::new(stream.normal(), 0.0);
        for j in i + 1..m {
            let z = Complex64::new(stream.normal() * half, stream.normal() * half);
            entries[i * m + j] = z;
            entries[j * m + i] = z.conj();
        }
    }
    HermitianMatrix { m, entries }
}

/// `H − (tr H / m) I`.
pub fn traceless(h: &HermitianMatrix) -> HermitianMatrix {
    let shift = h.trace() / h.m as f64;
    let mut out = h.clone();
    for i in 0..h.m {
        out.entries[i * h.m + i].re -= shift;
    }
    out
}

/// Eigenvalues in descending order with their running partial sums.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub partial: Vec<f64>,
}

impl Spectrum {
    fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let partial = values
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Self { values, partial }
    }

    /// Sum of the `k` largest eigenvalues.
    pub fn top_sum(&self, k: usize) -> f64 {
        self.partial[k - 1]
    }
}

pub fn eigenvalues_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    jacobi(h, false).map(|(s, _)| s)
}

/// Eigenvalues (descending) and the matching unit eigenvectors.
pub fn eigen_hermitian(h: &HermitianMatrix) -> Result<(Spectrum, Vec<Vec<Complex64>>)> {
    let (spectrum, vectors) = jacobi(h, true)?;
    Ok((spectrum, vectors.unwrap()))
}

fn jacobi(h: &HermitianMatrix, want_vectors: bool) -> Result<(Spectrum, Option<Vec<Vec<Complex64>>>)> {
    let m = h.m;
    if m > MAX_DIMENSION {
        return Err(Error::TooLarge {
            what: "Hermitian eigensolver dimension",
            size: m,
            cap: MAX_DIMENSION,
        });
    }
    let asym = h.asymmetry();
    if asym > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian(asym));
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut a = h.entries.clone();
    let mut v = if want_vectors {
        let mut v = vec![zero; m * m];
        for i in 0..m {
            v[i * m + i] = Complex64::new(1.0, 0.0);
        }
        Some(v)
    } else {
        None
    };
    for i in 0..m {
        a[i * m + i].im = 0.0;
    }
    let target = OFF_DIAGONAL_TOLERANCE * h.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += 2.0 * a[p * m + q].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }

        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                // rotate in the (p, q) plane with U = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]
                let phase = apq / abs;
                let app = a[p * m + p].re;
                let aqq = a[q * m + q].re;
                let theta = (aqq - app) / (2.0 * abs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let s_phase = phase * s;
                let s_phase_conj = s_phase.conj();

                for k in 0..m {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    let new_kp = akp * c - s_phase_conj * akq;
                    let new_kq = s_phase * akp + akq * c;
                    a[k * m + p] = new_kp;
                    a[k * m + q] = new_kq;
                    a[p * m + k] = new_kp.conj();
                    a[q * m + k] = new_kq.conj();
                }
                a[p * m + p] = Complex64::new(app - t * abs, 0.0);
                a[q * m + q] = Complex64::new(aqq + t * abs, 0.0);
                a[p * m + q] = zero;
                a[q * m + p] = zero;

                if let Some(v) = v.as_mut() {
                    for k in 0..m {
                        let vkp = v[k * m + p];
                        let vkq = v[k * m + q];
                        v[k * m + p] = vkp * c - s_phase_conj * vkq;
                        v[k * m + q] = s_phase * vkp + vkq * c;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let diag: Vec<f64> = (0..m).map(|i| a[i * m + i].re).collect();
    let vectors = v.map(|v| {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
        order
            .into_iter()
            .map(|col| (0..m).map(|row| v[row * m + col]).collect())
            .collect()
    });
    Ok((Spectrum::from_values(diag), vectors))
}
