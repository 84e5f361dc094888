//! Tridiagonal GUE model and Sturm-sequence bisection.
//!
//! Householder reduction of a GUE matrix (same normalisation as
//! [`sample_gue`](super::sample_gue)) yields a real symmetric tridiagonal
//! matrix with independent entries: `N(0,1)` on the diagonal and
//! `χ_{2(m−j)}/√2` on the `j`-th off-diagonal. Eigenvalues and trace
//! therefore have the same joint law as for the dense draw, at `O(m)` cost
//! per matrix instead of `O(m³)`.

use crate::rng::UniformStream;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::MIN_POSITIVE;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let m = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < m { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th largest eigenvalue (`k = 1` is the top one), by bisection.
    pub fn kth_largest(&self, k: usize) -> f64 {
        let m = self.dim();
        assert!((1..=m).contains(&k));
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        // λ is the k-th largest iff fewer than m−k+1 eigenvalues lie below it
        let below = m - k;
        while hi - lo > 4.0 * f64::EPSILON * scale {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > below {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn sample_gue_tridiagonal(m: usize, seed: u64) -> SymTridiagonal {
    let mut stream = UniformStream::new(seed);
    let diag = (0..m).map(|_| stream.normal()).collect();
    // χ_{2j}/√2 = sqrt(Gamma(j, 1))
    let off = (1..m).rev().map(|j| stream.gamma(j as f64).sqrt()).collect();
    SymTridiagonal { diag, off }
}
