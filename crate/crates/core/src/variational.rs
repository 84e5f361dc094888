//! Maximisation of `Z_n` over split-point compositions, the Bernstein event
//! on window deviations, and the gap between the full and the
//! max-letter-restricted maxima.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{z_n, Composition, CountProcess, Distribution};

pub const DEFAULT_EVENT_N_CAP: usize = 2000;
pub const ENUMERATION_CAP: usize = 12;

/// Largest `Σ_j (N^{l_j}_{k_j} − N^{l_j}_{k_{j−1}})` over split points
/// `0 = k_0 ≤ … ≤ k_r = n`, where `l_1 < … < l_r` are `letters`.
///
/// Runs the split-point recursion directly on the count matrix:
/// `best_j(k) = N^{l_j}_k + max_{k' ≤ k} (best_{j−1}(k') − N^{l_j}_{k'})`.
fn best_window_sum(counts: &CountProcess, letters: &[usize]) -> i64 {
    let n = counts.n();
    let Some((&first, rest)) = letters.split_first() else {
        return 0;
    };
    let mut best: Vec<i64> = counts.row(first).iter().map(|&c| c as i64).collect();
    for &letter in rest {
        let row = counts.row(letter);
        let mut running = i64::MIN;
        for k in 0..=n {
            let nk = row[k] as i64;
            running = running.max(best[k] - nk);
            best[k] = running + nk;
        }
    }
    best[n]
}

fn check(counts: &CountProcess, dist: &Distribution) -> Result<()> {
    if counts.m() != dist.m() {
        return Err(Error::AlphabetMismatch(counts.m(), dist.m()));
    }
    if counts.n() == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: 0.0,
            domain: "n ≥ 1",
        });
    }
    Ok(())
}

/// `max_{λ ∈ Λ_d} Z_n(λ) = (LI_n − n p_max)/√n`.
pub fn max_z_full(counts: &CountProcess, dist: &Distribution) -> Result<f64> {
    check(counts, dist)?;
    let letters: Vec<usize> = (1..=dist.m()).collect();
    let li = best_window_sum(counts, &letters) as f64;
    let n = counts.n() as f64;
    Ok((li - n * dist.p_max()) / n.sqrt())
}

/// Maximum of `Z_n` over compositions that give zero length to every letter
/// whose mass is below `p_max`. The drift vanishes there, so this is the
/// best window sum over the max letters, centered at `n p_max`.
pub fn max_z_restricted(counts: &CountProcess, dist: &Distribution) -> Result<f64> {
    check(counts, dist)?;
    let s = best_window_sum(counts, dist.argmax_set()) as f64;
    let n = counts.n() as f64;
    Ok((s - n * dist.p_max()) / n.sqrt())
}

/// Maximum of `Z_n` found by visiting every composition of `[0, n]` into
/// `m` windows; with `restricted` only compositions that leave every
/// non-max letter empty are visited. Exponential in `m`, so `n` is capped.
pub fn max_z_by_enumeration(
    counts: &CountProcess,
    dist: &Distribution,
    restricted: bool,
) -> Result<f64> {
    check(counts, dist)?;
    if counts.n() > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            what: "composition enumeration length",
            size: counts.n(),
            cap: ENUMERATION_CAP,
        });
    }
    let mut best = f64::NEG_INFINITY;
    for comp in Composition::enumerate(counts.n(), counts.m()) {
        if restricted
            && (1..=dist.m()).any(|i| dist.prob(i) < dist.p_max() && comp.length(i) > 0)
        {
            continue;
        }
        best = best.max(z_n(counts, dist, &comp)?);
    }
    Ok(best)
}

/// `a = 6 + 3α`.
pub fn bernstein_a(alpha: f64) -> f64 {
    6.0 + 3.0 * alpha
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "[1, ∞)",
        });
    }
    Ok(())
}

/// [`event_a_n_capped`] with the default cap of 2000 letters.
pub fn event_a_n(counts: &CountProcess, dist: &Distribution, alpha: f64) -> Result<bool> {
    event_a_n_capped(counts, dist, alpha, DEFAULT_EVENT_N_CAP)
}

/// Whether every window deviation satisfies
/// `|N^i_{j+ℓ} − N^i_j − p_i ℓ| ≤ (σ_i √ℓ + 1) a ln n`.
///
/// Scans all `O(m n²)` windows; `n_cap` bounds the length accepted.
pub fn event_a_n_capped(
    counts: &CountProcess,
    dist: &Distribution,
    alpha: f64,
    n_cap: usize,
) -> Result<bool> {
    check(counts, dist)?;
    check_alpha(alpha)?;
    let n = counts.n();
    if n < 2 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n as f64,
            domain: "n ≥ 2",
        });
    }
    if n > n_cap {
        return Err(Error::TooLarge {
            what: "event_a_n word length",
            size: n,
            cap: n_cap,
        });
    }
    let a_log_n = bernstein_a(alpha) * (n as f64).ln();
    let sqrt_ell: Vec<f64> = (0..=n).map(|l| (l as f64).sqrt()).collect();

    for i in 1..=dist.m() {
        let row = counts.row(i);
        let p = dist.prob(i);
        let sigma = dist.sigma()[i - 1];
        let bound: Vec<f64> = sqrt_ell.iter().map(|s| (sigma * s + 1.0) * a_log_n).collect();
        for j in 0..n {
            let base = row[j] as f64;
            for ell in 1..=n - j {
                let dev = (row[j + ell] as f64 - base - p * ell as f64).abs();
                if dev > bound[ell] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `(max_{Λ_d} Z_n − max_{Λ'_d} Z_n)/√p_max`, never negative.
    pub gap: f64,
    /// `(a ln n)²/(4Δ√(n p_max)) + a m ln n/√(n p_max)`.
    pub bound: f64,
    /// `a ln n ≤ 2√n Δ`; when false the bound is reported but not binding.
    pub precondition_ok: bool,
    pub within: bool,
    pub a: f64,
}

pub fn gap_report(counts: &CountProcess, dist: &Distribution, alpha: f64) -> Result<GapReport> {
    check(counts, dist)?;
    check_alpha(alpha)?;
    if dist.is_uniform() {
        return Err(Error::GapVacuous);
    }
    let n = counts.n();
    if n < 2 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n as f64,
            domain: "n ≥ 2",
        });
    }
    let nf = n as f64;
    let a = bernstein_a(alpha);
    let log_n = nf.ln();
    let delta = dist.delta();
    let sqrt_np = (nf * dist.p_max()).sqrt();

    let full = max_z_full(counts, dist)?;
    let restricted = max_z_restricted(counts, dist)?;
    let gap = (full - restricted) / dist.p_max().sqrt();
    let bound = (a * log_n).powi(2) / (4.0 * delta * sqrt_np) + a * dist.m() as f64 * log_n / sqrt_np;

    Ok(GapReport {
        gap,
        bound,
        precondition_ok: a * log_n <= 2.0 * nf.sqrt() * delta,
        within: gap <= bound,
        a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{prefix_counts, sample_word, Word};
    use crate::rsk::li_bruteforce;

    fn counts(letters: &[u32], m: usize) -> CountProcess {
        prefix_counts(&Word::new(letters.to_vec()), m).unwrap()
    }

    #[test]
    fn max_z_full_examples() {
        let u3 = Distribution::uniform(3).unwrap();
        let c = counts(&[1, 3, 2, 1, 2], 3);
        let expected = (3.0 - 5.0 / 3.0) / 5f64.sqrt();
        assert!((max_z_full(&c, &u3).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.596_284).abs() < 1e-6);

        let u2 = Distribution::uniform(2).unwrap();
        let c = counts(&[1, 1], 2);
        assert!((max_z_full(&c, &u2).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn max_z_restricted_examples() {
        let u = Distribution::uniform(3).unwrap();
        let c = counts(&[3, 1, 2, 2, 1, 3], 3);
        assert_eq!(max_z_full(&c, &u).unwrap(), max_z_restricted(&c, &u).unwrap());

        let d = Distribution::new(vec![0.6, 0.4]).unwrap();
        let c = counts(&[2, 2, 1], 2);
        let expected = (1.0 - 1.8) / 3f64.sqrt();
        assert!((max_z_restricted(&c, &d).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 0.461_880).abs() < 1e-6);

        let c = counts(&[1, 1, 1, 1], 2);
        assert_eq!(max_z_full(&c, &d).unwrap(), max_z_restricted(&c, &d).unwrap());
    }

    #[test]
    fn maxima_match_lattice_enumeration() {
        let dists = [
            Distribution::uniform(2).unwrap(),
            Distribution::new(vec![0.6, 0.4]).unwrap(),
            Distribution::new(vec![0.4, 0.4, 0.2]).unwrap(),
            Distribution::new(vec![0.2, 0.5, 0.3]).unwrap(),
            Distribution::uniform(3).unwrap(),
        ];
        let mut seed = 0;
        for d in &dists {
            for n in 1..=8 {
                for _ in 0..5 {
                    seed += 1;
                    let c = prefix_counts(&sample_word(d, n, seed), d.m()).unwrap();
                    let full = max_z_full(&c, d).unwrap();
                    let restricted = max_z_restricted(&c, d).unwrap();
                    assert!((full - max_z_by_enumeration(&c, d, false).unwrap()).abs() <= 1e-12);
                    assert!((restricted - max_z_by_enumeration(&c, d, true).unwrap()).abs() <= 1e-12);
                    assert!(full >= restricted);
                }
            }
        }
    }

    #[test]
    fn full_maximum_is_centered_li() {
        let d = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        for seed in 0..200 {
            let w = sample_word(&d, 1 + (seed as usize % 14), seed);
            let c = prefix_counts(&w, 3).unwrap();
            let n = w.len() as f64;
            let li = li_bruteforce(&w).unwrap() as f64;
            let expected = (li - n * 0.6) / n.sqrt();
            assert!((max_z_full(&c, &d).unwrap() - expected).abs() <= 1e-9);
        }
    }

    #[test]
    fn event_examples() {
        let u = Distribution::uniform(2).unwrap();
        assert!(event_a_n(&counts(&[1, 1], 2), &u, 1.0).unwrap());
        assert!(event_a_n(&counts(&[1, 2], 2), &u, 1.0).unwrap());

        let all_ones = vec![1u32; 10_000];
        let c = counts(&all_ones, 2);
        assert!(matches!(event_a_n(&c, &u, 1.0), Err(Error::TooLarge { .. })));
        assert!(!event_a_n_capped(&c, &u, 1.0, 10_000).unwrap());

        assert!(event_a_n(&counts(&[1], 2), &u, 1.0).is_err());
        assert!(event_a_n(&counts(&[1, 2], 2), &u, 0.5).is_err());
    }

    #[test]
    fn event_extreme_cell_bound() {
        // at i = 1, j = 0, ℓ = 10⁴ the deviation is 5000 against ≈ 4227.5
        let bound = (0.5 * 100.0 + 1.0) * 9.0 * 10_000f64.ln();
        assert!((bound - 4227.5).abs() < 0.1);
        assert!(5000.0 > bound);
    }

    #[test]
    fn gap_examples() {
        let d = Distribution::new(vec![0.6, 0.4]).unwrap();
        let r = gap_report(&counts(&[1, 1, 2], 2), &d, 1.0).unwrap();
        let expected = (1.0 / 3f64.sqrt()) / 0.6f64.sqrt();
        assert!((r.gap - expected).abs() < 1e-12);
        assert!((expected - 0.745_356).abs() < 1e-6);
        assert_eq!(r.a, 9.0);

        let r = gap_report(&counts(&[1; 6], 2), &d, 1.0).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(r.within);

        let u = Distribution::uniform(2).unwrap();
        assert!(matches!(
            gap_report(&counts(&[1, 2], 2), &u, 1.0),
            Err(Error::GapVacuous)
        ));
    }

    #[test]
    fn gap_bound_formula() {
        let d = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let w = sample_word(&d, 400, 1);
        let c = prefix_counts(&w, 3).unwrap();
        let r = gap_report(&c, &d, 2.0).unwrap();
        let a = 12.0;
        let ln = 400f64.ln();
        let s = (400.0 * 0.5f64).sqrt();
        let bound = (a * ln).powi(2) / (4.0 * 0.2 * s) + a * 3.0 * ln / s;
        assert!((r.bound - bound).abs() < 1e-12);
        assert_eq!(r.precondition_ok, a * ln <= 2.0 * 20.0 * 0.2);
        assert!(r.gap >= 0.0);
    }
}
