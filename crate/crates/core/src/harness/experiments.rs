use super::{Check, Experiment, ReportRow, Runner, Summary, MC_BAND_DELTA};
use crate::distance::{dkw_band, ks_two_sample, rate_fit, wasserstein_p, EmpiricalSample};
use crate::error::{Error, Result};
use crate::lci::{estimate_e_max, lcis_dp, LciConfig};
use crate::limits::{
    sample_j1m, sample_j_all, sample_j_k, sample_tw_reference, tw_scale, LimitBrownian,
};
use crate::model::{prefix_counts, sample_word, sample_word_coupled, Distribution};
use crate::rsk::{centered_li, cumulative_shape_stats, li_dp, rsk_shape};
use crate::variational::{event_a_n, gap_report, max_z_full};

const RATE_SLOPE_MAX: f64 = -0.25;
const RATE_CONSTANT_GROWTH_MAX: f64 = 2.0;
const GAP_EXCEED_FRACTION_MAX: f64 = 0.01;
const EVENT_FAILURE_SLACK: f64 = 5.0;
const COUPLE_MISMATCH_MAX: f64 = 3.0;
const COUPLE_KS_BAND_FACTOR: f64 = 2.0;
const SHIFT_RESOLUTION: f64 = 1e-6;
const LIMIT_KS_MAX: f64 = 0.03;
const W1_MAX: f64 = 0.05;
const IDENTITY_TOLERANCE: f64 = 1e-9;

pub(super) fn run(r: &Runner) -> Result<(Vec<ReportRow>, Summary)> {
    let dist = r.cfg.distribution()?;
    match r.cfg.experiment {
        Experiment::Identity => identity(r, &dist),
        Experiment::ShapeVsGue => shape_vs_gue(r, &dist),
        Experiment::Rate => rate(r, &dist),
        Experiment::Gap => gap(r, &dist),
        Experiment::EventAn => event_an(r, &dist),
        Experiment::CoupleDemo => couple_demo(r, &dist),
        Experiment::TwRegime => tw_regime(r),
        Experiment::LimitSample => limit_sample(r, &dist),
        Experiment::Wp => wp(r, &dist),
        Experiment::Lci => lci(r, &dist),
    }
}

fn sample(values: Vec<f64>) -> Result<EmpiricalSample> {
    EmpiricalSample::new(values)
}

/// `T_{1,m} = (m LI_n − n)/(m √(n/m))` with an exact integer numerator.
fn t_first(li: usize, n: usize, m: usize) -> f64 {
    let num = (m * li) as i128 - n as i128;
    num as f64 / (m as f64 * (n as f64 / m as f64).sqrt())
}

fn t_first_samples(r: &Runner, dist: &Distribution, n: usize) -> Result<Vec<f64>> {
    let m = dist.m();
    r.samples(&format!("words/n={n}"), r.cfg.n_samples, |seed| {
        let word = sample_word(dist, n, seed);
        Ok(t_first(li_dp(&word, m)?, n, m))
    })
}

fn j1m_reference(r: &Runner, m: usize) -> Result<EmpiricalSample> {
    sample(r.samples(&format!("j1m/m={m}"), r.cfg.n_samples, |seed| {
        sample_j1m(m, seed)
    })?)
}

fn identity(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let mut rows = Vec::new();
    let mut total_violations = 0usize;
    for &n in &r.cfg.n_grid {
        let deviations = r.samples(&format!("words/n={n}"), r.cfg.n_samples, |seed| {
            let word = sample_word(dist, n, seed);
            let via_max = max_z_full(&prefix_counts(&word, m)?, dist)?;
            let li = li_dp(&word, m)? as f64;
            let nf = n as f64;
            Ok((via_max - (li - nf * dist.p_max()) / nf.sqrt()).abs())
        })?;
        let worst = deviations.iter().copied().fold(0.0, f64::max);
        let violations = deviations.iter().filter(|&&d| !(d <= IDENTITY_TOLERANCE)).count();
        total_violations += violations;
        rows.push(r.row(n, m, "max_abs_deviation", worst));
        rows.push(r.row(n, m, "violations", violations as f64));
    }
    let checks = vec![Check::at_most("identity_violations", total_violations as f64, 0.0)];
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn shape_vs_gue(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let reference = r.samples("gue", r.cfg.n_samples, |seed| sample_j_all(m, seed))?;
    let reference: Vec<EmpiricalSample> = (0..m - 1)
        .map(|k| sample(reference.iter().map(|partial| partial[k]).collect()))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut ks_first_row = Vec::new();
    let mut worst_t_m = 0.0f64;
    for &n in &r.cfg.n_grid {
        let stats = r.samples(&format!("words/n={n}"), r.cfg.n_samples, |seed| {
            let word = sample_word(dist, n, seed);
            Ok(cumulative_shape_stats(&rsk_shape(&word), n, m)?.t)
        })?;
        for (k, reference_k) in reference.iter().enumerate() {
            let t_k = sample(stats.iter().map(|t| t[k]).collect())?;
            let ks = ks_two_sample(&t_k, reference_k)?;
            if k == 0 {
                ks_first_row.push(ks);
            }
            rows.push(r.row(n, m, &format!("ks_k{}", k + 1), ks));
        }
        let t_m = stats.iter().map(|t| t[m - 1].abs()).fold(0.0, f64::max);
        worst_t_m = worst_t_m.max(t_m);
        rows.push(r.row(n, m, "max_abs_t_m", t_m));
    }

    let mut checks = vec![Check::at_most("t_m_zero", worst_t_m, 0.0)];
    if let (Some(&first), Some(&last)) = (ks_first_row.first(), ks_first_row.last()) {
        if ks_first_row.len() >= 2 {
            checks.push(Check::at_most("ks_k1_last_below_first", last, first));
        }
    }
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn rate(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let reference = j1m_reference(r, m)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &n in &r.cfg.n_grid {
        let ks = ks_two_sample(&sample(t_first_samples(r, dist, n)?)?, &reference)?;
        let nf = n as f64;
        rows.push(r.row(n, m, "ks", ks));
        rows.push(r.row(n, m, "normalized_ks", ks * nf.sqrt() / nf.ln().powi(2)));
        points.push((n, ks));
    }

    let mut summary = Summary::default();
    match rate_fit(&points) {
        Ok(fit) => {
            let normalized = fit.normalized();
            let last = normalized[normalized.len() - 1];
            let prev = normalized[normalized.len() - 2];
            summary.slope = Some(fit.slope);
            summary.c_hat = Some(fit.c_hat);
            summary.checks.push(Check::at_most("slope", fit.slope, RATE_SLOPE_MAX));
            let mut growth = Check::at_most(
                "c_hat_last_two",
                last,
                RATE_CONSTANT_GROWTH_MAX * prev,
            );
            growth.pass &= fit.c_hat.is_finite();
            summary.checks.push(growth);
        }
        Err(_) => {
            summary.checks.push(Check::at_most("slope", f64::NAN, RATE_SLOPE_MAX));
        }
    }
    Ok((rows, summary))
}

fn gap(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let alpha = r.cfg.alpha;
    let mut rows = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut worst_fraction = 0.0f64;
    for &n in &r.cfg.n_grid {
        let reports = r.samples(&format!("words/n={n}"), r.cfg.n_samples, |seed| {
            gap_report(&prefix_counts(&sample_word(dist, n, seed), m)?, dist, alpha)
        })?;
        let lo = reports.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min);
        let hi = reports.iter().map(|g| g.gap).fold(f64::NEG_INFINITY, f64::max);
        let exceed = reports.iter().filter(|g| !g.within).count() as f64 / reports.len() as f64;
        min_gap = min_gap.min(lo);
        worst_fraction = worst_fraction.max(exceed);
        rows.push(r.row(n, m, "min_gap", lo));
        rows.push(r.row(n, m, "max_gap", hi));
        rows.push(r.row(n, m, "bound", reports[0].bound));
        rows.push(r.row(n, m, "exceed_fraction", exceed));
        rows.push(r.row(n, m, "precondition_ok", f64::from(u8::from(reports[0].precondition_ok))));
    }
    let checks = vec![
        Check::at_least("min_gap", min_gap, 0.0),
        Check::at_most("exceed_fraction", worst_fraction, GAP_EXCEED_FRACTION_MAX),
    ];
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn event_an(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let alpha = r.cfg.alpha;
    let count = r.cfg.n_samples;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &r.cfg.n_grid {
        let held = r.samples(&format!("words/n={n}"), count, |seed| {
            event_a_n(&prefix_counts(&sample_word(dist, n, seed), m)?, dist, alpha)
        })?;
        let failures = held.iter().filter(|&&ok| !ok).count() as f64;
        let bound = 2.0 * m as f64 / (n as f64).powf(alpha);
        rows.push(r.row(n, m, "failures", failures));
        rows.push(r.row(n, m, "failure_fraction", failures / count as f64));
        rows.push(r.row(n, m, "theoretical_bound", bound));
        checks.push(Check::at_most(
            format!("failures_n{n}"),
            failures,
            EVENT_FAILURE_SLACK * count as f64 * bound,
        ));
    }
    Ok((rows, Summary { checks, ..Default::default() }))
}

/// `sup_x |F_a(x + ε) − F_b(x + ε)|` over pooled sample points `x`: the
/// Kolmogorov distance blind to shifts smaller than `ε`.
fn ks_shift_resolved(a: &EmpiricalSample, b: &EmpiricalSample, eps: f64) -> f64 {
    a.values()
        .iter()
        .chain(b.values())
        .map(|&x| (a.ecdf(x + eps) - b.ecdf(x + eps)).abs())
        .fold(0.0, f64::max)
}

fn couple_demo(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &r.cfg.n_grid {
        let tilt = 0.5f64.powi(n as i32);
        let dist_b = Distribution::new(vec![0.5 + tilt, 0.5 - tilt])?;
        let pairs = r.samples(&format!("coupled/n={n}"), r.cfg.n_samples, |seed| {
            let (a, b) = sample_word_coupled(dist, &dist_b, n, seed)?;
            Ok((a != b, centered_li(&a, dist)?, centered_li(&b, &dist_b)?))
        })?;
        let mismatches = pairs.iter().filter(|p| p.0).count() as f64;
        let za = sample(pairs.iter().map(|p| p.1).collect())?;
        let zb = sample(pairs.iter().map(|p| p.2).collect())?;
        let ks = ks_two_sample(&za, &zb)?;
        let combined = 2.0 * dkw_band(r.cfg.n_samples, MC_BAND_DELTA);
        rows.push(r.row(n, m, "mismatches", mismatches));
        rows.push(r.row(n, m, "ks", ks));
        rows.push(r.row(n, m, "dkw_combined", combined));
        rows.push(r.row(n, m, "ks_shift_resolved", ks_shift_resolved(&za, &zb, SHIFT_RESOLUTION)));
        checks.push(Check::at_most(format!("mismatches_n{n}"), mismatches, COUPLE_MISMATCH_MAX));
        checks.push(Check::at_most(
            format!("ks_n{n}"),
            ks,
            COUPLE_KS_BAND_FACTOR * combined,
        ));
    }
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn tw_regime(r: &Runner) -> Result<(Vec<ReportRow>, Summary)> {
    let m_ref = r.cfg.m_ref;
    let reference = sample(r.samples("tw-reference", r.cfg.n_samples, |seed| {
        sample_tw_reference(m_ref, seed)
    })?)?;
    let mut rows = Vec::new();
    let mut distances = Vec::new();
    for &m in &r.cfg.n_grid {
        let scaled = r.samples(&format!("j1m/m={m}"), r.cfg.n_samples, |seed| {
            Ok(tw_scale(sample_j1m(m, seed)?, m))
        })?;
        let ks = ks_two_sample(&sample(scaled)?, &reference)?;
        rows.push(r.row(m, m, "ks", ks));
        distances.push(ks);
    }
    let increases = distances.windows(2).filter(|w| !(w[1] < w[0])).count();
    let checks = vec![Check::at_most("ks_decreasing", increases as f64, 0.0)];
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn limit_sample(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let g = r.cfg.grid_g;
    let spectral = sample(r.samples("j-k", r.cfg.n_samples, |seed| sample_j_k(dist, seed))?)?;
    let mut distances = Vec::new();
    for (stream, grid) in [("brownian", g), ("brownian-half", (g / 2).max(2))] {
        let sampler = LimitBrownian::new(dist, grid)?;
        let paths = r.samples(stream, r.cfg.n_samples, |seed| Ok(sampler.sample(seed)))?;
        distances.push(ks_two_sample(&spectral, &sample(paths)?)?);
    }
    let rows = vec![
        r.row(g, m, "ks", distances[0]),
        r.row(g, m, "ks_half_grid", distances[1]),
    ];
    let checks = vec![Check::at_most("ks", distances[0], LIMIT_KS_MAX)];
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn wp(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let reference = j1m_reference(r, m)?;
    let mut rows = Vec::new();
    let mut largest: Option<(usize, f64, EmpiricalSample)> = None;
    for &n in &r.cfg.n_grid {
        let t = sample(t_first_samples(r, dist, n)?)?;
        let w1 = wasserstein_p(&t, &reference, 1.0)?;
        rows.push(r.row(n, m, "ks", ks_two_sample(&t, &reference)?));
        rows.push(r.row(n, m, "w1", w1));
        rows.push(r.row(n, m, "w2", wasserstein_p(&t, &reference, 2.0)?));
        if largest.as_ref().map_or(true, |(best, _, _)| n > *best) {
            largest = Some((n, w1, t));
        }
    }
    let (n, w1, t) = largest.ok_or(Error::NoRows)?;
    let checks = vec![
        Check::at_most(format!("w1_n{n}"), w1, W1_MAX),
        Check::at_most("w1_identical", wasserstein_p(&t, &t, 1.0)?, 0.0),
    ];
    Ok((rows, Summary { checks, ..Default::default() }))
}

fn lci(r: &Runner, dist: &Distribution) -> Result<(Vec<ReportRow>, Summary)> {
    let m = dist.m();
    let lengths = |n: usize| {
        r.samples(&format!("lci/n={n}"), r.cfg.n_samples, |seed| {
            let x = sample_word(dist, n, seed);
            let y = sample_word(dist, n, crate::rng::mix64(seed));
            Ok(lcis_dp(&x, &y))
        })
    };
    let batches: Vec<(usize, Vec<usize>, Vec<usize>)> = r
        .cfg
        .n_grid
        .iter()
        .map(|&n| Ok((n, lengths(n)?, lengths(4 * n)?)))
        .collect::<Result<_>>()?;

    // Uniform alphabets: n/m − O(√n) ≤ LCI_n ≤ LI_n ≤ n/m + O(√n), so e_max = p_max.
    let e_max = if dist.is_uniform() {
        dist.p_max()
    } else {
        let n_max = r.cfg.n_grid.iter().copied().max().ok_or(Error::NoRows)?;
        let reference = batches.iter().find(|b| b.0 == n_max).ok_or(Error::NoRows)?;
        estimate_e_max(&reference.2, 4 * n_max)?
    };
    let cfg = LciConfig::new(e_max)?;
    let centered = |n: usize, lens: &[usize]| -> Result<EmpiricalSample> {
        let nf = n as f64;
        sample(lens.iter().map(|&l| (l as f64 - nf * cfg.e_max()) / nf.sqrt()).collect())
    };

    let mut rows = Vec::new();
    let mut distances = Vec::new();
    for (n, short, long) in &batches {
        let ks = ks_two_sample(&centered(*n, short)?, &centered(4 * n, long)?)?;
        let ratio = short.iter().sum::<usize>() as f64 / short.len() as f64 / *n as f64;
        rows.push(r.row(*n, m, "lci_mean_ratio", ratio));
        rows.push(r.row(*n, m, "ks_n_vs_4n", ks));
        rows.push(r.row(*n, m, "e_max", cfg.e_max()));
        distances.push(ks);
    }
    let mut checks = Vec::new();
    if distances.len() >= 2 {
        checks.push(Check::at_most(
            "ks_cauchy_last_below_first",
            distances[distances.len() - 1],
            distances[0],
        ));
    }
    Ok((rows, Summary { checks, ..Default::default() }))
}
