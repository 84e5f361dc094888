//! One test per acceptance criterion. Each prints a single PASS/FAIL line to
//! stderr, bypassing the test harness capture, and then asserts.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rsk_rates::harness::{run_experiment, to_csv, Experiment, ExperimentConfig, ExperimentReport};
use rsk_rates::lci::{lcis_bruteforce, lcis_dp};
use rsk_rates::limits::sample_j_km;
use rsk_rates::model::{prefix_counts, sample_word, Distribution, Word};
use rsk_rates::rng::UniformStream;
use rsk_rates::rsk::{greene_oracle, li_bruteforce, li_dp, rsk_shape};
use rsk_rates::variational::{max_z_by_enumeration, max_z_full, max_z_restricted};

const SEED: u64 = 0x0ddb_a11c_afe5_eed5;

fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    let line = format!(
        "{} criterion {id:>2}: {title} | {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    std::io::stderr().lock().write_all(line.as_bytes()).unwrap();
    assert!(pass, "{line}");
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn config(experiment: Experiment, dist: Vec<f64>, n_grid: Vec<usize>, n_samples: usize) -> ExperimentConfig {
    ExperimentConfig {
        dist,
        n_grid,
        n_samples,
        seed: SEED,
        workers: workers(),
        ..ExperimentConfig::defaults(experiment)
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn random_distribution(rng: &mut UniformStream, m: usize) -> Distribution {
    let raw: Vec<f64> = (0..m).map(|_| 0.05 + rng.uniform()).collect();
    let total: f64 = raw.iter().sum();
    Distribution::new(raw.iter().map(|x| x / total).collect()).unwrap()
}

fn random_word(rng: &mut UniformStream, n: usize, m: usize) -> Word {
    Word::new((0..n).map(|_| 1 + (rng.uniform() * m as f64) as u32).collect())
}

fn all_words(n: usize, m: usize) -> impl Iterator<Item = Word> {
    (0..(m as u64).pow(n as u32)).map(move |mut code| {
        let mut letters = Vec::with_capacity(n);
        for _ in 0..n {
            letters.push(1 + (code % m as u64) as u32);
            code /= m as u64;
        }
        Word::new(letters)
    })
}

#[test]
fn criterion_01_identity_suite() {
    let start = Instant::now();
    let mut rng = UniformStream::new(SEED ^ 1);
    let mut worst = 0.0f64;
    let mut violations = 0;
    for i in 0..10_000u64 {
        let m = 2 + (rng.uniform() * 5.0) as usize;
        let n = 1 + (rng.uniform() * 300.0) as usize;
        let dist = random_distribution(&mut rng, m);
        let word = sample_word(&dist, n, SEED.wrapping_add(i));
        let lhs = max_z_full(&prefix_counts(&word, m).unwrap(), &dist).unwrap();
        let li = li_dp(&word, m).unwrap() as f64;
        let rhs = (li - n as f64 * dist.p_max()) / (n as f64).sqrt();
        let dev = (lhs - rhs).abs();
        worst = worst.max(dev);
        if !(dev <= 1e-9) {
            violations += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "variational maximum equals centered LI",
        violations == 0 && within(elapsed, 60),
        &format!("10000 pairs, violations={violations}, max|dev|={worst:e} ≤ 1e-9, {elapsed:.1?} ≤ 60s"),
    );
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = UniformStream::new(SEED ^ 2);
    let mut mismatches = 0;
    for _ in 0..1_000 {
        let m = 2 + (rng.uniform() * 4.0) as usize;
        let n = (rng.uniform() * 13.0) as usize;
        let word = random_word(&mut rng, n, m);
        let dp = li_dp(&word, m).unwrap();
        if dp != li_bruteforce(&word).unwrap() || dp != rsk_shape(&word).first_row() {
            mismatches += 1;
        }
    }
    for n in 0..=10 {
        for word in all_words(n, 2) {
            let dp = li_dp(&word, 2).unwrap();
            if dp != li_bruteforce(&word).unwrap() || dp != rsk_shape(&word).first_row() {
                mismatches += 1;
            }
        }
    }
    let mut greene_mismatches = 0;
    for (n, m) in [(7, 3), (10, 2)] {
        for word in all_words(n, m) {
            let shape = rsk_shape(&word);
            for k in 1..=m {
                if shape.cumulative(k) != greene_oracle(&word, k).unwrap() {
                    greene_mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        "LI routes and Greene invariants agree",
        mismatches == 0 && greene_mismatches == 0 && within(elapsed, 120),
        &format!(
            "LI mismatches={mismatches}, Greene mismatches={greene_mismatches} over 3^7 + 2^10 words, {elapsed:.1?} ≤ 120s"
        ),
    );
}

#[test]
fn criterion_03_composition_enumeration() {
    let mut rng = UniformStream::new(SEED ^ 3);
    let tied = [
        Distribution::uniform(2).unwrap(),
        Distribution::uniform(3).unwrap(),
        Distribution::new(vec![0.4, 0.4, 0.2]).unwrap(),
        Distribution::new(vec![0.2, 0.4, 0.4]).unwrap(),
    ];
    let mut worst = 0.0f64;
    for i in 0..500 {
        let m = 2 + (rng.uniform() * 2.0) as usize;
        let n = 1 + (rng.uniform() * 8.0) as usize;
        let dist = if i % 2 == 0 {
            random_distribution(&mut rng, m)
        } else {
            tied[i / 2 % tied.len()].clone()
        };
        let word = random_word(&mut rng, n, dist.m());
        let counts = prefix_counts(&word, dist.m()).unwrap();
        let full = max_z_full(&counts, &dist).unwrap() - max_z_by_enumeration(&counts, &dist, false).unwrap();
        let restricted =
            max_z_restricted(&counts, &dist).unwrap() - max_z_by_enumeration(&counts, &dist, true).unwrap();
        worst = worst.max(full.abs()).max(restricted.abs());
    }
    verdict(
        3,
        "split-point maxima equal lattice enumeration",
        worst <= 1e-12,
        &format!("500 words, max|dev|={worst:e} ≤ 1e-12"),
    );
}

/// Uniform binary: T_{1,2} at n = 10⁴ against J_{1,2}, 10⁵ draws each.
fn binary_report() -> &'static (ExperimentReport, Duration) {
    static REPORT: OnceLock<(ExperimentReport, Duration)> = OnceLock::new();
    REPORT.get_or_init(|| {
        let start = Instant::now();
        let report = run_experiment(&config(Experiment::Wp, vec![0.5, 0.5], vec![10_000], 100_000)).unwrap();
        (report, start.elapsed())
    })
}

#[test]
fn criterion_04_uniform_binary_convergence() {
    let (report, elapsed) = binary_report();
    let ks = report.value(10_000, "ks").unwrap();
    verdict(
        4,
        "uniform binary KS(T_12, J_12)",
        ks <= 0.02 && within(*elapsed, 300),
        &format!("n=10000, N=100000, ks={ks:.5} ≤ 0.02, {elapsed:.1?} ≤ 300s"),
    );
}

#[test]
fn criterion_05_rate_slope() {
    let start = Instant::now();
    let report = run_experiment(&config(
        Experiment::Rate,
        vec![1.0 / 3.0; 3],
        vec![100, 1_000, 10_000, 30_000],
        50_000,
    ))
    .unwrap();
    let elapsed = start.elapsed();
    let slope = report.summary.slope.unwrap_or(f64::NAN);
    let c_hat = report.summary.c_hat.unwrap_or(f64::NAN);
    let growth = report.check("c_hat_last_two").cloned();
    let growth_ok = growth.as_ref().is_some_and(|c| c.pass);
    let ks: Vec<String> = [100, 1_000, 10_000, 30_000]
        .iter()
        .map(|&n| format!("{:.4}", report.value(n, "ks").unwrap()))
        .collect();
    verdict(
        5,
        "rate slope for uniform m=3",
        slope <= -0.25 && c_hat.is_finite() && growth_ok && within(elapsed, 600),
        &format!(
            "ks=[{}], slope={slope:.4} ≤ -0.25, c_hat={c_hat:.4}, last normalized {:.4} ≤ 2×prev {:.4}, {elapsed:.1?} ≤ 600s",
            ks.join(", "),
            growth.as_ref().map_or(f64::NAN, |c| c.value),
            growth.as_ref().map_or(f64::NAN, |c| c.threshold / 2.0),
        ),
    );
}

#[test]
fn criterion_06_j12_closed_form_mean() {
    let draws = 100_000u64;
    let mean = (0..draws)
        .map(|i| sample_j_km(2, 1, SEED.wrapping_add(i)).unwrap())
        .sum::<f64>()
        / draws as f64;
    let expected = 2.0 / std::f64::consts::PI.sqrt();
    verdict(
        6,
        "mean of J_12 against 2/√π",
        (mean - expected).abs() <= 0.01,
        &format!("mean={mean:.5}, 2/√π={expected:.5}, tolerance 0.01"),
    );
}

#[test]
fn criterion_07_cross_sampler_agreement() {
    let mut results = Vec::new();
    for dist in [vec![0.5, 0.5], vec![0.6, 0.4], vec![0.4, 0.4, 0.2]] {
        let cfg = ExperimentConfig {
            grid_g: 2_000,
            ..config(Experiment::LimitSample, dist.clone(), vec![2_000], 20_000)
        };
        let ks = run_experiment(&cfg).unwrap().value(2_000, "ks").unwrap();
        results.push((dist, ks));
    }
    let pass = results.iter().all(|(_, ks)| *ks <= 0.03);
    let detail: Vec<String> = results.iter().map(|(d, ks)| format!("{d:?}: ks={ks:.4}")).collect();
    verdict(
        7,
        "J_k against discretised Brownian functional",
        pass,
        &format!("{} (each ≤ 0.03, G=2000, N=20000)", detail.join(", ")),
    );
}

#[test]
fn criterion_08_gap_lemma() {
    let report = run_experiment(&ExperimentConfig {
        alpha: 1.0,
        ..config(Experiment::Gap, vec![0.5, 0.3, 0.2], vec![10_000], 1_000)
    })
    .unwrap();
    let min_gap = report.value(10_000, "min_gap").unwrap();
    let exceed = report.value(10_000, "exceed_fraction").unwrap();
    let bound = report.value(10_000, "bound").unwrap();
    verdict(
        8,
        "gap between full and restricted maxima",
        min_gap >= 0.0 && exceed <= 0.01,
        &format!("min gap={min_gap:e} ≥ 0, exceed fraction={exceed} ≤ 0.01 (bound {bound:.3})"),
    );
}

#[test]
fn criterion_09_bernstein_event() {
    let report = run_experiment(&ExperimentConfig {
        alpha: 1.0,
        ..config(Experiment::EventAn, vec![0.5, 0.5], vec![500], 200)
    })
    .unwrap();
    let failures = report.value(500, "failures").unwrap();
    verdict(
        9,
        "window deviation event",
        failures <= 8.0,
        &format!("n=500, N=200, failures={failures} ≤ 8"),
    );
}

#[test]
fn criterion_10_counterexample_coupling() {
    let report = run_experiment(&config(Experiment::CoupleDemo, vec![0.5, 0.5], vec![30], 10_000)).unwrap();
    let mismatches = report.value(30, "mismatches").unwrap();
    let ks = report.value(30, "ks").unwrap();
    let combined = report.value(30, "dkw_combined").unwrap();
    let resolved = report.value(30, "ks_shift_resolved").unwrap();
    verdict(
        10,
        "coupled near-uniform binary words",
        mismatches <= 3.0 && ks <= 2.0 * combined,
        &format!(
            "mismatches={mismatches} ≤ 3, ks={ks:.4} ≤ 2×{combined:.4}; ks blind to shifts < 1e-6 = {resolved:.4}"
        ),
    );
}

#[test]
fn criterion_11_tracy_widom_direction() {
    let report = run_experiment(&ExperimentConfig {
        m_ref: 500,
        ..config(Experiment::TwRegime, vec![0.5, 0.5], vec![4, 16, 64], 20_000)
    })
    .unwrap();
    let ks: Vec<f64> = [4, 16, 64].iter().map(|&m| report.value(m, "ks").unwrap()).collect();
    let decreasing = ks.windows(2).all(|w| w[1] < w[0]);
    verdict(
        11,
        "scaled J_1m approaches the Tracy–Widom reference",
        decreasing,
        &format!("ks(m=4,16,64)=[{:.4}, {:.4}, {:.4}] strictly decreasing, m_ref=500", ks[0], ks[1], ks[2]),
    );
}

#[test]
fn criterion_12_wasserstein() {
    let (report, _) = binary_report();
    let w1 = report.value(10_000, "w1").unwrap();
    let identical = report.check("w1_identical").unwrap().value;
    verdict(
        12,
        "W_1 between T_12 and J_12",
        w1 <= 0.05 && identical == 0.0,
        &format!("w1={w1:.5} ≤ 0.05, w1(identical)={identical}"),
    );
}

#[test]
fn criterion_13_lcis() {
    let mut rng = UniformStream::new(SEED ^ 13);
    let mut dp_mismatches = 0;
    for _ in 0..500 {
        let m = 1 + (rng.uniform() * 3.0) as usize;
        let (nx, ny) = ((rng.uniform() * 13.0) as usize, (rng.uniform() * 13.0) as usize);
        let x = random_word(&mut rng, nx, m);
        let y = random_word(&mut rng, ny, m);
        if lcis_dp(&x, &y) != lcis_bruteforce(&x, &y).unwrap() {
            dp_mismatches += 1;
        }
    }
    let mut self_mismatches = 0;
    for _ in 0..1_000 {
        let m = 1 + (rng.uniform() * 5.0) as usize;
        let n = (rng.uniform() * 200.0) as usize;
        let x = random_word(&mut rng, n, m);
        if lcis_dp(&x, &x) != li_dp(&x, m).unwrap() {
            self_mismatches += 1;
        }
    }
    verdict(
        13,
        "common increasing subsequences",
        dp_mismatches == 0 && self_mismatches == 0,
        &format!("dp vs brute force mismatches={dp_mismatches}/500, lcis(x,x) vs li mismatches={self_mismatches}/1000"),
    );
}

#[test]
fn criterion_14_reproducibility() {
    let mut differing = Vec::new();
    for e in Experiment::ALL {
        let mut cfg = ExperimentConfig::defaults(e);
        cfg.seed = SEED;
        cfg.n_samples = 300;
        match e {
            Experiment::TwRegime => {
                cfg.n_grid = vec![3, 9];
                cfg.m_ref = 60;
            }
            Experiment::LimitSample => cfg.grid_g = 100,
            Experiment::Lci => cfg.n_grid = vec![8, 16],
            Experiment::Gap | Experiment::EventAn => cfg.n_grid = vec![100, 300],
            Experiment::CoupleDemo => cfg.n_grid = vec![12, 30],
            _ => cfg.n_grid = vec![30, 300],
        }
        let mut outputs = Vec::new();
        for workers in [1, 8, 1, 8] {
            cfg.workers = workers;
            outputs.push(to_csv(&run_experiment(&cfg).unwrap()).unwrap());
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            differing.push(e.name());
        }
    }
    verdict(
        14,
        "byte-identical CSV across runs and worker counts",
        differing.is_empty(),
        &format!("10 experiments × workers {{1, 8}} × 2 runs, differing={differing:?}"),
    );
}
