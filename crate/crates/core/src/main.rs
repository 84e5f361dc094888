use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rsk_rates::harness::{
    run_experiment, to_csv, to_json, ConfigOverrides, Experiment, ExperimentConfig, OutputFormat,
};
use rsk_rates::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Monte Carlo convergence-rate experiments for longest increasing
/// subsequences of random words.
#[derive(Debug, Parser)]
#[command(name = "rsk-rates", version)]
struct Cli {
    experiment: Experiment,

    /// JSON configuration file; flags given here take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Letter probabilities, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    dist: Option<Vec<f64>>,

    /// Word lengths (matrix dimensions for tw-regime), comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,

    /// Monte Carlo samples per grid point.
    #[arg(long)]
    samples: Option<usize>,

    #[arg(long)]
    alpha: Option<f64>,

    /// Grid size of the Brownian sampler.
    #[arg(long)]
    grid: Option<usize>,

    /// Dimension of the Tracy–Widom reference matrices.
    #[arg(long)]
    mref: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads [default: $RSK_RATES_WORKERS, else all cores].
    #[arg(long)]
    workers: Option<usize>,

    /// Output path prefix; the extension follows --format. Stdout if absent.
    #[arg(long)]
    out: Option<String>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

impl Cli {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            experiment: Some(self.experiment),
            dist: self.dist.clone(),
            n_grid: self.n_grid.clone(),
            n_samples: self.samples,
            alpha: self.alpha,
            grid_g: self.grid,
            m_ref: self.mref,
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
        }
    }
}

fn config(cli: &Cli) -> rsk_rates::Result<ExperimentConfig> {
    let file = match &cli.config {
        Some(path) => ConfigOverrides::from_path(path)?,
        None => ConfigOverrides::default(),
    };
    ExperimentConfig::resolve(cli.experiment, &file, &cli.overrides())
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> rsk_rates::Result<bool> {
    let report = run_experiment(cfg)?;
    let text = match cli.format {
        OutputFormat::Csv => to_csv(&report)?,
        OutputFormat::Json => to_json(&report)?,
    };
    match &cfg.out {
        Some(prefix) => {
            let path = format!("{prefix}.{}", cli.format.extension());
            std::fs::write(&path, text)?;
            eprintln!("wrote {path}");
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    for check in &report.summary.checks {
        eprintln!(
            "{} {} value={} threshold={}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.value,
            check.threshold
        );
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e @ Error::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}
