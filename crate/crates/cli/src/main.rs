use clap::{Args, Parser, Subcommand, ValueEnum};
use lmm_cli::{parse_quantiles, run, Command, Measure, RunSpec, Sampler, VGrid};
use lmm_tails::{Error, ScanThresholds};
use std::path::PathBuf;
use std::process::ExitCode;

/// Monte Carlo study of forward-rate tails in the log-normal LIBOR market model.
#[derive(Parser)]
#[command(name = "lmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate terminal forward rates and dump them as CSV.
    Simulate(Common),
    /// Bracket the critical exponent of E[exp(v log² F_n(t))].
    MomentScan(Common),
    /// Fit the log-survival slope of F_n(t) over an upper quantile window.
    TailReport(Common),
    /// Run the martingale, measure-change, product-bound and Black checks.
    Validate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Terminal,
    Own,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Lmm,
    Frozen,
}

#[derive(Args)]
struct Common {
    /// Model configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Parent directory for run directories.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Rate index n (1-based).
    #[arg(long, default_value_t = 1)]
    rate: usize,
    /// Horizon t* in years.
    #[arg(long, default_value_t = RunSpec::DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = RunSpec::DEFAULT_PATHS)]
    paths: usize,
    #[arg(long, default_value_t = RunSpec::DEFAULT_STEPS)]
    steps_per_year: u32,
    #[arg(long, default_value_t = RunSpec::DEFAULT_SEED)]
    seed: u64,
    /// Pair each path with its negated-shock twin.
    #[arg(long)]
    antithetic: bool,
    /// Exponent grid `lo:hi:count`; defaults to 0.1..2 times the critical exponent.
    #[arg(long)]
    v_grid: Option<String>,
    #[arg(long, value_enum, default_value = "terminal")]
    measure: MeasureArg,
    /// Full simulation or exact frozen-drift draws.
    #[arg(long, value_enum, default_value = "lmm")]
    sampler: SamplerArg,
    /// Tail-fit window `lo:hi`.
    #[arg(long, default_value = "0.99:0.9999")]
    quantiles: String,
    /// Largest relative standard error of a convergent point.
    #[arg(long)]
    max_rel_se: Option<f64>,
    /// Largest single-path share of a convergent point.
    #[arg(long)]
    max_share: Option<f64>,
    /// Largest growth per path doubling of a convergent point.
    #[arg(long)]
    max_growth: Option<f64>,
    /// Growth per path doubling at which a point is divergent.
    #[arg(long)]
    divergent_growth: Option<f64>,
}

fn resolve(command: Command, a: Common) -> Result<RunSpec, Error> {
    let mut spec = RunSpec::new(command, a.config, a.out);
    spec.rate = a.rate;
    spec.horizon = a.horizon;
    spec.paths = a.paths;
    spec.steps_per_year = a.steps_per_year;
    spec.seed = a.seed;
    spec.antithetic = a.antithetic;
    spec.v_grid = a.v_grid.as_deref().map(VGrid::parse).transpose()?;
    spec.measure = match a.measure {
        MeasureArg::Terminal => Measure::Terminal,
        MeasureArg::Own => Measure::Own,
    };
    spec.sampler = match a.sampler {
        SamplerArg::Lmm => Sampler::Lmm,
        SamplerArg::Frozen => Sampler::Frozen,
    };
    spec.quantiles = parse_quantiles(&a.quantiles)?;
    let d = ScanThresholds::default();
    spec.thresholds = ScanThresholds {
        max_rel_std_error: a.max_rel_se.unwrap_or(d.max_rel_std_error),
        max_share: a.max_share.unwrap_or(d.max_share),
        max_growth: a.max_growth.unwrap_or(d.max_growth),
        divergent_growth: a.divergent_growth.unwrap_or(d.divergent_growth),
    };
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::MomentScan(a) => (Command::MomentScan, a),
        Cmd::TailReport(a) => (Command::TailReport, a),
        Cmd::Validate(a) => (Command::Validate, a),
    };
    let result = resolve(command, args).and_then(|spec| run(&spec));
    let error = match result {
        Ok(outcome) => {
            println!("{}", outcome.dir.display());
            outcome.error()
        }
        Err(e) => Some(e),
    };
    match error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            println!("{}", e.code());
            ExitCode::FAILURE
        }
    }
}
