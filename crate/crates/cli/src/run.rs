use crate::spec::{Command, Measure, RunSpec, Sampler};
use lmm_tails::estimators::report::{scan_text, tail_text, write_scan_csv, write_tail_csv};
use lmm_tails::estimators::WeightedSample;
use lmm_tails::simulation::{mean_estimate, rn_weights, Estimate};
use lmm_tails::{
    black_caplet_value, check_product_bound, critical_exponent, cumulative_variance,
    fit_tail_slope_about, load_config, reweighted_expectation, sample_frozen_drift,
    scan_critical_exponent, simulate_terminal_measure, Error, MeasureId, ModelConfig, Result,
    ScanSettings, SimulationPlan, TerminalSample,
};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

/// Grid used when `--v-grid` is absent, as multiples of the critical exponent.
const AUTO_GRID: (f64, f64, usize) = (0.1, 2.0, 39);
/// Product-bound exponents in `validate`, as multiples of the critical exponent.
const BOUND_FRACTIONS: [f64; 3] = [0.08, 0.4, 0.8];
/// Caplet strikes in `validate`, as multiples of the initial forward.
const STRIKE_MULTIPLES: [f64; 3] = [0.5, 1.0, 1.5];
/// Standard errors tolerated by every statistical check.
const Z_LIMIT: f64 = 3.0;

/// What a finished command left on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Names of failed validation checks; empty for the other commands.
    pub failed_checks: Vec<String>,
}

impl RunOutcome {
    /// The error the process should exit with, if any.
    pub fn error(&self) -> Option<Error> {
        if self.failed_checks.is_empty() {
            None
        } else {
            Some(Error::CheckFailed(self.failed_checks.join(", ")))
        }
    }
}

/// Validates the spec against the model, runs the command and writes its
/// artifacts plus a `manifest` into a fresh run directory.
pub fn run(spec: &RunSpec) -> Result<RunOutcome> {
    let config = load_config(&spec.config_path)?;
    check_preconditions(spec, &config)?;
    stage(&format!(
        "{}: {} rates, horizon {}, {} paths, seed {}",
        spec.command.name(),
        config.num_rates(),
        spec.horizon,
        spec.paths,
        spec.seed
    ));
    let dir = create_run_dir(spec)?;
    let mut out = Output {
        dir: dir.clone(),
        files: Vec::new(),
    };
    out.write("manifest", spec.manifest().as_bytes())?;
    let failed_checks = match spec.command {
        Command::Simulate => simulate(spec, &config, &mut out).map(|_| Vec::new())?,
        Command::MomentScan => moment_scan(spec, &config, &mut out).map(|_| Vec::new())?,
        Command::TailReport => tail_report(spec, &config, &mut out).map(|_| Vec::new())?,
        Command::Validate => validate(spec, &config, &mut out)?,
    };
    Ok(RunOutcome {
        dir,
        files: out.files,
        failed_checks,
    })
}

fn stage(msg: &str) {
    eprintln!("lmm: {msg}");
}

fn config_error(field: &str, reason: String) -> Error {
    Error::Config {
        field: field.into(),
        reason,
    }
}

fn check_preconditions(spec: &RunSpec, config: &ModelConfig) -> Result<()> {
    let m = config.num_rates();
    if spec.rate == 0 || spec.rate > m {
        return Err(config_error(
            "--rate",
            format!("must lie in 1..={m}, got {}", spec.rate),
        ));
    }
    if spec.paths == 0 {
        return Err(config_error("--paths", "must be positive".into()));
    }
    if spec.steps_per_year == 0 {
        return Err(config_error("--steps-per-year", "must be positive".into()));
    }
    if spec.antithetic && spec.paths % 2 == 1 {
        return Err(config_error(
            "--paths",
            format!("antithetic runs need an even count, got {}", spec.paths),
        ));
    }
    if !(spec.horizon >= 0.0) || !spec.horizon.is_finite() {
        return Err(config_error(
            "--horizon",
            format!("must be finite and nonnegative, got {}", spec.horizon),
        ));
    }
    let n = spec.rate;
    let tenor = config.tenor();
    match spec.command {
        Command::Simulate => {}
        Command::MomentScan | Command::TailReport => {
            if !(spec.horizon > 0.0) || spec.horizon > tenor.expiry(n) {
                return Err(Error::Domain(format!(
                    "--horizon {} must lie in (0, T_{}] = (0, {}] for rate {n}",
                    spec.horizon,
                    n - 1,
                    tenor.expiry(n)
                )));
            }
            if spec.measure == Measure::Own && n < m {
                if spec.sampler == Sampler::Frozen {
                    return Err(config_error(
                        "--measure",
                        "own-measure weights need the full simulation (--sampler lmm)".into(),
                    ));
                }
                if spec.horizon > tenor.expiry(n + 1) {
                    return Err(Error::Domain(format!(
                        "--measure own needs F_{} live at the horizon (T_{n} = {})",
                        n + 1,
                        tenor.expiry(n + 1)
                    )));
                }
            }
            let (lo, hi) = spec.quantiles;
            if spec.command == Command::TailReport && !(0.9 < lo && lo < hi && hi < 1.0) {
                return Err(config_error(
                    "--quantiles",
                    format!("need 0.9 < lo < hi < 1, got {lo}:{hi}"),
                ));
            }
        }
        Command::Validate => {
            if !(spec.horizon > 0.0) {
                return Err(config_error(
                    "--horizon",
                    "validate needs a positive horizon".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Run directory `<out>/<command>-<timestamp>-<seed>`, suffixed on collision.
fn create_run_dir(spec: &RunSpec) -> Result<PathBuf> {
    let io =
        |e: std::io::Error| config_error("--out", format!("{}: {e}", spec.output_dir.display()));
    fs::create_dir_all(&spec.output_dir).map_err(io)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{}-{stamp}-{}", spec.command.name(), spec.seed);
    for k in 1.. {
        let name = if k == 1 {
            base.clone()
        } else {
            format!("{base}-{k}")
        };
        let dir = spec.output_dir.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(io(e)),
        }
    }
    unreachable!()
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| config_error("--out", format!("{}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }
}

fn plan(spec: &RunSpec, n_paths: usize, seed: u64) -> SimulationPlan {
    SimulationPlan::new(spec.horizon, n_paths, seed)
        .with_steps_per_year(spec.steps_per_year)
        .with_antithetic(spec.antithetic)
}

fn simulate(spec: &RunSpec, config: &ModelConfig, out: &mut Output) -> Result<()> {
    stage("simulating");
    let sample = simulate_terminal_measure(config, &plan(spec, spec.paths, spec.seed))?;
    let mut buf = Vec::new();
    sample
        .write_csv(&mut buf)
        .expect("writing to memory cannot fail");
    out.write("terminal.csv", &buf)?;
    stage(&format!("wrote {} paths", sample.n_paths()));
    Ok(())
}

/// Draws of `F_n(t)` with likelihood weights when the own measure is requested.
fn draw_rate(
    spec: &RunSpec,
    config: &ModelConfig,
    n_paths: usize,
    seed: u64,
) -> Result<WeightedSample> {
    let n = spec.rate;
    match spec.sampler {
        Sampler::Frozen => Ok(WeightedSample::unweighted(sample_frozen_drift(
            config,
            n,
            spec.horizon,
            n_paths,
            seed,
        )?)),
        Sampler::Lmm => {
            let sample = simulate_terminal_measure(config, &plan(spec, n_paths, seed))?;
            let values = sample.rate(n);
            if spec.measure == Measure::Own && n < config.num_rates() {
                let w = rn_weights(&sample, config, MeasureId::new(n, config.num_rates())?)?;
                Ok(WeightedSample::weighted(values, w))
            } else {
                Ok(WeightedSample::unweighted(values))
            }
        }
    }
}

fn moment_scan(spec: &RunSpec, config: &ModelConfig, out: &mut Output) -> Result<()> {
    let n = spec.rate;
    let theory = critical_exponent(config.vols(), n, spec.horizon)?;
    let grid = match spec.v_grid {
        Some(g) => g.values(),
        None => {
            let (lo, hi, count) = AUTO_GRID;
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| theory * (lo + i as f64 * step))
                .collect()
        }
    };
    let settings = ScanSettings::new(spec.paths, spec.seed)
        .with_center(config.curve().forward(n))
        .with_thresholds(spec.thresholds);
    stage(&format!("scanning {} exponents", grid.len()));
    let source = |paths: usize, seed: u64| draw_rate(spec, config, paths, seed);
    let report = scan_critical_exponent(&source, &grid, &settings)?.with_theoretical(theory);
    let mut buf = Vec::new();
    write_scan_csv(&report, &mut buf).expect("writing to memory cannot fail");
    out.write("scan.csv", &buf)?;
    let text = scan_text(&report);
    out.write("scan.txt", text.as_bytes())?;
    stage(&format!(
        "bracket [{}, {}], theory {theory}",
        report.bracket.0, report.bracket.1
    ));
    Ok(())
}

fn tail_report(spec: &RunSpec, config: &ModelConfig, out: &mut Output) -> Result<()> {
    let n = spec.rate;
    stage("sampling");
    let sample = draw_rate(spec, config, spec.paths, spec.seed)?;
    let (lo, hi) = spec.quantiles;
    let fit = fit_tail_slope_about(
        &sample.values,
        sample.weights.as_deref(),
        lo,
        hi,
        config.curve().forward(n),
    )?;
    let reference = critical_exponent(config.vols(), n, spec.horizon)?;
    let mut buf = Vec::new();
    write_tail_csv(&fit, &mut buf).expect("writing to memory cannot fail");
    out.write("tail.csv", &buf)?;
    out.write("tail.txt", tail_text(&fit, Some(reference)).as_bytes())?;
    stage(&format!("slope {} (reference {reference})", fit.slope));
    Ok(())
}

/// One row of `validate.csv`.
struct Check {
    name: String,
    passed: bool,
    statistic: f64,
    threshold: f64,
}

impl Check {
    /// `|estimate - target| / se <= Z_LIMIT`.
    fn z(name: String, est: Estimate, target: f64) -> Self {
        let statistic = if est.std_error > 0.0 {
            (est.estimate - target).abs() / est.std_error
        } else if est.estimate == target {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            name,
            passed: statistic <= Z_LIMIT,
            statistic,
            threshold: Z_LIMIT,
        }
    }
}

fn validate(spec: &RunSpec, config: &ModelConfig, out: &mut Output) -> Result<Vec<String>> {
    let m = config.num_rates();
    let t = spec.horizon;
    stage("simulating");
    let sample = simulate_terminal_measure(config, &plan(spec, spec.paths, spec.seed))?;
    let mut checks = Vec::new();

    let terminal = mean_estimate(&sample.rate(m), sample.is_antithetic());
    checks.push(Check::z(
        "martingale_terminal".into(),
        terminal,
        config.curve().forward(m),
    ));

    stage("measure changes");
    for n in 1..=m {
        // weights to Q^n need F_{n+1}..F_M alive at the horizon
        if n < m && t > config.tenor().expiry(n + 1) {
            continue;
        }
        let weights = rn_weights(&sample, config, MeasureId::new(n, m)?)?;
        let f0 = config.curve().forward(n);
        if n < m {
            let unit = reweighted_expectation(&sample, &weights, |_| 1.0)?;
            checks.push(Check::z(format!("rn_weight_mean_{n}"), unit, 1.0));
            let own = reweighted_expectation(&sample, &weights, |f| f[n - 1])?;
            checks.push(Check::z(format!("martingale_own_{n}"), own, f0));
        }
        let stdev = cumulative_variance(config.vols(), n, t.min(config.tenor().expiry(n)))?.sqrt();
        for k in STRIKE_MULTIPLES {
            let strike = k * f0;
            let mc = reweighted_expectation(&sample, &weights, |f| (f[n - 1] - strike).max(0.0))?;
            let black = black_caplet_value(f0, strike, stdev)?;
            checks.push(Check::z(
                format!("black_caplet_{n}_K{strike:.6}"),
                mc,
                black,
            ));
        }
        if n < m && t <= config.tenor().expiry(n) {
            product_bound_checks(spec, config, &sample, n, &mut checks)?;
        }
    }

    let mut csv = String::from("check,status,statistic,threshold\n");
    let mut failed = Vec::new();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            csv,
            "{},{status},{:.16e},{:.16e}",
            c.name, c.statistic, c.threshold
        );
        stage(&format!(
            "{status} {} ({:.3} vs {})",
            c.name, c.statistic, c.threshold
        ));
        if !c.passed {
            failed.push(c.name.clone());
        }
    }
    out.write("validate.csv", csv.as_bytes())?;
    Ok(failed)
}

/// `(lhs - rhs) / combined se <= Z_LIMIT` at a few fractions of the critical
/// exponent. A refusal (estimates not convergent) counts as a failure.
fn product_bound_checks(
    spec: &RunSpec,
    config: &ModelConfig,
    sample: &TerminalSample,
    n: usize,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let t = spec.horizon;
    let vc = critical_exponent(config.vols(), n, t)?;
    let center = config.curve().forward(n);
    for frac in BOUND_FRACTIONS {
        let v = frac * vc;
        let name = format!("product_bound_{n}_v{v:.4}");
        match check_product_bound(config, n, t, v, sample, center, &spec.thresholds) {
            Ok(b) => {
                let se = b.combined_std_error();
                let statistic = if se > 0.0 {
                    (b.lhs.estimate - b.rhs) / se
                } else {
                    -f64::INFINITY
                };
                checks.push(Check {
                    name,
                    passed: b.holds,
                    statistic,
                    threshold: Z_LIMIT,
                });
            }
            Err(Error::Domain(msg)) => {
                stage(&format!("{name} refused: {msg}"));
                checks.push(Check {
                    name,
                    passed: false,
                    statistic: f64::NAN,
                    threshold: Z_LIMIT,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
