use lmm_tails::{Error, Result, ScanThresholds};
use std::fmt::{self, Write as _};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    MomentScan,
    TailReport,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::MomentScan => "moment-scan",
            Command::TailReport => "tail-report",
            Command::Validate => "validate",
        }
    }
}

/// Measure under which a rate's sample is analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// The terminal measure `Q^M` the simulation runs under.
    #[default]
    Terminal,
    /// The rate's own forward measure `Q^n`, reached by likelihood weights.
    Own,
}

/// Where moment-scan and tail-report draw their samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Full log-Euler simulation.
    #[default]
    Lmm,
    /// Exact draws of the frozen-drift approximation.
    Frozen,
}

/// Evenly spaced `v` values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl VGrid {
    /// Parses `lo:hi:count`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::Config {
            field: "--v-grid".into(),
            reason,
        };
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("expected lo:hi:count, got `{text}`")));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad lower end `{}`", parts[0])))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad upper end `{}`", parts[1])))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad count `{}`", parts[2])))?;
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        if !(lo > 0.0) || !hi.is_finite() || hi < lo || (count > 1 && hi == lo) {
            return Err(bad(format!("need 0 < lo < hi, got {lo}:{hi}")));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + i as f64 * step
                }
            })
            .collect()
    }
}

impl fmt::Display for VGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

/// Parses `lo:hi` quantile bounds.
pub fn parse_quantiles(text: &str) -> Result<(f64, f64)> {
    let bad = |reason: String| Error::Config {
        field: "--quantiles".into(),
        reason,
    };
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| bad(format!("expected lo:hi, got `{text}`")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad lower quantile `{lo}`")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad upper quantile `{hi}`")))?;
    Ok((lo, hi))
}

/// Everything one invocation needs, resolved to concrete values.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    /// Rate index `n`, 1-based.
    pub rate: usize,
    pub horizon: f64,
    pub paths: usize,
    pub steps_per_year: u32,
    pub seed: u64,
    pub antithetic: bool,
    /// `None` selects a grid around the closed-form critical exponent.
    pub v_grid: Option<VGrid>,
    pub measure: Measure,
    pub sampler: Sampler,
    pub quantiles: (f64, f64),
    pub thresholds: ScanThresholds,
}

impl RunSpec {
    pub const DEFAULT_PATHS: usize = 100_000;
    pub const DEFAULT_STEPS: u32 = 64;
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_HORIZON: f64 = 1.0;
    pub const DEFAULT_QUANTILES: (f64, f64) = (0.99, 0.9999);

    pub fn new(
        command: Command,
        config_path: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            command,
            config_path: config_path.into(),
            output_dir: output_dir.into(),
            rate: 1,
            horizon: Self::DEFAULT_HORIZON,
            paths: Self::DEFAULT_PATHS,
            steps_per_year: Self::DEFAULT_STEPS,
            seed: Self::DEFAULT_SEED,
            antithetic: false,
            v_grid: None,
            measure: Measure::default(),
            sampler: Sampler::default(),
            quantiles: Self::DEFAULT_QUANTILES,
            thresholds: ScanThresholds::default(),
        }
    }

    /// `key = value` lines recording the resolved spec; no timestamps.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let th = &self.thresholds;
        let measure = match self.measure {
            Measure::Terminal => "terminal",
            Measure::Own => "own",
        };
        let sampler = match self.sampler {
            Sampler::Lmm => "lmm",
            Sampler::Frozen => "frozen",
        };
        let grid = self
            .v_grid
            .map_or_else(|| "auto".to_string(), |g| g.to_string());
        let _ = writeln!(s, "command = \"{}\"", self.command.name());
        let _ = writeln!(s, "config = \"{}\"", self.config_path.display());
        let _ = writeln!(s, "out = \"{}\"", self.output_dir.display());
        let _ = writeln!(s, "rate = {}", self.rate);
        let _ = writeln!(s, "horizon = {:?}", self.horizon);
        let _ = writeln!(s, "paths = {}", self.paths);
        let _ = writeln!(s, "steps_per_year = {}", self.steps_per_year);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "antithetic = {}", self.antithetic);
        let _ = writeln!(s, "v_grid = \"{grid}\"");
        let _ = writeln!(s, "measure = \"{measure}\"");
        let _ = writeln!(s, "sampler = \"{sampler}\"");
        let _ = writeln!(
            s,
            "quantiles = [{:?}, {:?}]",
            self.quantiles.0, self.quantiles.1
        );
        let _ = writeln!(s, "max_rel_std_error = {:?}", th.max_rel_std_error);
        let _ = writeln!(s, "max_share = {:?}", th.max_share);
        let _ = writeln!(s, "max_growth = {:?}", th.max_growth);
        let _ = writeln!(s, "divergent_growth = {:?}", th.divergent_growth);
        s
    }
}
