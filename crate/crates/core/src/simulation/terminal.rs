use super::plan::SimulationPlan;
use crate::error::{Error, Result};
use crate::model::{cholesky_factor, ModelConfig};
use crate::rng::PathRng;
use rayon::prelude::*;
use std::io::{self, Write};

/// Paths handed to one rayon task; results do not depend on this value.
const PATHS_PER_TASK: usize = 512;

/// Forward rates at one time, with a flag per rate that has reached its fixing date.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub time: f64,
    pub rates: Vec<f64>,
    pub expired: Vec<bool>,
}

/// Terminal forward-rate vectors of every simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalSample {
    horizon: f64,
    num_rates: usize,
    antithetic: bool,
    /// Row-major `n_paths x M`.
    rates: Vec<f64>,
    expiries: Vec<f64>,
}

impl TerminalSample {
    pub(crate) fn from_parts(
        horizon: f64,
        num_rates: usize,
        antithetic: bool,
        rates: Vec<f64>,
        expiries: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(rates.len() % num_rates, 0);
        Self {
            horizon,
            num_rates,
            antithetic,
            rates,
            expiries,
        }
    }

    /// Wraps externally produced rate vectors `F_1(t)..F_M(t)`, one per path.
    pub fn from_paths(config: &ModelConfig, horizon: f64, paths: &[Vec<f64>]) -> Result<Self> {
        let m = config.num_rates();
        let mut rates = Vec::with_capacity(paths.len() * m);
        for (p, row) in paths.iter().enumerate() {
            if row.len() != m {
                return Err(Error::State(format!(
                    "path {p} holds {} rates, model has {m}",
                    row.len()
                )));
            }
            if let Some(&f) = row.iter().find(|f| !(**f > 0.0)) {
                return Err(Error::State(format!(
                    "path {p}: rates must be positive, got {f}"
                )));
            }
            rates.extend_from_slice(row);
        }
        let expiries = (1..=m).map(|n| config.tenor().expiry(n)).collect();
        Ok(Self::from_parts(horizon, m, false, rates, expiries))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn num_rates(&self) -> usize {
        self.num_rates
    }

    pub fn n_paths(&self) -> usize {
        self.rates.len() / self.num_rates
    }

    /// Whether consecutive paths `(2k, 2k+1)` are antithetic pairs.
    pub fn is_antithetic(&self) -> bool {
        self.antithetic
    }

    /// `F_1(t*)..F_M(t*)` on path `p`.
    pub fn path(&self, p: usize) -> &[f64] {
        &self.rates[p * self.num_rates..(p + 1) * self.num_rates]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.rates.chunks_exact(self.num_rates)
    }

    /// `F_n(t*)` across paths, rate index 1-based.
    pub fn rate(&self, n: usize) -> Vec<f64> {
        self.paths().map(|p| p[n - 1]).collect()
    }

    /// Whether rate `n` has fixed by the horizon (`t* >= T_{n-1}`).
    pub fn is_expired(&self, n: usize) -> bool {
        self.horizon >= self.expiries[n - 1]
    }

    pub fn state(&self, p: usize) -> MarketState {
        MarketState {
            time: self.horizon,
            rates: self.path(p).to_vec(),
            expired: (1..=self.num_rates).map(|n| self.is_expired(n)).collect(),
        }
    }

    /// Likelihood-chain factors `1 + τ_i F_i(t*)` on path `p`.
    pub fn likelihood_factors(&self, p: usize, taus: &[f64]) -> Vec<f64> {
        self.path(p)
            .iter()
            .zip(taus)
            .map(|(f, tau)| 1.0 + tau * f)
            .collect()
    }

    /// CSV dump: header `path,F_1,...,F_M`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "path")?;
        for n in 1..=self.num_rates {
            write!(out, ",F_{n}")?;
        }
        writeln!(out)?;
        for (p, row) in self.paths().enumerate() {
            write!(out, "{p}")?;
            for f in row {
                write!(out, ",{f:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Simulates `F_1..F_M` under the terminal measure `Q^M` with a log-Euler
/// scheme, left-endpoint drift and volatility, and exact stops at each rate's
/// fixing date.
pub fn simulate_terminal_measure(
    config: &ModelConfig,
    plan: &SimulationPlan,
) -> Result<TerminalSample> {
    let tenor = config.tenor();
    plan.validate(tenor)?;
    let m = config.num_rates();
    let chol = cholesky_factor(config.corr())?;
    let grid = plan.time_grid(tenor);

    let steps: Vec<Step> = grid
        .windows(2)
        .map(|w| Step::new(config, w[0], w[1]))
        .collect::<Result<_>>()?;

    let taus = tenor.year_fractions().to_vec();
    let corr: Vec<f64> = (0..m * m)
        .map(|k| config.corr().get(k / m, k % m))
        .collect();
    let log_f0: Vec<f64> = config.curve().forwards().iter().map(|f| f.ln()).collect();
    let expiries: Vec<f64> = (1..=m).map(|n| tenor.expiry(n)).collect();

    let kernel = PathKernel {
        m,
        steps: &steps,
        chol: &chol,
        taus: &taus,
        corr: &corr,
        log_f0: &log_f0,
    };

    let mut rates = vec![0.0; plan.n_paths * m];
    rates
        .par_chunks_mut(PATHS_PER_TASK * m)
        .enumerate()
        .for_each(|(task, chunk)| {
            let mut scratch = Scratch::new(m);
            for (i, out) in chunk.chunks_exact_mut(m).enumerate() {
                let p = task * PATHS_PER_TASK + i;
                let (stream, sign) = if plan.antithetic {
                    ((p / 2) as u64, if p.is_multiple_of(2) { 1.0 } else { -1.0 })
                } else {
                    (p as u64, 1.0)
                };
                let mut rng = PathRng::new(plan.seed, stream);
                kernel.run(&mut rng, sign, &mut scratch, out);
            }
        });

    Ok(TerminalSample::from_parts(
        plan.horizon,
        m,
        plan.antithetic,
        rates,
        expiries,
    ))
}

/// Path-independent data of one time step.
struct Step {
    dt: f64,
    sqrt_dt: f64,
    /// `σ_n(t_left)`, zero once rate `n` has fixed.
    sigma: Vec<f64>,
    live: Vec<bool>,
}

impl Step {
    fn new(config: &ModelConfig, left: f64, right: f64) -> Result<Self> {
        let m = config.num_rates();
        let mut sigma = vec![0.0; m];
        let mut live = vec![false; m];
        for n in 1..=m {
            // the grid contains every fixing date, so a step is either wholly before it or not
            if right <= config.tenor().expiry(n) {
                live[n - 1] = true;
                sigma[n - 1] = config.vols().sigma(n, left).map_err(|e| {
                    Error::domain(format!("volatility lookup during simulation: {e}"))
                })?;
            }
        }
        let dt = right - left;
        Ok(Self {
            dt,
            sqrt_dt: dt.sqrt(),
            sigma,
            live,
        })
    }
}

struct Scratch {
    z: Vec<f64>,
    shock: Vec<f64>,
    drift_term: Vec<f64>,
}

impl Scratch {
    fn new(m: usize) -> Self {
        Self {
            z: vec![0.0; m],
            shock: vec![0.0; m],
            drift_term: vec![0.0; m],
        }
    }
}

struct PathKernel<'a> {
    m: usize,
    steps: &'a [Step],
    chol: &'a crate::model::LowerTriangular,
    taus: &'a [f64],
    corr: &'a [f64],
    log_f0: &'a [f64],
}

impl PathKernel<'_> {
    #[inline]
    fn run(&self, rng: &mut PathRng, sign: f64, s: &mut Scratch, log_f: &mut [f64]) {
        let m = self.m;
        log_f.copy_from_slice(self.log_f0);
        for step in self.steps {
            // a full normal vector is drawn every step so stream positions stay aligned
            rng.fill_normal(&mut s.z);
            if sign < 0.0 {
                s.z.iter_mut().for_each(|z| *z = -*z);
            }
            self.chol.mul_vec(&s.z, &mut s.shock);

            for (j, (&lf, term)) in log_f.iter().zip(s.drift_term.iter_mut()).enumerate() {
                let f = lf.exp();
                *term = self.taus[j] * step.sigma[j] * f / (1.0 + self.taus[j] * f);
            }
            for (n, lf) in log_f.iter_mut().enumerate() {
                if !step.live[n] {
                    continue;
                }
                let sig = step.sigma[n];
                let acc: f64 = self.corr[n * m + n + 1..(n + 1) * m]
                    .iter()
                    .zip(&s.drift_term[n + 1..])
                    .map(|(rho, term)| rho * term)
                    .sum();
                let drift = -sig * acc;
                *lf += (drift - 0.5 * sig * sig) * step.dt + sig * s.shock[n] * step.sqrt_dt;
            }
        }
        for x in log_f.iter_mut() {
            *x = x.exp();
        }
    }
}
