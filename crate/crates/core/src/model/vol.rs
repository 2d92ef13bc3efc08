use crate::error::{Error, Result};

/// Right-continuous step function on `[0, end]`.
///
/// Segment `i` covers `[ends[i-1], ends[i])` (with `ends[-1] = 0`), the last
/// segment is closed on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    ends: Vec<f64>,
    levels: Vec<f64>,
}

impl PiecewiseConstant {
    /// `ends` are the right endpoints of the segments, ascending and positive.
    pub fn new(ends: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if ends.is_empty() || ends.len() != levels.len() {
            return Err(Error::domain(format!(
                "step function needs matching non-empty breakpoints and levels ({} vs {})",
                ends.len(),
                levels.len()
            )));
        }
        let mut prev = 0.0;
        for &e in &ends {
            if !e.is_finite() || e <= prev {
                return Err(Error::domain(format!(
                    "breakpoints must be positive and strictly ascending, got {e} after {prev}"
                )));
            }
            prev = e;
        }
        if let Some(&l) = levels.iter().find(|l| !l.is_finite() || **l <= 0.0) {
            return Err(Error::domain(format!(
                "volatility levels must be strictly positive, got {l}"
            )));
        }
        Ok(Self { ends, levels })
    }

    pub fn constant(level: f64, end: f64) -> Result<Self> {
        Self::new(vec![end], vec![level])
    }

    pub fn end(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.ends
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Value at `t`; `None` outside `[0, end]`.
    pub fn value(&self, t: f64) -> Option<f64> {
        if !(0.0..=self.end()).contains(&t) {
            return None;
        }
        let i = self.ends.partition_point(|&e| e <= t);
        Some(self.levels[i.min(self.levels.len() - 1)])
    }

    /// Exact `∫_0^t f(s) g(s) ds` over the merged breakpoints of both functions.
    pub fn integrate_product(&self, other: &PiecewiseConstant, t: f64) -> Result<f64> {
        if t < 0.0 || t > self.end() || t > other.end() {
            return Err(Error::domain(format!(
                "integration bound {t} outside [0, {}]",
                self.end().min(other.end())
            )));
        }
        let (mut i, mut j) = (0, 0);
        let mut left = 0.0;
        let mut acc = 0.0;
        while left < t {
            let right = self.ends[i].min(other.ends[j]).min(t);
            acc += self.levels[i] * other.levels[j] * (right - left);
            left = right;
            if self.ends[i] <= left && i + 1 < self.ends.len() {
                i += 1;
            }
            if other.ends[j] <= left && j + 1 < other.ends.len() {
                j += 1;
            }
        }
        Ok(acc)
    }
}

/// Deterministic volatility `σ_n(t)` for each rate `n = 1..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolTermStructure {
    curves: Vec<PiecewiseConstant>,
}

impl VolTermStructure {
    pub fn new(curves: Vec<PiecewiseConstant>) -> Self {
        Self { curves }
    }

    /// Constant levels, each defined on `[0, end]`.
    pub fn constant(levels: &[f64], end: f64) -> Result<Self> {
        let curves = levels
            .iter()
            .map(|&l| PiecewiseConstant::constant(l, end))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { curves })
    }

    pub fn num_rates(&self) -> usize {
        self.curves.len()
    }

    /// Volatility function of rate `n` (1-based).
    pub fn curve(&self, n: usize) -> &PiecewiseConstant {
        &self.curves[n - 1]
    }

    pub fn curves(&self) -> &[PiecewiseConstant] {
        &self.curves
    }

    /// `σ_n(t)`, or a domain error past the curve's end.
    pub fn sigma(&self, n: usize, t: f64) -> Result<f64> {
        self.check_index(n)?;
        self.curves[n - 1].value(t).ok_or_else(|| {
            Error::domain(format!(
                "t={t} outside the domain [0, {}] of sigma_{n}",
                self.curves[n - 1].end()
            ))
        })
    }

    pub(crate) fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.curves.len() {
            return Err(Error::domain(format!(
                "rate index {n} outside 1..={}",
                self.curves.len()
            )));
        }
        Ok(())
    }
}
