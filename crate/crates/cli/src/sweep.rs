use std::fmt;
use std::str::FromStr;

use lz_tunneling::model::{Basis, LzParams};
use lz_tunneling::propagator::IntegrationConfig;
use lz_tunneling::LzError;
use rayon::prelude::*;

use crate::record::{evaluate, Evaluation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(Spacing::Log),
            "linear" | "lin" => Ok(Spacing::Linear),
            other => Err(format!("unknown spacing '{other}' (expected log or linear)")),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        })
    }
}

/// Grid of sweep rates in units of `Δ²/(2ħ)` (so each value is also `η`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub basis: Basis,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), LzError> {
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max && self.alpha_max.is_finite()) {
            return Err(LzError::InvalidConfig(format!(
                "need 0 < alpha_min < alpha_max, got {} and {}",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.points < 2 {
            return Err(LzError::InvalidConfig(format!("need at least 2 points, got {}", self.points)));
        }
        Ok(())
    }

    /// Ascending grid with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.alpha_min;
                }
                if i == n {
                    return self.alpha_max;
                }
                let f = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.alpha_min + f * (self.alpha_max - self.alpha_min),
                    Spacing::Log => (self.alpha_min.ln() + f * (self.alpha_max / self.alpha_min).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub basis: Basis,
    pub result: Result<Evaluation, LzError>,
}

fn evaluate_row(eta: f64, basis: Basis, config: &IntegrationConfig) -> SweepRow {
    let result = LzParams::from_eta(eta).and_then(|p| evaluate(&p, basis, config));
    SweepRow { eta, basis, result }
}

/// Evaluates every grid point, using at most `jobs` worker threads
/// (`None` for the rayon default). Rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec, config: &IntegrationConfig, jobs: Option<usize>) -> Result<Vec<SweepRow>, LzError> {
    spec.validate()?;
    config.validate()?;
    let grid = spec.grid();
    let work = || grid.par_iter().map(|&eta| evaluate_row(eta, spec.basis, config)).collect();
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| LzError::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_order() {
        let spec = SweepSpec { alpha_min: 0.01, alpha_max: 1000.0, points: 6, spacing: Spacing::Log, basis: Basis::Diabatic };
        let g = spec.grid();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0], g[5]), (0.01, 1000.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn linear_grid() {
        let spec = SweepSpec { alpha_min: 1.0, alpha_max: 3.0, points: 3, spacing: Spacing::Linear, basis: Basis::Adiabatic };
        assert_eq!(spec.grid(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = SweepSpec { alpha_min: 1.0, alpha_max: 3.0, points: 1, spacing: Spacing::Linear, basis: Basis::Adiabatic };
        assert!(spec.validate().is_err());
        spec.points = 2;
        spec.alpha_min = 5.0;
        assert!(spec.validate().is_err());
        spec.alpha_min = 0.0;
        assert!(spec.validate().is_err());
    }
}
