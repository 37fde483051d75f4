use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merton::{CostVariant, DebtProblem, MarketParams};
use crate::mc::{Integrator, SweepOptions};
use crate::sde::TimeGrid;

/// Experiment parameters, loaded from JSON. Every section and field is optional;
/// missing values take the defaults of the debt-repayment example.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub market: MarketParams,
    pub problem: ProblemConfig,
    pub mc: McConfig,
    pub hjb: HjbConfig,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub c1: f64,
    pub c2: f64,
    pub x0: f64,
    /// Cost variant used by `hjb`; `verify` always checks the running-cost problem.
    pub variant: CostVariant,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        let p = DebtProblem::default();
        Self {
            beta: p.beta,
            horizon: p.horizon,
            c1: p.c1,
            c2: p.c2,
            x0: p.x0,
            variant: CostVariant::Running,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub n_paths: usize,
    pub dt: f64,
    /// Simulated time span, years.
    pub horizon: f64,
    pub master_seed: u64,
    pub integrator: Integrator,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100,
            dt: 0.01,
            horizon: 25.0,
            master_seed: 42,
            integrator: Integrator::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HjbConfig {
    pub x_min: f64,
    pub n_x: usize,
    /// Time steps; the smallest stable count when absent.
    pub n_t: Option<usize>,
    pub n_u: usize,
    /// Time slices written to `hjb.csv` (evenly spaced, including both ends).
    pub output_slices: usize,
}

impl Default for HjbConfig {
    fn default() -> Self {
        Self {
            x_min: -200.0,
            n_x: 400,
            n_t: None,
            n_u: crate::hjb::DEFAULT_CONTROL_SAMPLES,
            output_slices: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub emit_svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            emit_svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub betas: Vec<f64>,
    /// Radius of the ball a path must enter to count as converged.
    pub epsilon: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            betas: vec![2.1, 4.5, 7.8],
            epsilon: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                Error::Config(e.into_inner().to_string())
            } else {
                Error::Config(format!("{path}: {}", e.into_inner()))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn debt_problem(&self) -> DebtProblem {
        DebtProblem {
            market: self.market,
            beta: self.problem.beta,
            horizon: self.problem.horizon,
            c1: self.problem.c1,
            c2: self.problem.c2,
            x0: self.problem.x0,
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::over(self.mc.horizon, self.mc.dt)
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            horizon: self.problem.horizon,
            c1: self.problem.c1,
            c2: self.problem.c2,
            x0: self.problem.x0,
            n_paths: self.mc.n_paths,
            dt: self.mc.dt,
            sim_horizon: self.mc.horizon,
            master_seed: self.mc.master_seed,
            epsilon: self.sweep.epsilon,
        }
    }

    /// Checks every field, naming the first offending one.
    pub fn validate(&self) -> Result<()> {
        self.debt_problem().validate()?;
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive, got {v}")))
            }
        };
        positive("mc.dt", self.mc.dt)?;
        positive("mc.horizon", self.mc.horizon)?;
        if self.mc.dt > self.mc.horizon {
            return Err(Error::invalid("mc.dt", "must not exceed mc.horizon"));
        }
        if !(self.hjb.x_min < 0.0 && self.hjb.x_min.is_finite()) {
            return Err(Error::invalid("hjb.x_min", format!("need x_min < 0, got {}", self.hjb.x_min)));
        }
        if self.hjb.n_x < 16 {
            return Err(Error::invalid("hjb.n_x", format!("need n_x >= 16, got {}", self.hjb.n_x)));
        }
        if self.hjb.n_t == Some(0) {
            return Err(Error::invalid("hjb.n_t", "need at least one time step"));
        }
        if self.hjb.n_u < 2 {
            return Err(Error::invalid("hjb.n_u", format!("need n_u >= 2, got {}", self.hjb.n_u)));
        }
        if self.hjb.output_slices < 2 {
            return Err(Error::invalid("hjb.output_slices", "need at least 2"));
        }
        if let Some(b) = self.sweep.betas.iter().find(|b| !(**b > 2.0 && b.is_finite())) {
            return Err(Error::invalid("sweep.betas", format!("need every beta > 2, got {b}")));
        }
        positive("sweep.epsilon", self.sweep.epsilon)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.mc.master_seed, 42);
        assert_eq!(cfg.mc.n_paths, 100);
        assert_eq!(cfg.debt_problem(), DebtProblem::default());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"market": {"sigma": 0.2}, "problem": {"T": 2}}"#).unwrap();
        assert_eq!(cfg.market.sigma, 0.2);
        assert_eq!(cfg.market.r, 0.03);
        assert_eq!(cfg.problem.horizon, 2.0);
        assert_eq!(cfg.problem.beta, 2.1);
    }

    #[test]
    fn field_level_errors() {
        let cases = [
            (r#"{"problem": {"beta": 1.5}}"#, "problem.beta"),
            (r#"{"market": {"b": 0.01}}"#, "market.b"),
            (r#"{"mc": {"dt": 0}}"#, "mc.dt"),
            (r#"{"hjb": {"n_x": 8}}"#, "hjb.n_x"),
            (r#"{"sweep": {"betas": [2.5, 1.0]}}"#, "sweep.betas"),
            (r#"{"problem": {"bta": 2.5}}"#, "bta"),
            (r#"{"mc": {"n_paths": -1}}"#, "mc.n_paths"),
            (r#"{"hjb": {"x_min": "far"}}"#, "hjb.x_min"),
        ];
        for (json, field) in cases {
            let err = ExperimentConfig::from_json(json).unwrap_err().to_string();
            assert!(err.contains(field), "{json}: {err}");
        }
    }
}
