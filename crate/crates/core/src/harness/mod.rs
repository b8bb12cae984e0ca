//! Load sweeps over the model, the simulator and the collision-only
//! baseline, breaking-point detection and the oracle validation report.
//!
//! Rates in this module are attempts per second; they are converted to
//! per-subframe rates once, when an engine is evaluated.

mod breaking;
mod output;
mod validate;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{baseline_collision_only, solve_total_rate, ModelResult};
use crate::config::{per_second_to_per_subframe, per_subframe_to_per_second, SystemConfig};
use crate::error::{Error, Result};
use crate::sim::{run_replications, SimConfig, SimStats};

pub use breaking::{cmd_breaking_point, first_crossing, BreakingPoint, BreakingPointReport, SENSITIVITY_THRESHOLDS};
pub use output::{format_sig9, write_csv, write_plot_data, OutputFormat, CSV_HEADER};
pub use validate::{cmd_validate, validate_with, Check, ClosedForms, ValidateOptions, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Model,
    Sim,
    Baseline,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Model, Engine::Sim, Engine::Baseline];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Model => "model",
            Engine::Sim => "sim",
            Engine::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "model" => Ok(Engine::Model),
            "sim" => Ok(Engine::Sim),
            "baseline" => Ok(Engine::Baseline),
            other => Err(Error::InvalidConfig(format!(
                "unknown engine `{other}` (expected model, sim or baseline)"
            ))),
        }
    }
}

/// Parses a comma-separated engine list such as `model,sim`.
pub fn parse_engines(list: &str) -> Result<Vec<Engine>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// New-arrival rates in attempts per second, strictly increasing.
    pub grid: Vec<f64>,
    pub system: SystemConfig,
    pub engines: Vec<Engine>,
    /// Simulator replications per grid point.
    pub reps: usize,
    pub seed: u64,
    /// Simulated time per replication.
    pub duration_s: f64,
}

impl SweepSpec {
    /// Spec with 5 replications of 60 s and seed 0.
    pub fn new(grid: Vec<f64>, system: SystemConfig, engines: Vec<Engine>) -> Self {
        Self {
            grid,
            system,
            engines,
            reps: 5,
            seed: 0,
            duration_s: 60.0,
        }
    }

    /// `steps` evenly spaced points from `min` to `max` inclusive.
    pub fn linear_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
        if steps == 0 || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidConfig("grid needs at least one finite point".into()));
        }
        if steps == 1 {
            return Ok(vec![min]);
        }
        let step = (max - min) / (steps - 1) as f64;
        Ok((0..steps)
            .map(|k| if k + 1 == steps { max } else { min + step * k as f64 })
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("empty load grid".into()));
        }
        if self.grid.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidConfig("grid rates must be finite and non-negative".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("grid must be strictly increasing".into()));
        }
        if self.engines.is_empty() {
            return Err(Error::InvalidConfig("no engine selected".into()));
        }
        let mut seen = self.engines.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.engines.len() {
            return Err(Error::InvalidConfig("engine listed twice".into()));
        }
        if self.engines.contains(&Engine::Sim) {
            if self.reps < 2 {
                return Err(Error::InvalidConfig("simulation needs at least two replications".into()));
            }
            self.sim_config()?.validate()?;
        }
        Ok(())
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let subframes = self.duration_s * 1000.0;
        if !(subframes >= 10.0) || !subframes.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "simulated duration {} s is too short",
                self.duration_s
            )));
        }
        Ok(SimConfig::new(self.system, subframes.round() as u64).with_seed(self.seed))
    }
}

/// One output record: one engine at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda_i_per_s: f64,
    pub engine: Engine,
    pub p_outage: f64,
    pub n_tx: f64,
    pub p_c: f64,
    pub p_e: f64,
    /// Total attempt rate per second.
    pub lambda_t_per_s: f64,
    pub rho: f64,
    /// 95% interval on `p_outage`, simulator only.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Fixed-point convergence, model and baseline only.
    pub converged: Option<bool>,
}

impl SweepRow {
    fn from_model(lambda_i_per_s: f64, engine: Engine, r: &ModelResult) -> Self {
        Self {
            lambda_i_per_s,
            engine,
            p_outage: r.p_outage,
            n_tx: r.n_tx,
            p_c: r.p_c,
            p_e: r.p_e,
            lambda_t_per_s: per_subframe_to_per_second(r.load.lambda_t),
            rho: r.rho,
            ci_low: None,
            ci_high: None,
            converged: Some(r.converged),
        }
    }
}

/// Evaluates one engine at `lambda_i_per_s`.
pub fn evaluate(spec: &SweepSpec, engine: Engine, lambda_i_per_s: f64) -> Result<SweepRow> {
    let lambda_i = per_second_to_per_subframe(lambda_i_per_s);
    match engine {
        Engine::Model => Ok(SweepRow::from_model(
            lambda_i_per_s,
            engine,
            &solve_total_rate(lambda_i, &spec.system)?,
        )),
        Engine::Baseline => Ok(SweepRow::from_model(
            lambda_i_per_s,
            engine,
            &baseline_collision_only(lambda_i, &spec.system)?,
        )),
        Engine::Sim => {
            let s = run_replications(&spec.sim_config()?, lambda_i, spec.reps)?;
            let mean = |f: fn(&SimStats) -> f64| s.reps.iter().map(f).sum::<f64>() / s.reps.len() as f64;
            Ok(SweepRow {
                lambda_i_per_s,
                engine,
                p_outage: s.outage.mean,
                n_tx: s.mean_tx.mean,
                p_c: s.p_c.mean,
                p_e: s.p_e.mean,
                lambda_t_per_s: per_subframe_to_per_second(s.lambda_t.mean),
                rho: mean(|r| r.lambda_a) / f64::from(spec.system.mu),
                ci_low: Some(s.outage.ci_low.max(0.0)),
                ci_high: Some(s.outage.ci_high.min(1.0)),
                converged: None,
            })
        }
    }
}

/// Runs every engine at every grid point. Rows are ordered by grid index,
/// then by the order of `spec.engines`, whatever order they finish in.
/// `progress` is called once per finished row.
pub fn sweep<P>(spec: &SweepSpec, progress: P) -> Result<Vec<SweepRow>>
where
    P: Fn(&SweepRow) + Sync,
{
    spec.validate()?;
    let jobs: Vec<(f64, Engine)> = spec
        .grid
        .iter()
        .flat_map(|&x| spec.engines.iter().map(move |&e| (x, e)))
        .collect();
    jobs.into_par_iter()
        .map(|(x, e)| {
            let row = evaluate(spec, e, x)?;
            progress(&row);
            Ok(row)
        })
        .collect()
}
