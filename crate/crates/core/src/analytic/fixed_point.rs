//! Total-load fixed point `lambda_t = lambda_i * N_TX(p_f(lambda_t))`.

use super::chain::{
    activation_probability, chain_steady_state, expected_transmissions, outage_probability,
    ChainSolution,
};
use super::one_shot::{one_shot, FailureModel};
use crate::config::SystemConfig;
use crate::error::{check_rate, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative change between consecutive iterates that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: u32,
    /// Step factor used once the residual starts to alternate in sign.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            max_iterations: 100,
            damping: 0.5,
        }
    }
}

impl SolverOptions {
    pub fn strict() -> Self {
        Self {
            tolerance: 1e-6,
            ..Self::default()
        }
    }
}

/// Offered rates, all per subframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Load {
    /// New arrivals.
    pub lambda_i: f64,
    /// New arrivals plus retransmissions.
    pub lambda_t: f64,
    /// Activated preambles.
    pub lambda_a: f64,
    /// Retransmissions, `lambda_t - lambda_i`.
    pub lambda_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelResult {
    pub load: Load,
    pub p_c: f64,
    pub p_e: f64,
    pub p_f: f64,
    pub p_outage: f64,
    pub n_tx: f64,
    /// Grant-queue load `lambda_a / mu`.
    pub rho: f64,
    /// Per-subframe activation probability of an idle UE.
    pub p_on: f64,
    pub iterations: u32,
    pub converged: bool,
}

impl ModelResult {
    /// Backoff-chain steady state at this operating point.
    pub fn chain(&self, cfg: &SystemConfig) -> Result<ChainSolution> {
        chain_steady_state(self.p_f, self.p_on, cfg)
    }

    /// Relative fixed-point residual `|lambda_t - N_TX lambda_i| / lambda_t`.
    pub fn residual(&self) -> f64 {
        let target = self.n_tx * self.load.lambda_i;
        if self.load.lambda_t == 0.0 {
            target.abs()
        } else {
            (self.load.lambda_t - target).abs() / self.load.lambda_t
        }
    }
}

/// Solves the total load for new-arrival rate `lambda_i` with default
/// options (1% tolerance, 100 iterations).
pub fn solve_total_rate(lambda_i: f64, cfg: &SystemConfig) -> Result<ModelResult> {
    solve_total_rate_with(lambda_i, cfg, &SolverOptions::default(), FailureModel::Full)
}

/// Same pipeline with grant-queue losses switched off.
pub fn baseline_collision_only(lambda_i: f64, cfg: &SystemConfig) -> Result<ModelResult> {
    solve_total_rate_with(
        lambda_i,
        cfg,
        &SolverOptions::default(),
        FailureModel::CollisionOnly,
    )
}

pub fn solve_total_rate_with(
    lambda_i: f64,
    cfg: &SystemConfig,
    opts: &SolverOptions,
    model: FailureModel,
) -> Result<ModelResult> {
    check_rate("lambda_i", lambda_i)?;
    cfg.validate()?;
    let total_load = |lambda_t: f64| -> Result<f64> {
        let p_f = one_shot(lambda_t, cfg, model)?.p_f;
        Ok(lambda_i * expected_transmissions(p_f, cfg.m)?)
    };

    let mut current = lambda_i;
    let mut last_residual = 0.0f64;
    let mut damped = false;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let residual = total_load(current)? - current;
        if !damped && residual * last_residual < 0.0 {
            damped = true;
        }
        last_residual = residual;
        let step = if damped { opts.damping * residual } else { residual };
        let next = current + step;
        let change = if next == 0.0 { step.abs() } else { step.abs() / next };
        current = next;
        if change < opts.tolerance || step == 0.0 {
            converged = true;
            break;
        }
    }

    let shot = one_shot(current, cfg, model)?;
    Ok(ModelResult {
        load: Load {
            lambda_i,
            lambda_t: current,
            lambda_a: shot.lambda_a,
            lambda_r: (current - lambda_i).max(0.0),
        },
        p_c: shot.p_c,
        p_e: shot.p_e,
        p_f: shot.p_f,
        p_outage: outage_probability(shot.p_f, cfg.m)?,
        n_tx: expected_transmissions(shot.p_f, cfg.m)?,
        rho: shot.rho(cfg),
        p_on: activation_probability(lambda_i),
        iterations,
        converged,
    })
}
