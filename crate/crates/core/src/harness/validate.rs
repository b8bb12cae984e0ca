use std::fmt;

use crate::analytic::{
    activated_preamble_rate, chain_steady_state, collision_probability, grant_drop_probability,
    solve_total_rate, ChainSolution, ModelResult,
};
use crate::config::{per_second_to_per_subframe, SystemConfig};
use crate::error::Result;
use crate::oracles::{chain_linear_solve, fixed_point_bisection, preamble_monte_carlo, ImpatientQueue, ServiceDiscipline};

/// Closed forms under test. Swapping one out for a perturbed version must
/// make exactly the checks that depend on it fail.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub chain: fn(f64, f64, &SystemConfig) -> Result<ChainSolution>,
    pub grant_drop: fn(f64, &SystemConfig) -> Result<f64>,
    pub collision: fn(f64, &SystemConfig) -> Result<f64>,
    pub activated: fn(f64, &SystemConfig) -> Result<f64>,
    pub fixed_point: fn(f64, &SystemConfig) -> Result<ModelResult>,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self {
            chain: chain_steady_state,
            grant_drop: grant_drop_probability,
            collision: collision_probability,
            activated: activated_preamble_rate,
            fixed_point: solve_total_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Regeneration cycles per queue estimate, for each of the two phases.
    pub queue_cycles: u64,
    pub preamble_trials: u64,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            queue_cycles: 500_000,
            preamble_trials: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Worst deviation over the check's grid.
    pub observed: f64,
    pub tolerance: f64,
    /// Grid point where the worst deviation occurred.
    pub worst_at: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.observed <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>12} {:>12}  {:<6} worst at", "check", "observed", "tolerance", "status")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>12.4e} {:>12.4e}  {:<6} {}",
                c.name,
                c.observed,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" },
                c.worst_at
            )?;
        }
        Ok(())
    }
}

struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, at: String::from("-") }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        // NaN must surface as a failure rather than be skipped.
        if value.is_nan() || value > self.value {
            self.value = if value.is_nan() { f64::INFINITY } else { value };
            self.at = at();
        }
    }

    fn check(self, name: &'static str, tolerance: f64) -> Check {
        Check { name, observed: self.value, tolerance, worst_at: self.at }
    }
}

/// Runs the oracle suite against the shipped closed forms.
pub fn cmd_validate() -> Result<ValidationReport> {
    validate_with(&ClosedForms::default(), &ValidateOptions::default())
}

pub fn validate_with(forms: &ClosedForms, opts: &ValidateOptions) -> Result<ValidationReport> {
    let mut checks = chain_checks(forms)?;
    checks.push(queue_check(forms, opts)?);
    checks.extend(preamble_checks(forms, opts)?);
    checks.extend(fixed_point_checks(forms)?);
    Ok(ValidationReport { checks })
}

fn chain_checks(forms: &ClosedForms) -> Result<Vec<Check>> {
    let mut components = Worst::new();
    let mut outage = Worst::new();
    for tenth in 0..10 {
        let p_f = f64::from(tenth) / 10.0;
        for p_on in [0.01, 0.5] {
            for m in [0, 1, 9] {
                for w_c in [1, 5, 20] {
                    let cfg = SystemConfig { m, w_c, ..SystemConfig::default() };
                    let closed = (forms.chain)(p_f, p_on, &cfg)?;
                    let oracle = chain_linear_solve(p_f, p_on, m, w_c)?;
                    let at = || format!("p_f={p_f} p_on={p_on} m={m} W_c={w_c}");
                    components.update(closed.max_abs_diff(&oracle), at);
                    let ratio = closed.b_drop / (closed.b_drop + closed.b_connect);
                    outage.update((ratio - p_f.powi(m as i32 + 1)).abs(), at);
                }
            }
        }
    }
    Ok(vec![components.check("chain vs linear solve", 1e-9), outage.check("chain outage ratio", 1e-12)])
}

fn queue_check(forms: &ClosedForms, opts: &ValidateOptions) -> Result<Check> {
    let mut worst = Worst::new();
    let mu = 3u32;
    for (k, t_rar) in [5u32, 10].into_iter().enumerate() {
        for (j, rho) in [0.3, 0.5, 0.8, 0.9, 0.95].into_iter().enumerate() {
            let cfg = SystemConfig { mu, t_rar, ..SystemConfig::default() };
            let lambda_a = rho * f64::from(mu);
            let closed = (forms.grant_drop)(lambda_a, &cfg)?;
            let queue = ImpatientQueue::grant_queue(lambda_a, f64::from(mu), f64::from(t_rar));
            let seed = opts.seed.wrapping_add((10 * k + j) as u64);
            let est = queue.simulate_rare(ServiceDiscipline::Exponential, opts.queue_cycles, seed)?;
            worst.update(est.relative_error(closed), || format!("rho={rho} t_rar={t_rar}"));
        }
    }
    Ok(worst.check("grant drop vs queue", 0.05))
}

fn preamble_checks(forms: &ClosedForms, opts: &ValidateOptions) -> Result<Vec<Check>> {
    let mut bound = Worst::new();
    let mut activations = Worst::new();
    let cfg = SystemConfig { delta_rao: 1, ..SystemConfig::default() };
    let d = f64::from(cfg.d);
    for (k, per_rao) in [5.0, 10.0, 20.0, 40.0].into_iter().enumerate() {
        let est = preamble_monte_carlo(per_rao, cfg.d, opts.preamble_trials, opts.seed.wrapping_add(k as u64))?;
        let p_c = (forms.collision)(per_rao, &cfg)?;
        let at = || format!("lambda*delta={per_rao}");
        // Only an excess over the bound counts; being below it is expected.
        bound.update((est.collision.mean - p_c) / est.collision.std_err, at);
        let expected = (forms.activated)(per_rao, &cfg)?;
        activations.update((est.activations.mean - expected).abs() / est.activations.std_err, at);
        debug_assert!(expected <= d);
    }
    Ok(vec![
        bound.check("collision bound (sigmas)", 3.0),
        activations.check("activated preambles (sigmas)", 3.0),
    ])
}

fn fixed_point_checks(forms: &ClosedForms) -> Result<Vec<Check>> {
    let mut agreement = Worst::new();
    let mut iterations = Worst::new();
    for (delta_rao, top) in [(5u32, 2000), (1, 2500)] {
        let cfg = SystemConfig { delta_rao, m: 9, ..SystemConfig::default() };
        for per_s in (100..=top).step_by(100) {
            let lambda_i = per_second_to_per_subframe(f64::from(per_s));
            let r = (forms.fixed_point)(lambda_i, &cfg)?;
            let reference = fixed_point_bisection(lambda_i, &cfg)?;
            let at = || format!("delta_rao={delta_rao} lambda_i={per_s}/s");
            agreement.update((r.load.lambda_t - reference).abs() / reference, at);
            let used = if r.converged { f64::from(r.iterations) } else { f64::INFINITY };
            iterations.update(used, at);
        }
    }
    Ok(vec![
        agreement.check("fixed point vs bisection", 0.005),
        iterations.check("fixed point iterations", 19.0),
    ])
}
