//! Monte Carlo of one RAO: a Poisson number of UEs each pick one of `d`
//! preambles uniformly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{check_rate, Error, Result};
use crate::stats::Estimate;

/// Minimum number of RAOs per estimate.
pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreambleEstimate {
    /// Mean over RAOs with at least one contender of the fraction of
    /// contenders that share their preamble.
    pub collision: Estimate,
    /// Collided contenders over all contenders, pooled across RAOs.
    pub per_ue_collision: f64,
    /// Distinct preambles picked per RAO, over all RAOs.
    pub activations: Estimate,
    pub trials: u64,
    pub trials_with_contenders: u64,
}

pub fn preamble_monte_carlo(lambda_per_rao: f64, d: u32, n_trials: u64, seed: u64) -> Result<PreambleEstimate> {
    check_rate("lambda_per_rao", lambda_per_rao)?;
    if d == 0 {
        return Err(Error::InvalidConfig("d must be at least 1".into()));
    }
    if n_trials < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!("need at least {MIN_TRIALS} trials")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contenders = if lambda_per_rao > 0.0 {
        Some(Poisson::new(lambda_per_rao).map_err(|e| Error::InvalidConfig(e.to_string()))?)
    } else {
        None
    };

    let mut picks: Vec<u32> = Vec::new();
    let mut fractions = Vec::new();
    let mut activations = Vec::with_capacity(n_trials as usize);
    let (mut total_ues, mut total_collided) = (0u64, 0u64);
    for _ in 0..n_trials {
        let n = contenders.map_or(0, |p| p.sample(&mut rng) as usize);
        picks.clear();
        picks.extend((0..n).map(|_| rng.random_range(0..d)));
        picks.sort_unstable();
        let (mut distinct, mut collided) = (0u64, 0u64);
        for run in picks.chunk_by(|a, b| a == b) {
            distinct += 1;
            if run.len() > 1 {
                collided += run.len() as u64;
            }
        }
        activations.push(distinct as f64);
        if n > 0 {
            fractions.push(collided as f64 / n as f64);
            total_ues += n as u64;
            total_collided += collided;
        }
    }
    let collision = if fractions.is_empty() {
        Estimate::point(0.0)
    } else {
        Estimate::from_samples(&fractions)
    };
    Ok(PreambleEstimate {
        collision,
        per_ue_collision: if total_ues == 0 { 0.0 } else { total_collided as f64 / total_ues as f64 },
        activations: Estimate::from_samples(&activations),
        trials: n_trials,
        trials_with_contenders: fractions.len() as u64,
    })
}
