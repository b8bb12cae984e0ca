//! Subframe-resolution simulator of the LTE access reservation procedure.
//!
//! Each subframe runs, in order: timer expiries and backoff completions,
//! new Poisson arrivals, MSG1 preamble transmission on RAO subframes, and
//! service of at most `mu` queued uplink grants (MSG2). UEs that share a
//! granted preamble collide on MSG3 and time out on the contention
//! resolution timer; singletons receive MSG4. A failed attempt backs off
//! uniformly in `[0, W_c]` ms and waits for the next RAO, until `m + 1`
//! transmissions have been used and the packet is dropped.

mod engine;
mod queue;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::error::{check_rate, Error, Result};
use crate::stats::Estimate;

pub use engine::{AttemptState, UeAttempt};
pub use queue::{Grant, RarQueue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub system: SystemConfig,
    /// Simulated subframes.
    pub duration: u64,
    pub seed: u64,
    /// Leading subframes excluded from statistics.
    pub warmup: u64,
}

impl SimConfig {
    /// Config with the default 10% warmup and seed 0.
    pub fn new(system: SystemConfig, duration: u64) -> Self {
        Self {
            system,
            duration,
            seed: 0,
            warmup: duration / 10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.duration <= self.warmup {
            return Err(Error::InvalidConfig(format!(
                "duration ({}) must exceed warmup ({})",
                self.duration, self.warmup
            )));
        }
        Ok(())
    }

    pub fn window(&self) -> u64 {
        self.duration - self.warmup
    }
}

/// Why an access attempt failed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FailureBreakdown {
    /// Several UEs shared a granted preamble and their MSG3s collided.
    pub msg3_collision: u64,
    /// No MSG2 within the RAR window.
    pub rar_expired: u64,
    /// A lone MSG3 whose MSG4 could not arrive before the timer expired.
    pub crt_expired: u64,
}

impl FailureBreakdown {
    pub fn total(&self) -> u64 {
        self.msg3_collision + self.rar_expired + self.crt_expired
    }
}

/// Statistics of one simulation run over the post-warmup window.
///
/// Packet counts refer to packets that arrived inside the window; rates and
/// per-attempt fractions refer to MSG1 transmissions inside the window.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimStats {
    pub arrivals: u64,
    pub connects: u64,
    pub drops: u64,
    /// Packets still in the procedure when the run ended.
    pub in_flight: u64,
    /// `drops / (connects + drops)`, or 0 when nothing completed.
    pub outage_fraction: f64,
    /// False when no packet completed, so the outage is undefined.
    pub outage_defined: bool,
    /// MSG1 transmissions per completed packet.
    pub mean_tx: f64,
    pub failures: FailureBreakdown,
    /// MSG1 transmissions.
    pub transmissions: u64,
    /// MSG1 transmissions on a preamble chosen by another UE too.
    pub collided_transmissions: u64,
    /// Distinct preambles detected over all RAOs.
    pub activations: u64,
    pub grants_served: u64,
    pub grants_expired: u64,
    /// Observed total attempt rate per subframe.
    pub lambda_t: f64,
    /// Observed activated-preamble rate per subframe.
    pub lambda_a: f64,
    /// Largest number of MSG2 sent in any subframe of the run.
    pub max_grants_per_subframe: u32,
    /// Largest number of activated preambles in any RAO of the run.
    pub max_activations_per_rao: u32,
    pub window: u64,
}

impl SimStats {
    /// Fraction of MSG1 transmissions that collided on their preamble.
    pub fn collision_fraction(&self) -> f64 {
        ratio(self.collided_transmissions, self.transmissions)
    }

    /// Fraction of uplink grants that expired in the queue.
    pub fn grant_drop_fraction(&self) -> f64 {
        ratio(self.grants_expired, self.grants_served + self.grants_expired)
    }

    pub fn completed(&self) -> u64 {
        self.connects + self.drops
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs one replication on stream 0 of `cfg.seed`.
pub fn run(cfg: &SimConfig, lambda_i: f64) -> Result<SimStats> {
    run_stream(cfg, lambda_i, 0)
}

/// Runs one replication on a given ChaCha stream of `cfg.seed`.
pub fn run_stream(cfg: &SimConfig, lambda_i: f64, stream: u64) -> Result<SimStats> {
    cfg.validate()?;
    check_rate("lambda_i", lambda_i)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    Ok(engine::Engine::new(cfg, lambda_i, rng)?.run())
}

/// Replicated runs with 95% confidence intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub reps: Vec<SimStats>,
    pub outage: Estimate,
    pub mean_tx: Estimate,
    pub p_c: Estimate,
    pub p_e: Estimate,
    pub lambda_t: Estimate,
    pub lambda_a: Estimate,
}

impl ReplicationSummary {
    pub fn from_reps(reps: Vec<SimStats>) -> Self {
        let metric = |f: fn(&SimStats) -> f64| {
            Estimate::from_samples(&reps.iter().map(f).collect::<Vec<_>>())
        };
        Self {
            outage: metric(|s| s.outage_fraction),
            mean_tx: metric(|s| s.mean_tx),
            p_c: metric(SimStats::collision_fraction),
            p_e: metric(SimStats::grant_drop_fraction),
            lambda_t: metric(|s| s.lambda_t),
            lambda_a: metric(|s| s.lambda_a),
            reps,
        }
    }
}

/// `n_reps` independent runs, replication `r` using ChaCha stream `r`.
/// Replications execute in parallel; results are ordered by index.
pub fn run_replications(cfg: &SimConfig, lambda_i: f64, n_reps: usize) -> Result<ReplicationSummary> {
    if n_reps < 2 {
        return Err(Error::InvalidConfig("at least two replications are required".into()));
    }
    cfg.validate()?;
    check_rate("lambda_i", lambda_i)?;
    let reps = (0..n_reps as u64)
        .into_par_iter()
        .map(|r| run_stream(cfg, lambda_i, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicationSummary::from_reps(reps))
}

#[cfg(test)]
mod tests;
