//! Retransmission/backoff Markov chain: closed-form steady state, outage
//! probability and expected number of transmissions.

use crate::config::SystemConfig;
use crate::error::{check_probability, Error, Result};

/// Steady state of the backoff chain.
///
/// `b[i][k]` is the probability of being in transmission stage `i` with
/// backoff counter `k`. Stage 0 has no backoff, so `b[0][k] == 0` for
/// `k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSolution {
    pub b_off: f64,
    pub b_connect: f64,
    pub b_drop: f64,
    pub b: Vec<Vec<f64>>,
    pub p_on: f64,
}

impl ChainSolution {
    pub fn total(&self) -> f64 {
        let backoff: f64 = self.b.iter().flatten().sum();
        self.b_off + self.b_connect + self.b_drop + backoff
    }

    /// `b_drop / (b_drop + b_connect)`.
    pub fn outage(&self) -> f64 {
        self.b_drop / (self.b_drop + self.b_connect)
    }

    /// `sum_i b[i][0] / b[0][0]`: each term is the probability of needing
    /// at least `i + 1` transmissions.
    pub fn expected_transmissions(&self) -> f64 {
        let head = self.b[0][0];
        self.b.iter().map(|row| row[0] / head).sum()
    }

    /// Largest componentwise difference to another solution of the same shape.
    pub fn max_abs_diff(&self, other: &ChainSolution) -> f64 {
        let mut diff = (self.b_off - other.b_off)
            .abs()
            .max((self.b_connect - other.b_connect).abs())
            .max((self.b_drop - other.b_drop).abs());
        for (r, s) in self.b.iter().zip(&other.b) {
            for (x, y) in r.iter().zip(s) {
                diff = diff.max((x - y).abs());
            }
        }
        diff
    }
}

/// Mean transmissions per packet, `(1 - p_f^(m+1)) / (1 - p_f)`.
pub fn expected_transmissions(p_f: f64, m: u32) -> Result<f64> {
    check_probability("p_f", p_f)?;
    let attempts = f64::from(m) + 1.0;
    if p_f == 1.0 {
        return Ok(attempts);
    }
    let value = (1.0 - p_f.powi(m as i32 + 1)) / (1.0 - p_f);
    Ok(value.clamp(1.0, attempts))
}

/// Probability that all `m + 1` transmissions fail.
pub fn outage_probability(p_f: f64, m: u32) -> Result<f64> {
    check_probability("p_f", p_f)?;
    Ok(p_f.powi(m as i32 + 1))
}

/// Closed-form steady state of the backoff chain for one-shot failure
/// probability `p_f` and activation probability `p_on`.
pub fn chain_steady_state(p_f: f64, p_on: f64, cfg: &SystemConfig) -> Result<ChainSolution> {
    check_probability("p_f", p_f)?;
    if p_f >= 1.0 {
        return Err(Error::InvalidArgument {
            name: "p_f",
            value: p_f,
            reason: "closed forms require p_f < 1",
        });
    }
    if !(p_on > 0.0 && p_on <= 1.0) {
        return Err(Error::InvalidArgument {
            name: "p_on",
            value: p_on,
            reason: "must lie in (0, 1]",
        });
    }
    if cfg.w_c < 1 {
        return Err(Error::InvalidConfig("w_c must be at least 1".into()));
    }
    let m = cfg.m as i32;
    let w_c = f64::from(cfg.w_c);
    let pf_m = p_f.powi(m);
    let pf_m1 = pf_m * p_f;

    let denom = 2.0 * (1.0 - p_f) * (1.0 + 2.0 * p_on) + p_on * (w_c + 1.0) * p_f * (1.0 - pf_m);
    let b_off = 2.0 * (1.0 - p_f) / denom;
    let b_connect = 2.0 * (1.0 - p_f) * (1.0 - pf_m1) * p_on / denom;
    let b_drop = 2.0 * (1.0 - p_f) * pf_m1 * p_on / denom;

    let head = p_on * b_off;
    let mut b = Vec::with_capacity(cfg.m as usize + 1);
    let mut first = vec![0.0; cfg.w_c as usize];
    first[0] = head;
    b.push(first);
    let mut stage = head;
    for _ in 1..=cfg.m {
        stage *= p_f;
        b.push(
            (0..cfg.w_c)
                .map(|k| (w_c - f64::from(k)) / w_c * stage)
                .collect(),
        );
    }

    Ok(ChainSolution {
        b_off,
        b_connect,
        b_drop,
        b,
        p_on,
    })
}

/// Activation probability of an idle UE per subframe, `1 - exp(-lambda_i)`.
pub fn activation_probability(lambda_i: f64) -> f64 {
    -(-lambda_i).exp_m1()
}
