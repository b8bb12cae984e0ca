//! Fixed point of the total attempt rate by bracketing and bisection.
//!
//! The one-shot failure probability and the transmission count are written
//! out here again, without calling into the analytic module, so that a
//! mistake in either place shows up as a disagreement.

use crate::config::SystemConfig;
use crate::error::{check_rate, Error, Result};

const SCAN_POINTS: usize = 20_000;
const ABS_TOLERANCE: f64 = 1e-9;

fn failure_probability(lambda_t: f64, cfg: &SystemConfig) -> f64 {
    let d = f64::from(cfg.d);
    let delta = f64::from(cfg.delta_rao);
    let mu = f64::from(cfg.mu);
    let per_rao = lambda_t * delta;

    let p_c = if per_rao <= 1.0 { 0.0 } else { 1.0 - (1.0 - 1.0 / d).powf(per_rao - 1.0) };

    let activated = d * (1.0 - (-per_rao / d).exp()) / delta;
    let rho = activated / mu;
    let tau = mu * f64::from(cfg.t_rar) - 1.0 / mu;
    let p_e = if rho == 0.0 {
        0.0
    } else if (rho - 1.0).abs() < 1e-9 {
        1.0 / (2.0 + mu * tau)
    } else {
        let omega = (-mu * (1.0 - rho) * tau).exp();
        if omega.is_infinite() {
            (rho - 1.0) / rho
        } else {
            (1.0 - rho) * rho * omega / (1.0 - rho * rho * omega)
        }
    };
    1.0 - (1.0 - p_c.clamp(0.0, 1.0)) * (1.0 - p_e.clamp(0.0, 1.0))
}

/// Mean transmissions per packet as an explicit sum over the attempt at
/// which the packet finishes.
fn transmissions(p_f: f64, m: u32) -> f64 {
    let mut sum = 0.0;
    for i in 0..m {
        sum += f64::from(i + 1) * (1.0 - p_f) * p_f.powi(i as i32);
    }
    sum + f64::from(m + 1) * p_f.powi(m as i32)
}

/// Smallest root of `lambda_t = lambda_i * N_TX(p_f(lambda_t))` in
/// `[lambda_i, (m + 1) lambda_i]`.
pub fn fixed_point_bisection(lambda_i: f64, cfg: &SystemConfig) -> Result<f64> {
    check_rate("lambda_i", lambda_i)?;
    cfg.validate()?;
    if lambda_i == 0.0 {
        return Ok(0.0);
    }
    let g = |x: f64| x - lambda_i * transmissions(failure_probability(x, cfg), cfg.m);
    let low = lambda_i;
    let high = f64::from(cfg.m + 1) * lambda_i;
    if g(low) >= 0.0 {
        return Ok(low);
    }
    let step = (high - low) / SCAN_POINTS as f64;
    let mut lo = low;
    let mut hi = None;
    for k in 1..=SCAN_POINTS {
        let x = if k == SCAN_POINTS { high } else { low + step * k as f64 };
        if g(x) >= 0.0 {
            hi = Some(x);
            break;
        }
        lo = x;
    }
    let mut hi = hi.ok_or(Error::NoBracket { low, high })?;
    while hi - lo > ABS_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
