//! Failure probability of a single access attempt: preamble collision in the
//! contention phase and grant loss in the access-granting queue.

use crate::config::SystemConfig;
use crate::error::{check_probability, check_rate, Error, Result};

/// Half-width of the band around `rho = 1` where the grant-drop formula is
/// replaced by its first-order expansion.
pub const UNIT_LOAD_BAND: f64 = 1e-6;

/// Upper bound on the probability that a contending UE picks a preamble
/// also picked by another UE in the same RAO.
///
/// Evaluates `1 - (1 - 1/d)^(lambda_t * delta_rao - 1)`, clamped to `[0, 1]`.
/// The raw expression is negative below one expected contender per RAO.
pub fn collision_probability(lambda_t: f64, cfg: &SystemConfig) -> Result<f64> {
    check_rate("lambda_t", lambda_t)?;
    if cfg.d < 1 {
        return Err(Error::InvalidConfig("d must be at least 1".into()));
    }
    let contenders = lambda_t * f64::from(cfg.delta_rao);
    let exponent = contenders - 1.0;
    if exponent <= 0.0 {
        return Ok(0.0);
    }
    if cfg.d == 1 {
        return Ok(1.0);
    }
    // (1 - 1/d)^x computed as exp(x * ln(1 - 1/d)) to keep precision for large d.
    let stay_clear = (exponent * (-1.0 / f64::from(cfg.d)).ln_1p()).exp();
    Ok((1.0 - stay_clear).clamp(0.0, 1.0))
}

/// Rate of activated preambles offered to the grant queue, per subframe.
///
/// Per RAO each of the `d` preambles is hit by a Poisson number of
/// contenders with mean `lambda_t * delta_rao / d`; an activated preamble
/// is one hit at least once. The per-RAO count is spread over the
/// `delta_rao` subframes of the RAO period.
pub fn activated_preamble_rate(lambda_t: f64, cfg: &SystemConfig) -> Result<f64> {
    check_rate("lambda_t", lambda_t)?;
    let d = f64::from(cfg.d);
    let delta = f64::from(cfg.delta_rao);
    let per_rao = -d * (-lambda_t * delta / d).exp_m1();
    Ok(per_rao / delta)
}

/// Long-run fraction of grants lost from the access-granting queue,
/// modelled as an M/M/1 queue with impatient customers.
///
/// With `rho = lambda_a / mu`, `tau_q = mu * t_rar - 1/mu` and
/// `omega = exp(-mu (1 - rho) tau_q)` the loss is
/// `(1 - rho) rho omega / (1 - rho^2 omega)`.
pub fn grant_drop_probability(lambda_a: f64, cfg: &SystemConfig) -> Result<f64> {
    check_rate("lambda_a", lambda_a)?;
    let mu = f64::from(cfg.mu);
    let tau_q = cfg.queue_patience();
    if !(tau_q > 0.0) {
        return Err(Error::InvalidConfig("mu * t_rar must exceed 1 / mu".into()));
    }
    Ok(impatient_loss(lambda_a / mu, mu * tau_q))
}

/// Loss of the impatient M/M/1 queue as a function of the load `rho` and
/// `a = mu * tau_q`.
pub(crate) fn impatient_loss(rho: f64, a: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let excess = rho - 1.0;
    let value = if excess.abs() < UNIT_LOAD_BAND {
        // Removable singularity: value 1/(2 + a) and slope (1 + a + a^2/2)/(2 + a)^2.
        let denom = 2.0 + a;
        1.0 / denom + excess * (1.0 + a + 0.5 * a * a) / (denom * denom)
    } else if rho < 1.0 {
        // 1 - rho^2 omega = -expm1(2 ln rho - a (1 - rho))
        let log_omega = -a * (1.0 - rho);
        let num = (1.0 - rho) * rho * log_omega.exp();
        let den = -(2.0 * rho.ln() + log_omega).exp_m1();
        num / den
    } else {
        // Divide through by rho^2 omega so that omega never overflows.
        let log_rho2_omega = 2.0 * rho.ln() + a * excess;
        (excess / rho) / -(-log_rho2_omega).exp_m1()
    };
    value.clamp(0.0, 1.0)
}

/// Combines the two independent failure causes of one attempt.
pub fn combine_failures(p_c: f64, p_e: f64) -> Result<f64> {
    check_probability("p_c", p_c)?;
    check_probability("p_e", p_e)?;
    Ok(1.0 - (1.0 - p_c) * (1.0 - p_e))
}

/// Breakdown of the one-shot failure probability at a given total load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneShot {
    pub lambda_a: f64,
    pub p_c: f64,
    pub p_e: f64,
    pub p_f: f64,
}

impl OneShot {
    pub fn rho(&self, cfg: &SystemConfig) -> f64 {
        self.lambda_a / f64::from(cfg.mu)
    }
}

/// Which failure causes the one-shot model includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailureModel {
    /// Preamble collisions and grant-queue losses.
    #[default]
    Full,
    /// Preamble collisions only; the grant queue never drops.
    CollisionOnly,
}

pub fn one_shot(lambda_t: f64, cfg: &SystemConfig, model: FailureModel) -> Result<OneShot> {
    let p_c = collision_probability(lambda_t, cfg)?;
    let lambda_a = activated_preamble_rate(lambda_t, cfg)?;
    let p_e = match model {
        FailureModel::Full => grant_drop_probability(lambda_a, cfg)?,
        FailureModel::CollisionOnly => 0.0,
    };
    Ok(OneShot {
        lambda_a,
        p_c,
        p_e,
        p_f: combine_failures(p_c, p_e)?,
    })
}

/// Probability that one access attempt at total load `lambda_t` fails.
pub fn one_shot_failure(lambda_t: f64, cfg: &SystemConfig) -> Result<f64> {
    Ok(one_shot(lambda_t, cfg, FailureModel::Full)?.p_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    fn with_delta(delta_rao: u32) -> SystemConfig {
        SystemConfig { delta_rao, ..cfg() }
    }

    #[test]
    fn collision_single_contender_is_zero() {
        assert_eq!(collision_probability(0.2, &cfg()).unwrap(), 0.0);
        assert_eq!(collision_probability(1.0, &with_delta(1)).unwrap(), 0.0);
    }

    #[test]
    fn collision_clamped_below_one_contender() {
        assert_eq!(collision_probability(0.1, &cfg()).unwrap(), 0.0);
        assert_eq!(collision_probability(0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn collision_ten_contenders() {
        // 1 - (53/54)^9, evaluated in 40-digit arithmetic.
        let p = collision_probability(2.0, &cfg()).unwrap();
        assert_relative_eq!(p, 0.154_839_895_768_570_31, max_relative = 1e-14);
    }

    #[test]
    fn collision_rejects_bad_input() {
        assert!(collision_probability(-0.1, &cfg()).is_err());
        assert!(collision_probability(f64::NAN, &cfg()).is_err());
        let cfg = SystemConfig { d: 0, ..cfg() };
        assert!(collision_probability(1.0, &cfg).is_err());
    }

    #[test]
    fn collision_single_preamble_always_collides() {
        let cfg = SystemConfig { d: 1, ..cfg() };
        assert_eq!(collision_probability(1.0, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn activations_limits() {
        assert_eq!(activated_preamble_rate(0.0, &cfg()).unwrap(), 0.0);
        let sat = activated_preamble_rate(1e6, &cfg()).unwrap();
        assert_relative_eq!(sat, 54.0 / 5.0, max_relative = 1e-12);
        let sat1 = activated_preamble_rate(1e6, &with_delta(1)).unwrap();
        assert_relative_eq!(sat1, 54.0, max_relative = 1e-12);
    }

    #[test]
    fn activations_at_2700_per_second() {
        // 54 (1 - e^-0.05)
        let a = activated_preamble_rate(2.7, &with_delta(1)).unwrap();
        assert_relative_eq!(a, 2.633_611_076_961_443_5, max_relative = 1e-14);
    }

    #[test]
    fn activations_bounded_by_load_and_preambles() {
        for i in 1..200 {
            let lt = f64::from(i) * 0.1;
            for delta in [1, 2, 5, 10, 20] {
                let c = with_delta(delta);
                let a = activated_preamble_rate(lt, &c).unwrap();
                assert!(a <= lt * (1.0 + 1e-12));
                assert!(a <= 54.0 / f64::from(delta) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn grant_drop_zero_load() {
        assert_eq!(grant_drop_probability(0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn grant_drop_unit_load_limit() {
        // 1 / (2 + 3 (15 - 1/3)) = 1/46
        let p = grant_drop_probability(3.0, &cfg()).unwrap();
        assert_relative_eq!(p, 1.0 / 46.0, max_relative = 1e-15);
        // closed form evaluated at rho = 1 -/+ 1e-6 in 40-digit arithmetic
        let lo = grant_drop_probability(3.0 * (1.0 - 1e-6), &cfg()).unwrap();
        let hi = grant_drop_probability(3.0 * (1.0 + 1e-6), &cfg()).unwrap();
        assert_relative_eq!(lo, 0.021_738_651_704_677_55, max_relative = 1e-9);
        assert_relative_eq!(hi, 0.021_739_609_171_596_26, max_relative = 1e-9);
    }

    #[test]
    fn grant_drop_continuous_across_branch() {
        for a in [1.0, 10.0, 44.0, 89.0] {
            let below = impatient_loss(1.0 - 1e-8, a);
            let above = impatient_loss(1.0 + 1e-8, a);
            assert!((above - below).abs() < 1e-6);
            // edges of the series band
            for edge in [1.0 - UNIT_LOAD_BAND, 1.0 + UNIT_LOAD_BAND] {
                let inside = impatient_loss(edge - 1e-12 * (edge - 1.0).signum(), a);
                let outside = impatient_loss(edge + 1e-12 * (edge - 1.0).signum(), a);
                assert!((inside - outside).abs() < 1e-9, "a={a} edge={edge}");
            }
        }
    }

    #[test]
    fn grant_drop_rho_09() {
        let p = grant_drop_probability(2.7, &cfg()).unwrap();
        assert_relative_eq!(p, 0.001_116_059_406_228_812_9, max_relative = 1e-12);
    }

    #[test]
    fn grant_drop_heavy_overload_approaches_fluid_limit() {
        // rho = 20: exp(a (rho - 1)) overflows if evaluated directly.
        let p = grant_drop_probability(60.0, &cfg()).unwrap();
        assert_relative_eq!(p, 19.0 / 20.0, max_relative = 1e-12);
    }

    #[test]
    fn grant_drop_rejects_degenerate_queue() {
        let c = SystemConfig { mu: 1, t_rar: 1, ..cfg() };
        assert!(grant_drop_probability(0.5, &c).is_err());
        assert!(grant_drop_probability(-1.0, &cfg()).is_err());
    }

    #[test]
    fn combine_examples() {
        assert_relative_eq!(combine_failures(0.1, 0.0).unwrap(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(combine_failures(0.1, 0.2).unwrap(), 0.28, max_relative = 1e-15);
        assert!(combine_failures(1.1, 0.0).is_err());
    }

    #[test]
    fn one_shot_zero_load() {
        assert_eq!(one_shot_failure(0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn collision_only_never_worse() {
        for i in 0..100 {
            let lt = f64::from(i) * 0.1;
            let full = one_shot(lt, &cfg(), FailureModel::Full).unwrap();
            let base = one_shot(lt, &cfg(), FailureModel::CollisionOnly).unwrap();
            assert!(base.p_f <= full.p_f);
            assert_eq!(base.p_c, full.p_c);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn one_shot_monotone(a in 0.0f64..40.0, b in 0.0f64..40.0, delta in 1u32..=20, t_rar in 1u32..=10) {
                let c = SystemConfig { delta_rao: delta, t_rar, ..SystemConfig::default() };
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let x = one_shot(lo, &c, FailureModel::Full).unwrap();
                let y = one_shot(hi, &c, FailureModel::Full).unwrap();
                prop_assert!(x.p_c <= y.p_c);
                prop_assert!(x.lambda_a <= y.lambda_a);
                prop_assert!(x.p_e <= y.p_e + 1e-15);
                prop_assert!(x.p_f <= y.p_f + 1e-15);
                prop_assert!((0.0..=1.0).contains(&y.p_f));
            }

            #[test]
            fn grant_drop_in_unit_interval(rho in 0.0f64..50.0, a in 0.1f64..200.0) {
                let p = impatient_loss(rho, a);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
