use super::{sweep, Engine, SweepRow, SweepSpec};
use crate::analytic::solve_total_rate;
use crate::config::per_second_to_per_subframe;
use crate::error::{Error, Result};

/// Thresholds at which the model breaking point is also reported.
pub const SENSITIVITY_THRESHOLDS: [f64; 3] = [0.05, 0.1, 0.3];

/// Bracket width at which model refinement stops, attempts/s.
const REFINE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct BreakingPoint {
    pub engine: Engine,
    /// Breaking point in attempts/s.
    pub lambda_star: f64,
    /// First grid point at or above the threshold.
    pub grid_index: usize,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakingPointReport {
    pub threshold: f64,
    pub points: Vec<BreakingPoint>,
    /// Model breaking point over simulator breaking point.
    pub model_sim_ratio: Option<f64>,
    /// Refined model breaking point per threshold in
    /// [`SENSITIVITY_THRESHOLDS`], when the model crosses it in the grid.
    pub sensitivity: Vec<(f64, Option<f64>)>,
    pub rows: Vec<SweepRow>,
}

impl BreakingPointReport {
    pub fn get(&self, engine: Engine) -> Option<&BreakingPoint> {
        self.points.iter().find(|p| p.engine == engine)
    }
}

/// Index of the first value at or above `threshold`.
pub fn first_crossing(values: &[f64], threshold: f64) -> Option<usize> {
    values.iter().position(|&v| v >= threshold)
}

fn model_outage(spec: &SweepSpec, lambda_per_s: f64) -> Result<f64> {
    Ok(solve_total_rate(per_second_to_per_subframe(lambda_per_s), &spec.system)?.p_outage)
}

/// Bisects the model outage between the grid point before the crossing
/// (or zero) and the crossing point.
fn refine_model(spec: &SweepSpec, index: usize, threshold: f64) -> Result<f64> {
    let mut lo = if index == 0 { 0.0 } else { spec.grid[index - 1] };
    let mut hi = spec.grid[index];
    while hi - lo > REFINE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if model_outage(spec, mid)? >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Sweeps `spec` and locates, per engine, the smallest load whose outage
/// reaches `threshold`. Model breaking points are refined by bisection.
pub fn cmd_breaking_point<P>(spec: &SweepSpec, threshold: f64, progress: P) -> Result<BreakingPointReport>
where
    P: Fn(&SweepRow) + Sync,
{
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument {
            name: "threshold",
            value: threshold,
            reason: "must lie strictly between 0 and 1",
        });
    }
    let rows = sweep(spec, progress)?;
    let curve = |engine: Engine| -> Vec<f64> {
        rows.iter().filter(|r| r.engine == engine).map(|r| r.p_outage).collect()
    };

    let mut points = Vec::with_capacity(spec.engines.len());
    for &engine in &spec.engines {
        let index = first_crossing(&curve(engine), threshold).ok_or_else(|| Error::NoCrossing {
            engine: engine.name().to_string(),
        })?;
        let (lambda_star, refined) = if engine == Engine::Model {
            (refine_model(spec, index, threshold)?, true)
        } else {
            (spec.grid[index], false)
        };
        points.push(BreakingPoint { engine, lambda_star, grid_index: index, refined });
    }

    let mut sensitivity = Vec::new();
    if spec.engines.contains(&Engine::Model) {
        let model = curve(Engine::Model);
        for t in SENSITIVITY_THRESHOLDS {
            let star = match first_crossing(&model, t) {
                Some(i) => Some(refine_model(spec, i, t)?),
                None => None,
            };
            sensitivity.push((t, star));
        }
    }

    let star = |e: Engine| points.iter().find(|p| p.engine == e).map(|p| p.lambda_star);
    let model_sim_ratio = match (star(Engine::Model), star(Engine::Sim)) {
        (Some(m), Some(s)) if s > 0.0 => Some(m / s),
        _ => None,
    };
    Ok(BreakingPointReport { threshold, points, model_sim_ratio, sensitivity, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;

    fn model_spec(grid: Vec<f64>, delta_rao: u32) -> SweepSpec {
        let sys = SystemConfig { delta_rao, ..SystemConfig::default() };
        SweepSpec::new(grid, sys, vec![Engine::Model])
    }

    #[test]
    fn synthetic_curve() {
        let grid = [1000.0, 1500.0, 2000.0, 2500.0];
        let outage = [0.0, 0.01, 0.1, 0.9];
        assert_eq!(first_crossing(&outage, 0.1).map(|i| grid[i]), Some(2000.0));
        assert_eq!(first_crossing(&outage, 0.95), None);
        assert_eq!(first_crossing(&outage, 0.0), Some(0));
    }

    #[test]
    fn no_crossing_is_an_error() {
        let spec = model_spec(vec![500.0, 1000.0], 5);
        match cmd_breaking_point(&spec, 0.1, |_| {}) {
            Err(Error::NoCrossing { engine }) => assert_eq!(engine, "model"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_threshold() {
        let spec = model_spec(vec![500.0, 3000.0], 5);
        assert!(cmd_breaking_point(&spec, 0.0, |_| {}).is_err());
        assert!(cmd_breaking_point(&spec, 1.0, |_| {}).is_err());
    }

    #[test]
    fn refined_model_point_ignores_grid_spacing() {
        let coarse = model_spec(SweepSpec::linear_grid(500.0, 3500.0, 7).unwrap(), 5);
        let fine = model_spec(SweepSpec::linear_grid(500.0, 3500.0, 61).unwrap(), 5);
        let a = cmd_breaking_point(&coarse, 0.1, |_| {}).unwrap();
        let b = cmd_breaking_point(&fine, 0.1, |_| {}).unwrap();
        let (a, b) = (a.get(Engine::Model).unwrap(), b.get(Engine::Model).unwrap());
        assert!(a.refined && b.refined);
        assert!((a.lambda_star - b.lambda_star).abs() <= 1.0, "{} vs {}", a.lambda_star, b.lambda_star);
    }

    #[test]
    fn sensitivity_is_ordered_by_threshold() {
        let spec = model_spec(SweepSpec::linear_grid(1000.0, 4000.0, 13).unwrap(), 1);
        let r = cmd_breaking_point(&spec, 0.1, |_| {}).unwrap();
        let stars: Vec<f64> = r.sensitivity.iter().map(|(_, s)| s.unwrap()).collect();
        assert!(stars.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(r.sensitivity[1].1, Some(r.get(Engine::Model).unwrap().lambda_star));
        assert!(r.model_sim_ratio.is_none());
    }
}
