//! Shared fixtures for the benchmarks.

use rach_core::SystemConfig;

/// Typical LTE configuration with the given RAO period.
pub fn typical(delta_rao: u32) -> SystemConfig {
    SystemConfig { delta_rao, ..SystemConfig::default() }
}

/// New-arrival rates, per subframe, from 0.1 to 3.0.
pub fn load_grid() -> Vec<f64> {
    (1..=30).map(|k| f64::from(k) / 10.0).collect()
}
