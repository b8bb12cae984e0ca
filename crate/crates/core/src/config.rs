//! Protocol and model parameters shared by the analytical model and the
//! simulator.
//!
//! All times are in subframes (1 subframe = 1 ms) and all rates are per
//! subframe. Conversions from attempts/second happen once, at the CLI.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Subframes per second.
pub const SUBFRAMES_PER_SECOND: f64 = 1000.0;

/// Converts an offered load in attempts/second to arrivals/subframe.
pub fn per_second_to_per_subframe(rate: f64) -> f64 {
    rate / SUBFRAMES_PER_SECOND
}

/// Converts arrivals/subframe to attempts/second.
pub fn per_subframe_to_per_second(rate: f64) -> f64 {
    rate * SUBFRAMES_PER_SECOND
}

/// LTE access reservation parameters.
///
/// Defaults are the typical LTE configuration: 54 contention preambles,
/// one RAO every 5 subframes, 9 retransmissions, 3 grants per subframe,
/// 5 ms RAR window, 48 ms contention resolution timer, 20 ms backoff
/// window and 3 ms processing at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemConfig {
    /// Contention preambles per RAO.
    pub d: u32,
    /// Subframes between consecutive RAOs.
    pub delta_rao: u32,
    /// Maximum number of retransmissions (at most `m + 1` transmissions).
    pub m: u32,
    /// Uplink grants (RAR messages) served per subframe.
    pub mu: u32,
    /// Maximum backoff, ms.
    pub w_c: u32,
    /// RAR window, subframes.
    pub t_rar: u32,
    /// Contention resolution timeout measured from MSG1, ms.
    pub t_crt: u32,
    /// eNodeB processing delay, ms.
    pub t_enb_proc: u32,
    /// UE processing delay, ms.
    pub t_ue_proc: u32,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            d: 54,
            delta_rao: 5,
            m: 9,
            mu: 3,
            w_c: 20,
            t_rar: 5,
            t_crt: 48,
            t_enb_proc: 3,
            t_ue_proc: 3,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.d < 1 {
            return fail("d must be at least 1".into());
        }
        if !(1..=20).contains(&self.delta_rao) {
            return fail(format!("delta_rao must be in 1..=20, got {}", self.delta_rao));
        }
        if self.mu < 1 {
            return fail("mu must be at least 1".into());
        }
        if self.w_c < 1 {
            return fail("w_c must be at least 1".into());
        }
        if self.t_rar < 1 {
            return fail("t_rar must be at least 1".into());
        }
        if self.t_crt <= self.t_rar {
            return fail(format!(
                "t_crt ({}) must exceed t_rar ({})",
                self.t_crt, self.t_rar
            ));
        }
        if self.queue_patience() <= 0.0 {
            return fail("mu * t_rar must exceed 1 / mu".into());
        }
        Ok(())
    }

    /// Maximum wait in the grant queue counted in requests, `mu * t_rar`.
    pub fn max_wait_requests(&self) -> f64 {
        f64::from(self.mu) * f64::from(self.t_rar)
    }

    /// Effective patience of a queued grant, `mu * t_rar - 1/mu`.
    pub fn queue_patience(&self) -> f64 {
        self.max_wait_requests() - 1.0 / f64::from(self.mu)
    }

    /// Loads a flat `key = value` file. Keys missing from the file keep the
    /// values of `self`.
    pub fn overlay_file(self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        self.overlay_str(&text)
    }

    pub fn overlay_str(self, text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::ConfigFile(e.message().to_string()))?;
        Ok(file.apply(self))
    }
}

/// Partial config as read from disk. Every field mirrors [`SystemConfig`].
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub d: Option<u32>,
    pub delta_rao: Option<u32>,
    pub m: Option<u32>,
    pub mu: Option<u32>,
    pub w_c: Option<u32>,
    pub t_rar: Option<u32>,
    pub t_crt: Option<u32>,
    pub t_enb_proc: Option<u32>,
    pub t_ue_proc: Option<u32>,
}

impl ConfigFile {
    pub fn apply(&self, mut cfg: SystemConfig) -> SystemConfig {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        set!(d, delta_rao, m, mu, w_c, t_rar, t_crt, t_enb_proc, t_ue_proc);
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.max_wait_requests(), 15.0);
        assert!((cfg.queue_patience() - (15.0 - 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            SystemConfig { d: 0, ..Default::default() },
            SystemConfig { delta_rao: 0, ..Default::default() },
            SystemConfig { delta_rao: 21, ..Default::default() },
            SystemConfig { mu: 0, ..Default::default() },
            SystemConfig { w_c: 0, ..Default::default() },
            SystemConfig { t_rar: 0, ..Default::default() },
            SystemConfig { t_crt: 5, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        // mu * t_rar = 1 == 1/mu
        let cfg = SystemConfig { mu: 1, t_rar: 1, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overlay_keeps_unset_fields() {
        let cfg = SystemConfig::default()
            .overlay_str("# ten RAOs per frame\ndelta_rao = 1\nt_rar = 10\n")
            .unwrap();
        assert_eq!(cfg.delta_rao, 1);
        assert_eq!(cfg.t_rar, 10);
        assert_eq!(cfg.d, 54);
        assert_eq!(cfg.m, 9);
    }

    #[test]
    fn overlay_rejects_unknown_keys() {
        let err = SystemConfig::default().overlay_str("preambles = 64").unwrap_err();
        assert!(matches!(err, Error::ConfigFile(_)));
    }

    #[test]
    fn rate_conversion() {
        assert_eq!(per_second_to_per_subframe(2250.0), 2.25);
        assert_eq!(per_subframe_to_per_second(2.25), 2250.0);
    }
}
