//! Outage capacity of the LTE access reservation procedure for
//! machine-type traffic.
//!
//! - [`analytic`]: closed-form one-shot failure model, backoff Markov chain
//!   and the total-load fixed point.
//! - [`sim`]: subframe-resolution simulator of the MSG1-MSG4 handshake.
//! - [`oracles`]: brute-force reference implementations used to check the
//!   closed forms.
//! - [`harness`]: load sweeps, breaking-point detection and validation
//!   reports behind the `rach` command line tool.

pub mod analytic;
pub mod config;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod sim;
pub mod stats;

pub use analytic::{ChainSolution, Load, ModelResult};
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use sim::{SimConfig, SimStats};
