//! Closed-form model of the access reservation procedure.
//!
//! A single attempt fails either by a preamble collision or by its uplink
//! grant going stale in the access-granting queue. Retransmissions feed back
//! into the offered load, which is resolved as a fixed point of the expected
//! number of transmissions per packet.

mod chain;
mod fixed_point;
mod one_shot;

pub use chain::{
    activation_probability, chain_steady_state, expected_transmissions, outage_probability,
    ChainSolution,
};
pub use fixed_point::{
    baseline_collision_only, solve_total_rate, solve_total_rate_with, Load, ModelResult,
    SolverOptions,
};
pub use one_shot::{
    activated_preamble_rate, collision_probability, combine_failures, grant_drop_probability,
    one_shot, one_shot_failure, FailureModel, OneShot, UNIT_LOAD_BAND,
};
