//! Independent reference implementations used to check the analytic model.

mod bisection;
mod chain;
mod preamble;
mod queue;

pub use bisection::fixed_point_bisection;
pub use chain::{chain_linear_solve, transition_matrix};
pub use preamble::{preamble_monte_carlo, PreambleEstimate, MIN_TRIALS};
pub use queue::{impatient_queue_sim, ImpatientQueue, LossEstimate, ServiceDiscipline};
