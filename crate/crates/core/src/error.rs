use thiserror::Error;

/// Errors raised by the model, simulator, oracles and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument `{name}` = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("no sign change of the fixed-point residual on [{low}, {high}]")]
    NoBracket { low: f64, high: f64 },

    #[error("{engine}: no threshold crossing in grid")]
    NoCrossing { engine: String },

    #[error("config file: {0}")]
    ConfigFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name,
            value,
            reason: "must be a probability in [0, 1]",
        })
    }
}

pub(crate) fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name,
            value,
            reason: "must be a finite non-negative rate",
        })
    }
}
