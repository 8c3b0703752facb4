use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no relay slot: alpha * (m - 2) must be positive")]
    NoRelaySlot,

    #[error("scheme {scheme} is not supported here: {reason}")]
    UnsupportedScheme {
        scheme: String,
        reason: &'static str,
    },

    #[error("integrand returned a non-finite value ({value}) at sample {index}")]
    NonFiniteIntegrand { index: usize, value: f64 },

    #[error("empty search grid")]
    EmptyGrid,

    #[error("no interior minimum of the bit energy inside [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error(
        "Monte Carlo noise dominates (std_error {std_error:e} > 10% of mean {mean:e}); increase n_samples"
    )]
    NoiseDominated { mean: f64, std_error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
