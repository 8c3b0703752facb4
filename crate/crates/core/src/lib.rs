//! Achievable rates of pilot-trained relay channels under Rayleigh fading.
//!
//! The destination and relay learn their channels from one pilot each and
//! treat the residual estimation error as noise. [`rates`] evaluates the
//! resulting worst-case rates for amplify-and-forward and decode-and-forward
//! relaying, [`alloc`] chooses training power, slot length and power split,
//! [`energy`] looks at bit energy in the low-SNR regime and [`oracle`]
//! cross-checks the whole chain against simulation.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alloc;
pub mod energy;
pub mod error;
pub mod exec;
pub mod expect;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod specfun;

pub use error::{Error, Result};
pub use exec::Execution;
pub use expect::{Fades, McConfig, MonteCarlo, RateEstimate, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use model::{
    Allocation, ChannelStats, EffectiveSnr, Link, Overlap, PowerBudget, Relaying, Scheme,
};
pub use rates::{rate, rate_direct, LogBase, RateRequest};
