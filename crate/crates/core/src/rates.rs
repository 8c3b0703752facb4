//! Worst-case achievable rates of the five relaying protocols and of direct
//! transmission.
//!
//! Every rate is a time-share weighted sum of expectations of logarithms of
//! effective-SNR terms. Single-fade expectations use the closed form
//! `E[ln(1 + cX)] = exp(1/c) E1(1/c)`; terms coupling several fades go
//! through the [`MonteCarlo`] engine, where one sample supplies the same
//! `x_sd` to every term that contains it.

use std::f64::consts::LOG2_E;

use crate::error::{Error, Result};
use crate::expect::{expect_log1p_scalar, MonteCarlo, RateEstimate};
use crate::model::{
    effective_snr, Allocation, ChannelStats, EffectiveSnr, LinkEstimate, Overlap, PowerBudget,
    Relaying, Scheme,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Bits per symbol.
    #[default]
    Two,
    /// Nats per symbol.
    E,
}

impl LogBase {
    /// Units of this base per nat.
    pub fn per_nat(self) -> f64 {
        match self {
            LogBase::Two => LOG2_E,
            LogBase::E => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRequest {
    pub stats: ChannelStats,
    pub budget: PowerBudget,
    pub alloc: Allocation,
    pub scheme: Scheme,
    pub base: LogBase,
}

impl RateRequest {
    pub fn new(
        stats: ChannelStats,
        budget: PowerBudget,
        alloc: Allocation,
        scheme: Scheme,
    ) -> Result<Self> {
        let req = RateRequest {
            stats,
            budget,
            alloc,
            scheme,
            base: LogBase::Two,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        self.scheme.check_alpha(self.alloc.alpha)
    }

    pub fn with_alloc(self, alloc: Allocation) -> Self {
        RateRequest { alloc, ..self }
    }

    pub fn with_budget(self, budget: PowerBudget) -> Self {
        RateRequest { budget, ..self }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        RateRequest { scheme, ..self }
    }

    pub fn with_stats(self, stats: ChannelStats) -> Self {
        RateRequest { stats, ..self }
    }

    pub fn with_base(self, base: LogBase) -> Self {
        RateRequest { base, ..self }
    }

    pub fn coefficients(&self) -> Result<EffectiveSnr> {
        effective_snr(&self.stats, &self.budget, &self.alloc, self.scheme)
    }

    fn weights(&self) -> TimeShares {
        TimeShares::new(&self.stats, self.alloc.alpha)
    }
}

/// Fractions of the block spent in each phase, per symbol of the block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeShares {
    /// `(1 - 2 alpha)(m - 2) / m`: unaided source transmission.
    pub direct: f64,
    /// `alpha (m - 2) / m`: one cooperative slot.
    pub coop: f64,
    /// `(1 - alpha)(m - 2) / m`: source slot of parallel-coding DF.
    pub source: f64,
    /// `2 / m`: the two pilots.
    pub training: f64,
}

impl TimeShares {
    pub fn new(stats: &ChannelStats, alpha: f64) -> Self {
        let m = stats.block();
        let data = stats.data_symbols();
        TimeShares {
            direct: (1.0 - 2.0 * alpha) * data / m,
            coop: alpha * data / m,
            source: (1.0 - alpha) * data / m,
            training: 2.0 / m,
        }
    }
}

/// `xy / (1 + x + y)`.
pub fn helper_f(x: f64, y: f64) -> f64 {
    x * y / (1.0 + (x + y))
}

/// `(1 + a) b (1 + c) / (1 + c + d)`.
pub fn helper_q(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (1.0 + a) * b * (1.0 + c) / (1.0 + c + d)
}

fn closed(c: f64) -> RateEstimate {
    RateEstimate::exact(expect_log1p_scalar(c))
}

/// Smaller of two independently estimated expectations.
pub fn min_of(i1: RateEstimate, i2: RateEstimate) -> RateEstimate {
    let near_tie = (i1.mean - i2.mean).abs() < 2.0 * (i1.std_error + i2.std_error);
    let pick = if i1.mean <= i2.mean { i1 } else { i2 };
    RateEstimate { near_tie, ..pick }
}

/// Rate of `req.scheme` with explicitly supplied coefficients. The
/// per-scheme entry points compute the coefficients from `req`; this one
/// exists so that perturbed coefficient sets can be pushed through the same
/// formulas.
pub fn rate_with_coefficients(
    req: &RateRequest,
    c: &EffectiveSnr,
    mc: &MonteCarlo,
) -> Result<RateEstimate> {
    req.validate()?;
    let w = req.weights();
    let direct = if w.direct > 0.0 {
        closed(c.c_sd_direct).scale(w.direct)
    } else {
        RateEstimate::exact(0.0)
    };
    let nats = match (req.scheme.relaying, req.scheme.overlap) {
        (Relaying::AmplifyForward, Overlap::NonOverlapped) => {
            let (csd, csr, crd) = (c.c_sd_coop, c.c_sr, c.c_rd);
            let coop =
                mc.expect(move |x| (csd * x.sd + helper_f(csr * x.sr, crd * x.rd)).ln_1p())?;
            direct.plus(coop.scale(w.coop))
        }
        (Relaying::AmplifyForward, Overlap::Overlapped) => {
            let (csd, csd_relay, csr, crd) = (c.c_sd_coop, c.c_sd_relay_slot, c.c_sr, c.c_rd);
            let coop = mc.expect(move |x| {
                let a = csd * x.sd;
                let b = csd_relay * x.sd;
                let sr = csr * x.sr;
                let rd = crd * x.rd;
                (a + helper_f(sr, rd) + helper_q(a, b, sr, rd)).ln_1p()
            })?;
            direct.plus(coop.scale(w.coop))
        }
        (Relaying::DfRepetition, Overlap::NonOverlapped) => {
            let (csd, crd) = (c.c_sd_coop, c.c_rd);
            let i1 = closed(c.c_sr);
            let i2 = mc.expect(move |x| (csd * x.sd + crd * x.rd).ln_1p())?;
            direct.plus(min_of(i1, i2).scale(w.coop))
        }
        (Relaying::DfRepetition, Overlap::Overlapped) => {
            let (csd, csd_relay, crd) = (c.c_sd_coop, c.c_sd_relay_slot, c.c_rd);
            let i1 = closed(c.c_sr);
            let i2 = mc.expect(move |x| {
                let a = csd * x.sd;
                let b = csd_relay * x.sd;
                (a + crd * x.rd + b + a * b).ln_1p()
            })?;
            direct.plus(min_of(i1, i2).scale(w.coop))
        }
        (Relaying::DfParallel, Overlap::NonOverlapped) => {
            let relay_decodes = closed(c.c_sr).scale(w.source);
            let destination = closed(c.c_sd_coop)
                .scale(w.source)
                .plus(closed(c.c_rd).scale(w.coop));
            min_of(relay_decodes, destination)
        }
        (Relaying::DfParallel, Overlap::Overlapped) => {
            return Err(Error::UnsupportedScheme {
                scheme: "df_parallel_overlapped".into(),
                reason: "parallel-coding DF is defined for non-overlapped transmission only",
            })
        }
    };
    Ok(nats.scale(req.base.per_nat()))
}

/// Rate of whatever scheme `req` names.
pub fn rate(req: &RateRequest, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate_with_coefficients(req, &req.coefficients()?, mc)
}

fn rate_as(req: &RateRequest, scheme: Scheme, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate(&req.with_scheme(scheme), mc)
}

pub fn rate_af_nonoverlapped(req: &RateRequest, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate_as(req, Scheme::AF_NONOVERLAPPED, mc)
}

pub fn rate_af_overlapped(req: &RateRequest, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate_as(req, Scheme::AF_OVERLAPPED, mc)
}

pub fn rate_df_repetition_nonoverlapped(
    req: &RateRequest,
    mc: &MonteCarlo,
) -> Result<RateEstimate> {
    rate_as(req, Scheme::DF_REPETITION_NONOVERLAPPED, mc)
}

pub fn rate_df_repetition_overlapped(req: &RateRequest, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate_as(req, Scheme::DF_REPETITION_OVERLAPPED, mc)
}

pub fn rate_df_parallel(req: &RateRequest, mc: &MonteCarlo) -> Result<RateEstimate> {
    rate_as(req, Scheme::DF_PARALLEL, mc)
}

/// Effective-SNR coefficient of direct transmission: one pilot, `m - 1`
/// data symbols, source power only.
pub fn direct_coefficient(stats: &ChannelStats, source_power: f64, delta_s: f64) -> f64 {
    let m = stats.block();
    let est = LinkEstimate::from_pilot(stats.sigma2_sd, delta_s * m * source_power, stats.n0);
    let data_power = (1.0 - delta_s) * m * source_power / (m - 1.0);
    data_power * est.est_var / (est.err_var * data_power + stats.n0)
}

/// Direct source-to-destination rate with the relay switched off: the
/// relay pilot slot carries data instead. Uses the source power of
/// `req.budget`.
pub fn rate_direct(req: &RateRequest) -> Result<RateEstimate> {
    req.budget.validate()?;
    let m = req.stats.block();
    let c = direct_coefficient(&req.stats, req.budget.source(), req.alloc.delta_s);
    Ok(closed(c).scale((m - 1.0) / m * req.base.per_nat()))
}
