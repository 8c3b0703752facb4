//! Channel, power and training parameters of the three-node relay network,
//! and the deterministic coefficients derived from them.
//!
//! Each block of `m` symbols starts with two pilots (source, then relay);
//! the remaining `m - 2` symbols carry data. The receivers form MMSE
//! estimates of the three Rayleigh fades from those pilots, and every rate
//! expression reduces to logarithms of `c * |w|^2` terms with `w` standard
//! complex Gaussian. [`EffectiveSnr`] holds those `c` coefficients.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Training fractions are clipped to `[DELTA_CLIP, 1 - DELTA_CLIP]`.
pub const DELTA_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    SourceDestination,
    SourceRelay,
    RelayDestination,
}

/// Second-order statistics of the three fading links plus noise level and
/// block length. Variances, not standard deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub sigma2_sd: f64,
    pub sigma2_sr: f64,
    pub sigma2_rd: f64,
    pub n0: f64,
    pub m: u32,
}

impl ChannelStats {
    pub fn new(sigma2_sd: f64, sigma2_sr: f64, sigma2_rd: f64, n0: f64, m: u32) -> Result<Self> {
        positive("sigma2_sd", sigma2_sd)?;
        positive("sigma2_sr", sigma2_sr)?;
        positive("sigma2_rd", sigma2_rd)?;
        positive("n0", n0)?;
        if m < 3 {
            return Err(invalid("m", format!("block length {m} < 3")));
        }
        Ok(Self {
            sigma2_sd,
            sigma2_sr,
            sigma2_rd,
            n0,
            m,
        })
    }

    /// Builds the statistics from link standard deviations, the way
    /// operating points are usually quoted (e.g. `(1, 2, 1)`).
    pub fn from_std_devs(
        sigma_sd: f64,
        sigma_sr: f64,
        sigma_rd: f64,
        n0: f64,
        m: u32,
    ) -> Result<Self> {
        Self::new(
            sigma_sd * sigma_sd,
            sigma_sr * sigma_sr,
            sigma_rd * sigma_rd,
            n0,
            m,
        )
    }

    pub fn with_m(self, m: u32) -> Result<Self> {
        Self::new(self.sigma2_sd, self.sigma2_sr, self.sigma2_rd, self.n0, m)
    }

    pub fn with_n0(self, n0: f64) -> Result<Self> {
        Self::new(self.sigma2_sd, self.sigma2_sr, self.sigma2_rd, n0, self.m)
    }

    pub fn variance(&self, link: Link) -> f64 {
        match link {
            Link::SourceDestination => self.sigma2_sd,
            Link::SourceRelay => self.sigma2_sr,
            Link::RelayDestination => self.sigma2_rd,
        }
    }

    /// Number of data symbols per block.
    pub fn data_symbols(&self) -> f64 {
        f64::from(self.m) - 2.0
    }

    pub fn block(&self) -> f64 {
        f64::from(self.m)
    }
}

/// Average per-symbol power constraints of source and relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerBudget {
    Separate {
        source: f64,
        relay: f64,
    },
    /// `source = theta * total`, `relay = (1 - theta) * total`.
    Total {
        total: f64,
        theta: f64,
    },
}

impl PowerBudget {
    pub fn separate(source: f64, relay: f64) -> Result<Self> {
        let b = PowerBudget::Separate { source, relay };
        b.validate()?;
        Ok(b)
    }

    pub fn total(total: f64, theta: f64) -> Result<Self> {
        let b = PowerBudget::Total { total, theta };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PowerBudget::Separate { source, relay } => {
                non_negative("Ps", source)?;
                non_negative("Pr", relay)
            }
            PowerBudget::Total { total, theta } => {
                non_negative("P", total)?;
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(invalid("theta", format!("{theta} not in (0, 1)")));
                }
                Ok(())
            }
        }
    }

    pub fn source(&self) -> f64 {
        match *self {
            PowerBudget::Separate { source, .. } => source,
            PowerBudget::Total { total, theta } => theta * total,
        }
    }

    pub fn relay(&self) -> f64 {
        match *self {
            PowerBudget::Separate { relay, .. } => relay,
            PowerBudget::Total { total, theta } => (1.0 - theta) * total,
        }
    }

    pub fn total_power(&self) -> f64 {
        match *self {
            PowerBudget::Separate { source, relay } => source + relay,
            PowerBudget::Total { total, .. } => total,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            PowerBudget::Separate { source, relay } => PowerBudget::Separate {
                source: source * factor,
                relay: relay * factor,
            },
            PowerBudget::Total { total, theta } => PowerBudget::Total {
                total: total * factor,
                theta,
            },
        }
    }
}

/// Training-power fractions and the relay time fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub delta_s: f64,
    pub delta_r: f64,
    pub alpha: f64,
}

impl Allocation {
    /// `delta_s`/`delta_r` must lie in `[0, 1]` and are clipped to the open
    /// interval; `alpha` must lie in `[0, 1)`. Whether `alpha` suits a given
    /// relaying scheme is checked by [`Scheme::check_alpha`].
    pub fn new(delta_s: f64, delta_r: f64, alpha: f64) -> Result<Self> {
        let delta_s = clip_delta("delta_s", delta_s)?;
        let delta_r = clip_delta("delta_r", delta_r)?;
        if !(0.0..1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("{alpha} not in [0, 1)")));
        }
        Ok(Self {
            delta_s,
            delta_r,
            alpha,
        })
    }

    pub fn with_delta_s(self, delta_s: f64) -> Result<Self> {
        Self::new(delta_s, self.delta_r, self.alpha)
    }

    pub fn with_delta_r(self, delta_r: f64) -> Result<Self> {
        Self::new(self.delta_s, delta_r, self.alpha)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.delta_s, self.delta_r, alpha)
    }

    /// Rounds `alpha * (m - 2)` to the nearest whole number of symbols
    /// (at least one).
    pub fn snap_alpha(self, m: u32) -> Result<Self> {
        let data = f64::from(m) - 2.0;
        let slots = (self.alpha * data).round().max(1.0);
        self.with_alpha((slots / data).min(1.0 - 1.0 / data.max(2.0)))
    }
}

fn clip_delta(name: &'static str, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid(name, format!("{delta} not in [0, 1]")));
    }
    Ok(delta.clamp(DELTA_CLIP, 1.0 - DELTA_CLIP))
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} must be positive and finite")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("{v} must be non-negative and finite"),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relaying {
    AmplifyForward,
    DfRepetition,
    DfParallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Overlap {
    /// The source is silent while the relay transmits.
    NonOverlapped,
    /// The source keeps transmitting during the relay slot.
    Overlapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub relaying: Relaying,
    pub overlap: Overlap,
}

impl Scheme {
    pub const AF_NONOVERLAPPED: Scheme = Scheme {
        relaying: Relaying::AmplifyForward,
        overlap: Overlap::NonOverlapped,
    };
    pub const AF_OVERLAPPED: Scheme = Scheme {
        relaying: Relaying::AmplifyForward,
        overlap: Overlap::Overlapped,
    };
    pub const DF_REPETITION_NONOVERLAPPED: Scheme = Scheme {
        relaying: Relaying::DfRepetition,
        overlap: Overlap::NonOverlapped,
    };
    pub const DF_REPETITION_OVERLAPPED: Scheme = Scheme {
        relaying: Relaying::DfRepetition,
        overlap: Overlap::Overlapped,
    };
    pub const DF_PARALLEL: Scheme = Scheme {
        relaying: Relaying::DfParallel,
        overlap: Overlap::NonOverlapped,
    };

    pub const ALL: [Scheme; 5] = [
        Scheme::AF_NONOVERLAPPED,
        Scheme::AF_OVERLAPPED,
        Scheme::DF_REPETITION_NONOVERLAPPED,
        Scheme::DF_REPETITION_OVERLAPPED,
        Scheme::DF_PARALLEL,
    ];

    pub fn new(relaying: Relaying, overlap: Overlap) -> Result<Self> {
        let s = Scheme { relaying, overlap };
        if relaying == Relaying::DfParallel && overlap == Overlap::Overlapped {
            return Err(Error::UnsupportedScheme {
                scheme: "df_parallel_overlapped".into(),
                reason: "parallel-coding DF is defined for non-overlapped transmission only",
            });
        }
        Ok(s)
    }

    pub fn name(&self) -> &'static str {
        match (self.relaying, self.overlap) {
            (Relaying::AmplifyForward, Overlap::NonOverlapped) => "af_nonoverlapped",
            (Relaying::AmplifyForward, Overlap::Overlapped) => "af_overlapped",
            (Relaying::DfRepetition, Overlap::NonOverlapped) => "df_repetition_nonoverlapped",
            (Relaying::DfRepetition, Overlap::Overlapped) => "df_repetition_overlapped",
            (Relaying::DfParallel, _) => "df_parallel",
        }
    }

    /// Largest admissible relay time fraction and whether it is attainable.
    pub fn alpha_max(&self) -> (f64, bool) {
        match self.relaying {
            Relaying::DfParallel => (1.0, false),
            _ => (0.5, true),
        }
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        let (max, inclusive) = self.alpha_max();
        let ok = alpha > 0.0 && if inclusive { alpha <= max } else { alpha < max };
        if ok {
            Ok(())
        } else {
            let bracket = if inclusive { ']' } else { ')' };
            Err(invalid(
                "alpha",
                format!("{alpha} outside (0, {max}{bracket} for {}", self.name()),
            ))
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "af_nonoverlapped" | "af_nov" | "af" => Scheme::AF_NONOVERLAPPED,
            "af_overlapped" | "af_ov" => Scheme::AF_OVERLAPPED,
            "df_repetition_nonoverlapped" | "dfr_nonoverlapped" | "dfr_nov" | "dfr" => {
                Scheme::DF_REPETITION_NONOVERLAPPED
            }
            "df_repetition_overlapped" | "dfr_overlapped" | "dfr_ov" => {
                Scheme::DF_REPETITION_OVERLAPPED
            }
            "df_parallel" | "df_parallel_nonoverlapped" | "dfp" => Scheme::DF_PARALLEL,
            "df_parallel_overlapped" | "dfp_ov" => {
                return Scheme::new(Relaying::DfParallel, Overlap::Overlapped)
            }
            other => return Err(invalid("scheme", format!("unknown scheme `{other}`"))),
        };
        Ok(scheme)
    }
}

/// Variances of the MMSE estimate and of its error for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEstimate {
    pub est_var: f64,
    pub err_var: f64,
}

impl LinkEstimate {
    /// MMSE statistics of a `CN(0, sigma2)` fade observed through one pilot
    /// of energy `pilot_energy` in noise of level `n0`.
    pub fn from_pilot(sigma2: f64, pilot_energy: f64, n0: f64) -> Self {
        let obs = sigma2 * pilot_energy + n0;
        LinkEstimate {
            est_var: sigma2 * sigma2 * pilot_energy / obs,
            err_var: sigma2 * n0 / obs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationStats {
    pub sd: LinkEstimate,
    pub sr: LinkEstimate,
    pub rd: LinkEstimate,
}

impl EstimationStats {
    pub fn link(&self, link: Link) -> LinkEstimate {
        match link {
            Link::SourceDestination => self.sd,
            Link::SourceRelay => self.sr,
            Link::RelayDestination => self.rd,
        }
    }
}

/// MMSE estimate/error variances after the training phase. The source pilot
/// carries energy `delta_s * m * Ps`, the relay pilot `delta_r * m * Pr`.
pub fn estimation_stats(
    stats: &ChannelStats,
    budget: &PowerBudget,
    alloc: &Allocation,
) -> Result<EstimationStats> {
    budget.validate()?;
    let m = stats.block();
    let source_pilot = alloc.delta_s * m * budget.source();
    let relay_pilot = alloc.delta_r * m * budget.relay();
    Ok(EstimationStats {
        sd: LinkEstimate::from_pilot(stats.sigma2_sd, source_pilot, stats.n0),
        sr: LinkEstimate::from_pilot(stats.sigma2_sr, source_pilot, stats.n0),
        rd: LinkEstimate::from_pilot(stats.sigma2_rd, relay_pilot, stats.n0),
    })
}

/// Per-symbol data powers of source and relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPowers {
    pub source: f64,
    pub relay: f64,
}

pub fn data_symbol_powers(
    stats: &ChannelStats,
    budget: &PowerBudget,
    alloc: &Allocation,
    overlap: Overlap,
) -> Result<DataPowers> {
    budget.validate()?;
    let m = stats.block();
    let data = stats.data_symbols();
    if alloc.alpha <= 0.0 || alloc.alpha * data <= 0.0 {
        return Err(Error::NoRelaySlot);
    }
    let source_time = match overlap {
        Overlap::NonOverlapped => 1.0 - alloc.alpha,
        Overlap::Overlapped => 1.0,
    };
    Ok(DataPowers {
        source: (1.0 - alloc.delta_s) * m * budget.source() / (data * source_time),
        relay: (1.0 - alloc.delta_r) * m * budget.relay() / (data * alloc.alpha),
    })
}

/// Coefficient of `|w|^2` in `P'|h_hat|^2 / sigma_z^2` for a link whose
/// transmitter spends `delta` of its power on the pilot and sends data over a
/// `time_fraction` share of the `m - 2` data symbols, with only its own
/// estimation error in the noise term.
pub fn training_snr_coefficient(
    delta: f64,
    m: f64,
    power: f64,
    sigma2: f64,
    n0: f64,
    time_fraction: f64,
) -> f64 {
    let num = delta * (1.0 - delta) * m * m * power * power * sigma2 * sigma2 / time_fraction;
    let den = (1.0 - delta) * m * power * sigma2 * n0 / time_fraction
        + (m - 2.0) * (sigma2 * delta * m * power + n0) * n0;
    num / den
}

/// Deterministic coefficients `c` such that every SNR-like term in the rate
/// expressions equals `c * |w|^2` for a standard complex Gaussian `w`.
///
/// In overlapped mode `c_rd` and `c_sd_relay_slot` share the relay-slot
/// noise, which contains the estimation errors of both the source and the
/// relay transmissions. In non-overlapped mode `c_sd_relay_slot` is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveSnr {
    pub c_sd_direct: f64,
    pub c_sd_coop: f64,
    pub c_sr: f64,
    pub c_rd: f64,
    pub c_sd_relay_slot: f64,
}

impl EffectiveSnr {
    pub fn c_rd_relay_slot(&self) -> f64 {
        self.c_rd
    }

    pub fn all(&self) -> [f64; 5] {
        [
            self.c_sd_direct,
            self.c_sd_coop,
            self.c_sr,
            self.c_rd,
            self.c_sd_relay_slot,
        ]
    }
}

pub fn effective_snr(
    stats: &ChannelStats,
    budget: &PowerBudget,
    alloc: &Allocation,
    scheme: Scheme,
) -> Result<EffectiveSnr> {
    budget.validate()?;
    if alloc.alpha <= 0.0 {
        return Err(Error::NoRelaySlot);
    }
    let m = stats.block();
    let n0 = stats.n0;
    let (ds, dr, a) = (alloc.delta_s, alloc.delta_r, alloc.alpha);
    let (ps, pr) = (budget.source(), budget.relay());

    match scheme.overlap {
        Overlap::NonOverlapped => {
            let c_sd = training_snr_coefficient(ds, m, ps, stats.sigma2_sd, n0, 1.0 - a);
            Ok(EffectiveSnr {
                c_sd_direct: c_sd,
                c_sd_coop: c_sd,
                c_sr: training_snr_coefficient(ds, m, ps, stats.sigma2_sr, n0, 1.0 - a),
                c_rd: training_snr_coefficient(dr, m, pr, stats.sigma2_rd, n0, a),
                c_sd_relay_slot: 0.0,
            })
        }
        Overlap::Overlapped => {
            let (s_sd, s_rd) = (stats.sigma2_sd, stats.sigma2_rd);
            let c_sd = training_snr_coefficient(ds, m, ps, s_sd, n0, 1.0);
            let obs_sd = s_sd * ds * m * ps + n0;
            let obs_rd = s_rd * dr * m * pr + n0;
            let shared = (m - 2.0) * obs_sd * obs_rd * n0
                + (1.0 - dr) * m * pr * s_rd * n0 * obs_sd / a
                + (1.0 - ds) * m * ps * s_sd * n0 * obs_rd;
            Ok(EffectiveSnr {
                c_sd_direct: c_sd,
                c_sd_coop: c_sd,
                c_sr: training_snr_coefficient(ds, m, ps, stats.sigma2_sr, n0, 1.0),
                c_rd: dr * (1.0 - dr) * m * m * pr * pr * s_rd * s_rd * obs_sd / a / shared,
                c_sd_relay_slot: ds * (1.0 - ds) * m * m * ps * ps * s_sd * s_sd * obs_rd / shared,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn error_variance_example() {
        let stats = ChannelStats::new(1.0, 4.0, 1.0, 1.0, 50).unwrap();
        let budget = PowerBudget::separate(1.0, 1.0).unwrap();
        let alloc = Allocation::new(0.1, 0.1, 0.5).unwrap();
        let est = estimation_stats(&stats, &budget, &alloc).unwrap();
        assert!((est.sr.err_var - 4.0 / 21.0).abs() < 1e-15);
        assert!((est.sr.err_var - 0.190476).abs() < 1e-6);
    }

    #[test]
    fn perfect_and_absent_training_limits() {
        let stats = ChannelStats::new(2.0, 3.0, 1.5, 1.0, 50).unwrap();
        let alloc = Allocation::new(1.0, 0.5, 0.5).unwrap();
        let strong = PowerBudget::separate(1e12, 1.0).unwrap();
        let est = estimation_stats(&stats, &strong, &alloc).unwrap();
        assert!(est.sr.err_var < 1e-9);

        let alloc = Allocation::new(0.0, 0.5, 0.5).unwrap();
        let est =
            estimation_stats(&stats, &PowerBudget::separate(1.0, 1.0).unwrap(), &alloc).unwrap();
        assert!(close(est.sd.err_var, 2.0, 1e-4));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Allocation::new(-0.1, 0.1, 0.5).is_err());
        assert!(Allocation::new(0.1, 1.1, 0.5).is_err());
        assert!(Allocation::new(0.1, f64::NAN, 0.5).is_err());
        assert!(PowerBudget::separate(-1.0, 1.0).is_err());
        assert!(PowerBudget::total(1.0, 1.0).is_err());
        assert!(ChannelStats::new(1.0, 1.0, 1.0, 1.0, 2).is_err());
        assert!(ChannelStats::new(0.0, 1.0, 1.0, 1.0, 10).is_err());
        assert!(ChannelStats::new(1.0, 1.0, 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn data_powers_examples() {
        let stats = ChannelStats::new(1.0, 1.0, 1.0, 1.0, 50).unwrap();
        let budget = PowerBudget::separate(1.0, 1.0).unwrap();
        let alloc = Allocation::new(0.1, 0.1, 0.5).unwrap();
        let nov = data_symbol_powers(&stats, &budget, &alloc, Overlap::NonOverlapped).unwrap();
        let ov = data_symbol_powers(&stats, &budget, &alloc, Overlap::Overlapped).unwrap();
        assert!((nov.source - 1.875).abs() < 1e-12);
        assert!((ov.source - 0.9375).abs() < 1e-12);
        assert!((nov.relay - 1.875).abs() < 1e-12);
        assert_eq!(nov.relay, ov.relay);

        let no_relay = Allocation::new(0.1, 0.1, 0.0).unwrap();
        assert_eq!(
            data_symbol_powers(&stats, &budget, &no_relay, Overlap::NonOverlapped),
            Err(Error::NoRelaySlot)
        );
        assert_eq!(
            effective_snr(&stats, &budget, &no_relay, Scheme::AF_NONOVERLAPPED),
            Err(Error::NoRelaySlot)
        );
    }

    #[test]
    fn direct_coefficient_example() {
        let stats = ChannelStats::new(1.0, 4.0, 1.0, 1.0, 50).unwrap();
        let budget = PowerBudget::separate(1.0, 1.0).unwrap();
        let alloc = Allocation::new(0.1, 0.1, 0.5).unwrap();
        let c = effective_snr(&stats, &budget, &alloc, Scheme::AF_NONOVERLAPPED).unwrap();
        assert!((c.c_sd_direct - 450.0 / 378.0).abs() < 1e-12);
        assert!((c.c_sd_direct - 1.19048).abs() < 1e-5);
    }

    #[test]
    fn zero_power_and_degenerate_training() {
        let stats = ChannelStats::new(1.0, 4.0, 2.0, 1.0, 50).unwrap();
        let alloc = Allocation::new(0.1, 0.1, 0.5).unwrap();
        for scheme in Scheme::ALL {
            let c = effective_snr(
                &stats,
                &PowerBudget::separate(0.0, 0.0).unwrap(),
                &alloc,
                scheme,
            )
            .unwrap();
            assert!(c.all().iter().all(|&v| v == 0.0));
            let tiny = PowerBudget::separate(1e-6, 1e-6).unwrap();
            let c = effective_snr(&stats, &tiny, &alloc, scheme).unwrap();
            assert!(c.all().iter().all(|&v| (0.0..1e-9).contains(&v)));
        }
        let budget = PowerBudget::separate(1.0, 1.0).unwrap();
        for ds in [0.0, 1.0] {
            let alloc = Allocation::new(ds, 0.1, 0.5).unwrap();
            let c = effective_snr(&stats, &budget, &alloc, Scheme::AF_NONOVERLAPPED).unwrap();
            assert!(c.c_sd_coop < 1e-4, "delta_s={ds}: {}", c.c_sd_coop);
        }
    }

    #[test]
    fn dfp_overlapped_is_rejected() {
        assert!(Scheme::new(Relaying::DfParallel, Overlap::Overlapped).is_err());
        assert!("df_parallel_overlapped".parse::<Scheme>().is_err());
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
    }

    #[test]
    fn alpha_bounds_per_scheme() {
        assert!(Scheme::AF_OVERLAPPED.check_alpha(0.5).is_ok());
        assert!(Scheme::AF_OVERLAPPED.check_alpha(0.51).is_err());
        assert!(Scheme::DF_PARALLEL.check_alpha(0.9).is_ok());
        assert!(Scheme::DF_PARALLEL.check_alpha(0.0).is_err());
    }

    #[test]
    fn snap_alpha_rounds_to_whole_symbols() {
        let a = Allocation::new(0.1, 0.1, 0.3)
            .unwrap()
            .snap_alpha(50)
            .unwrap();
        assert!((a.alpha * 48.0 - 14.0).abs() < 1e-12);
        let a = Allocation::new(0.1, 0.1, 0.001)
            .unwrap()
            .snap_alpha(50)
            .unwrap();
        assert!((a.alpha * 48.0 - 1.0).abs() < 1e-12);
    }

    /// Second route: compose each coefficient from the estimation statistics,
    /// the data powers and the worst-case noise variances.
    fn composed(
        stats: &ChannelStats,
        budget: &PowerBudget,
        alloc: &Allocation,
        scheme: Scheme,
    ) -> EffectiveSnr {
        let est = estimation_stats(stats, budget, alloc).unwrap();
        let p = data_symbol_powers(stats, budget, alloc, scheme.overlap).unwrap();
        let n0 = stats.n0;
        let z_sd = est.sd.err_var * p.source + n0;
        let z_sr = est.sr.err_var * p.source + n0;
        match scheme.overlap {
            Overlap::NonOverlapped => EffectiveSnr {
                c_sd_direct: p.source * est.sd.est_var / z_sd,
                c_sd_coop: p.source * est.sd.est_var / z_sd,
                c_sr: p.source * est.sr.est_var / z_sr,
                c_rd: p.relay * est.rd.est_var / (est.rd.err_var * p.relay + n0),
                c_sd_relay_slot: 0.0,
            },
            Overlap::Overlapped => {
                let z_relay = est.sd.err_var * p.source + est.rd.err_var * p.relay + n0;
                EffectiveSnr {
                    c_sd_direct: p.source * est.sd.est_var / z_sd,
                    c_sd_coop: p.source * est.sd.est_var / z_sd,
                    c_sr: p.source * est.sr.est_var / z_sr,
                    c_rd: p.relay * est.rd.est_var / z_relay,
                    c_sd_relay_slot: p.source * est.sd.est_var / z_relay,
                }
            }
        }
    }

    fn point() -> impl Strategy<Value = (ChannelStats, PowerBudget, Allocation, Scheme)> {
        (
            (
                0.05f64..20.0,
                0.05f64..20.0,
                0.05f64..20.0,
                0.1f64..10.0,
                3u32..300,
            ),
            (0.0f64..100.0, 0.0f64..100.0),
            (0.0f64..=1.0, 0.0f64..=1.0, 0.01f64..0.5),
            0usize..5,
        )
            .prop_map(|((a, b, c, n0, m), (ps, pr), (ds, dr, al), k)| {
                (
                    ChannelStats::new(a, b, c, n0, m).unwrap(),
                    PowerBudget::separate(ps, pr).unwrap(),
                    Allocation::new(ds, dr, al).unwrap(),
                    Scheme::ALL[k],
                )
            })
    }

    proptest! {
        #[test]
        fn orthogonality((stats, budget, alloc, _) in point()) {
            let est = estimation_stats(&stats, &budget, &alloc).unwrap();
            for link in [Link::SourceDestination, Link::SourceRelay, Link::RelayDestination] {
                let l = est.link(link);
                let s2 = stats.variance(link);
                prop_assert!((l.est_var + l.err_var - s2).abs() <= 1e-12 * s2);
            }
        }

        #[test]
        fn error_variance_decreases(s2 in 0.1f64..10.0, e in 0.01f64..100.0, k in 1.01f64..4.0) {
            let lo = LinkEstimate::from_pilot(s2, e, 1.0);
            let hi = LinkEstimate::from_pilot(s2, e * k, 1.0);
            prop_assert!(hi.err_var < lo.err_var);
        }

        #[test]
        fn printed_coefficients_match_composition((stats, budget, alloc, scheme) in point()) {
            let a = effective_snr(&stats, &budget, &alloc, scheme).unwrap();
            let b = composed(&stats, &budget, &alloc, scheme);
            for (x, y) in a.all().iter().zip(b.all()) {
                prop_assert!(close(*x, y, 1e-10), "{:?} vs {:?}", a, b);
            }
            if scheme.overlap == Overlap::NonOverlapped {
                prop_assert_eq!(a.c_sd_direct, a.c_sd_coop);
            }
        }

        #[test]
        fn scale_covariance((stats, budget, alloc, scheme) in point(), k in 0.01f64..100.0) {
            let a = effective_snr(&stats, &budget, &alloc, scheme).unwrap();
            let scaled = stats.with_n0(stats.n0 * k).unwrap();
            let b = effective_snr(&scaled, &budget.scaled(k), &alloc, scheme).unwrap();
            for (x, y) in a.all().iter().zip(b.all()) {
                prop_assert!(close(*x, y, 1e-9));
            }
        }
    }
}
