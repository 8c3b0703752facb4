//! Bit energy of the relaying schemes at low SNR.
//!
//! With `SNR = P / N0` for the total power `P = Ps + Pr`, the energy per bit
//! normalized to the noise density is `Eb/N0 = SNR / R(SNR)`. Because the
//! channels are learned from pilots, `R` falls off as `SNR^2` and the bit
//! energy diverges as the SNR goes to zero; the minimum sits at a nonzero
//! SNR.

use crate::alloc::{golden_max, is_unimodal};
use crate::error::{Error, Result};
use crate::expect::{MonteCarlo, RateEstimate};
use crate::model::{Allocation, ChannelStats, PowerBudget, Scheme};
use crate::rates::{rate, RateRequest};

/// Default source share of the total power.
pub const DEFAULT_THETA: f64 = 0.6;
/// Default SNR at which the low-SNR scaling exponent is measured.
pub const DEFAULT_SNR0: f64 = 1e-3;
/// Relative tolerance of [`min_bit_energy`] in SNR.
pub const MIN_SEARCH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitEnergyPoint {
    pub snr: f64,
    /// Bits per symbol.
    pub rate: RateEstimate,
    /// `None` when the rate is zero.
    pub eb_n0: Option<f64>,
    pub eb_n0_db: Option<f64>,
}

impl BitEnergyPoint {
    pub fn new(snr: f64, rate: RateEstimate) -> Self {
        let eb_n0 = (rate.mean > 0.0).then(|| snr / rate.mean);
        BitEnergyPoint {
            snr,
            rate,
            eb_n0,
            eb_n0_db: eb_n0.map(|e| 10.0 * e.log10()),
        }
    }
}

/// Everything but the SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySetup {
    pub stats: ChannelStats,
    pub alloc: Allocation,
    pub scheme: Scheme,
    pub theta: f64,
}

impl EnergySetup {
    pub fn new(stats: ChannelStats, alloc: Allocation, scheme: Scheme, theta: f64) -> Result<Self> {
        PowerBudget::total(1.0, theta)?;
        scheme.check_alpha(alloc.alpha)?;
        Ok(EnergySetup {
            stats,
            alloc,
            scheme,
            theta,
        })
    }

    /// `m = 50`, standard deviations `(1, 4, 4)`, `delta_s = delta_r = 0.1`,
    /// `alpha = 0.5`, `theta = 0.6`, unit noise.
    pub fn reference(scheme: Scheme) -> Self {
        EnergySetup {
            stats: ChannelStats::from_std_devs(1.0, 4.0, 4.0, 1.0, 50)
                .expect("valid reference channel"),
            alloc: Allocation::new(0.1, 0.1, 0.5).expect("valid reference allocation"),
            scheme,
            theta: DEFAULT_THETA,
        }
    }

    pub fn with_m(self, m: u32) -> Result<Self> {
        Ok(EnergySetup {
            stats: self.stats.with_m(m)?,
            ..self
        })
    }

    pub fn request(&self, snr: f64) -> Result<RateRequest> {
        if !(snr >= 0.0 && snr.is_finite()) {
            return Err(crate::error::invalid(
                "snr",
                format!("{snr} is not a finite nonnegative SNR"),
            ));
        }
        RateRequest::new(
            self.stats,
            PowerBudget::total(snr * self.stats.n0, self.theta)?,
            self.alloc,
            self.scheme,
        )
    }

    pub fn rate_at(&self, snr: f64, mc: &MonteCarlo) -> Result<RateEstimate> {
        rate(&self.request(snr)?, mc)
    }

    pub fn point(&self, snr: f64, mc: &MonteCarlo) -> Result<BitEnergyPoint> {
        Ok(BitEnergyPoint::new(snr, self.rate_at(snr, mc)?))
    }
}

/// Bit energy at each SNR of a positive, increasing grid.
pub fn bit_energy_curve(
    setup: &EnergySetup,
    snr_grid: &[f64],
    mc: &MonteCarlo,
) -> Result<Vec<BitEnergyPoint>> {
    if snr_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if snr_grid.iter().any(|s| !(*s > 0.0)) || snr_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::error::invalid(
            "snr",
            "grid must be positive and strictly increasing",
        ));
    }
    mc.config()
        .execution
        .map_slice(snr_grid, |&snr| setup.point(snr, mc))
        .into_iter()
        .collect()
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(crate::error::invalid(
            "snr",
            format!("bad log grid [{lo}, {hi}] with {n} points"),
        ));
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64),
        })
        .collect())
}

/// Minimum bit energy over SNRs in `bracket`.
///
/// A 16-point log grid first locates an interior minimum; golden-section
/// search in log-SNR then narrows it to [`MIN_SEARCH_TOL`] relative
/// precision.
pub fn min_bit_energy(
    setup: &EnergySetup,
    bracket: (f64, f64),
    mc: &MonteCarlo,
) -> Result<BitEnergyPoint> {
    let grid = log_grid(bracket.0, bracket.1, 16)?;
    let curve = bit_energy_curve(setup, &grid, mc)?;
    let no_min = Error::NoInteriorMinimum {
        lo: bracket.0,
        hi: bracket.1,
    };
    let neg: Vec<f64> = curve
        .iter()
        .map(|p| p.eb_n0.map_or(f64::NEG_INFINITY, |e| -e))
        .collect();
    let k = (0..neg.len()).fold(0, |b, i| if neg[i] > neg[b] { i } else { b });
    if k == 0 || k == neg.len() - 1 || !neg[k].is_finite() || !is_unimodal(&neg) {
        return Err(no_min);
    }
    let f = |log_snr: f64| -> Result<f64> {
        let p = setup.point(log_snr.exp(), mc)?;
        Ok(p.eb_n0.map_or(f64::NEG_INFINITY, |e| -e))
    };
    let (x, fx) = golden_max(f, grid[k - 1].ln(), grid[k + 1].ln(), MIN_SEARCH_TOL)?;
    if fx > neg[k] {
        setup.point(x.exp(), mc)
    } else {
        Ok(curve[k])
    }
}

/// Local power-law exponent `log2(R(2 s0) / R(s0))` of a rate function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingEstimate {
    pub snr0: f64,
    pub exponent: f64,
    pub rate_lo: RateEstimate,
    pub rate_hi: RateEstimate,
}

/// Exponent of any rate function of the SNR. Fails when either rate is
/// dominated by Monte Carlo noise.
pub fn scaling_exponent<F>(mut rate_fn: F, snr0: f64) -> Result<ScalingEstimate>
where
    F: FnMut(f64) -> Result<RateEstimate>,
{
    if !(snr0 > 0.0) {
        return Err(crate::error::invalid(
            "snr0",
            format!("{snr0} must be positive"),
        ));
    }
    let lo = rate_fn(snr0)?;
    let hi = rate_fn(2.0 * snr0)?;
    for r in [lo, hi] {
        if !(r.mean > 0.0) || r.std_error > 0.1 * r.mean {
            return Err(Error::NoiseDominated {
                mean: r.mean,
                std_error: r.std_error,
            });
        }
    }
    Ok(ScalingEstimate {
        snr0,
        exponent: (hi.mean / lo.mean).log2(),
        rate_lo: lo,
        rate_hi: hi,
    })
}

/// Low-SNR exponent of the scheme rate at `snr0`; tends to 2.
pub fn low_snr_scaling_check(
    setup: &EnergySetup,
    snr0: f64,
    mc: &MonteCarlo,
) -> Result<ScalingEstimate> {
    scaling_exponent(|s| setup.rate_at(s, mc), snr0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expect::{expect_log1p_scalar, McConfig};

    fn mc(n: usize) -> MonteCarlo {
        MonteCarlo::new(McConfig::new(n, 21).unwrap())
    }

    #[test]
    fn zero_rate_is_flagged() {
        let p = BitEnergyPoint::new(0.5, RateEstimate::exact(0.0));
        assert_eq!(p.eb_n0, None);
        assert_eq!(p.eb_n0_db, None);
        let p = BitEnergyPoint::new(0.5, RateEstimate::exact(0.05));
        assert!((p.eb_n0.unwrap() - 10.0).abs() < 1e-12);
        assert!((p.eb_n0_db.unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn noise_scaling_leaves_curve_unchanged() {
        let m = mc(20_000);
        let a = EnergySetup::reference(Scheme::AF_NONOVERLAPPED);
        let b = EnergySetup {
            stats: a.stats.with_n0(2.0).unwrap(),
            ..a
        };
        let grid = [0.01, 0.3, 4.0];
        let ca = bit_energy_curve(&a, &grid, &m).unwrap();
        let cb = bit_energy_curve(&b, &grid, &m).unwrap();
        for (x, y) in ca.iter().zip(&cb) {
            let (x, y) = (x.eb_n0.unwrap(), y.eb_n0.unwrap());
            assert!((x - y).abs() <= 1e-12 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn curve_is_u_shaped() {
        let m = mc(50_000);
        let setup = EnergySetup::reference(Scheme::AF_NONOVERLAPPED);
        let grid = log_grid(1e-4, 100.0, 25).unwrap();
        let curve = bit_energy_curve(&setup, &grid, &m).unwrap();
        let eb: Vec<f64> = curve.iter().map(|p| p.eb_n0.unwrap()).collect();
        let k = (0..eb.len()).fold(0, |b, i| if eb[i] < eb[b] { i } else { b });
        assert!(k > 0 && k < eb.len() - 1);
        assert!(eb[..=k].windows(2).all(|w| w[1] < w[0]));
        assert!(curve[0].eb_n0_db.unwrap() >= curve[k].eb_n0_db.unwrap() + 3.0);
    }

    #[test]
    fn minimum_search_matches_curve() {
        let m = mc(50_000);
        let setup = EnergySetup::reference(Scheme::DF_PARALLEL);
        let best = min_bit_energy(&setup, (1e-3, 100.0), &m).unwrap();
        let again = setup.point(best.snr, &m).unwrap();
        assert_eq!(best, again);
        for snr in log_grid(1e-3, 100.0, 40).unwrap() {
            let p = setup.point(snr, &m).unwrap();
            assert!(
                p.eb_n0.unwrap() >= best.eb_n0.unwrap() * (1.0 - 1e-6),
                "{snr}"
            );
        }
    }

    #[test]
    fn bracket_without_interior_minimum_is_rejected() {
        let m = mc(10_000);
        let setup = EnergySetup::reference(Scheme::AF_NONOVERLAPPED);
        assert!(matches!(
            min_bit_energy(&setup, (1e-5, 1e-3), &m),
            Err(Error::NoInteriorMinimum { .. })
        ));
    }

    #[test]
    fn perfect_knowledge_control_scales_linearly() {
        let est =
            scaling_exponent(|s| Ok(RateEstimate::exact(expect_log1p_scalar(s))), 1e-3).unwrap();
        assert!((est.exponent - 1.0).abs() < 1e-2);
    }

    #[test]
    fn noisy_rate_is_refused() {
        let r = scaling_exponent(
            |_| {
                Ok(RateEstimate {
                    mean: 1e-6,
                    std_error: 1e-6,
                    n_samples: 10,
                    near_tie: false,
                })
            },
            1e-3,
        );
        assert!(matches!(r, Err(Error::NoiseDominated { .. })));
    }

    #[test]
    fn bit_energy_grows_below_the_minimum() {
        let m = mc(50_000);
        let setup = EnergySetup::reference(Scheme::DF_PARALLEL);
        for snr0 in [1e-2, 1e-3] {
            let a = setup.point(snr0, &m).unwrap().eb_n0.unwrap();
            let b = setup.point(snr0 / 10.0, &m).unwrap().eb_n0.unwrap();
            assert!(b > a);
        }
    }
}
