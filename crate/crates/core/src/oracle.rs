//! Brute-force cross-checks of the analytic chain.
//!
//! [`validate_mmse`] simulates pilot transmission over complex Gaussian
//! fades and compares the empirical estimate and error statistics with
//! [`estimation_stats`]. [`logdet_rate`] draws channel estimates from their
//! exact distribution, builds the per-sample channel and noise matrices of
//! each cooperative protocol, and averages
//! `log det(I + P A A^H (B S B^H)^-1)` directly, bypassing the scalar
//! reductions used in [`crate::rates`].

use std::fmt;

use nalgebra::{Matrix2, Matrix2x3, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expect::{McConfig, Moments, MonteCarlo, RateEstimate, CHUNK};
use crate::model::{
    data_symbol_powers, effective_snr, estimation_stats, Allocation, ChannelStats, Link, Overlap,
    PowerBudget, Relaying, Scheme,
};
use crate::rates::{min_of, rate, rate_with_coefficients, RateRequest, TimeShares};

/// Below this many blocks [`validate_mmse`] warns instead of trusting its
/// tolerances.
pub const MIN_BLOCKS: usize = 10_000;

/// Offset separating oracle random streams from those of [`MonteCarlo`].
const ORACLE_STREAM: u64 = 1 << 40;

/// One pass/fail line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Report::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.warnings.extend(other.warnings);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.title)?;
        for w in &self.warnings {
            writeln!(f, "WARN {w}")?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "{} {} observed={:.9e} expected={:.9e} tolerance={:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.expected,
                c.tolerance
            )?;
        }
        writeln!(
            f,
            "{} {}/{} checks passed",
            if self.passed() { "OK" } else { "FAILED" },
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        )
    }
}

fn chunk_rng(seed: u64, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ORACLE_STREAM + j as u64);
    rng
}

/// `CN(0, var)` sample.
fn complex_gaussian(rng: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Empirical statistics of one link's estimate and error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEmpirics {
    pub est_var: f64,
    pub est_var_se: f64,
    pub err_var: f64,
    pub err_var_se: f64,
    /// `|E[h_hat conj(h_tilde)]| / sqrt(var(h_hat) var(h_tilde))`.
    pub corr: f64,
    /// Largest `|h_hat + h_tilde - h|` relative to `|h| + |h_hat| + |h_tilde|`.
    pub max_decomposition_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct LinkSums {
    est: Moments,
    err: Moments,
    cross_re: f64,
    cross_im: f64,
    max_dec: f64,
}

impl LinkSums {
    fn merge(self, o: LinkSums) -> LinkSums {
        LinkSums {
            est: self.est.merge(o.est),
            err: self.err.merge(o.err),
            cross_re: self.cross_re + o.cross_re,
            cross_im: self.cross_im + o.cross_im,
            max_dec: self.max_dec.max(o.max_dec),
        }
    }

    fn finish(self) -> LinkEmpirics {
        let n = self.est.count;
        let cross = (self.cross_re / n).hypot(self.cross_im / n);
        let denom = (self.est.mean * self.err.mean).sqrt();
        LinkEmpirics {
            est_var: self.est.mean,
            est_var_se: self.est.std_error(),
            err_var: self.err.mean,
            err_var_se: self.err.std_error(),
            corr: if denom > 0.0 { cross / denom } else { 0.0 },
            max_decomposition_error: self.max_dec,
        }
    }
}

/// Simulates `n_blocks` training phases and returns the empirical
/// statistics per link (sd, sr, rd).
pub fn simulate_mmse(
    stats: &ChannelStats,
    budget: &PowerBudget,
    alloc: &Allocation,
    n_blocks: usize,
    seed: u64,
) -> Result<[LinkEmpirics; 3]> {
    budget.validate()?;
    if n_blocks < 2 {
        return Err(crate::error::invalid(
            "n_blocks",
            "need at least two blocks",
        ));
    }
    let m = stats.block();
    let n0 = stats.n0;
    let source_pilot = (alloc.delta_s * m * budget.source()).sqrt();
    let relay_pilot = (alloc.delta_r * m * budget.relay()).sqrt();
    let links = [
        (stats.sigma2_sd, source_pilot),
        (stats.sigma2_sr, source_pilot),
        (stats.sigma2_rd, relay_pilot),
    ];
    let chunks = n_blocks.div_ceil(CHUNK);
    let per_chunk = crate::exec::Execution::default().map_indices(chunks, |j| {
        let len = (n_blocks - j * CHUNK).min(CHUNK);
        let mut rng = chunk_rng(seed, j);
        let mut out = [LinkSums::default(); 3];
        let mut est: Vec<Vec<_>> = (0..3).map(|_| Vec::with_capacity(len)).collect();
        let mut err: Vec<Vec<_>> = (0..3).map(|_| Vec::with_capacity(len)).collect();
        for _ in 0..len {
            for (k, &(sigma2, amp)) in links.iter().enumerate() {
                let h = complex_gaussian(&mut rng, sigma2);
                let noise = complex_gaussian(&mut rng, n0);
                let y = h * amp + noise;
                let h_hat = y * (sigma2 * amp / (sigma2 * amp * amp + n0));
                let h_tilde = h - h_hat;
                let scale = h.norm() + h_hat.norm() + h_tilde.norm();
                let dec = (h_hat + h_tilde - h).norm() / scale.max(f64::MIN_POSITIVE);
                let cross = h_hat * h_tilde.conj();
                est[k].push(h_hat.norm_sqr());
                err[k].push(h_tilde.norm_sqr());
                out[k].cross_re += cross.re;
                out[k].cross_im += cross.im;
                out[k].max_dec = out[k].max_dec.max(dec);
            }
        }
        for k in 0..3 {
            out[k].est = Moments::of(&est[k]);
            out[k].err = Moments::of(&err[k]);
        }
        out
    });
    let mut total = [LinkSums::default(); 3];
    for c in per_chunk {
        for k in 0..3 {
            total[k] = total[k].merge(c[k]);
        }
    }
    Ok(total.map(LinkSums::finish))
}

/// Pilot simulation against the analytic MMSE statistics. Passes when the
/// empirical variances are within 5 standard errors, estimate and error are
/// uncorrelated to within `5 / sqrt(n_blocks)`, and `h_hat + h_tilde = h`
/// holds to a few ulps in every block.
pub fn validate_mmse(
    stats: &ChannelStats,
    budget: &PowerBudget,
    alloc: &Allocation,
    n_blocks: usize,
    seed: u64,
) -> Result<Report> {
    let mut report = Report::new(format!("MMSE estimation, {n_blocks} blocks, seed {seed}"));
    if n_blocks < MIN_BLOCKS {
        report.warnings.push(format!(
            "insufficient samples: {n_blocks} blocks < {MIN_BLOCKS}, tolerances unreliable"
        ));
    }
    let emp = simulate_mmse(stats, budget, alloc, n_blocks, seed)?;
    let theory = estimation_stats(stats, budget, alloc)?;
    let corr_tol = 5.0 / (n_blocks as f64).sqrt();
    for (k, link) in [
        Link::SourceDestination,
        Link::SourceRelay,
        Link::RelayDestination,
    ]
    .into_iter()
    .enumerate()
    {
        let e = emp[k];
        let t = theory.link(link);
        let tag = link_tag(link);
        report.checks.push(Check::within(
            format!("{tag}.est_var"),
            e.est_var,
            t.est_var,
            5.0 * e.est_var_se,
        ));
        report.checks.push(Check::within(
            format!("{tag}.err_var"),
            e.err_var,
            t.err_var,
            5.0 * e.err_var_se,
        ));
        report
            .checks
            .push(Check::within(format!("{tag}.corr"), e.corr, 0.0, corr_tol));
        report.checks.push(Check::within(
            format!("{tag}.decomposition"),
            e.max_decomposition_error,
            0.0,
            4.0 * f64::EPSILON,
        ));
    }
    Ok(report)
}

fn link_tag(link: Link) -> &'static str {
    match link {
        Link::SourceDestination => "sd",
        Link::SourceRelay => "sr",
        Link::RelayDestination => "rd",
    }
}

/// Per-sample quantities of the cooperative phase.
#[derive(Debug, Clone, Copy)]
struct Slot {
    ps: f64,
    pr: f64,
    /// Noise at the relay while it listens.
    s_r: f64,
    /// Destination noise while only the source transmits.
    s_d1: f64,
    /// Destination noise in the relay slot.
    s_d2: f64,
}

fn ln_det2(m: &Matrix2<Complex64>) -> f64 {
    m.determinant().re.ln()
}

/// `ln det(K + P A A^H) - ln det(K)`, i.e. `ln det(I + P A A^H K^-1)`.
fn logdet_gain(a: &Matrix2<Complex64>, k: &Matrix2<Complex64>, power: f64) -> f64 {
    let signal = a * a.adjoint() * Complex64::from(power);
    ln_det2(&(k + signal)) - ln_det2(k)
}

/// Per-sample mutual information (nats) of the cooperative slot pair. For
/// repetition DF this is the destination term only.
fn coop_logdet(scheme: Scheme, h_sd: Complex64, h_sr: Complex64, h_rd: Complex64, s: &Slot) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let overlapped = scheme.overlap == Overlap::Overlapped;
    let (a, k) = match scheme.relaying {
        Relaying::AmplifyForward => {
            let beta = (s.pr / (h_sr.norm_sqr() * s.ps + s.s_r)).sqrt();
            let g = h_rd * beta;
            // Destination observations (slot 1, slot 2) driven by the
            // noise vector (z_r, z_d1, z_d2).
            let b = Matrix2x3::new(
                zero,
                Complex64::from(1.0),
                zero,
                g,
                zero,
                Complex64::from(1.0),
            );
            let sigma = nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(
                Complex64::from(s.s_r),
                Complex64::from(s.s_d1),
                Complex64::from(s.s_d2),
            ));
            let k = b * sigma * b.adjoint();
            let a = Matrix2::new(h_sd, zero, g * h_sr, if overlapped { h_sd } else { zero });
            (a, k)
        }
        Relaying::DfRepetition => {
            let g = h_rd * (s.pr / s.ps).sqrt();
            let k = Matrix2::from_diagonal(&Vector2::new(
                Complex64::from(s.s_d1),
                Complex64::from(s.s_d2),
            ));
            let a = Matrix2::new(h_sd, zero, g, if overlapped { h_sd } else { zero });
            (a, k)
        }
        Relaying::DfParallel => unreachable!("parallel DF has no joint matrix form"),
    };
    logdet_gain(&a, &k, s.ps)
}

/// Two per-sample branch values whose means are compared with a minimum
/// after averaging; for AF both are the same.
fn sample_branches(scheme: Scheme, w: &TimeShares, h: [Complex64; 3], s: &Slot) -> (f64, f64) {
    let [h_sd, h_sr, h_rd] = h;
    let direct = (s.ps * h_sd.norm_sqr() / s.s_d1).ln_1p();
    let relay_decodes = (s.ps * h_sr.norm_sqr() / s.s_r).ln_1p();
    match scheme.relaying {
        Relaying::AmplifyForward => {
            let v = w.direct * direct + w.coop * coop_logdet(scheme, h_sd, h_sr, h_rd, s);
            (v, v)
        }
        Relaying::DfRepetition => {
            let i2 = coop_logdet(scheme, h_sd, h_sr, h_rd, s);
            (
                w.direct * direct + w.coop * relay_decodes,
                w.direct * direct + w.coop * i2,
            )
        }
        Relaying::DfParallel => {
            let relay_to_dest = (s.pr * h_rd.norm_sqr() / s.s_d2).ln_1p();
            (
                w.source * relay_decodes,
                w.source * direct + w.coop * relay_to_dest,
            )
        }
    }
}

fn slot(req: &RateRequest) -> Result<(Slot, [f64; 3])> {
    let est = estimation_stats(&req.stats, &req.budget, &req.alloc)?;
    let p = data_symbol_powers(&req.stats, &req.budget, &req.alloc, req.scheme.overlap)?;
    let n0 = req.stats.n0;
    let source_noise = est.sd.err_var * p.source;
    let s = Slot {
        ps: p.source,
        pr: p.relay,
        s_r: est.sr.err_var * p.source + n0,
        s_d1: source_noise + n0,
        s_d2: est.rd.err_var * p.relay
            + n0
            + if req.scheme.overlap == Overlap::Overlapped {
                source_noise
            } else {
                0.0
            },
    };
    Ok((s, [est.sd.est_var, est.sr.est_var, est.rd.est_var]))
}

/// Rate of `req.scheme` from per-sample log-determinants. Channel estimates
/// are drawn from their exact `CN(0, est_var)` marginals on a random stream
/// separate from the one [`MonteCarlo`] uses for the same seed.
pub fn logdet_rate(req: &RateRequest, cfg: &McConfig) -> Result<RateEstimate> {
    req.validate()?;
    let (s, est_var) = slot(req)?;
    let w = TimeShares::new(&req.stats, req.alloc.alpha);
    let scheme = req.scheme;
    let n = cfg.n_samples;
    let chunks = n.div_ceil(CHUNK);
    let per_chunk = cfg.execution.map_indices(chunks, |j| {
        let len = (n - j * CHUNK).min(CHUNK);
        let mut rng = chunk_rng(cfg.seed, j);
        let mut b1 = Vec::with_capacity(len);
        let mut b2 = Vec::with_capacity(len);
        for _ in 0..len {
            let h = est_var.map(|v| complex_gaussian(&mut rng, v));
            let (x, y) = sample_branches(scheme, &w, h, &s);
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::NonFiniteIntegrand {
                    index: j * CHUNK + b1.len(),
                    value: if x.is_finite() { y } else { x },
                });
            }
            b1.push(x);
            b2.push(y);
        }
        Ok((Moments::of(&b1), Moments::of(&b2)))
    });
    let (mut m1, mut m2) = (Moments::default(), Moments::default());
    for c in per_chunk {
        let (a, b) = c?;
        m1 = m1.merge(a);
        m2 = m2.merge(b);
    }
    let branch = |m: Moments| RateEstimate {
        mean: m.mean,
        std_error: m.std_error(),
        n_samples: n,
        near_tie: false,
    };
    let r = if scheme.relaying == Relaying::AmplifyForward {
        branch(m1)
    } else {
        min_of(branch(m1), branch(m2))
    };
    Ok(r.scale(req.base.per_nat()))
}

/// Random parameter point for the reduction battery.
pub fn random_request(rng: &mut ChaCha8Rng, scheme: Scheme) -> Result<RateRequest> {
    let log_uniform =
        |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.random_range(lo.ln()..hi.ln())).exp();
    let stats = ChannelStats::new(
        log_uniform(rng, 0.25, 16.0),
        log_uniform(rng, 0.25, 16.0),
        log_uniform(rng, 0.25, 16.0),
        log_uniform(rng, 0.5, 2.0),
        rng.random_range(10..=100),
    )?;
    let budget = PowerBudget::separate(log_uniform(rng, 0.1, 100.0), log_uniform(rng, 0.1, 100.0))?;
    let (alpha_hi, _) = scheme.alpha_max();
    let alloc = Allocation::new(
        rng.random_range(0.05..0.5),
        rng.random_range(0.05..0.5),
        rng.random_range(0.05..alpha_hi.min(0.95)),
    )?;
    RateRequest::new(stats, budget, alloc, scheme)
}

/// Compares [`logdet_rate`] with [`crate::rates::rate`] at `points` random
/// parameter points. A `mutate_c_sr` factor other than 1 scales the
/// source-relay coefficient fed to the scalar formula, which the check
/// should then catch.
pub fn reduction_battery(
    scheme: Scheme,
    points: usize,
    cfg: &McConfig,
    mutate_c_sr: f64,
) -> Result<Report> {
    let mut report = Report::new(format!(
        "{scheme}: log-det vs scalar rate, {points} points, {} samples, seed {}",
        cfg.n_samples, cfg.seed
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(ORACLE_STREAM - 1);
    let mc = MonteCarlo::new(*cfg);
    for k in 0..points {
        let req = random_request(&mut rng, scheme)?;
        let scalar = if mutate_c_sr == 1.0 {
            rate(&req, &mc)?
        } else {
            let mut c = effective_snr(&req.stats, &req.budget, &req.alloc, scheme)?;
            c.c_sr *= mutate_c_sr;
            rate_with_coefficients(&req, &c, &mc)?
        };
        let oracle = logdet_rate(&req, cfg)?;
        report.checks.push(Check::within(
            format!("{scheme}[{k}]"),
            scalar.mean,
            oracle.mean,
            4.0 * scalar.combined_error(&oracle),
        ));
    }
    Ok(report)
}
