//! Monte Carlo expectations over the three independent Rayleigh fades.
//!
//! A fade triple `(x_sd, x_sr, x_rd)` holds `|w|^2` for the three standard
//! complex Gaussian `w`, i.e. three unit-mean exponentials. Samples are drawn
//! in fixed-size chunks; chunk `j` always comes from ChaCha8 stream `j` under
//! the configured seed, so the sample sequence does not depend on how chunks
//! are spread over workers. Per-chunk moments are merged in chunk order.

use std::sync::Arc;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

pub use crate::specfun::expect_log1p_scalar;

/// Samples per chunk. Even, so antithetic pairs never straddle chunks.
pub const CHUNK: usize = 4096;

/// Largest sample count [`MonteCarlo::new`] keeps in memory.
pub const MATERIALIZE_LIMIT: usize = 2_000_000;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub antithetic: bool,
    /// Does not affect results, only how chunks are scheduled.
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            antithetic: true,
            execution: Execution::default(),
        }
    }
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(invalid("samples", "need at least one sample"));
        }
        Ok(McConfig {
            n_samples,
            seed,
            ..McConfig::default()
        })
    }

    pub fn with_antithetic(mut self, antithetic: bool) -> Self {
        self.antithetic = antithetic;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Sample count actually drawn: rounded up to even under antithetic
    /// sampling.
    pub fn effective_samples(&self) -> usize {
        if self.antithetic {
            self.n_samples + self.n_samples % 2
        } else {
            self.n_samples
        }
    }

    pub(crate) fn chunks(&self) -> usize {
        self.effective_samples().div_ceil(CHUNK)
    }

    pub(crate) fn chunk_len(&self, j: usize) -> usize {
        (self.effective_samples() - j * CHUNK).min(CHUNK)
    }
}

/// Squared magnitudes of the three normalized fades in one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Fades {
    pub sd: f64,
    pub sr: f64,
    pub rd: f64,
}

/// Monte Carlo (or exact) expectation with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Zero for closed-form values.
    pub n_samples: usize,
    /// Set when the value is the smaller of two estimates that are not
    /// statistically separated.
    pub near_tie: bool,
}

impl RateEstimate {
    pub fn exact(mean: f64) -> Self {
        RateEstimate {
            mean,
            ..RateEstimate::default()
        }
    }

    pub fn scale(self, k: f64) -> Self {
        RateEstimate {
            mean: self.mean * k,
            std_error: self.std_error * k.abs(),
            ..self
        }
    }

    /// Sum of two estimates; standard errors add in quadrature.
    pub fn plus(self, other: RateEstimate) -> Self {
        RateEstimate {
            mean: self.mean + other.mean,
            std_error: self.std_error.hypot(other.std_error),
            n_samples: self.n_samples.max(other.n_samples),
            near_tie: self.near_tie || other.near_tie,
        }
    }

    /// Combined standard error of the difference of two independent
    /// estimates.
    pub fn combined_error(&self, other: &RateEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

fn fill_chunk(cfg: &McConfig, j: usize, out: &mut Vec<Fades>) {
    out.clear();
    let len = cfg.chunk_len(j);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(j as u64);
    let mut draw = || -> [f64; 3] {
        [
            rng.sample::<f64, _>(Open01),
            rng.sample::<f64, _>(Open01),
            rng.sample::<f64, _>(Open01),
        ]
    };
    if cfg.antithetic {
        for _ in 0..len / 2 {
            let u = draw();
            out.push(Fades {
                sd: -u[0].ln(),
                sr: -u[1].ln(),
                rd: -u[2].ln(),
            });
            out.push(Fades {
                sd: -(1.0 - u[0]).ln(),
                sr: -(1.0 - u[1]).ln(),
                rd: -(1.0 - u[2]).ln(),
            });
        }
    } else {
        for _ in 0..len {
            let u = draw();
            out.push(Fades {
                sd: -u[0].ln(),
                sr: -u[1].ln(),
                rd: -u[2].ln(),
            });
        }
    }
}

/// The fade sequence for `cfg`, generated chunk by chunk.
pub fn sample_fades(cfg: McConfig) -> impl Iterator<Item = Fades> {
    let mut buf = Vec::with_capacity(CHUNK);
    (0..cfg.chunks()).flat_map(move |j| {
        fill_chunk(&cfg, j, &mut buf);
        std::mem::take(&mut buf)
    })
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub(crate) count: f64,
    pub(crate) mean: f64,
    pub(crate) m2: f64,
}

impl Moments {
    pub(crate) fn of(units: &[f64]) -> Self {
        if units.is_empty() {
            return Moments::default();
        }
        let mut s = CompensatedSum::default();
        units.iter().for_each(|&u| s.add(u));
        let count = units.len() as f64;
        let mean = s.value() / count;
        let mut m2 = CompensatedSum::default();
        units.iter().for_each(|&u| m2.add((u - mean) * (u - mean)));
        Moments {
            count,
            mean,
            m2: m2.value(),
        }
    }

    pub(crate) fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * (other.count / count),
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }

    /// Standard error of the mean.
    pub(crate) fn std_error(&self) -> f64 {
        if self.count > 1.0 {
            (self.m2 / (self.count - 1.0) / self.count).sqrt()
        } else {
            0.0
        }
    }
}

/// Expectation engine bound to one sample set. All expectations computed
/// through the same engine see the same fades (common random numbers).
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    cfg: McConfig,
    samples: Option<Arc<Vec<Fades>>>,
}

impl MonteCarlo {
    /// Keeps the samples in memory when there are at most
    /// [`MATERIALIZE_LIMIT`] of them, otherwise regenerates per call.
    pub fn new(cfg: McConfig) -> Self {
        if cfg.effective_samples() <= MATERIALIZE_LIMIT {
            Self::materialized(cfg)
        } else {
            Self::streaming(cfg)
        }
    }

    pub fn streaming(cfg: McConfig) -> Self {
        MonteCarlo { cfg, samples: None }
    }

    pub fn materialized(cfg: McConfig) -> Self {
        let chunks = cfg.execution.map_indices(cfg.chunks(), |j| {
            let mut buf = Vec::with_capacity(CHUNK);
            fill_chunk(&cfg, j, &mut buf);
            buf
        });
        MonteCarlo {
            cfg,
            samples: Some(Arc::new(chunks.concat())),
        }
    }

    pub fn config(&self) -> &McConfig {
        &self.cfg
    }

    /// `E[f(fades)]` with its standard error. Under antithetic sampling the
    /// error is computed from pair averages.
    pub fn expect<F>(&self, f: F) -> Result<RateEstimate>
    where
        F: Fn(&Fades) -> f64 + Sync + Send,
    {
        let cfg = self.cfg;
        let per_chunk = cfg.execution.map_indices(cfg.chunks(), |j| {
            let mut local = Vec::new();
            let chunk: &[Fades] = match &self.samples {
                Some(all) => &all[j * CHUNK..j * CHUNK + cfg.chunk_len(j)],
                None => {
                    fill_chunk(&cfg, j, &mut local);
                    &local
                }
            };
            let mut values = Vec::with_capacity(chunk.len());
            for (i, fades) in chunk.iter().enumerate() {
                let v = f(fades);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand {
                        index: j * CHUNK + i,
                        value: v,
                    });
                }
                values.push(v);
            }
            if cfg.antithetic {
                let pairs: Vec<f64> = values
                    .chunks_exact(2)
                    .map(|p| 0.5 * (p[0] + p[1]))
                    .collect();
                Ok(Moments::of(&pairs))
            } else {
                Ok(Moments::of(&values))
            }
        });
        let mut total = Moments::default();
        for m in per_chunk {
            total = total.merge(m?);
        }
        Ok(RateEstimate {
            mean: total.mean,
            std_error: total.std_error(),
            n_samples: cfg.effective_samples(),
            near_tie: false,
        })
    }
}

/// One-shot expectation over a freshly generated sample stream.
pub fn expect_integrand<F>(cfg: McConfig, f: F) -> Result<RateEstimate>
where
    F: Fn(&Fades) -> f64 + Sync + Send,
{
    MonteCarlo::streaming(cfg).expect(f)
}
