//! CSV rows: comma separated, `.` decimal, mandatory header, LF line
//! endings. Floats are written in their shortest round-trip form, so
//! parsing a file gives back exactly the values that were written.

use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};

use crate::config::fmt_f64;

pub trait Record: Sized {
    const HEADER: &'static [&'static str];
    fn to_record(&self) -> Vec<String>;
    fn from_record(fields: &[&str]) -> Result<Self>;
}

pub fn write_csv<R: Record, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<R: Record>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

pub fn parse_csv<R: Record>(text: &str) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != R::HEADER {
        bail!("unexpected header {header:?}, expected {:?}", R::HEADER);
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let fields: Vec<&str> = rec.iter().collect();
            R::from_record(&fields).with_context(|| format!("row {}", i + 1))
        })
        .collect()
}

fn num(fields: &[&str], i: usize) -> Result<f64> {
    fields[i]
        .parse()
        .map_err(|_| anyhow!("column {i}: expected a number, got {:?}", fields[i]))
}

fn opt_num(fields: &[&str], i: usize) -> Result<Option<f64>> {
    if fields[i].is_empty() {
        Ok(None)
    } else {
        num(fields, i).map(Some)
    }
}

fn int<T: std::str::FromStr>(fields: &[&str], i: usize) -> Result<T> {
    fields[i]
        .parse()
        .map_err(|_| anyhow!("column {i}: expected an integer, got {:?}", fields[i]))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn check_len(fields: &[&str], n: usize) -> Result<()> {
    if fields.len() != n {
        bail!("expected {n} columns, got {}", fields.len());
    }
    Ok(())
}

/// One rate evaluation of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: String,
    pub m: u32,
    pub n0: f64,
    pub sigma_sd: f64,
    pub sigma_sr: f64,
    pub sigma_rd: f64,
    pub ps: f64,
    pub pr: f64,
    /// Set in total-power mode.
    pub theta: Option<f64>,
    pub delta_s: f64,
    pub delta_r: f64,
    pub alpha: f64,
    pub rate: f64,
    pub std_error: f64,
    pub near_tie: bool,
    pub seed: u64,
    pub samples: usize,
}

impl Record for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "scheme",
        "m",
        "n0",
        "sigma_sd",
        "sigma_sr",
        "sigma_rd",
        "ps",
        "pr",
        "theta",
        "delta_s",
        "delta_r",
        "alpha",
        "rate",
        "std_error",
        "near_tie",
        "seed",
        "samples",
    ];

    fn to_record(&self) -> Vec<String> {
        vec![
            self.scheme.clone(),
            self.m.to_string(),
            fmt_f64(self.n0),
            fmt_f64(self.sigma_sd),
            fmt_f64(self.sigma_sr),
            fmt_f64(self.sigma_rd),
            fmt_f64(self.ps),
            fmt_f64(self.pr),
            opt(self.theta),
            fmt_f64(self.delta_s),
            fmt_f64(self.delta_r),
            fmt_f64(self.alpha),
            fmt_f64(self.rate),
            fmt_f64(self.std_error),
            self.near_tie.to_string(),
            self.seed.to_string(),
            self.samples.to_string(),
        ]
    }

    fn from_record(f: &[&str]) -> Result<Self> {
        check_len(f, Self::HEADER.len())?;
        Ok(SweepRow {
            scheme: f[0].to_string(),
            m: int(f, 1)?,
            n0: num(f, 2)?,
            sigma_sd: num(f, 3)?,
            sigma_sr: num(f, 4)?,
            sigma_rd: num(f, 5)?,
            ps: num(f, 6)?,
            pr: num(f, 7)?,
            theta: opt_num(f, 8)?,
            delta_s: num(f, 9)?,
            delta_r: num(f, 10)?,
            alpha: num(f, 11)?,
            rate: num(f, 12)?,
            std_error: num(f, 13)?,
            near_tie: crate::config::parse_bool("near_tie", f[14])?,
            seed: int(f, 15)?,
            samples: int(f, 16)?,
        })
    }
}

/// Optimal relay training fraction at one channel point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    pub m: u32,
    pub alpha: f64,
    pub pr: f64,
    pub sigma_rd: f64,
    pub delta_r_closed_form: f64,
    pub delta_r_search: f64,
    pub delta_r_limit: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Record for TrainingRow {
    const HEADER: &'static [&'static str] = &[
        "m",
        "alpha",
        "pr",
        "sigma_rd",
        "delta_r_closed_form",
        "delta_r_search",
        "delta_r_limit",
        "seed",
        "samples",
    ];

    fn to_record(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            fmt_f64(self.alpha),
            fmt_f64(self.pr),
            fmt_f64(self.sigma_rd),
            fmt_f64(self.delta_r_closed_form),
            fmt_f64(self.delta_r_search),
            fmt_f64(self.delta_r_limit),
            self.seed.to_string(),
            self.samples.to_string(),
        ]
    }

    fn from_record(f: &[&str]) -> Result<Self> {
        check_len(f, Self::HEADER.len())?;
        Ok(TrainingRow {
            m: int(f, 0)?,
            alpha: num(f, 1)?,
            pr: num(f, 2)?,
            sigma_rd: num(f, 3)?,
            delta_r_closed_form: num(f, 4)?,
            delta_r_search: num(f, 5)?,
            delta_r_limit: num(f, 6)?,
            seed: int(f, 7)?,
            samples: int(f, 8)?,
        })
    }
}

/// One bit-energy point; `eb_n0` is empty when the rate is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub scheme: String,
    pub m: u32,
    pub theta: f64,
    pub snr: f64,
    pub rate: f64,
    pub std_error: f64,
    pub eb_n0: Option<f64>,
    pub eb_n0_db: Option<f64>,
    pub seed: u64,
    pub samples: usize,
}

impl Record for EnergyRow {
    const HEADER: &'static [&'static str] = &[
        "scheme",
        "m",
        "theta",
        "snr",
        "rate",
        "std_error",
        "eb_n0",
        "eb_n0_db",
        "seed",
        "samples",
    ];

    fn to_record(&self) -> Vec<String> {
        vec![
            self.scheme.clone(),
            self.m.to_string(),
            fmt_f64(self.theta),
            fmt_f64(self.snr),
            fmt_f64(self.rate),
            fmt_f64(self.std_error),
            opt(self.eb_n0),
            opt(self.eb_n0_db),
            self.seed.to_string(),
            self.samples.to_string(),
        ]
    }

    fn from_record(f: &[&str]) -> Result<Self> {
        check_len(f, Self::HEADER.len())?;
        Ok(EnergyRow {
            scheme: f[0].to_string(),
            m: int(f, 1)?,
            theta: num(f, 2)?,
            snr: num(f, 3)?,
            rate: num(f, 4)?,
            std_error: num(f, 5)?,
            eb_n0: opt_num(f, 6)?,
            eb_n0_db: opt_num(f, 7)?,
            seed: int(f, 8)?,
            samples: int(f, 9)?,
        })
    }
}

/// One candidate of an optimizer search.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub delta_s: f64,
    pub delta_r: f64,
    pub alpha: f64,
    pub theta: Option<f64>,
    pub rate: f64,
    pub std_error: f64,
}

impl Record for TraceRow {
    const HEADER: &'static [&'static str] =
        &["delta_s", "delta_r", "alpha", "theta", "rate", "std_error"];

    fn to_record(&self) -> Vec<String> {
        vec![
            fmt_f64(self.delta_s),
            fmt_f64(self.delta_r),
            fmt_f64(self.alpha),
            opt(self.theta),
            fmt_f64(self.rate),
            fmt_f64(self.std_error),
        ]
    }

    fn from_record(f: &[&str]) -> Result<Self> {
        check_len(f, Self::HEADER.len())?;
        Ok(TraceRow {
            delta_s: num(f, 0)?,
            delta_r: num(f, 1)?,
            alpha: num(f, 2)?,
            theta: opt_num(f, 3)?,
            rate: num(f, 4)?,
            std_error: num(f, 5)?,
        })
    }
}
