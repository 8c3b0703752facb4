use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use relaycap::alloc::{
    optimal_delta_r_closed_form, optimize_alpha, optimize_theta, optimize_training,
    training_optimum_limit, OptResult, TrainingSearch, TrainingVars, TRAINING_STEP,
};
use relaycap::energy::{bit_energy_curve, min_bit_energy, EnergySetup, DEFAULT_THETA};
use relaycap::oracle::{reduction_battery, validate_mmse};
use relaycap::{
    rate, rate_direct, MonteCarlo, Overlap, PowerBudget, RateEstimate, RateRequest, Scheme,
};

use crate::config::{fmt_f64, parse_values, Config};
use crate::table::{write_csv, EnergyRow, Record, SweepRow, TraceRow, TrainingRow};

/// Options that are not part of the key=value configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<std::path::PathBuf>,
    pub snap_alpha: bool,
}

fn kv(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key}={value}")?;
    Ok(())
}

fn emit_rows<R: Record>(
    rows: &[R],
    opts: &RunOptions,
    cfg: &Config,
    command: &str,
    out: &mut dyn Write,
) -> Result<()> {
    match &opts.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            write_csv(rows, std::io::BufWriter::new(file))?;
            kv(out, "command", command)?;
            kv(out, "rows", rows.len())?;
            kv(out, "out", path.display())?;
            kv(out, "samples", cfg.mc_config()?.n_samples)?;
            kv(out, "seed", cfg.seed()?)
        }
        None => write_csv(rows, out),
    }
}

/// Scheme names of a possibly list-valued `scheme` key.
fn scheme_list(cfg: &Config) -> Result<Vec<String>> {
    parse_values("scheme", cfg.scheme_name())
}

fn direct_request(cfg: &Config, snap: bool) -> Result<RateRequest> {
    let budget = match cfg.budget()? {
        PowerBudget::Total { total, .. } => {
            PowerBudget::separate(total, 0.0).map_err(|e| anyhow!("{e}"))?
        }
        b => b,
    };
    let req = RateRequest::new(cfg.stats()?, budget, cfg.alloc(snap)?, Scheme::DF_PARALLEL)
        .map_err(|e| anyhow!("{e}"))?;
    Ok(req.with_base(cfg.base()?))
}

/// Rate of the configured scheme, or of direct transmission with the whole
/// budget at the source.
fn evaluate(cfg: &Config, snap: bool, mc: &MonteCarlo) -> Result<(RateRequest, RateEstimate)> {
    match cfg.scheme()? {
        Some(_) => {
            let req = cfg.request(snap)?;
            let r = rate(&req, mc).map_err(|e| anyhow!("{e}"))?;
            Ok((req, r))
        }
        None => {
            let req = direct_request(cfg, snap)?;
            let r = rate_direct(&req).map_err(|e| anyhow!("{e}"))?;
            Ok((req, r))
        }
    }
}

fn sweep_row(cfg: &Config, req: &RateRequest, r: &RateEstimate) -> Result<SweepRow> {
    let s = &req.stats;
    let theta = match cfg.budget()? {
        PowerBudget::Total { theta, .. } if cfg.scheme()?.is_some() => Some(theta),
        _ => None,
    };
    let mc = cfg.mc_config()?;
    Ok(SweepRow {
        scheme: cfg.scheme_name().to_string(),
        m: s.m,
        n0: s.n0,
        sigma_sd: s.sigma2_sd.sqrt(),
        sigma_sr: s.sigma2_sr.sqrt(),
        sigma_rd: s.sigma2_rd.sqrt(),
        ps: req.budget.source(),
        pr: req.budget.relay(),
        theta,
        delta_s: req.alloc.delta_s,
        delta_r: req.alloc.delta_r,
        alpha: req.alloc.alpha,
        rate: r.mean,
        std_error: r.std_error,
        near_tie: r.near_tie,
        seed: mc.seed,
        samples: if r.n_samples == 0 {
            0
        } else {
            mc.effective_samples()
        },
    })
}

pub fn cmd_rate(cfg: &Config, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let mc = MonteCarlo::new(cfg.mc_config()?);
    let (req, r) = evaluate(cfg, opts.snap_alpha, &mc)?;
    let row = sweep_row(cfg, &req, &r)?;
    kv(out, "command", "rate")?;
    for (k, v) in SweepRow::HEADER.iter().zip(row.to_record()) {
        if *k == "samples" || *k == "seed" {
            continue;
        }
        kv(out, k, v)?;
    }
    kv(out, "n_samples", r.n_samples)?;
    kv(out, "seed", mc.config().seed)
}

/// Points of a one- or two-dimensional sweep, x varying fastest, with the
/// scheme list as the outermost loop.
fn sweep_points(cfg: &Config) -> Result<Vec<Config>> {
    let x = cfg
        .get("x")
        .ok_or_else(|| anyhow!("key x: a sweep needs a swept key"))?;
    let xs = parse_values(
        "x_values",
        cfg.get("x_values")
            .ok_or_else(|| anyhow!("key x_values: missing"))?,
    )?;
    let y = cfg.get("y");
    let ys = match y {
        Some(_) => parse_values(
            "y_values",
            cfg.get("y_values")
                .ok_or_else(|| anyhow!("key y_values: missing"))?,
        )?,
        None => vec![String::new()],
    };
    for key in [Some(x), y].into_iter().flatten() {
        if matches!(
            key,
            "x" | "y" | "x_values" | "y_values" | "samples" | "seed" | "quantity"
        ) {
            bail!("key {key}: cannot be swept");
        }
        if cfg.contains(key) {
            bail!("key {key}: both swept and fixed; remove the fixed value");
        }
    }
    if y == Some(x) {
        bail!("key y: sweeps {x} twice");
    }
    let schemes = if x == "scheme" || y == Some("scheme") {
        vec![None]
    } else {
        scheme_list(cfg)?.into_iter().map(Some).collect()
    };
    let mut points = Vec::new();
    for s in &schemes {
        for yv in &ys {
            for xv in &xs {
                let mut p = cfg.clone();
                if let Some(s) = s {
                    p.set("scheme", s)?;
                }
                if let Some(y) = y {
                    p.set(y, yv)?;
                }
                p.set(x, xv)?;
                points.push(p);
            }
        }
    }
    Ok(points)
}

pub fn cmd_sweep(cfg: &Config, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let points = sweep_points(cfg)?;
    let mc = MonteCarlo::new(cfg.mc_config()?);
    match cfg.get("quantity").unwrap_or("rate") {
        "rate" => {
            let rows = points
                .par_iter()
                .map(|p| {
                    let (req, r) = evaluate(p, opts.snap_alpha, &mc)?;
                    sweep_row(p, &req, &r)
                })
                .collect::<Result<Vec<_>>>()?;
            emit_rows(&rows, opts, cfg, "sweep", out)
        }
        "delta_r_opt" => {
            let step = cfg.f64_or("step", TRAINING_STEP)?;
            let rows = points
                .par_iter()
                .map(|p| training_row(p, opts.snap_alpha, step, &mc))
                .collect::<Result<Vec<_>>>()?;
            emit_rows(&rows, opts, cfg, "sweep", out)
        }
        other => bail!("key quantity: expected rate or delta_r_opt, got {other:?}"),
    }
}

fn training_row(cfg: &Config, snap: bool, step: f64, mc: &MonteCarlo) -> Result<TrainingRow> {
    let req = cfg.request(snap)?;
    if req.scheme.overlap == Overlap::Overlapped {
        bail!("key scheme: the closed-form relay training fraction needs a non-overlapped scheme");
    }
    let cf = optimal_delta_r_closed_form(&req.stats, &req.budget, req.alloc.alpha)
        .map_err(|e| anyhow!("{e}"))?;
    let search = optimize_training(
        &req,
        TrainingSearch::new(TrainingVars::DeltaR).with_step(step),
        mc,
    )
    .map_err(|e| anyhow!("{e}"))?;
    Ok(TrainingRow {
        m: req.stats.m,
        alpha: req.alloc.alpha,
        pr: req.budget.relay(),
        sigma_rd: req.stats.sigma2_rd.sqrt(),
        delta_r_closed_form: cf,
        delta_r_search: search.argmax.delta_r,
        delta_r_limit: training_optimum_limit(req.stats.block(), req.alloc.alpha),
        seed: mc.config().seed,
        samples: mc.config().effective_samples(),
    })
}

fn trace_rows(opt: &OptResult) -> Vec<TraceRow> {
    opt.trace
        .iter()
        .map(|p| TraceRow {
            delta_s: p.alloc.delta_s,
            delta_r: p.alloc.delta_r,
            alpha: p.alloc.alpha,
            theta: p.theta,
            rate: p.rate.mean,
            std_error: p.rate.std_error,
        })
        .collect()
}

fn grid_values(cfg: &Config, default: &str) -> Result<Vec<f64>> {
    parse_values("grid", cfg.get("grid").unwrap_or(default))?
        .iter()
        .map(|v| crate::config::parse_f64("grid", v))
        .collect()
}

pub fn cmd_optimize(cfg: &Config, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let mc = MonteCarlo::new(cfg.mc_config()?);
    let target = cfg
        .get("target")
        .ok_or_else(|| anyhow!("key target: expected delta_s, delta_r, delta, alpha or theta"))?;
    let (opt, closed_form) = match target {
        "delta_s" | "delta_r" | "delta" => {
            let vars: TrainingVars = target.parse().map_err(|e| anyhow!("key target: {e}"))?;
            let req = cfg.request(opts.snap_alpha)?;
            let search = TrainingSearch::new(vars)
                .with_step(cfg.f64_or("step", TRAINING_STEP)?)
                .with_refine(cfg.bool_or("refine", true)?);
            let opt = optimize_training(&req, search, &mc).map_err(|e| anyhow!("{e}"))?;
            let cf = if vars == TrainingVars::DeltaR && req.scheme.overlap == Overlap::NonOverlapped
            {
                Some(
                    optimal_delta_r_closed_form(&req.stats, &req.budget, req.alloc.alpha)
                        .map_err(|e| anyhow!("{e}"))?,
                )
            } else {
                None
            };
            (opt, cf)
        }
        "alpha" => {
            let req = cfg.request(opts.snap_alpha)?;
            let default = if req.scheme == Scheme::DF_PARALLEL {
                "lin:0.01:0.99:99"
            } else {
                "lin:0.01:0.5:50"
            };
            let mut grid = grid_values(cfg, default)?;
            if opts.snap_alpha {
                let m = req.stats.m;
                grid = grid
                    .into_iter()
                    .map(|a| {
                        req.alloc
                            .with_alpha(a)
                            .and_then(|x| x.snap_alpha(m))
                            .map(|x| x.alpha)
                    })
                    .collect::<relaycap::Result<Vec<_>>>()
                    .map_err(|e| anyhow!("{e}"))?;
                grid.retain(|&a| a > 0.0);
            }
            (
                optimize_alpha(&req, &grid, &mc).map_err(|e| anyhow!("{e}"))?,
                None,
            )
        }
        "theta" => {
            let total = cfg
                .opt_f64("p")?
                .ok_or_else(|| anyhow!("key p: power-split search needs a total power"))?;
            let mut fixed = cfg.clone();
            fixed.remove("theta");
            fixed.remove("p");
            let scheme = cfg.request(opts.snap_alpha)?.scheme;
            let grid = grid_values(cfg, "lin:0.01:0.99:99")?;
            let opt = optimize_theta(
                &fixed.stats()?,
                total,
                &fixed.alloc(opts.snap_alpha)?,
                scheme,
                &grid,
                &mc,
            )
            .map_err(|e| anyhow!("{e}"))?;
            (opt, None)
        }
        other => {
            bail!("key target: expected delta_s, delta_r, delta, alpha or theta, got {other:?}")
        }
    };
    kv(out, "command", "optimize")?;
    kv(out, "scheme", cfg.scheme_name())?;
    kv(out, "target", target)?;
    kv(out, "method", opt.method)?;
    kv(out, "delta_s", fmt_f64(opt.argmax.delta_s))?;
    kv(out, "delta_r", fmt_f64(opt.argmax.delta_r))?;
    kv(out, "alpha", fmt_f64(opt.argmax.alpha))?;
    if let Some(t) = opt.theta {
        kv(out, "theta", fmt_f64(t))?;
    }
    kv(out, "rate", fmt_f64(opt.value.mean))?;
    kv(out, "std_error", fmt_f64(opt.value.std_error))?;
    kv(out, "resolution", fmt_f64(opt.resolution))?;
    kv(out, "unimodal", opt.unimodal)?;
    if let Some(cf) = closed_form {
        kv(out, "delta_r_closed_form", fmt_f64(cf))?;
    }
    if let Some(d) = opt.direct {
        kv(out, "direct_rate", fmt_f64(d.mean))?;
    }
    kv(out, "candidates", opt.trace.len())?;
    kv(out, "n_samples", mc.config().effective_samples())?;
    kv(out, "seed", mc.config().seed)?;
    if let Some(path) = &opts.out {
        let file = std::fs::File::create(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        write_csv(&trace_rows(&opt), std::io::BufWriter::new(file))?;
        kv(out, "out", path.display())?;
    }
    Ok(())
}

fn m_values(cfg: &Config) -> Result<Vec<u32>> {
    match cfg.get("m_values") {
        Some(v) => parse_values("m_values", v)?
            .iter()
            .map(|m| {
                m.parse()
                    .map_err(|_| anyhow!("key m_values: expected integers, got {m:?}"))
            })
            .collect(),
        None => Ok(vec![cfg.stats()?.m]),
    }
}

fn energy_row(
    setup: &EnergySetup,
    name: &str,
    p: &relaycap::energy::BitEnergyPoint,
    mc: &MonteCarlo,
) -> EnergyRow {
    EnergyRow {
        scheme: name.to_string(),
        m: setup.stats.m,
        theta: setup.theta,
        snr: p.snr,
        rate: p.rate.mean,
        std_error: p.rate.std_error,
        eb_n0: p.eb_n0,
        eb_n0_db: p.eb_n0_db,
        seed: mc.config().seed,
        samples: mc.config().effective_samples(),
    }
}

pub fn cmd_bit_energy(cfg: &Config, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    if cfg.contains("p") || cfg.contains("ps") || cfg.contains("pr") {
        bail!("key p: bit-energy curves set the power from the SNR; use snr_values and theta");
    }
    let mc = MonteCarlo::new(cfg.mc_config()?);
    let theta = cfg.f64_or("theta", DEFAULT_THETA)?;
    let stats = cfg.stats()?;
    let alloc = cfg.alloc(opts.snap_alpha)?;
    let mut setups = Vec::new();
    for name in scheme_list(cfg)? {
        let scheme: Scheme = name.parse().map_err(|e| anyhow!("key scheme: {e}"))?;
        for m in m_values(cfg)? {
            let s = stats.with_m(m).map_err(|e| anyhow!("key m_values: {e}"))?;
            let a = if opts.snap_alpha {
                alloc.snap_alpha(m).map_err(|e| anyhow!("{e}"))?
            } else {
                alloc
            };
            setups.push((
                name.clone(),
                EnergySetup::new(s, a, scheme, theta).map_err(|e| anyhow!("{e}"))?,
            ));
        }
    }
    let rows = if cfg.bool_or("minimum", false)? {
        let bracket = parse_values(
            "bracket",
            cfg.get("bracket")
                .unwrap_or("1e-3:100")
                .replace(':', ";")
                .as_str(),
        )?;
        let [lo, hi] = bracket.as_slice() else {
            bail!("key bracket: expected lo:hi");
        };
        let (lo, hi) = (
            crate::config::parse_f64("bracket", lo)?,
            crate::config::parse_f64("bracket", hi)?,
        );
        setups
            .par_iter()
            .map(|(name, setup)| {
                let p = min_bit_energy(setup, (lo, hi), &mc)
                    .map_err(|e| anyhow!("{name}, m={}: {e}", setup.stats.m))?;
                Ok(energy_row(setup, name, &p, &mc))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let snrs = parse_values(
            "snr_values",
            cfg.get("snr_values").unwrap_or("log:1e-4:100:25"),
        )?
        .iter()
        .map(|v| crate::config::parse_f64("snr_values", v))
        .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for (name, setup) in &setups {
            let curve =
                bit_energy_curve(setup, &snrs, &mc).map_err(|e| anyhow!("key snr_values: {e}"))?;
            rows.extend(curve.iter().map(|p| energy_row(setup, name, p, &mc)));
        }
        rows
    };
    emit_rows(&rows, opts, cfg, "bit-energy", out)
}

/// Prints the reports and returns whether every check passed.
pub fn cmd_validate(cfg: &Config, opts: &RunOptions, out: &mut dyn Write) -> Result<bool> {
    let mc_cfg = cfg.mc_config()?;
    let n_blocks = cfg.usize_or("n_blocks", 100_000)?;
    let points = cfg.usize_or("points", 20)?;
    let mutate = cfg.f64_or("mutate_c_sr", 1.0)?;
    let stats = cfg.stats()?;
    let budget = cfg.budget()?;
    let alloc = cfg.alloc(opts.snap_alpha)?;
    let mut all_passed = true;
    let mmse = validate_mmse(&stats, &budget, &alloc, n_blocks, mc_cfg.seed)
        .map_err(|e| anyhow!("{e}"))?;
    all_passed &= mmse.passed();
    write!(out, "{mmse}")?;
    let schemes: Vec<Scheme> = if cfg.contains("scheme") {
        scheme_list(cfg)?
            .iter()
            .map(|s| s.parse().map_err(|e| anyhow!("key scheme: {e}")))
            .collect::<Result<_>>()?
    } else {
        Scheme::ALL.to_vec()
    };
    for scheme in schemes {
        let report =
            reduction_battery(scheme, points, &mc_cfg, mutate).map_err(|e| anyhow!("{e}"))?;
        all_passed &= report.passed();
        write!(out, "{report}")?;
    }
    kv(out, "seed", mc_cfg.seed)?;
    kv(out, "result", if all_passed { "pass" } else { "fail" })?;
    if let Some(path) = &opts.out {
        bail!(
            "validate writes no CSV; --out {} is not supported",
            path.display()
        );
    }
    Ok(all_passed)
}

pub fn is_csv_path(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
