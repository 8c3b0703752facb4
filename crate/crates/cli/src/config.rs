//! Flat `key = value` configuration.
//!
//! Layers are applied in order: preset, config file, dedicated flags
//! (`--seed`, `--samples`, `--snap-alpha`), then `--set` overrides. Every
//! error names the key it concerns.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use relaycap::{
    Allocation, ChannelStats, LogBase, McConfig, PowerBudget, RateRequest, Scheme, DEFAULT_SAMPLES,
    DEFAULT_SEED,
};

/// Keys understood by at least one command.
pub const KNOWN_KEYS: &[&str] = &[
    "scheme",
    "m",
    "n0",
    "sigma",
    "sigma_sd",
    "sigma_sr",
    "sigma_rd",
    "ps",
    "pr",
    "p",
    "theta",
    "delta",
    "delta_s",
    "delta_r",
    "alpha",
    "samples",
    "seed",
    "base",
    "antithetic",
    "snap_alpha",
    "x",
    "x_values",
    "y",
    "y_values",
    "quantity",
    "target",
    "step",
    "grid",
    "refine",
    "snr_values",
    "m_values",
    "bracket",
    "minimum",
    "n_blocks",
    "points",
    "mutate_c_sr",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Config::default()
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.set_pair(line)
                .with_context(|| format!("line {}", no + 1))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Applies one `key=value` assignment.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {pair:?}"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.to_ascii_lowercase();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            bail!("unknown key {key:?}");
        }
        self.values.insert(key, value.to_string());
        Ok(())
    }

    /// Later layers win.
    pub fn merge(&mut self, other: &Config) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("key {key}: expected a nonnegative integer, got {v:?}")),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            Some(v) => parse_bool(key, v),
            None => Ok(default),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        match self.get("seed") {
            Some(v) => parse_seed(v).map_err(|e| anyhow!("key seed: {e}")),
            None => Ok(DEFAULT_SEED),
        }
    }

    pub fn mc_config(&self) -> Result<McConfig> {
        let samples = self.usize_or("samples", DEFAULT_SAMPLES)?;
        let cfg = McConfig::new(samples, self.seed()?).map_err(|e| anyhow!("key samples: {e}"))?;
        Ok(cfg.with_antithetic(self.bool_or("antithetic", true)?))
    }

    pub fn scheme_name(&self) -> &str {
        self.get("scheme").unwrap_or("af_nonoverlapped")
    }

    /// Scheme, or `None` for the `direct` pseudo-scheme.
    pub fn scheme(&self) -> Result<Option<Scheme>> {
        let name = self.scheme_name();
        if name == "direct" {
            return Ok(None);
        }
        name.parse()
            .map(Some)
            .map_err(|e| anyhow!("key scheme: {e}"))
    }

    pub fn stats(&self) -> Result<ChannelStats> {
        let (mut sd, mut sr, mut rd) = (1.0, 1.0, 1.0);
        if let Some(v) = self.get("sigma") {
            let parts = parse_list_f64("sigma", v)?;
            if parts.len() != 3 {
                bail!("key sigma: expected three standard deviations sd,sr,rd, got {v:?}");
            }
            (sd, sr, rd) = (parts[0], parts[1], parts[2]);
        }
        let sd = self.f64_or("sigma_sd", sd)?;
        let sr = self.f64_or("sigma_sr", sr)?;
        let rd = self.f64_or("sigma_rd", rd)?;
        let m = self.usize_or("m", 50)?;
        let m = u32::try_from(m).map_err(|_| anyhow!("key m: {m} too large"))?;
        let n0 = self.f64_or("n0", 1.0)?;
        ChannelStats::from_std_devs(sd, sr, rd, n0, m).map_err(|e| anyhow!("{e}"))
    }

    /// Total-power mode when `p` is given, separate powers otherwise.
    pub fn budget(&self) -> Result<PowerBudget> {
        match self.opt_f64("p")? {
            Some(p) => {
                if self.contains("ps") || self.contains("pr") {
                    bail!("key p: cannot be combined with ps/pr");
                }
                let theta = self.f64_or("theta", relaycap::energy::DEFAULT_THETA)?;
                PowerBudget::total(p, theta).map_err(|e| anyhow!("{e}"))
            }
            None => {
                if self.contains("theta") {
                    bail!("key theta: needs a total power p");
                }
                PowerBudget::separate(self.f64_or("ps", 1.0)?, self.f64_or("pr", 1.0)?)
                    .map_err(|e| anyhow!("{e}"))
            }
        }
    }

    pub fn alloc(&self, snap: bool) -> Result<Allocation> {
        let (mut ds, mut dr) = (0.1, 0.1);
        if let Some(v) = self.get("delta") {
            let parts = parse_list_f64("delta", v)?;
            match parts.as_slice() {
                [d] => (ds, dr) = (*d, *d),
                [s, r] => (ds, dr) = (*s, *r),
                _ => bail!("key delta: expected delta or delta_s,delta_r, got {v:?}"),
            }
        }
        let ds = self.f64_or("delta_s", ds)?;
        let dr = self.f64_or("delta_r", dr)?;
        let alpha = self.f64_or("alpha", 0.5)?;
        let alloc = Allocation::new(ds, dr, alpha).map_err(|e| anyhow!("{e}"))?;
        if snap || self.bool_or("snap_alpha", false)? {
            let m = self.stats()?.m;
            return alloc.snap_alpha(m).map_err(|e| anyhow!("{e}"));
        }
        Ok(alloc)
    }

    pub fn base(&self) -> Result<LogBase> {
        match self.get("base").unwrap_or("2") {
            "2" | "bits" => Ok(LogBase::Two),
            "e" | "nats" => Ok(LogBase::E),
            other => bail!("key base: expected bits or nats, got {other:?}"),
        }
    }

    /// Request for a relaying scheme; fails for `direct`.
    pub fn request(&self, snap: bool) -> Result<RateRequest> {
        let scheme = self.scheme()?.ok_or_else(|| {
            anyhow!("key scheme: direct transmission is not a relaying scheme here")
        })?;
        self.request_for(scheme, snap)
    }

    pub fn request_for(&self, scheme: Scheme, snap: bool) -> Result<RateRequest> {
        let req = RateRequest::new(self.stats()?, self.budget()?, self.alloc(snap)?, scheme)
            .map_err(|e| anyhow!("{e}"))?;
        Ok(req.with_base(self.base()?))
    }
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| anyhow!("key {key}: expected a number, got {v:?}"))?;
    if !x.is_finite() {
        bail!("key {key}: {v:?} is not finite");
    }
    Ok(x)
}

pub fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => bail!("key {key}: expected true or false, got {v:?}"),
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(v: &str) -> std::result::Result<u64, String> {
    let v = v.trim();
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    parsed.map_err(|_| format!("expected a u64 seed, got {v:?}"))
}

pub fn parse_list_f64(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|p| parse_f64(key, p)).collect()
}

/// Values of a swept key.
///
/// `lin:a:b:n` and `log:a:b:n` give `n` evenly spaced points (in value or
/// in log-value), `step:a:b:h` steps by `h`, anything else is a list
/// separated by `;`, or by `,` when there is no `;`.
pub fn parse_values(key: &str, text: &str) -> Result<Vec<String>> {
    let text = text.trim();
    let range = |rest: &str| -> Result<(f64, f64, f64)> {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            bail!("key {key}: expected kind:min:max:count, got {text:?}");
        }
        Ok((
            parse_f64(key, parts[0])?,
            parse_f64(key, parts[1])?,
            parse_f64(key, parts[2])?,
        ))
    };
    let fmt = |v: Vec<f64>| v.into_iter().map(fmt_f64).collect();
    if let Some(rest) = text.strip_prefix("lin:") {
        let (a, b, n) = range(rest)?;
        let n = count(key, n)?;
        return Ok(fmt((0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect()));
    }
    if let Some(rest) = text.strip_prefix("log:") {
        let (a, b, n) = range(rest)?;
        let n = count(key, n)?;
        return relaycap::energy::log_grid(a, b, n)
            .map(fmt)
            .map_err(|e| anyhow!("key {key}: {e}"));
    }
    if let Some(rest) = text.strip_prefix("step:") {
        let (a, b, h) = range(rest)?;
        return relaycap::alloc::linspace_step(a, b, h)
            .map(fmt)
            .map_err(|e| anyhow!("key {key}: {e}"));
    }
    let sep = if text.contains(';') { ';' } else { ',' };
    let items: Vec<String> = text
        .split(sep)
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        bail!("key {key}: no values");
    }
    Ok(items)
}

fn count(key: &str, n: f64) -> Result<usize> {
    if n < 2.0 || n.fract() != 0.0 {
        bail!("key {key}: need an integer count of at least 2, got {n}");
    }
    Ok(n as usize)
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let cfg =
            Config::parse("# comment\nscheme = af_overlapped\n\nm=40 # trailing\nsigma = 1,2,1\n")
                .unwrap();
        assert_eq!(cfg.get("scheme"), Some("af_overlapped"));
        assert_eq!(cfg.stats().unwrap().m, 40);
        assert_eq!(cfg.stats().unwrap().sigma2_sr, 4.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = Config::parse("alhpa = 0.3").unwrap_err();
        assert!(format!("{err:#}").contains("alhpa"));
    }

    #[test]
    fn bad_value_names_key() {
        let mut cfg = Config::new();
        cfg.set("alpha", "half").unwrap();
        assert!(format!("{:#}", cfg.alloc(false).unwrap_err()).contains("alpha"));
    }

    #[test]
    fn later_layers_win() {
        let mut base = Config::parse("alpha = 0.2\nm = 30").unwrap();
        let mut over = Config::new();
        over.set_pair("alpha=0.4").unwrap();
        base.merge(&over);
        assert_eq!(base.alloc(false).unwrap().alpha, 0.4);
        assert_eq!(base.stats().unwrap().m, 30);
    }

    #[test]
    fn composite_and_specific_keys() {
        let cfg =
            Config::parse("delta = 0.2,0.3\ndelta_r = 0.4\nsigma = 1,2,3\nsigma_rd = 5").unwrap();
        let a = cfg.alloc(false).unwrap();
        assert_eq!((a.delta_s, a.delta_r), (0.2, 0.4));
        assert_eq!(cfg.stats().unwrap().sigma2_rd, 25.0);
    }

    #[test]
    fn power_modes() {
        let cfg = Config::parse("p = 10\ntheta = 0.7").unwrap();
        let b = cfg.budget().unwrap();
        assert!((b.source() - 7.0).abs() < 1e-12);
        assert!(Config::parse("p = 10\nps = 1").unwrap().budget().is_err());
        assert!(Config::parse("theta = 0.5").unwrap().budget().is_err());
    }

    #[test]
    fn value_specs() {
        assert_eq!(
            parse_values("x", "lin:0:1:3").unwrap(),
            vec!["0.0", "0.5", "1.0"]
        );
        assert_eq!(
            parse_values("x", "1,4,4;1,10,2").unwrap(),
            vec!["1,4,4", "1,10,2"]
        );
        assert_eq!(parse_values("x", "0.1, 0.2").unwrap(), vec!["0.1", "0.2"]);
        assert_eq!(
            parse_values("x", "log:1:100:3").unwrap(),
            vec!["1.0", "10.0", "100.0"]
        );
        assert!(parse_values("x", "lin:0:1:1").is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0xC0FFEE").unwrap(), 0xC0FFEE);
        assert_eq!(parse_seed("12").unwrap(), 12);
        assert!(parse_seed("-1").is_err());
        assert_eq!(Config::new().seed().unwrap(), 0xC0FFEE);
    }

    #[test]
    fn snapping_alpha() {
        let cfg = Config::parse("alpha = 0.26\nm = 12").unwrap();
        assert_eq!(cfg.alloc(true).unwrap().alpha, 0.3);
    }
}
