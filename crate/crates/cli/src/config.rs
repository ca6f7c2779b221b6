//! Run configuration: defaults, flat `key = value` files and flag overrides.
//!
//! Layers are applied in order defaults, file, flags; a later layer replaces
//! whole keys of an earlier one.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cfwave::baselines::BaselineOptions;
use cfwave::canonical::CanonicalOptions;
use cfwave::grid::DEFAULT_R_MIN;
use cfwave::ode::IntegratorOptions;
use cfwave::phaseshift::FarFieldOptions;
use cfwave::{RadialGrid, SolverId};

use crate::error::{CliError, Result};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "CFWAVE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Everything a command needs to build solvers and emit rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Wavenumbers (a.u.), sorted and deduplicated.
    pub k: Vec<f64>,
    pub l: Vec<u32>,
    pub spins: Vec<u8>,
    pub solvers: Vec<SolverId>,
    /// Base step lengths.
    pub h: Vec<f64>,
    /// Region ends for steps h, 2h, 4h; the fourth entry is where the
    /// far-field matching starts.
    pub regions: [f64; 4],
    pub r0: f64,
    /// Last mesh point.
    pub rmax: f64,
    /// Exchange-integral truncation and `D` read-off radius.
    pub r_cut: f64,
    /// Far-field matching window (points).
    pub window: usize,
    pub plateau_tol: f64,
    pub origin_tol: f64,
    pub integrator_rtol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub strict: bool,
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: Vec::new(),
            l: vec![0],
            spins: vec![0, 1],
            solvers: vec![SolverId::Kftee],
            h: vec![0.006],
            regions: [1.2, 4.8, 40.8, 184.8],
            r0: 1.0,
            rmax: 40.8,
            r_cut: 40.8,
            window: 100,
            plateau_tol: 1e-8,
            origin_tol: 1e-9,
            integrator_rtol: 1e-12,
            format: Format::Csv,
            output: None,
            jobs: 0,
            strict: false,
            deterministic: false,
        }
    }
}

/// Keys accepted in config files, in the order they are documented.
pub const KEYS: [&str; 19] = [
    "k",
    "k_range",
    "l",
    "spin",
    "solver",
    "h",
    "regions",
    "r0",
    "rmax",
    "r_cut",
    "window",
    "plateau_tol",
    "origin_tol",
    "integrator_rtol",
    "format",
    "output",
    "jobs",
    "strict",
    "deterministic",
];

/// One layer of settings; unset fields leave the layer below untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<Vec<f64>>,
    pub k_range: Option<Vec<f64>>,
    pub l: Option<Vec<u32>>,
    pub spins: Option<Vec<u8>>,
    pub solvers: Option<Vec<SolverId>>,
    pub h: Option<Vec<f64>>,
    pub regions: Option<[f64; 4]>,
    pub r0: Option<f64>,
    pub rmax: Option<f64>,
    pub r_cut: Option<f64>,
    pub window: Option<usize>,
    pub plateau_tol: Option<f64>,
    pub origin_tol: Option<f64>,
    pub integrator_rtol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub strict: Option<bool>,
    pub deterministic: Option<bool>,
}

impl Overrides {
    /// Sets `key` from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "k" => self.k = Some(parse_k_list(value)?),
            "k_range" => self.k_range = Some(parse_k_range(value)?),
            "l" => self.l = Some(parse_l_list(value)?),
            "spin" => self.spins = Some(parse_spin(value)?),
            "solver" => self.solvers = Some(parse_solvers(value)?),
            "h" => self.h = Some(parse_steps(value)?),
            "regions" => self.regions = Some(parse_regions(value)?),
            "r0" => self.r0 = Some(parse_positive(value)?),
            "rmax" => self.rmax = Some(parse_positive(value)?),
            "r_cut" => self.r_cut = Some(parse_positive(value)?),
            "window" => self.window = Some(parse_count(value, 3)?),
            "plateau_tol" => self.plateau_tol = Some(parse_positive(value)?),
            "origin_tol" => self.origin_tol = Some(parse_positive(value)?),
            "integrator_rtol" => self.integrator_rtol = Some(parse_positive(value)?),
            "format" => self.format = Some(value.parse()?),
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "jobs" => self.jobs = Some(parse_count(value, 0)?),
            "strict" => self.strict = Some(parse_bool(value)?),
            "deterministic" => self.deterministic = Some(parse_bool(value)?),
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Applies this layer on top of `cfg`. An explicit `k` or `k_range`
    /// replaces the whole k set; both together are merged.
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.k.is_some() || self.k_range.is_some() {
            let mut ks: Vec<f64> = self.k.iter().chain(&self.k_range).flatten().copied().collect();
            ks.sort_by(f64::total_cmp);
            ks.dedup();
            cfg.k = ks;
        }
        if let Some(v) = &self.l {
            cfg.l = v.clone();
        }
        if let Some(v) = &self.spins {
            cfg.spins = v.clone();
        }
        if let Some(v) = &self.solvers {
            cfg.solvers = v.clone();
        }
        if let Some(v) = &self.h {
            cfg.h = v.clone();
        }
        if let Some(v) = self.regions {
            cfg.regions = v;
        }
        macro_rules! copy {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        copy!(r0, rmax, r_cut, window, plateau_tol, origin_tol, integrator_rtol, format, jobs, strict, deterministic);
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
    }
}

/// Parses a config file body. `origin` only labels diagnostics.
pub fn parse_config(text: &str, origin: &Path) -> Result<Overrides> {
    let mut out = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |key: &str, message: String| CliError::Config {
            path: origin.to_path_buf(),
            line,
            key: key.to_string(),
            message,
        };
        let Some((key, value)) = body.split_once('=') else {
            return Err(err("", format!("expected 'key = value', got '{body}'")));
        };
        let key = key.trim();
        out.set(key, value.trim()).map_err(|m| err(key, m))?;
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line: 0,
        key: String::new(),
        message: format!("cannot read: {e}"),
    })?;
    parse_config(&text, path)
}

/// Applies the config file at `path`, or at `$CFWAVE_CONFIG` when `path`
/// is `None`, on top of `cfg`.
pub fn resolve_onto(mut cfg: RunConfig, path: Option<&Path>) -> Result<RunConfig> {
    let env_path = std::env::var_os(CONFIG_ENV)
        .filter(|p| !p.is_empty())
        .map(PathBuf::from);
    if let Some(p) = path.map(Path::to_path_buf).or(env_path) {
        load_config(&p)?.apply(&mut cfg);
    }
    Ok(cfg)
}

/// Defaults, then the config file, then `flags`; validated.
pub fn resolve(path: Option<&Path>, flags: &Overrides) -> Result<RunConfig> {
    let mut cfg = resolve_onto(RunConfig::default(), path)?;
    flags.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        let [a, b, c, d] = self.regions;
        if !(0.0 < a && a < b && b < c && c <= d) {
            return bad(format!("regions must increase, got {a},{b},{c},{d}"));
        }
        if self.rmax < self.r_cut && self.solvers.contains(&SolverId::Kftee) {
            return bad(format!("rmax {} lies inside r_cut {}", self.rmax, self.r_cut));
        }
        if self.rmax > d {
            return bad(format!("rmax {} lies beyond the far-field start {d}", self.rmax));
        }
        if self.solvers.is_empty() {
            return bad("no solver selected".into());
        }
        Ok(())
    }

    /// Mesh for base step `h`: steps `h, 2h, 4h` up to the first three
    /// region ends, then `8h`, truncated at `rmax`.
    pub fn grid(&self, h: f64) -> cfwave::Result<RadialGrid> {
        let mut regions = Vec::new();
        for (&end, m) in self.regions.iter().zip([1u64, 2, 4, 8]) {
            if self.rmax <= end {
                regions.push((self.rmax, m));
                break;
            }
            regions.push((end, m));
        }
        RadialGrid::new(h, DEFAULT_R_MIN.min(h / 2.0), &regions)
    }

    fn far(&self) -> FarFieldOptions<f64> {
        FarFieldOptions {
            start: self.regions[3].max(self.rmax),
            window: self.window,
            tol: self.plateau_tol,
            ..FarFieldOptions::default()
        }
    }

    pub fn canonical_options(&self) -> CanonicalOptions<f64> {
        let base = CanonicalOptions::default();
        CanonicalOptions {
            r0: self.r0,
            r_cut: self.r_cut,
            origin_tol: self.origin_tol,
            integrator: IntegratorOptions {
                rtol: self.integrator_rtol,
                ..base.integrator
            },
            far: Some(self.far()),
            ..base
        }
    }

    pub fn baseline_options(&self) -> BaselineOptions<f64> {
        BaselineOptions {
            changeover: self.r_cut.min(self.rmax),
            local_changeover: self.regions[1].min(self.rmax),
            far: Some(self.far()),
            ..BaselineOptions::default()
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("'{s}' is not a finite number"))
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("'{}' must be positive", s.trim()))
    }
}

fn parse_count(s: &str, min: usize) -> std::result::Result<usize, String> {
    let n: usize = s
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a non-negative integer", s.trim()))?;
    if n < min {
        return Err(format!("{n} is below the minimum {min}"));
    }
    Ok(n)
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Comma-separated wavenumbers; an empty string is an empty list.
pub fn parse_k_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    items(s).map(parse_positive).collect()
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_k_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [a, b, st] = parts[..] else {
        return Err(format!("k range '{}' is not start:stop:step", s.trim()));
    };
    let (a, b, st) = (parse_positive(a)?, parse_positive(b)?, parse_positive(st)?);
    if b < a {
        return Err(format!("k range stop {b} is below start {a}"));
    }
    let n = ((b - a) / st + 1e-9).floor() as usize;
    // rounding to 12 decimals keeps 0.1 + 2*0.1 at 0.3
    Ok((0..=n)
        .map(|i| ((a + i as f64 * st) * 1e12).round() / 1e12)
        .collect())
}

/// Comma-separated partial waves; `a-b` is an inclusive range.
pub fn parse_l_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for item in items(s) {
        let num = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("'{}' is not a partial wave", t.trim()))
        };
        match item.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if hi < lo {
                    return Err(format!("empty l range '{item}'"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(item)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `0`, `1` or `both`.
pub fn parse_spin(s: &str) -> std::result::Result<Vec<u8>, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "0" | "singlet" => Ok(vec![0]),
        "1" | "triplet" => Ok(vec![1]),
        "both" => Ok(vec![0, 1]),
        other => Err(format!("unknown spin '{other}' (expected 0, 1 or both)")),
    }
}

/// Comma-separated solver ids, or `all`; kept in canonical order.
pub fn parse_solvers(s: &str) -> std::result::Result<Vec<SolverId>, String> {
    let mut out = Vec::new();
    for item in items(s) {
        if item.eq_ignore_ascii_case("all") {
            out.extend(SolverId::ALL);
        } else {
            out.push(item.parse::<SolverId>()?);
        }
    }
    if out.is_empty() {
        return Err("no solver given".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn parse_steps(s: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out: Vec<f64> = items(s).map(parse_positive).collect::<std::result::Result<_, _>>()?;
    if out.is_empty() {
        return Err("no step length given".into());
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn parse_regions(s: &str) -> std::result::Result<[f64; 4], String> {
    let v: Vec<f64> = items(s).map(parse_positive).collect::<std::result::Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("regions needs 4 radii, got {}", v.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_hits_end_points() {
        let ks = parse_k_range("0.1:1.5:0.1").unwrap();
        assert_eq!(ks.len(), 15);
        assert_eq!(ks[2], 0.3);
        assert_eq!(*ks.last().unwrap(), 1.5);
    }

    #[test]
    fn l_ranges_expand() {
        assert_eq!(parse_l_list("3, 0-1,1").unwrap(), vec![0, 1, 3]);
        assert!(parse_l_list("2-1").is_err());
    }

    #[test]
    fn every_documented_key_parses() {
        let samples = [
            "0.5", "0.1:0.2:0.1", "0", "both", "kftee", "0.006", "1.2,4.8,40.8,184.8", "1", "40.8",
            "40.8", "100", "1e-8", "1e-9", "1e-12", "csv", "out.csv", "2", "true", "false",
        ];
        let mut o = Overrides::default();
        for (k, v) in KEYS.iter().zip(samples) {
            o.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn default_grid_matches_standard_mesh() {
        let cfg = RunConfig::default();
        let g = cfg.grid(0.006).unwrap();
        assert_eq!(g.points(), RadialGrid::standard(0.006).unwrap().points());
    }
}
