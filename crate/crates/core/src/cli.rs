//! `key=value` run configurations and the four commands of the
//! `sphere-dispersion` binary: `kernel`, `scan`, `arcs`, `space-info`.
//!
//! A config file holds one `key=value` per line; `#` starts a comment. Flags
//! given on the command line use the same keys and override the file.
//! Outputs are written next to the `out` prefix and carry `"schema": 1`.

use crate::arcs::arc_table;
use crate::error::{Error, Result};
use crate::kernel::{Bump, BumpKind, KernelField};
use crate::rational::{self, format_rational, parse_rational, Rational};
use crate::space::{build_space, harmonic_dim, ProductSpace};
use crate::verify::{
    corner_scan, decay_scan, kappa_scan, strichartz_zonal_scan, threshold_check, RegionKind, ScalingReport, ScanPlan,
    StrichartzPlan,
};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Every key a config may set.
pub const KEYS: &[&str] = &[
    "dims",
    "betas",
    "N",
    "t",
    "p",
    "N_list",
    "arcs",
    "offsets",
    "region",
    "bump",
    "oversample",
    "tolerance",
    "seed",
    "trials",
    "mode",
    "nu",
    "Q",
    "out",
    "check_resolution",
    "deep_arc_divisor",
    "include_coherent",
];

/// A flow time, either in seconds or as a fraction of the period `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpec {
    Seconds(f64),
    Period(Rational),
}

impl TimeSpec {
    pub fn seconds(&self, space: &ProductSpace) -> f64 {
        match self {
            TimeSpec::Seconds(t) => *t,
            TimeSpec::Period(f) => rational::to_f64(f) * space.period_seconds(),
        }
    }
}

impl FromStr for TimeSpec {
    type Err = Error;

    /// Accepts `1.25`, `T`, `T/3`, `2T/5`, `2/5T`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some((pre, post)) = s.split_once('T') else {
            return s
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite())
                .map(TimeSpec::Seconds)
                .ok_or_else(|| Error::arg(format!("bad time {s:?}")));
        };
        let pre = pre.trim_end_matches('*');
        let num = if pre.is_empty() { Rational::from_integer(1) } else { parse_rational(pre)? };
        let den = match post.strip_prefix('/') {
            Some(q) => parse_rational(q)?,
            None if post.is_empty() => Rational::from_integer(1),
            None => return Err(Error::arg(format!("bad time {s:?}"))),
        };
        if den == Rational::from_integer(0) {
            return Err(Error::arg(format!("zero denominator in time {s:?}")));
        }
        Ok(TimeSpec::Period(num / den))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Decay,
    Corner,
    Kappa,
    Strichartz,
    Threshold,
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "decay" => ScanMode::Decay,
            "corner" => ScanMode::Corner,
            "kappa" => ScanMode::Kappa,
            "strichartz" => ScanMode::Strichartz,
            "threshold" => ScanMode::Threshold,
            _ => return Err(Error::arg(format!("unknown mode {s:?} (decay|corner|kappa|strichartz|threshold)"))),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub dims: Option<Vec<u32>>,
    pub betas: Option<Vec<Rational>>,
    pub n: Option<f64>,
    pub t: Option<TimeSpec>,
    pub p: Option<f64>,
    pub n_list: Option<Vec<f64>>,
    pub arcs: Option<Vec<(u64, u64)>>,
    pub offsets: Option<Vec<f64>>,
    pub region: Option<RegionKind>,
    pub bump: Option<BumpKind>,
    pub oversample: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub mode: Option<ScanMode>,
    pub nu: Option<u32>,
    pub big_q: Option<u64>,
    pub out: Option<PathBuf>,
    pub check_resolution: Option<bool>,
    pub deep_arc_divisor: Option<u64>,
    pub include_coherent: Option<bool>,
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',')
        .map(|x| {
            let x = x.trim();
            if x.is_empty() {
                Err(Error::arg("empty list element"))
            } else {
                item(x)
            }
        })
        .collect()
}

fn num<T: FromStr>(v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::arg(format!("cannot parse {v:?}")))
}

fn real(v: &str) -> Result<f64> {
    let s = v.trim();
    if s == "inf" || s == "infinity" {
        return Ok(f64::INFINITY);
    }
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(Error::arg(format!("bad number {s:?}"))) };
    }
    // exact fractions such as 1/2 are allowed for exponents and offsets
    Ok(rational::to_f64(&parse_rational(s)?))
}

fn boolean(v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::arg(format!("expected true or false, got {v:?}"))),
    }
}

/// `16,32,64` or a doubling range `16..512`.
fn n_list(v: &str) -> Result<Vec<f64>> {
    if let Some((lo, hi)) = v.split_once("..") {
        let (mut lo, hi): (f64, f64) = (real(lo)?, real(hi)?);
        if !(lo >= 1.0 && hi >= lo) {
            return Err(Error::arg(format!("bad range {v:?}")));
        }
        let mut out = Vec::new();
        while lo <= hi {
            out.push(lo);
            lo *= 2.0;
        }
        return Ok(out);
    }
    list(v, real)
}

fn fraction(v: &str) -> Result<(u64, u64)> {
    let (a, q) = v.split_once('/').ok_or_else(|| Error::arg(format!("arc {v:?} is not a/q")))?;
    Ok((num(a)?, num(q)?))
}

impl RunConfig {
    /// Sets one key; errors name the key and the offending value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "dims" => self.dims = Some(list(v, num)?),
            "betas" => self.betas = Some(list(v, parse_rational)?),
            "N" => self.n = Some(real(v)?),
            "t" => self.t = Some(v.parse()?),
            "p" => self.p = Some(real(v)?),
            "N_list" => self.n_list = Some(n_list(v)?),
            "arcs" => self.arcs = Some(list(v, fraction)?),
            "offsets" => self.offsets = Some(list(v, real)?),
            "region" => {
                self.region = Some(match v {
                    "full" => RegionKind::Full,
                    "corner" => RegionKind::Corner,
                    "away" => RegionKind::Away,
                    _ => return Err(Error::arg(format!("unknown region {v:?} (full|corner|away)"))),
                })
            }
            "bump" => {
                self.bump = Some(match v {
                    "smooth" => BumpKind::Smooth,
                    "sharp" => BumpKind::Sharp,
                    _ => return Err(Error::arg(format!("unknown bump {v:?} (smooth|sharp)"))),
                })
            }
            "oversample" => self.oversample = Some(num(v)?),
            "tolerance" => self.tolerance = Some(real(v)?),
            "seed" => self.seed = Some(num(v)?),
            "trials" => self.trials = Some(num(v)?),
            "mode" => self.mode = Some(v.parse()?),
            "nu" => self.nu = Some(num(v)?),
            "Q" => self.big_q = Some(num(v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "check_resolution" => self.check_resolution = Some(boolean(v)?),
            "deep_arc_divisor" => self.deep_arc_divisor = Some(num(v)?),
            "include_coherent" => self.include_coherent = Some(boolean(v)?),
            _ => return Err(Error::arg(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses config text; errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let wrap = |msg: String| Error::Config { line: i + 1, msg };
            let (k, v) = line.split_once('=').ok_or_else(|| wrap(format!("expected key=value, got {line:?}")))?;
            cfg.set(k.trim(), v).map_err(|e| wrap(format!("{}: {}", k.trim(), strip(e))))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides (a leading `--` is ignored). Errors use line 0.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        let mut it = args.iter().map(AsRef::as_ref);
        while let Some(arg) = it.next() {
            let arg = arg.trim_start_matches("--");
            let (k, v) = match arg.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| Error::Config { line: 0, msg: format!("flag {arg} needs a value") })?;
                    (arg.to_string(), v.to_string())
                }
            };
            self.set(&k, &v).map_err(|e| Error::Config { line: 0, msg: format!("flag {k}: {}", strip(e)) })?;
        }
        Ok(())
    }

    pub fn space(&self) -> Result<ProductSpace> {
        let dims = self.dims.as_ref().ok_or_else(|| Error::arg("dims is required"))?;
        let betas = match &self.betas {
            Some(b) => b.clone(),
            None => vec![Rational::from_integer(1); dims.len()],
        };
        build_space(dims, &betas)
    }

    fn bump(&self) -> Bump {
        Bump::with_kind(self.bump.unwrap_or(BumpKind::Smooth))
    }

    fn out(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T> {
        v.ok_or_else(|| Error::arg(format!("{key} is required")))
    }

    /// Kernel-scan plan with every configured override applied.
    pub fn scan_plan(&self) -> Result<ScanPlan> {
        let space = self.space()?;
        let mut plan = ScanPlan::new(space, self.p.unwrap_or(f64::INFINITY));
        if let Some(v) = &self.n_list {
            plan.n_list = v.clone();
        }
        if let Some(v) = &self.arcs {
            plan.arcs = v.clone();
        }
        if let Some(v) = &self.offsets {
            plan.offsets = v.clone();
        }
        if let Some(v) = self.region {
            plan.region = v;
        }
        plan.bump = self.bump();
        if let Some(v) = self.oversample {
            plan.oversample = v;
        }
        if let Some(v) = self.tolerance {
            plan.tolerance = v;
        }
        if let Some(v) = self.check_resolution {
            plan.check_resolution = v;
        }
        if self.deep_arc_divisor.is_some() {
            plan.deep_arc_divisor = self.deep_arc_divisor;
        }
        Ok(plan)
    }

    pub fn strichartz_plan(&self) -> Result<StrichartzPlan> {
        let mut plan = StrichartzPlan::new(self.space()?, Self::require(self.p, "p")?);
        if let Some(v) = &self.n_list {
            plan.n_list = v.clone();
        }
        if let Some(v) = self.trials {
            plan.trials = v;
        }
        if let Some(v) = self.seed {
            plan.seed = v;
        }
        if let Some(v) = self.oversample {
            plan.oversample = v;
        }
        if let Some(v) = self.tolerance {
            plan.tolerance = v;
        }
        if let Some(v) = self.include_coherent {
            plan.include_coherent = v;
        }
        plan.bump = self.bump();
        Ok(plan)
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `<out>.json` (header) and one `<out>_f<j>.csv` per factor.
pub fn cmd_kernel(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let space = cfg.space()?;
    let big_n = RunConfig::require(cfg.n, "N")?;
    let t = RunConfig::require(cfg.t, "t")?.seconds(&space);
    let field = KernelField::build(&space, big_n, t, &cfg.bump(), cfg.oversample.unwrap_or(16), 1.0 / big_n.max(1.0))?;
    let out = cfg.out("kernel");
    let mut paths = Vec::new();
    let header = with_suffix(&out, ".json");
    write_json(&header, &field.header())?;
    paths.push(header);
    for j in 0..field.rank() {
        let path = with_suffix(&out, &format!("_f{j}.csv"));
        let mut w = create(&path)?;
        field.write_factor_csv(j, &mut w)?;
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

/// Files written by a scan and whether its verdict passed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub paths: Vec<PathBuf>,
    pub passed: bool,
}

fn write_report(out: &Path, tag: &str, report: &ScalingReport, paths: &mut Vec<PathBuf>) -> Result<()> {
    let csv_path = with_suffix(out, &format!("{tag}.csv"));
    let mut w = create(&csv_path)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    paths.push(csv_path);
    Ok(())
}

/// Runs the scan selected by `mode` and writes `<out>.json` plus CSV records.
pub fn cmd_scan(cfg: &RunConfig) -> Result<ScanOutcome> {
    let mode = RunConfig::require(cfg.mode, "mode")?;
    let out = cfg.out("scan");
    let mut paths = Vec::new();
    let json = with_suffix(&out, ".json");
    let passed = match mode {
        ScanMode::Threshold => {
            let mut plan = cfg.scan_plan()?;
            plan.p = RunConfig::require(cfg.p, "p")?;
            let rep = threshold_check(&plan)?;
            write_json(&json, &rep)?;
            paths.push(json);
            write_report(&out, "", &rep.at_p, &mut paths)?;
            write_report(&out, "_probe", &rep.probe, &mut paths)?;
            rep.consistent
        }
        _ => {
            let report = match mode {
                ScanMode::Decay => {
                    let mut plan = cfg.scan_plan()?;
                    plan.p = RunConfig::require(cfg.p, "p")?;
                    decay_scan(&plan)?
                }
                ScanMode::Corner => {
                    let mut plan = cfg.scan_plan()?;
                    plan.p = RunConfig::require(cfg.p, "p")?;
                    corner_scan(&plan)?
                }
                ScanMode::Kappa => kappa_scan(&cfg.scan_plan()?, RunConfig::require(cfg.nu, "nu")?)?,
                ScanMode::Strichartz => strichartz_zonal_scan(&cfg.strichartz_plan()?)?,
                ScanMode::Threshold => unreachable!("handled above"),
            };
            write_json(&json, &report)?;
            paths.push(json);
            write_report(&out, "", &report, &mut paths)?;
            report.passed()
        }
    };
    Ok(ScanOutcome { paths, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcsReport {
    pub schema: u32,
    #[serde(rename = "Q")]
    pub big_q: u64,
    #[serde(rename = "N")]
    pub n: f64,
    pub arcs: Vec<crate::arcs::ArcRecord>,
}

/// Major arcs around `farey(Q)` at scale `N`, written to `<out>.json`.
pub fn cmd_arcs(cfg: &RunConfig) -> Result<(ArcsReport, PathBuf)> {
    let big_q = RunConfig::require(cfg.big_q, "Q")?;
    let big_n = RunConfig::require(cfg.n, "N")?;
    let report = ArcsReport { schema: 1, big_q, n: big_n, arcs: arc_table(big_q, big_n)? };
    let path = with_suffix(&cfg.out("arcs"), ".json");
    write_json(&path, &report)?;
    Ok((report, path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorInfo {
    pub dim: u32,
    pub lam: u32,
    pub beta: String,
    /// `2d/(d-1)`.
    pub threshold: String,
    /// Eigenvalues for degrees 0 to 4.
    pub eigenvalues: Vec<String>,
    /// Harmonic dimensions for degrees 0 to 4.
    pub harmonic_dims: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceInfo {
    pub schema: u32,
    pub d: u32,
    pub r: u32,
    pub s: String,
    pub p0: String,
    /// Period as a multiple of 2π.
    pub period: String,
    pub period_seconds: f64,
    pub factors: Vec<FactorInfo>,
}

pub fn space_info(space: &ProductSpace) -> SpaceInfo {
    SpaceInfo {
        schema: 1,
        d: space.d,
        r: space.r,
        s: format_rational(&space.s),
        p0: format_rational(&space.p0),
        period: format_rational(&space.period),
        period_seconds: space.period_seconds(),
        factors: space
            .factors
            .iter()
            .map(|f| FactorInfo {
                dim: f.dim,
                lam: f.lam,
                beta: format_rational(&f.beta),
                threshold: format_rational(&f.threshold()),
                eigenvalues: (0..5).map(|n| format_rational(&f.eigenvalue(n))).collect(),
                harmonic_dims: (0..5).map(|n| harmonic_dim(f.dim, n)).collect(),
            })
            .collect(),
    }
}

/// Space summary; also written to `<out>.json` when `out` is set.
pub fn cmd_space_info(cfg: &RunConfig) -> Result<(SpaceInfo, Option<PathBuf>)> {
    let info = space_info(&cfg.space()?);
    let path = match &cfg.out {
        Some(out) => {
            let p = with_suffix(out, ".json");
            write_json(&p, &info)?;
            Some(p)
        }
        None => None,
    };
    Ok((info, path))
}
