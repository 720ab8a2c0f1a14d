//! Config files, CSV rows, parameter sweeps and truncation studies.
//!
//! Config files are line oriented `key = value` text; `#` starts a comment.
//! Recognized keys: epsilon_h, epsilon_c, delta_h, delta_c, beta_h, beta_c,
//! alpha, omega_c, n, coupling_model, stroke_mode, decoupling_mode. The last
//! four default to 30, rc-strong, adiabatic and instantaneous.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ReservoirSpec, TlsParams};
use crate::otto::{
    self, CouplingModel, CycleConfig, CycleResult, DecouplingMode, StrokeMode, CLASSIFY_TOL,
    TRUNCATION_TOL,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_UNCONVERGED: u8 = 3;

pub const CSV_HEADER: &str = "sweep_param,value,coupling_model,stroke_mode,decoupling_mode,W_out,Q_hot,Q_cold,W_dec_h,W_dec_c,Q_dec_h,Q_dec_c,eta,mode,n,converged";
pub const CONVERGE_HEADER: &str = "n,W_out,Q_hot,eta,rel_delta";

/// Ledger closure tolerance applied to every swept result.
pub const LEDGER_TOL: f64 = 1e-10;
/// One in this many sweep rows is recomputed and compared bit for bit.
pub const SPOT_CHECK_STRIDE: usize = 100;

const REQUIRED_KEYS: [&str; 8] = [
    "epsilon_h",
    "epsilon_c",
    "delta_h",
    "delta_c",
    "beta_h",
    "beta_c",
    "alpha",
    "omega_c",
];
const OPTIONAL_KEYS: [&str; 4] = ["n", "coupling_model", "stroke_mode", "decoupling_mode"];

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_config() || matches!(err, Error::Io(_)) {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

impl FromStr for CouplingModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(CouplingModel::Weak),
            "rc-strong" => Ok(CouplingModel::RcStrong),
            _ => Err(Error::config(None, format!("unknown coupling_model '{s}' (weak | rc-strong)"))),
        }
    }
}

impl FromStr for StrokeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adiabatic" => Ok(StrokeMode::Adiabatic),
            "sudden" => Ok(StrokeMode::Sudden),
            _ => Err(Error::config(None, format!("unknown stroke_mode '{s}' (adiabatic | sudden)"))),
        }
    }
}

impl FromStr for DecouplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "instantaneous" => Ok(DecouplingMode::Instantaneous),
            "adiabatic" => Ok(DecouplingMode::AdiabaticDecoupling),
            _ => Err(Error::config(
                None,
                format!("unknown decoupling_mode '{s}' (instantaneous | adiabatic)"),
            )),
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    EpsilonH,
    DeltaH,
    /// Both reservoirs' coupling together.
    Alpha,
    BetaC,
}

impl SweepParam {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParam::EpsilonH => "epsilon_h",
            SweepParam::DeltaH => "delta_h",
            SweepParam::Alpha => "alpha",
            SweepParam::BetaC => "beta_c",
        }
    }

    pub fn apply(&self, cfg: &CycleConfig, value: f64) -> CycleConfig {
        let mut out = *cfg;
        match self {
            SweepParam::EpsilonH => out.tls_hot.epsilon = value,
            SweepParam::DeltaH => out.tls_hot.delta = value,
            SweepParam::Alpha => {
                out.hot.alpha = value;
                out.cold.alpha = value;
            }
            SweepParam::BetaC => out.cold.beta = value,
        }
        out
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon_h" => Ok(SweepParam::EpsilonH),
            "delta_h" => Ok(SweepParam::DeltaH),
            "alpha" => Ok(SweepParam::Alpha),
            "beta_c" => Ok(SweepParam::BetaC),
            _ => Err(Error::config(
                None,
                format!("unknown sweep parameter '{s}' (epsilon_h | delta_h | alpha | beta_c)"),
            )),
        }
    }
}

/// One (coupling, stroke, decoupling) combination evaluated by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub coupling: CouplingModel,
    pub stroke: StrokeMode,
    pub decoupling: DecouplingMode,
}

impl Variant {
    pub fn of(cfg: &CycleConfig) -> Self {
        Self {
            coupling: cfg.coupling_model,
            stroke: cfg.stroke_mode,
            decoupling: cfg.decoupling_mode,
        }
    }

    pub fn apply(&self, cfg: &CycleConfig) -> CycleConfig {
        cfg.with_modes(self.coupling, self.stroke, self.decoupling)
    }
}

impl FromStr for Variant {
    type Err = Error;
    /// `coupling:stroke:decoupling`, e.g. `rc-strong:adiabatic:instantaneous`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::config(
                None,
                format!("variant '{s}' must be coupling:stroke:decoupling"),
            ));
        }
        Ok(Self {
            coupling: parts[0].parse()?,
            stroke: parts[1].parse()?,
            decoupling: parts[2].parse()?,
        })
    }
}

pub fn parse_variants(list: &str) -> Result<Vec<Variant>> {
    let variants = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Variant>>>()?;
    if variants.is_empty() {
        return Err(Error::config(None, "empty variant list"));
    }
    Ok(variants)
}

struct Entry {
    value: String,
    line: usize,
}

fn parse_entries(text: &str) -> Result<HashMap<String, Entry>> {
    let mut entries = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::config(Some(line), format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        let value = value.trim();
        if !REQUIRED_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
            return Err(Error::config(Some(line), format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(Error::config(Some(line), format!("missing value for '{key}'")));
        }
        let prev = entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
        if prev.is_some() {
            return Err(Error::config(Some(line), format!("duplicate key '{key}'")));
        }
    }
    Ok(entries)
}

struct Fields<'a> {
    entries: &'a HashMap<String, Entry>,
    fill: Option<(&'static str, f64)>,
}

impl Fields<'_> {
    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn number(&self, key: &'static str) -> Result<f64> {
        match self.entries.get(key) {
            Some(e) => {
                let x: f64 = e
                    .value
                    .parse()
                    .map_err(|_| Error::config(Some(e.line), format!("cannot parse '{}' as a number for {key}", e.value)))?;
                if !x.is_finite() {
                    return Err(Error::config(Some(e.line), format!("{key} must be finite")));
                }
                Ok(x)
            }
            None => match self.fill {
                Some((k, v)) if k == key => Ok(v),
                _ => Err(Error::config(None, format!("missing required key '{key}'"))),
            },
        }
    }

    fn parsed<T: FromStr<Err = Error>>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            Some(e) => e.value.parse().map_err(|err| match err {
                Error::Config { msg, .. } => Error::config(Some(e.line), msg),
                other => other,
            }),
            None => Ok(default),
        }
    }

    fn truncation(&self) -> Result<usize> {
        match self.entries.get("n") {
            Some(e) => {
                let n: usize = e
                    .value
                    .parse()
                    .map_err(|_| Error::config(Some(e.line), format!("n must be a positive integer, got '{}'", e.value)))?;
                if n == 0 {
                    return Err(Error::config(Some(e.line), "n must be at least 1"));
                }
                Ok(n)
            }
            None => Ok(30),
        }
    }
}

fn build_config(text: &str, fill: Option<(&'static str, f64)>) -> Result<CycleConfig> {
    let entries = parse_entries(text)?;
    let f = Fields {
        entries: &entries,
        fill,
    };
    let beta_h = f.number("beta_h")?;
    let beta_c = f.number("beta_c")?;
    let alpha = f.number("alpha")?;
    let omega_c = f.number("omega_c")?;
    if beta_h <= 0.0 {
        return Err(Error::config(f.line("beta_h"), "beta_h must be positive"));
    }
    if beta_c <= 0.0 {
        return Err(Error::config(f.line("beta_c"), "beta_c must be positive"));
    }
    if beta_c <= beta_h {
        return Err(Error::config(
            f.line("beta_c").or(f.line("beta_h")),
            format!("cold reservoir must be colder than the hot one (beta_c = {beta_c} <= beta_h = {beta_h})"),
        ));
    }
    if alpha < 0.0 {
        return Err(Error::config(f.line("alpha"), format!("alpha must be non-negative, got {alpha}")));
    }
    if omega_c <= 0.0 {
        return Err(Error::config(f.line("omega_c"), format!("omega_c must be positive, got {omega_c}")));
    }
    let tls_hot = TlsParams::new(f.number("epsilon_h")?, f.number("delta_h")?);
    let tls_cold = TlsParams::new(f.number("epsilon_c")?, f.number("delta_c")?);
    if tls_hot.epsilon == 0.0 && tls_hot.delta == 0.0 {
        return Err(Error::config(f.line("delta_h"), "hot-point splitting is zero"));
    }
    if tls_cold.epsilon == 0.0 && tls_cold.delta == 0.0 {
        return Err(Error::config(f.line("delta_c"), "cold-point splitting is zero"));
    }
    let cfg = CycleConfig {
        hot: ReservoirSpec::new(beta_h, alpha, omega_c)?,
        cold: ReservoirSpec::new(beta_c, alpha, omega_c)?,
        tls_hot,
        tls_cold,
        n: f.truncation()?,
        coupling_model: f.parsed("coupling_model", CouplingModel::RcStrong)?,
        stroke_mode: f.parsed("stroke_mode", StrokeMode::Adiabatic)?,
        decoupling_mode: f.parsed("decoupling_mode", DecouplingMode::Instantaneous)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config_str(text: &str) -> Result<CycleConfig> {
    build_config(text, None)
}

pub fn parse_config(path: &Path) -> Result<CycleConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Like [`parse_config_str`], but the swept key may be omitted; it is then
/// set to `first_value`.
pub fn parse_sweep_config_str(text: &str, param: SweepParam, first_value: f64) -> Result<CycleConfig> {
    build_config(text, Some((param.key(), first_value)))
}

pub fn parse_sweep_config(path: &Path, param: SweepParam, first_value: f64) -> Result<CycleConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
    parse_sweep_config_str(&text, param, first_value)
}

/// Serializes a config in the file format. Fails when the two reservoirs
/// differ in alpha or omega_c, which the format cannot express.
pub fn config_to_string(cfg: &CycleConfig) -> Result<String> {
    if cfg.hot.alpha != cfg.cold.alpha || cfg.hot.omega_c != cfg.cold.omega_c {
        return Err(Error::InvalidParameter(
            "config files hold a single alpha and omega_c for both reservoirs".into(),
        ));
    }
    let mut s = String::new();
    let _ = writeln!(s, "epsilon_h = {}", cfg.tls_hot.epsilon);
    let _ = writeln!(s, "epsilon_c = {}", cfg.tls_cold.epsilon);
    let _ = writeln!(s, "delta_h = {}", cfg.tls_hot.delta);
    let _ = writeln!(s, "delta_c = {}", cfg.tls_cold.delta);
    let _ = writeln!(s, "beta_h = {}", cfg.hot.beta);
    let _ = writeln!(s, "beta_c = {}", cfg.cold.beta);
    let _ = writeln!(s, "alpha = {}", cfg.hot.alpha);
    let _ = writeln!(s, "omega_c = {}", cfg.hot.omega_c);
    let _ = writeln!(s, "n = {}", cfg.n);
    let _ = writeln!(s, "coupling_model = {}", cfg.coupling_model.as_str());
    let _ = writeln!(s, "stroke_mode = {}", cfg.stroke_mode.as_str());
    let _ = writeln!(s, "decoupling_mode = {}", cfg.decoupling_mode.as_str());
    Ok(s)
}

/// Formats with 12 significant digits, in the style of C's `%.12g`.
pub fn fmt_sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One output line of a cycle or sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub sweep_param: String,
    pub value: Option<f64>,
    pub variant: Variant,
    pub w_out: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    pub w_dec_h: f64,
    pub w_dec_c: f64,
    pub q_dec_h: f64,
    pub q_dec_c: f64,
    pub eta: Option<f64>,
    pub mode: otto::OperatingMode,
    pub n: usize,
    pub converged: bool,
}

impl CsvRow {
    pub fn new(sweep_param: &str, value: Option<f64>, cfg: &CycleConfig, r: &CycleResult) -> Self {
        Self {
            sweep_param: sweep_param.to_string(),
            value,
            variant: Variant::of(cfg),
            w_out: r.w_out,
            q_hot: r.q_hot,
            q_cold: r.q_cold,
            w_dec_h: r.w_decouple_hot,
            w_dec_c: r.w_decouple_cold,
            q_dec_h: r.q_decouple_hot,
            q_dec_c: r.q_decouple_cold,
            eta: r.eta,
            mode: r.mode,
            n: cfg.n,
            converged: r.converged,
        }
    }

    pub fn to_csv(&self) -> String {
        let nums = [
            self.w_out,
            self.q_hot,
            self.q_cold,
            self.w_dec_h,
            self.w_dec_c,
            self.q_dec_h,
            self.q_dec_c,
        ]
        .map(fmt_sig12)
        .join(",");
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.sweep_param,
            self.value.map(fmt_sig12).unwrap_or_default(),
            self.variant.coupling.as_str(),
            self.variant.stroke.as_str(),
            self.variant.decoupling.as_str(),
            nums,
            self.eta.map(fmt_sig12).unwrap_or_default(),
            self.mode.as_str(),
            self.n,
            self.converged,
        )
    }
}

fn check_ledger(r: &CycleResult) -> Result<()> {
    let loop_res = r.points.loop_residual();
    let first_law = r.first_law_residual();
    if loop_res.abs() > LEDGER_TOL || first_law.abs() > LEDGER_TOL {
        return Err(Error::Ledger(format!(
            "loop residual {loop_res:e}, first-law residual {first_law:e}"
        )));
    }
    Ok(())
}

/// Evaluates a single configuration and returns its CSV row.
pub fn run_cycle(cfg: &CycleConfig) -> Result<(CycleResult, CsvRow)> {
    let r = otto::run(cfg)?;
    check_ledger(&r)?;
    let row = CsvRow::new("none", None, cfg, &r);
    Ok((r, row))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub base: CycleConfig,
    pub variants: Vec<Variant>,
}

impl SweepSpec {
    /// Uniform grid including both endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last as f64
                }
            })
            .collect()
    }

    fn jobs(&self) -> Vec<(f64, CycleConfig)> {
        let grid = self.grid();
        self.variants
            .iter()
            .flat_map(|v| {
                let base = v.apply(&self.base);
                grid.iter()
                    .map(move |&x| (x, self.param.apply(&base, x)))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::config(
                None,
                format!("sweep needs from < to, got {} and {}", self.from, self.to),
            ));
        }
        if self.steps < 2 {
            return Err(Error::config(None, "sweep needs at least 2 steps"));
        }
        if self.variants.is_empty() {
            return Err(Error::config(None, "sweep needs at least one variant"));
        }
        for (x, cfg) in self.jobs() {
            cfg.validate().map_err(|e| {
                Error::config(None, format!("{} = {}: {e}", self.param.key(), fmt_sig12(x)))
            })?;
        }
        Ok(())
    }
}

/// Rows in (variant, value) order together with the underlying results.
pub fn sweep_results(spec: &SweepSpec) -> Result<Vec<(CycleResult, CsvRow)>> {
    spec.validate()?;
    let key = spec.param.key();
    let jobs = spec.jobs();
    let out: Vec<(CycleResult, CsvRow)> = jobs
        .par_iter()
        .map(|(x, cfg)| {
            let r = otto::run(cfg)?;
            check_ledger(&r)?;
            let row = CsvRow::new(key, Some(*x), cfg, &r);
            Ok((r, row))
        })
        .collect::<Result<_>>()?;

    for idx in (0..out.len()).step_by(SPOT_CHECK_STRIDE) {
        let again = otto::run(&jobs[idx].1)?;
        if again != out[idx].0 {
            return Err(Error::Ledger(format!("row {idx} is not reproducible")));
        }
    }
    Ok(out)
}

pub fn sweep_rows(spec: &SweepSpec) -> Result<Vec<CsvRow>> {
    Ok(sweep_results(spec)?.into_iter().map(|(_, row)| row).collect())
}

pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_csv());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    pub unconverged: usize,
}

/// Runs a sweep and writes the CSV to `out`. `threads` pins the worker
/// count; `None` uses rayon's default pool.
pub fn run_sweep(spec: &SweepSpec, out: &Path, threads: Option<usize>) -> Result<SweepSummary> {
    let rows = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(|| sweep_rows(spec))?,
        None => sweep_rows(spec)?,
    };
    std::fs::write(out, render_csv(&rows))
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", out.display())))?;
    Ok(SweepSummary {
        rows: rows.len(),
        unconverged: rows.iter().filter(|r| !r.converged).count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeRow {
    pub n: usize,
    pub w_out: f64,
    pub q_hot: f64,
    pub eta: Option<f64>,
    /// Largest relative change of (W_out, Q_hot) against the previous row.
    pub rel_delta: Option<f64>,
}

impl ConvergeRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n,
            fmt_sig12(self.w_out),
            fmt_sig12(self.q_hot),
            self.eta.map(fmt_sig12).unwrap_or_default(),
            self.rel_delta.map(fmt_sig12).unwrap_or_default()
        )
    }

    pub fn converged(&self) -> bool {
        self.rel_delta.is_some_and(|d| d <= TRUNCATION_TOL)
    }
}

fn relative_change(new: f64, old: f64) -> f64 {
    (new - old).abs() / new.abs().max(CLASSIFY_TOL)
}

/// Truncations 5, 10, ... up to `n_max` (which is included even if it is
/// not a multiple of 5).
pub fn converge_truncations(n_max: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = (1..).map(|k| 5 * k).take_while(|&n| n <= n_max).collect();
    if ns.last() != Some(&n_max) {
        ns.push(n_max);
    }
    ns
}

pub fn run_converge(cfg: &CycleConfig, n_max: usize) -> Result<Vec<ConvergeRow>> {
    if n_max < cfg.n {
        return Err(Error::config(
            None,
            format!("n_max = {n_max} is below the configured n = {}", cfg.n),
        ));
    }
    cfg.validate()?;
    let results = converge_truncations(n_max)
        .into_par_iter()
        .map(|n| otto::run_unchecked(&cfg.with_n(n)).map(|r| (n, r)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergeRow> = Vec::with_capacity(results.len());
    for (n, r) in results {
        check_ledger(&r)?;
        let rel_delta = rows
            .last()
            .map(|prev| relative_change(r.w_out, prev.w_out).max(relative_change(r.q_hot, prev.q_hot)));
        rows.push(ConvergeRow {
            n,
            w_out: r.w_out,
            q_hot: r.q_hot,
            eta: r.eta,
            rel_delta,
        });
    }
    Ok(rows)
}

pub fn render_converge_csv(rows: &[ConvergeRow]) -> String {
    let mut s = String::from(CONVERGE_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_csv());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = "\
# hot/cold reservoirs, units of epsilon_c
epsilon_c = 1
delta_h = 1
delta_c = 1
beta_h = 1
beta_c = 2.5   # colder
omega_c = 2
alpha = 0.005
n = 30
";

    #[test]
    fn reference_config_round_trips() {
        let cfg = parse_sweep_config_str(REFERENCE, SweepParam::EpsilonH, 2.0).unwrap();
        assert_eq!(cfg.tls_hot.epsilon, 2.0);
        assert_eq!(cfg.cold.beta, 2.5);
        assert_eq!(cfg.coupling_model, CouplingModel::RcStrong);
        let text = config_to_string(&cfg).unwrap();
        assert_eq!(parse_config_str(&text).unwrap(), cfg);
    }

    #[test]
    fn missing_key_is_an_error_without_sweep() {
        let err = parse_config_str(REFERENCE).unwrap_err();
        assert!(err.to_string().contains("epsilon_h"), "{err}");
    }

    #[test]
    fn rejects_bad_configs_with_line_numbers() {
        let text = REFERENCE.replace("beta_c = 2.5", "beta_c = 0.5");
        let err = parse_sweep_config_str(&text, SweepParam::EpsilonH, 2.0).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
        assert!(err.to_string().contains("line 6"), "{err}");
        assert!(err.to_string().contains("cold reservoir must be colder"));

        let text = REFERENCE.replace("alpha = 0.005", "alpha = -0.1");
        let err = parse_sweep_config_str(&text, SweepParam::EpsilonH, 2.0).unwrap_err();
        assert!(err.to_string().contains("line 8"), "{err}");

        let text = format!("{REFERENCE}epsilon_h = 2\nbogus = 1\n");
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("unknown key"));

        let text = REFERENCE.replace("omega_c = 2", "omega_c = two");
        assert!(parse_sweep_config_str(&text, SweepParam::EpsilonH, 2.0).is_err());

        let text = format!("{REFERENCE}epsilon_h = 2\nstroke_mode = slow\n");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("line 11"), "{err}");
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(0.056_083_417_368_310_78), "0.0560834173683");
        assert_eq!(fmt_sig12(-2.5), "-2.5");
        assert_eq!(fmt_sig12(1.234_567_890_123_4e-7), "1.23456789012e-07");
        assert_eq!(fmt_sig12(123_456_789_012_345.0), "1.23456789012e+14");
        assert_eq!(fmt_sig12(3.951_450_786_47e-5), "3.95145078647e-05");
        assert_eq!(fmt_sig12(1e-4), "0.0001");
        assert_eq!(fmt_sig12(1e100), "1e+100");
        assert_eq!(fmt_sig12(9.999_999_999_999_9), "10");
    }

    #[test]
    fn variant_parsing() {
        let v = parse_variants("weak:adiabatic:instantaneous, rc-strong:sudden:adiabatic").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].decoupling, DecouplingMode::AdiabaticDecoupling);
        assert!(parse_variants("weak:adiabatic").is_err());
        assert!(parse_variants("").is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let spec = SweepSpec {
            param: SweepParam::Alpha,
            from: 0.1,
            to: 0.3,
            steps: 2,
            base: parse_sweep_config_str(REFERENCE, SweepParam::EpsilonH, 2.0).unwrap(),
            variants: vec![],
        };
        assert_eq!(spec.grid(), vec![0.1, 0.3]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn converge_truncation_list() {
        assert_eq!(converge_truncations(30), vec![5, 10, 15, 20, 25, 30]);
        assert_eq!(converge_truncations(12), vec![5, 10, 12]);
    }
}
