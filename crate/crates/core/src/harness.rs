//! Convergence sweeps over Λ and report export.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{CayleyGraph, GroupSpec, DEFAULT_BALL_CAP};
use crate::error::{Error, Result};
use crate::frame::SolverOptions;
use crate::groupalg::fejer_kernel;
use crate::qmetric::{epsilon_full, epsilon_truncated, gh_bound, EpsilonSearch};
use crate::sampling::derive_seed;
use crate::scalar::format_sig;

pub const CSV_HEADER: &str = "lambda,ball_size,folner_eps,eps_full,eps_trunc,gh_bound";

/// Significant digits of floating point columns in CSV output.
pub const CSV_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SChoice {
    Fixed(u32),
    Auto,
}

impl FromStr for SChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(SChoice::Auto),
            v => match v.parse::<u32>() {
                Ok(n) if n > 0 => Ok(SChoice::Fixed(n)),
                _ => Err(Error::InvalidParameter(format!("s must be a positive integer or `auto`, got `{v}`"))),
            },
        }
    }
}

impl fmt::Display for SChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SChoice::Fixed(n) => write!(f, "{n}"),
            SChoice::Auto => f.write_str("auto"),
        }
    }
}

impl Serialize for SChoice {
    fn serialize<Se: serde::Serializer>(&self, ser: Se) -> std::result::Result<Se::Ok, Se::Error> {
        match self {
            SChoice::Fixed(n) => ser.serialize_u32(*n),
            SChoice::Auto => ser.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for SChoice {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(de)? {
            Raw::N(n) => SChoice::from_str(&n.to_string()),
            Raw::S(s) => SChoice::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            v => Err(Error::InvalidParameter(format!("unknown format `{v}` (csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub s: SChoice,
    pub lambda_range: Vec<u32>,
    pub seed: u64,
    /// Random starts per ε search.
    pub trials: usize,
    /// Smallest ascent step before the smoothing is tightened.
    pub tol: f64,
    pub max_iters: usize,
    /// Element cap on balls; radii beyond it are skipped.
    pub ball_cap: usize,
    /// Matrix size cap for the full-algebra ε search.
    pub compression_cap: usize,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
    /// Write a gnuplot script next to CSV output.
    pub gnuplot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let search = EpsilonSearch::default();
        ExperimentConfig {
            group: GroupSpec::FreeAbelian(1),
            s: SChoice::Auto,
            lambda_range: vec![2, 4, 8, 16],
            seed: 0,
            trials: search.solver.starts,
            tol: search.solver.tol,
            max_iters: search.solver.max_iters,
            ball_cap: DEFAULT_BALL_CAP,
            compression_cap: search.compression_cap,
            output: None,
            format: ReportFormat::Csv,
            gnuplot: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_range.is_empty() {
            return Err(Error::InvalidParameter("lambda_range is empty".into()));
        }
        if self.lambda_range.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("lambda_range must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }

    /// Parse `key = value` lines (with `#` comments), or JSON if the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Overlay the settings found in `text` onto `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        if text.trim_start().starts_with('{') {
            let mut value = serde_json::to_value(&*self)?;
            let patch: serde_json::Value = serde_json::from_str(text)?;
            let obj = patch.as_object().ok_or_else(|| Error::InvalidParameter("config JSON must be an object".into()))?;
            for (k, v) in obj {
                value[k.as_str()] = v.clone();
            }
            *self = serde_json::from_value(value)?;
            return Ok(());
        }
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `key = value`".into() })?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(())
    }

    /// Set one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::InvalidParameter(format!("bad value `{v}` for {key}")))
        }
        match key {
            "group" => self.group = value.parse()?,
            "s" => self.s = value.parse()?,
            "lambda_range" => self.lambda_range = parse_lambda_range(value)?,
            "seed" => self.seed = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "ball_cap" => self.ball_cap = num(key, value)?,
            "compression_cap" => self.compression_cap = num(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "gnuplot" => self.gnuplot = num(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn search(&self) -> EpsilonSearch {
        EpsilonSearch {
            solver: SolverOptions {
                starts: self.trials,
                max_iters: self.max_iters,
                tol: self.tol,
                seed: self.seed,
                ..SolverOptions::default()
            },
            compression_radius: None,
            compression_cap: self.compression_cap,
        }
    }
}

/// `2,4,8,16` or an inclusive range `2..16`.
pub fn parse_lambda_range(text: &str) -> Result<Vec<u32>> {
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    let bad = || Error::InvalidParameter(format!("bad lambda range `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    text.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

/// Largest radius whose next ball fits under `cap`, used for growth fits.
fn fit_radius(cayley: &CayleyGraph, wanted: u32, cap: usize) -> u32 {
    cayley.radius_within(cap, wanted + 1).saturating_sub(1).max(2).min(wanted.max(2))
}

/// ⌈deg/2⌉ + 1 for the fitted growth degree rounded to an integer.
pub fn choose_s(spec: &GroupSpec) -> Result<u32> {
    let cayley = CayleyGraph::new(spec.clone());
    let lmax = fit_radius(&cayley, 64, 20_000);
    let report = cayley.growth_report(lmax)?;
    // the upper half of the range is closest to the asymptotic degree
    let (_, deg) = report.fit(lmax / 2, lmax);
    let deg = deg.round().max(0.0) as u32;
    Ok(deg.div_ceil(2) + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub lambda: u32,
    pub skipped: bool,
    pub skip_reason: Option<String>,
    pub ball_size: Option<usize>,
    pub folner_eps: Option<f64>,
    pub eps_full: Option<f64>,
    pub eps_trunc: Option<f64>,
    pub gh_bound: Option<f64>,
    /// Best basis-probe ratios, the deterministic part of the two ε columns.
    pub eps_full_probe: Option<f64>,
    pub eps_trunc_probe: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub group: String,
    pub s: u32,
    pub s_auto: bool,
    pub seed: u64,
    pub lambda_range: Vec<u32>,
    pub fitted_beta: f64,
    pub fitted_degree: f64,
    pub fit_range: (u32, u32),
    pub search: EpsilonSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ConvergenceRow>,
}

fn compute_row(cayley: &CayleyGraph, lambda: u32, s: u32, config: &ExperimentConfig) -> Result<ConvergenceRow> {
    let ball_size = cayley.ball_size(lambda)?;
    let kernel = fejer_kernel(cayley, lambda)?;
    let mut search = config.search();
    search.solver.seed = derive_seed(config.seed, &[lambda as u64]);
    let full = epsilon_full(cayley, lambda, s, &search)?;
    let trunc = epsilon_truncated(cayley, lambda, s, &search)?;
    Ok(ConvergenceRow {
        lambda,
        skipped: false,
        skip_reason: None,
        ball_size: Some(ball_size),
        folner_eps: Some(kernel.folner_epsilon_f64()),
        eps_full: Some(full.value),
        eps_trunc: Some(trunc.value),
        gh_bound: Some(gh_bound(full.value, trunc.value)?),
        eps_full_probe: Some(full.probe_floor),
        eps_trunc_probe: Some(trunc.probe_floor),
    })
}

/// ε estimates and the GH bound for every Λ in the config; rows whose balls
/// exceed the cap are marked skipped.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let cayley = CayleyGraph::with_cap(config.group.clone(), config.ball_cap);
    let (s, s_auto) = match config.s {
        SChoice::Fixed(s) => (s, false),
        SChoice::Auto => (choose_s(&config.group)?, true),
    };
    let lmax = *config.lambda_range.last().unwrap();
    let growth = cayley.growth_report(fit_radius(&cayley, lmax, config.ball_cap))?;
    let rows = config
        .lambda_range
        .par_iter()
        .map(|&lambda| match compute_row(&cayley, lambda, s, config) {
            Err(e) if e.is_resource_cap() => Ok(ConvergenceRow {
                lambda,
                skipped: true,
                skip_reason: Some(e.to_string()),
                ball_size: None,
                folner_eps: None,
                eps_full: None,
                eps_trunc: None,
                gh_bound: None,
                eps_full_probe: None,
                eps_trunc_probe: None,
            }),
            other => other,
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        metadata: ReportMetadata {
            group: config.group.to_string(),
            s,
            s_auto,
            seed: config.seed,
            lambda_range: config.lambda_range.clone(),
            fitted_beta: growth.fitted_beta,
            fitted_degree: growth.fitted_degree,
            fit_range: growth.fit_range,
            search: config.search(),
        },
        rows,
    })
}

/// Header plus one line per computed row.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    let f = |v: Option<f64>| format_sig(v.unwrap_or(f64::NAN), CSV_DIGITS);
    for row in report.rows.iter().filter(|r| !r.skipped) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.lambda,
            row.ball_size.unwrap_or(0),
            f(row.folner_eps),
            f(row.eps_full),
            f(row.eps_trunc),
            f(row.gh_bound)
        ));
    }
    out
}

pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn parse_report_json(text: &str) -> Result<ConvergenceReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn render_report(report: &ConvergenceReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(report_csv(report)),
        ReportFormat::Json => report_json(report),
    }
}

/// Log-log plot of the ε columns against Λ, reading `csv_name`.
pub fn gnuplot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead top right\n\
         set termoption noenhanced\n\
         set logscale xy\n\
         set xlabel 'Lambda'\n\
         set ylabel 'epsilon'\n\
         plot '{csv_name}' using 1:3 with linespoints, \\\n\
         \x20    '' using 1:4 with linespoints, \\\n\
         \x20    '' using 1:5 with linespoints, \\\n\
         \x20    '' using 1:6 with linespoints\n"
    )
}

/// Write the report; for CSV with `gnuplot`, also `<path>.gp`. Returns the files written.
pub fn export_report(report: &ConvergenceReport, format: ReportFormat, path: &Path, gnuplot: bool) -> Result<Vec<PathBuf>> {
    std::fs::write(path, render_report(report, format)?)?;
    let mut written = vec![path.to_path_buf()];
    if gnuplot && format == ReportFormat::Csv {
        let script = path.with_extension("gp");
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        std::fs::write(&script, gnuplot_script(&name))?;
        written.push(script);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(lambdas: Vec<u32>) -> ExperimentConfig {
        ExperimentConfig { s: SChoice::Fixed(2), lambda_range: lambdas, trials: 2, max_iters: 40, ..ExperimentConfig::default() }
    }

    #[test]
    fn choose_s_examples() {
        assert_eq!(choose_s(&GroupSpec::FreeAbelian(1)).unwrap(), 2);
        assert_eq!(choose_s(&GroupSpec::FreeAbelian(2)).unwrap(), 2);
        assert_eq!(choose_s(&GroupSpec::Heisenberg).unwrap(), 3);
    }

    #[test]
    fn config_text_and_json() {
        let cfg = ExperimentConfig::parse("group = z:2\ns = 3 # comment\nlambda_range = 1,2,3\nseed = 9\nformat = json\n").unwrap();
        assert_eq!(cfg.group, GroupSpec::FreeAbelian(2));
        assert_eq!(cfg.s, SChoice::Fixed(3));
        assert_eq!(cfg.lambda_range, vec![1, 2, 3]);
        assert_eq!(cfg.format, ReportFormat::Json);
        let j = ExperimentConfig::parse(r#"{"group": "heisenberg", "s": "auto", "lambda_range": [1, 2], "trials": 5}"#).unwrap();
        assert_eq!(j.group, GroupSpec::Heisenberg);
        assert_eq!(j.s, SChoice::Auto);
        assert_eq!(j.trials, 5);
        assert_eq!(parse_lambda_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert!(ExperimentConfig::parse("colour = red\n").is_err());
        assert!(ExperimentConfig::parse(r#"{"colour": 1}"#).is_err());
        assert!(ExperimentConfig::parse("s = 0\n").is_err());
    }

    #[test]
    fn validation() {
        assert!(small(vec![]).validate().is_err());
        assert!(small(vec![2, 2]).validate().is_err());
        assert!(small(vec![4, 2]).validate().is_err());
        assert!(ExperimentConfig { trials: 0, ..small(vec![1]) }.validate().is_err());
        assert!(small(vec![1, 2]).validate().is_ok());
    }

    #[test]
    fn convergence_rows_and_exports() {
        let cfg = small(vec![1, 2, 4]);
        let report = run_convergence(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            let floor = 1.0 / (2 * row.lambda + 1) as f64;
            assert!(row.eps_full.unwrap() >= floor - 1e-15);
            assert_eq!(row.gh_bound.unwrap(), 2.0 * row.eps_full.unwrap().max(row.eps_trunc.unwrap()));
        }
        assert!(report.rows.windows(2).all(|w| w[1].folner_eps < w[0].folner_eps));
        assert_eq!(run_convergence(&cfg).unwrap(), report);
        let csv = report_csv(&report);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,3,0.333333333333,"));
        let json = report_json(&report).unwrap();
        assert_eq!(parse_report_json(&json).unwrap(), report);
    }

    #[test]
    fn skipped_rows() {
        let cfg = ExperimentConfig { group: GroupSpec::FreeAbelian(2), ball_cap: 100, ..small(vec![1, 10]) };
        let report = run_convergence(&cfg).unwrap();
        assert!(!report.rows[0].skipped);
        assert!(report.rows[1].skipped);
        assert_eq!(report_csv(&report).lines().count(), 2);
        let empty = ConvergenceReport { rows: vec![], ..report };
        assert_eq!(report_csv(&empty), format!("{CSV_HEADER}\n"));
    }
}
