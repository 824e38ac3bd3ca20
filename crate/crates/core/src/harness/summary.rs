use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OutputFormat};
use super::run::{Cell, ReplicationRow};
use crate::error::{Error, Result};

/// One aggregated cell. `reps` counts attempted replications; failed ones
/// are tallied in `failures` and left out of the moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model_label: String,
    pub phi: String,
    pub theta: String,
    pub d0: f64,
    pub n: usize,
    pub alpha: f64,
    pub scheme: Option<String>,
    pub m: Option<usize>,
    pub estimator: String,
    pub knowledge: String,
    pub reps: usize,
    pub bias: Option<f64>,
    pub bias_mc_se: Option<f64>,
    pub rmse: Option<f64>,
    pub failures: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct McSummary {
    pub rows: Vec<SummaryRow>,
    /// Not emitted, so output stays reproducible.
    pub wall_time_secs: f64,
}

impl McSummary {
    /// Row for an estimator and, for jackknife estimators, a scheme and `m`.
    pub fn find(&self, estimator: &str, scheme: Option<&str>, m: Option<usize>) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.scheme.as_deref() == scheme && r.m == m)
    }
}

/// Pairwise (cascade) summation, deterministic for a fixed input order.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

/// Formats with six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding may carry into a new leading digit (9.999995 -> 10.00000).
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// `x` rounded to what [`fmt_sig6`] prints.
pub fn round_sig6(x: f64) -> f64 {
    fmt_sig6(x).parse().unwrap_or(x)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_sig6(*x)).collect::<Vec<_>>().join(";")
}

/// Aggregates replication rows into bias, its Monte Carlo standard error and RMSE.
pub fn summarize(cfg: &ExperimentConfig, cells: &[Cell], rows: &[ReplicationRow]) -> McSummary {
    let d0 = cfg.model.d;
    let out = cells
        .iter()
        .enumerate()
        .map(|(k, cell)| {
            let errs: Vec<f64> = rows.iter().filter_map(|r| r.estimates[k].as_ref().ok()).map(|v| v - d0).collect();
            let ok = errs.len();
            let (bias, se, rmse) = if ok == 0 {
                (None, None, None)
            } else {
                let nf = ok as f64;
                let mean = pairwise_sum(&errs) / nf;
                let sq: Vec<f64> = errs.iter().map(|e| e * e).collect();
                let msq = pairwise_sum(&sq) / nf;
                let se = if ok > 1 {
                    let dev: Vec<f64> = errs.iter().map(|e| (e - mean) * (e - mean)).collect();
                    Some((pairwise_sum(&dev) / (nf - 1.0)).sqrt() / nf.sqrt())
                } else {
                    None
                };
                // sqrt(mean e^2) >= |mean e| in exact arithmetic; the max only
                // absorbs the last-ulp rounding.
                (Some(mean), se, Some(msq.sqrt().max(mean.abs())))
            };
            SummaryRow {
                model_label: cfg.model.label(),
                phi: join(&cfg.model.ar),
                theta: join(&cfg.model.ma),
                d0: round_sig6(d0),
                n: cfg.n,
                alpha: round_sig6(cfg.alpha),
                scheme: cell.scheme.map(|s| s.as_str().to_string()),
                m: cell.m,
                estimator: cell.estimator.as_str().to_string(),
                knowledge: cfg.knowledge.as_str().to_string(),
                reps: rows.len(),
                bias: bias.map(round_sig6),
                bias_mc_se: se.map(round_sig6),
                rmse: rmse.map(round_sig6),
                failures: rows.len() - ok,
                seed: cfg.seed,
            }
        })
        .collect();
    McSummary { rows: out, wall_time_secs: 0.0 }
}

const HEADER: [&str; 16] = [
    "model_label", "phi", "theta", "d0", "n", "alpha", "scheme", "m", "estimator", "knowledge", "reps", "bias",
    "bias_mc_se", "rmse", "failures", "seed",
];

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_sig6).unwrap_or_default()
}

/// CSV or JSON bytes for a summary.
pub fn emit(summary: &McSummary, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(&summary.rows).map_err(|e| Error::Io { path: "<json>".into(), message: e.to_string() })?;
            v.push(b'\n');
            Ok(v)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io { path: "<csv>".into(), message: e.to_string() };
            w.write_record(HEADER).map_err(io)?;
            for r in &summary.rows {
                w.write_record([
                    r.model_label.clone(),
                    r.phi.clone(),
                    r.theta.clone(),
                    fmt_sig6(r.d0),
                    r.n.to_string(),
                    fmt_sig6(r.alpha),
                    r.scheme.clone().unwrap_or_default(),
                    r.m.map(|m| m.to_string()).unwrap_or_default(),
                    r.estimator.clone(),
                    r.knowledge.clone(),
                    r.reps.to_string(),
                    opt_num(r.bias),
                    opt_num(r.bias_mc_se),
                    opt_num(r.rmse),
                    r.failures.to_string(),
                    r.seed.to_string(),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Io { path: "<csv>".into(), message: e.to_string() })
        }
    }
}

/// Parses CSV produced by [`emit`].
pub fn parse_csv(bytes: &[u8]) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let bad = |e: String| Error::Config(format!("malformed summary CSV: {e}"));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let get = |i: usize| rec.get(i).unwrap_or_default().to_string();
        let num = |i: usize| -> Result<f64> { get(i).parse::<f64>().map_err(|e| bad(e.to_string())) };
        let opt = |i: usize| -> Result<Option<f64>> {
            let s = get(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| bad(e.to_string()))
            }
        };
        let int = |i: usize| -> Result<u64> { get(i).parse::<u64>().map_err(|e| bad(e.to_string())) };
        rows.push(SummaryRow {
            model_label: get(0),
            phi: get(1),
            theta: get(2),
            d0: num(3)?,
            n: int(4)? as usize,
            alpha: num(5)?,
            scheme: Some(get(6)).filter(|s| !s.is_empty()),
            m: if get(7).is_empty() { None } else { Some(int(7)? as usize) },
            estimator: get(8),
            knowledge: get(9),
            reps: int(10)? as usize,
            bias: opt(11)?,
            bias_mc_se: opt(12)?,
            rmse: opt(13)?,
            failures: int(14)? as usize,
            seed: int(15)?,
        });
    }
    Ok(rows)
}

/// Parses JSON produced by [`emit`].
pub fn parse_json(bytes: &[u8]) -> Result<Vec<SummaryRow>> {
    serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("malformed summary JSON: {e}")))
}

/// Writes the summary to `path`.
pub fn write_summary(summary: &McSummary, format: OutputFormat, path: &Path) -> Result<()> {
    let bytes = emit(summary, format)?;
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)
}
