//! File formats: pretty JSON, RFC-4180 CSV and a static SVG line chart.
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes.

mod svg;

use std::path::Path;

use serde::Serialize;

use crate::entropy::EntropyEstimate;
use crate::error::Result;
use crate::measures::{EmpiricalMeasure, GridMeasure};
use crate::oseledets::LyapunovSpectrum;
use crate::sweep::SweepResult;

pub use svg::sweep_svg;

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn spectrum_csv(s: &LyapunovSpectrum) -> Result<String> {
    csv_string(
        &["index", "exponent", "std_error"],
        s.exponents
            .iter()
            .zip(&s.std_error)
            .enumerate()
            .map(|(i, (e, se))| vec![(i + 1).to_string(), num(*e), num(*se)]),
    )
}

pub fn entropy_csv(estimates: &[EntropyEstimate]) -> Result<String> {
    csv_string(
        &["method", "value", "std_error"],
        estimates.iter().map(|e| vec![e.method.as_str().to_string(), num(e.value), num(e.std_error)]),
    )
}

/// One row per point: coordinates `x0..`, then the weight.
pub fn empirical_csv(m: &EmpiricalMeasure) -> Result<String> {
    let d = m.space.dim();
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.push("weight".into());
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &h,
        m.points.iter().zip(&m.weights).map(|(p, w)| {
            let mut r: Vec<String> = p.as_slice().iter().map(|v| num(*v)).collect();
            r.push(num(*w));
            r
        }),
    )
}

/// One row per cell: index, per-axis bounds, density.
pub fn grid_csv(g: &GridMeasure) -> Result<String> {
    let d = g.space.dim();
    let mut header = vec!["cell".to_string()];
    for i in 0..d {
        header.push(format!("lo{i}"));
        header.push(format!("hi{i}"));
    }
    header.push("density".into());
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &h,
        (0..g.cells()).map(|c| {
            let mut r = vec![c.to_string()];
            for (lo, hi) in g.cell_bounds(c) {
                r.push(num(lo));
                r.push(num(hi));
            }
            r.push(num(g.density[c]));
            r
        }),
    )
}

/// Columns `t, method, value, std_error, weak_star_prev, flags`; one row per
/// grid point and estimator (a single row with empty values for failed
/// points). Flags are `;`-separated: `error=…`, `usc_witness`, `max_gap`.
pub fn sweep_csv(r: &SweepResult) -> Result<String> {
    let mut rows = Vec::new();
    let witness: Vec<usize> = r.usc.witnesses.iter().map(|w| w.index).collect();
    for row in &r.rows {
        if let Some(e) = &row.error {
            rows.push(vec![num(row.t), String::new(), String::new(), String::new(), opt(row.weak_star_prev), format!("error={e}")]);
            continue;
        }
        for est in &row.estimates {
            let mut flags = Vec::new();
            if est.method == r.usc.method && witness.contains(&row.index) {
                flags.push("usc_witness".to_string());
            }
            if let Some(c) = &r.continuity {
                if est.method == c.method && row.t == c.location.1 {
                    flags.push("max_gap".to_string());
                }
            }
            rows.push(vec![
                num(row.t),
                est.method.as_str().to_string(),
                num(est.value),
                num(est.std_error),
                opt(row.weak_star_prev),
                flags.join(";"),
            ]);
        }
    }
    csv_string(&["t", "method", "value", "std_error", "weak_star_prev", "flags"], rows)
}
