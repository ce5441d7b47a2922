//! CSV emission of the diagnostic time series.
//!
//! Values are printed with Rust's shortest round-trip float formatting, so
//! reading the file back reproduces the exact f64 bit patterns.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::ensemble::MomentSeries;
use crate::error::{MvpsError, Result};

fn exponent_label(k: f64) -> String {
    if k.fract() == 0.0 {
        format!("{}", k as i64)
    } else {
        format!("{k}")
    }
}

/// Render the series as CSV text:
/// `t,M0,M1,...,energy,E_L2,E_L3p5,E_weak32` plus `E_max`, `rho_max` and one
/// `E_L{p}` column per extra field-norm exponent.
pub fn series_to_csv(series: &MomentSeries) -> Result<String> {
    let first = series
        .records
        .first()
        .ok_or_else(|| MvpsError::MissingHistory("empty series has no CSV form".into()))?;
    let mut out = String::new();
    out.push('t');
    for &(k, _) in &first.moments {
        write!(out, ",M{}", exponent_label(k)).unwrap();
    }
    out.push_str(",energy,E_L2,E_L3p5,E_weak32,E_max,rho_max");
    for &(p, _) in &first.e_norms {
        write!(out, ",E_L{}", exponent_label(p)).unwrap();
    }
    out.push('\n');
    for rec in &series.records {
        write!(out, "{}", rec.t).unwrap();
        for &(_, m) in &rec.moments {
            write!(out, ",{m}").unwrap();
        }
        write!(
            out,
            ",{},{},{},{},{},{}",
            rec.energy, rec.e_l2, rec.e_l3p5, rec.e_weak32, rec.e_max, rec.rho_max
        )
        .unwrap();
        for &(_, n) in &rec.e_norms {
            write!(out, ",{n}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_series(path: &Path, series: &MomentSeries) -> Result<()> {
    let text = series_to_csv(series)?;
    fs::write(path, text)
        .map_err(|e| MvpsError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Parse a CSV produced by [`series_to_csv`] back into (header, rows).
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| MvpsError::Config("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.parse::<f64>().map_err(|e| {
                    MvpsError::Config(format!("CSV row {}: bad number '{cell}': {e}", i + 2))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(MvpsError::Config(format!(
                "CSV row {} has {} cells, header has {}",
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
