//! Metrics CSV and summary persistence.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which parses back
//! to the identical `f64`; NaN and infinities are written as `NaN`, `inf`
//! and `-inf`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{GalaError, Result};

use super::run::MetricsRow;
use super::sweep::SummaryRecord;

pub const CSV_HEADER: [&str; 10] = [
    "step",
    "loss",
    "grad_norm",
    "eta",
    "alignment",
    "lipschitz_local",
    "lipschitz_tilde",
    "grad_evals",
    "wall_nanos",
    "diverged",
];

/// Optional trailing column, present only when a run logs it.
pub const HELD_OUT_COLUMN: &str = "held_out_loss";

pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| GalaError::io(dir, e)),
        _ => Ok(()),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> GalaError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => GalaError::io(path, io),
        other => GalaError::Parse {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

/// Writes a metrics CSV with the fixed header (plus `held_out_loss` when
/// any row carries it).
pub fn emit_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    create_parent(path)?;
    let file = File::create(path).map_err(|e| GalaError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let held_out = rows.iter().any(|r| r.held_out_loss.is_some());
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if held_out {
        header.push(HELD_OUT_COLUMN);
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let mut rec = vec![
            r.step.to_string(),
            format_real(r.loss),
            format_real(r.grad_norm),
            format_real(r.eta),
            format_real(r.alignment),
            format_real(r.lipschitz_local),
            format_real(r.lipschitz_tilde),
            r.grad_evals.to_string(),
            r.wall_nanos.to_string(),
            r.diverged.to_string(),
        ];
        if held_out {
            rec.push(format_real(r.held_out_loss.unwrap_or(f64::NAN)));
        }
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| GalaError::io(path, e))
}

/// Parses a metrics CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    let held_out = header.len() == CSV_HEADER.len() + 1 && &header[CSV_HEADER.len()] == HELD_OUT_COLUMN;
    if !header.iter().take(CSV_HEADER.len()).eq(CSV_HEADER.iter().copied())
        || !(header.len() == CSV_HEADER.len() || held_out)
    {
        return Err(GalaError::Parse {
            path: path.to_path_buf(),
            reason: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = |col: &str| GalaError::Parse {
            path: path.to_path_buf(),
            reason: format!("row {}: bad `{col}` value", line + 1),
        };
        let real = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        let int = |i: usize| rec[i].parse::<u64>().map_err(|_| bad(CSV_HEADER[i]));
        rows.push(MetricsRow {
            step: int(0)?,
            loss: real(1)?,
            grad_norm: real(2)?,
            eta: real(3)?,
            alignment: real(4)?,
            lipschitz_local: real(5)?,
            lipschitz_tilde: real(6)?,
            grad_evals: int(7)?,
            wall_nanos: int(8)?,
            diverged: rec[9].parse::<bool>().map_err(|_| bad(CSV_HEADER[9]))?,
            held_out_loss: if held_out {
                Some(rec[10].parse::<f64>().map_err(|_| bad(HELD_OUT_COLUMN))?)
            } else {
                None
            },
        });
    }
    Ok(rows)
}

/// Writes one JSON object per summary record per line.
pub fn emit_summary(records: &[SummaryRecord], path: &Path) -> Result<()> {
    create_parent(path)?;
    let file = File::create(path).map_err(|e| GalaError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| GalaError::Inconsistent(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| GalaError::io(path, e))?;
    }
    w.flush().map_err(|e| GalaError::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRecord>> {
    let text = fs::read_to_string(path).map_err(|e| GalaError::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| GalaError::Parse {
                path: path.to_path_buf(),
                reason: format!("line {}: {e}", i + 1),
            })
        })
        .collect()
}
