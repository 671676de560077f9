//! Plot-ready CSV emission. One file per series, documented headers,
//! deterministic column and row order.

use std::path::{Path, PathBuf};

use hrt_core::orbit::{DivergenceReport, PairComparison, StripReport};
use hrt_core::{Error, Result};

fn writer(dir: &Path, name: &str) -> Result<(csv::Writer<std::fs::File>, PathBuf)> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Parameter(format!("output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let w = csv::Writer::from_path(&path)
        .map_err(|e| Error::Parameter(format!("csv {}: {e}", path.display())))?;
    Ok((w, path))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: PathBuf) -> Result<PathBuf> {
    w.flush()
        .map_err(|e| Error::Parameter(format!("csv {}: {e}", path.display())))?;
    Ok(path)
}

/// k, Pk, log_ratio: one row per compared sample, ordered by scale then
/// by draw order.
pub fn pair_csv(dir: &Path, samples: &[PairComparison]) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, "pair_Lfit.csv")?;
    w.write_record(["k", "Pk", "log_ratio"]).ok();
    for s in samples {
        w.write_record([
            s.k.to_string(),
            format!("{}", s.p),
            format!("{}", s.log_ratio),
        ])
        .ok();
    }
    finish(w, path)
}

/// N, m_N, inf_avg, ratio_to_log: one row per ladder rung.
pub fn diverge_csv(dir: &Path, report: &DivergenceReport) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, "diverge.csv")?;
    w.write_record(["N", "m_N", "inf_avg", "ratio_to_log"]).ok();
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.m_n.to_string(),
            format!("{}", r.inf_avg),
            format!("{}", r.ratio_to_log),
        ])
        .ok();
    }
    finish(w, path)
}

/// strip_index, count: the occupancy histogram of the deepest scale entry.
pub fn strips_csv(dir: &Path, report: &StripReport) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, "strips.csv")?;
    w.write_record(["strip_index", "count"]).ok();
    for (idx, count) in &report.histogram {
        w.write_record([idx.to_string(), count.to_string()]).ok();
    }
    finish(w, path)
}
