use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Disposition, PairReport, PipelineError};
use crate::rdd::RddFit;
use crate::series::EventWindow;

pub const PAIR_HEADER: &str = "t,observed,fitted_pre,fitted_post";
pub const HISTOGRAM_HEADER: &str =
    "pair_index,borrowed_id,borrowee_id,ate_relative_pct,sign,log10_abs_ate";
pub const HISTOGRAM_FILE: &str = "ate_histogram.csv";

pub fn pair_file_name(index: usize) -> String {
    format!("pair_{index:04}.csv")
}

/// Observed window values with both regression lines evaluated at every offset.
pub fn write_pair_csv<W: Write>(mut out: W, window: &EventWindow, fit: &RddFit) -> std::io::Result<()> {
    writeln!(out, "{PAIR_HEADER}")?;
    for (t, y) in window.points() {
        let tf = f64::from(t);
        writeln!(out, "{t},{y},{},{}", fit.fitted_pre(tf), fit.fitted_post(tf))?;
    }
    out.flush()
}

/// One row per RDD-significant analyzed pair with a finite, non-zero ATE.
pub fn write_histogram_csv<W: Write>(mut out: W, reports: &[PairReport]) -> std::io::Result<()> {
    writeln!(out, "{HISTOGRAM_HEADER}")?;
    for r in reports {
        if r.disposition != Disposition::Analyzed {
            continue;
        }
        let Some(fit) = r.rdd.as_ref().filter(|f| f.significant) else {
            continue;
        };
        let Some(ate) = fit.ate_relative_pct.filter(|a| a.is_finite() && *a != 0.0) else {
            continue;
        };
        let sign = if ate > 0.0 { "positive" } else { "negative" };
        writeln!(
            out,
            "{},{},{},{ate},{sign},{}",
            r.index,
            csv_field(&r.edge.borrowed_id),
            csv_field(&r.edge.borrowee_id),
            ate.abs().log10()
        )?;
    }
    out.flush()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `pair_NNNN.csv` for every pair with a fitted window and the
/// histogram file. Returns the paths written, histogram last.
pub fn emit_plot_data(reports: &[PairReport], out_dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for r in reports {
        if let (Some(window), Some(fit)) = (&r.window, &r.rdd) {
            let path = out_dir.join(pair_file_name(r.index));
            write_pair_csv(BufWriter::new(File::create(&path)?), window, fit)?;
            written.push(path);
        }
    }
    let path = out_dir.join(HISTOGRAM_FILE);
    write_histogram_csv(BufWriter::new(File::create(&path)?), reports)?;
    written.push(path);
    Ok(written)
}
