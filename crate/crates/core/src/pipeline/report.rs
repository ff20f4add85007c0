use std::io::{BufRead, Write};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Disposition, PairReport, PipelineError};

/// Lower edge of the first `log10 |ATE %|` bin.
pub const HISTOGRAM_LOW: f64 = -1.0;
/// Upper edge of the last bin.
pub const HISTOGRAM_HIGH: f64 = 4.0;
pub const HISTOGRAM_STEP: f64 = 0.25;

/// Counts of `log10 |ATE %|` over RDD-significant analyzed pairs.
/// Values outside the edges land in the end bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AteHistogram {
    pub edges: Vec<f64>,
    pub positive: Vec<u64>,
    pub negative: Vec<u64>,
    pub total: u64,
}

impl AteHistogram {
    pub fn new() -> Self {
        let n = ((HISTOGRAM_HIGH - HISTOGRAM_LOW) / HISTOGRAM_STEP).round() as usize;
        let edges = (0..=n)
            .map(|i| HISTOGRAM_LOW + i as f64 * HISTOGRAM_STEP)
            .collect();
        Self {
            edges,
            positive: vec![0; n],
            negative: vec![0; n],
            total: 0,
        }
    }

    pub fn bin_of(&self, log10_abs: f64) -> usize {
        let n = self.positive.len();
        let k = ((log10_abs - HISTOGRAM_LOW) / HISTOGRAM_STEP).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(n - 1)
        }
    }

    /// Adds one ATE; zero and non-finite values are skipped.
    pub fn add(&mut self, ate_pct: f64) -> bool {
        if !ate_pct.is_finite() || ate_pct == 0.0 {
            return false;
        }
        let bin = self.bin_of(ate_pct.abs().log10());
        if ate_pct > 0.0 {
            self.positive[bin] += 1;
        } else {
            self.negative[bin] += 1;
        }
        self.total += 1;
        true
    }
}

impl Default for AteHistogram {
    fn default() -> Self {
        Self::new()
    }
}

/// Tallies over one run. The causal counts cover analyzed pairs only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub total_pairs: usize,
    pub analyzed: usize,
    pub outliers: usize,
    pub dropped_unlinked: usize,
    pub dropped_window: usize,
    pub dropped_all_zero: usize,
    pub failed: usize,
    pub rdd_significant_count: usize,
    pub granger_causal_count: usize,
    pub either_causal_count: usize,
    pub both_causal_count: usize,
    pub ate_histogram: AteHistogram,
}

impl RunSummary {
    pub fn is_conserved(&self) -> bool {
        self.total_pairs
            == self.analyzed
                + self.outliers
                + self.dropped_unlinked
                + self.dropped_window
                + self.dropped_all_zero
                + self.failed
    }
}

pub fn summarize(reports: &[PairReport]) -> RunSummary {
    let mut s = RunSummary {
        total_pairs: reports.len(),
        analyzed: 0,
        outliers: 0,
        dropped_unlinked: 0,
        dropped_window: 0,
        dropped_all_zero: 0,
        failed: 0,
        rdd_significant_count: 0,
        granger_causal_count: 0,
        either_causal_count: 0,
        both_causal_count: 0,
        ate_histogram: AteHistogram::new(),
    };
    for r in reports {
        match r.disposition {
            Disposition::Analyzed => s.analyzed += 1,
            Disposition::Outlier => s.outliers += 1,
            Disposition::DroppedUnlinked => s.dropped_unlinked += 1,
            Disposition::DroppedWindow => s.dropped_window += 1,
            Disposition::DroppedAllZero => s.dropped_all_zero += 1,
            Disposition::Failed => s.failed += 1,
        }
        if r.disposition != Disposition::Analyzed {
            continue;
        }
        let rdd = r.rdd.as_ref().is_some_and(|f| f.significant);
        let granger = r.granger.as_ref().is_some_and(|g| g.causal);
        s.rdd_significant_count += rdd as usize;
        s.granger_causal_count += granger as usize;
        s.either_causal_count += (rdd || granger) as usize;
        s.both_causal_count += (rdd && granger) as usize;
        if rdd {
            if let Some(ate) = r.rdd.as_ref().and_then(|f| f.ate_relative_pct) {
                s.ate_histogram.add(ate);
            }
        }
    }
    assert!(s.is_conserved(), "pair dispositions do not add up");
    s
}

/// Writes one JSON document per line, in report order.
pub fn write_reports<W: Write>(mut out: W, reports: &[PairReport]) -> Result<(), PipelineError> {
    for r in reports {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_reports<R: BufRead>(input: R) -> Result<Vec<PairReport>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| PipelineError::Config(format!("reports line {}: {e}", i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

/// Run provenance kept apart from the deterministic outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub config_path: Option<String>,
    pub jobs: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_edges_and_clamping() {
        let mut h = AteHistogram::new();
        assert_eq!(h.edges.len(), 21);
        assert_eq!(h.edges[0], -1.0);
        assert_eq!(*h.edges.last().unwrap(), 4.0);
        assert!(h.add(200.0));
        assert!(h.add(-0.001));
        assert!(h.add(1e9));
        assert!(!h.add(0.0));
        assert!(!h.add(f64::NAN));
        // log10(200) = 2.30 -> bin 13
        assert_eq!(h.positive[13], 1);
        assert_eq!(h.negative[0], 1);
        assert_eq!(h.positive[19], 1);
        assert_eq!(h.total, 3);
    }

    #[test]
    fn empty_summary_is_conserved() {
        let s = summarize(&[]);
        assert_eq!(s.total_pairs, 0);
        assert!(s.is_conserved());
    }
}
