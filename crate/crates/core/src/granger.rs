//! Granger causality via nested autoregressions and the SSR F-test.
//!
//! For each lag `L` the restricted model regresses `target[t]` on a constant
//! and `target[t-1..=t-L]`; the unrestricted model adds `predictor[t-1..=t-L]`.
//! Both are fitted on the same `T - L` rows, so
//!
//! ```text
//! F = ((SSR_r - SSR_u) / L) / (SSR_u / (T - 3L - 1))
//! ```
//!
//! with `(L, T - 3L - 1)` degrees of freedom. Lags whose denominator degrees
//! of freedom would drop below one are not tested.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{MonthKey, MonthlySeries};
use crate::stats::{f_sf, ols_fit, Design, StatsError};

pub const DEFAULT_MAX_LAG: usize = 10;
pub const MIN_SERIES_LEN: usize = 5;
/// `SSR_u` below this fraction of `SSR_r` counts as a perfect fit.
pub const PERFECT_FIT_RATIO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrangerError {
    #[error("series lengths differ: target {target}, predictor {predictor}")]
    LengthMismatch { target: usize, predictor: usize },
    #[error("series has {0} points, need at least {MIN_SERIES_LEN}")]
    SeriesTooShort(usize),
    #[error("target series has zero variance")]
    DegenerateTarget,
    #[error("max_lag must be at least 1")]
    InvalidMaxLag,
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("series do not overlap in time")]
    NoOverlap,
    #[error("lag {lag}: {source}")]
    Regression { lag: usize, source: StatsError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagTest {
    pub lag: usize,
    #[serde(with = "crate::float_serde")]
    pub f_stat: f64,
    pub p_value: f64,
    pub df1: usize,
    pub df2: usize,
    pub ssr_restricted: f64,
    pub ssr_unrestricted: f64,
    pub perfect_fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub per_lag: Vec<LagTest>,
    pub series_len: usize,
    pub max_lag_requested: usize,
    pub max_lag_used: usize,
    pub alpha: f64,
    pub causal: bool,
    pub perfect_fit_flag: bool,
}

impl GrangerResult {
    pub fn min_p_value(&self) -> f64 {
        self.per_lag.iter().map(|l| l.p_value).fold(1.0, f64::min)
    }

    pub fn lag(&self, lag: usize) -> Option<&LagTest> {
        self.per_lag.iter().find(|l| l.lag == lag)
    }
}

/// Largest lag with `T - 3L - 1 >= 1`, capped at `max_lag`.
pub fn feasible_max_lag(series_len: usize, max_lag: usize) -> usize {
    let cap = series_len.saturating_sub(2) / 3;
    cap.min(max_lag)
}

/// Tests whether `predictor` Granger-causes `target`.
pub fn granger_test(
    target: &[f64],
    predictor: &[f64],
    max_lag: usize,
    alpha: f64,
) -> Result<GrangerResult, GrangerError> {
    if target.len() != predictor.len() {
        return Err(GrangerError::LengthMismatch {
            target: target.len(),
            predictor: predictor.len(),
        });
    }
    let len = target.len();
    if len < MIN_SERIES_LEN {
        return Err(GrangerError::SeriesTooShort(len));
    }
    if max_lag == 0 {
        return Err(GrangerError::InvalidMaxLag);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GrangerError::InvalidAlpha(alpha));
    }
    if target.iter().all(|&v| v == target[0]) {
        return Err(GrangerError::DegenerateTarget);
    }

    let feasible = feasible_max_lag(len, max_lag);
    if feasible < max_lag {
        log::debug!("granger: capping max_lag {max_lag} -> {feasible} for series of length {len}");
    }

    let mut per_lag = Vec::with_capacity(feasible);
    for lag in 1..=feasible {
        match test_lag(target, predictor, lag) {
            Ok(t) => per_lag.push(t),
            // a collinear lag design ends the scan; lag 1 must always fit
            Err(GrangerError::Regression {
                source: StatsError::RankDeficient { .. },
                ..
            }) if lag > 1 => {
                log::debug!("granger: lag {lag} design is rank deficient, stopping at {}", lag - 1);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let max_lag_used = per_lag.len();
    let causal = per_lag.iter().any(|l| l.p_value < alpha);
    let perfect_fit_flag = per_lag.iter().any(|l| l.perfect_fit);
    Ok(GrangerResult {
        per_lag,
        series_len: len,
        max_lag_requested: max_lag,
        max_lag_used,
        alpha,
        causal,
        perfect_fit_flag,
    })
}

fn test_lag(target: &[f64], predictor: &[f64], lag: usize) -> Result<LagTest, GrangerError> {
    let len = target.len();
    let rows = len - lag;
    let response = &target[lag..];

    let mut restricted = Vec::with_capacity(rows);
    let mut unrestricted = Vec::with_capacity(rows);
    for t in lag..len {
        let mut row = Vec::with_capacity(2 * lag + 1);
        row.push(1.0);
        row.extend((1..=lag).map(|k| target[t - k]));
        restricted.push(row.clone());
        row.extend((1..=lag).map(|k| predictor[t - k]));
        unrestricted.push(row);
    }
    let reg = |source| GrangerError::Regression { lag, source };
    let fit_r = ols_fit(&Design::from_rows(&restricted).map_err(reg)?, response).map_err(reg)?;
    let fit_u = ols_fit(&Design::from_rows(&unrestricted).map_err(reg)?, response).map_err(reg)?;

    let ssr_r = fit_r.residual_sum_squares;
    let ssr_u = fit_u.residual_sum_squares;
    let df1 = lag;
    let df2 = fit_u.degrees_of_freedom;
    debug_assert_eq!(df2, len - 3 * lag - 1);

    let scale: f64 = response.iter().map(|v| v * v).sum();
    let (f_stat, p_value, perfect_fit) = if ssr_r <= PERFECT_FIT_RATIO * PERFECT_FIT_RATIO * scale {
        // target already explained by its own past; lagged predictor adds nothing
        (0.0, 1.0, false)
    } else if ssr_u < PERFECT_FIT_RATIO * ssr_r {
        (f64::INFINITY, 0.0, true)
    } else {
        let f = (((ssr_r - ssr_u) / df1 as f64) / (ssr_u / df2 as f64)).max(0.0);
        (f, f_sf(f, df1, df2).map_err(reg)?, false)
    };
    Ok(LagTest {
        lag,
        f_stat,
        p_value,
        df1,
        df2,
        ssr_restricted: ssr_r,
        ssr_unrestricted: ssr_u,
        perfect_fit,
    })
}

/// Two series cut to their shared month range.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub start: MonthKey,
    pub target: Vec<f64>,
    pub predictor: Vec<f64>,
    /// Months dropped from the target and predictor respectively.
    pub trimmed: (usize, usize),
}

pub fn align_series(
    target: &MonthlySeries,
    predictor: &MonthlySeries,
) -> Result<AlignedPair, GrangerError> {
    let (t_end, p_end) = match (target.end(), predictor.end()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(GrangerError::NoOverlap),
    };
    let start = target.start().max(predictor.start());
    let end = t_end.min(p_end);
    if end < start {
        return Err(GrangerError::NoOverlap);
    }
    let t = target.slice(start, end);
    let p = predictor.slice(start, end);
    let trimmed = (target.len() - t.len(), predictor.len() - p.len());
    if trimmed != (0, 0) {
        log::debug!(
            "granger: aligned {} / {} to {start}..{end}, dropped {} / {} months",
            target.entity_id(),
            predictor.entity_id(),
            trimmed.0,
            trimmed.1
        );
    }
    Ok(AlignedPair {
        start,
        target: t.values().to_vec(),
        predictor: p.values().to_vec(),
        trimmed,
    })
}
