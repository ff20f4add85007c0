//! Sharp regression discontinuity on a 24-point event window.
//!
//! The model is
//!
//! ```text
//! y(t) = b0 + b1*t + b2*I(t > 0) + b3*t*I(t > 0)
//! ```
//!
//! fitted by least squares over `t in {-12..-1, 1..12}`. `b2` is the jump in
//! intercepts at the release, reported relative to the pre-release intercept
//! (`100 * b2 / b0`, so 100% is a doubling).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{EventWindow, WINDOW_LEN};
use crate::stats::{f_sf, ols_fit, t_sf_two_sided, Design, StatsError};

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Pre-release intercepts at or below this magnitude make the relative ATE undefined.
pub const BASELINE_EPSILON: f64 = 1e-6;

const N_PARAMS: usize = 4;
// Fits whose residual norm is this small relative to the response are treated as exact.
const EXACT_FIT_RTOL: f64 = 1e-10;
const EXACT_COEF_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RddError {
    #[error("window {borrowed_id}@{release} is all zero")]
    DegenerateWindow { borrowed_id: String, release: String },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RddFit {
    pub beta0_intercept: f64,
    pub beta1_trend: f64,
    pub beta2_jump: f64,
    pub beta3_trend_change: f64,
    #[serde(with = "crate::float_serde::array4")]
    pub standard_errors: [f64; 4],
    pub residual_sum_squares: f64,
    #[serde(with = "crate::float_serde")]
    pub t_stat_jump: f64,
    pub p_value_jump: f64,
    /// Whole-model F test against the intercept-only model. Reported only.
    #[serde(with = "crate::float_serde")]
    pub f_stat_model: f64,
    pub p_value_model: f64,
    /// `None` when the intercept is too close to zero for a ratio.
    pub ate_relative_pct: Option<f64>,
    pub alpha: f64,
    pub significant: bool,
    pub outlier: bool,
}

impl RddFit {
    pub fn coefficients(&self) -> [f64; 4] {
        [
            self.beta0_intercept,
            self.beta1_trend,
            self.beta2_jump,
            self.beta3_trend_change,
        ]
    }

    /// Pre-release regression line at `t`.
    pub fn fitted_pre(&self, t: f64) -> f64 {
        self.beta0_intercept + self.beta1_trend * t
    }

    /// Post-release regression line at `t`.
    pub fn fitted_post(&self, t: f64) -> f64 {
        self.beta0_intercept
            + self.beta2_jump
            + (self.beta1_trend + self.beta3_trend_change) * t
    }

    pub fn fitted(&self, t: f64) -> f64 {
        if t > 0.0 {
            self.fitted_post(t)
        } else {
            self.fitted_pre(t)
        }
    }
}

/// Columns `[1, t, I(t>0), t*I(t>0)]` over the window offsets.
pub fn rdd_design() -> Design {
    let rows: Vec<[f64; 4]> = EventWindow::offsets()
        .map(|t| {
            let t = f64::from(t);
            let post = if t > 0.0 { 1.0 } else { 0.0 };
            [1.0, t, post, t * post]
        })
        .collect();
    Design::from_rows(&rows).expect("fixed-shape design")
}

pub fn fit_rdd(window: &EventWindow, alpha: f64) -> Result<RddFit, RddError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RddError::InvalidAlpha(alpha));
    }
    if window.is_all_zero() {
        return Err(RddError::DegenerateWindow {
            borrowed_id: window.borrowed_id.clone(),
            release: window.release.to_string(),
        });
    }
    let y = window.values();
    let fit = ols_fit(&rdd_design(), &y)?;
    let df = fit.degrees_of_freedom;
    debug_assert_eq!(df, WINDOW_LEN - N_PARAMS);

    let b = &fit.coefficients;
    let se = [
        fit.standard_errors[0],
        fit.standard_errors[1],
        fit.standard_errors[2],
        fit.standard_errors[3],
    ];
    let ssr = fit.residual_sum_squares;
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let y_max = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let exact = ssr.sqrt() <= EXACT_FIT_RTOL * y_norm;

    let t_stat_jump = if exact {
        if b[2].abs() > EXACT_COEF_RTOL * y_max {
            f64::INFINITY.copysign(b[2])
        } else {
            0.0
        }
    } else {
        b[2] / se[2]
    };
    let p_value_jump = t_sf_two_sided(t_stat_jump, df)?;

    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let model_df = N_PARAMS - 1;
    let f_stat_model = if exact {
        if tss.sqrt() > EXACT_FIT_RTOL * y_norm {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (((tss - ssr) / model_df as f64) / (ssr / df as f64)).max(0.0)
    };
    let p_value_model = f_sf(f_stat_model, model_df, df)?;

    let ate_relative_pct =
        (b[0].abs() > BASELINE_EPSILON).then(|| 100.0 * b[2] / b[0]);
    let outlier = window.has_zero_baseline() || b[0].abs() < BASELINE_EPSILON;

    Ok(RddFit {
        beta0_intercept: b[0],
        beta1_trend: b[1],
        beta2_jump: b[2],
        beta3_trend_change: b[3],
        standard_errors: se,
        residual_sum_squares: ssr,
        t_stat_jump,
        p_value_jump,
        f_stat_model,
        p_value_model,
        ate_relative_pct,
        alpha,
        significant: p_value_jump < alpha,
        outlier,
    })
}
