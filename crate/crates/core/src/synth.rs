//! Synthetic series with planted ground truth.
//!
//! Noise comes from SplitMix64 (a counter-based 64-bit generator) fed through
//! Box–Muller, so the same seed gives the same draws on every platform and in
//! any language that implements the same recipe.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{EventWindow, MonthKey, HALF_WINDOW};

/// Identifier of the noise recipe; bump when the draw sequence changes.
pub const GENERATOR: &str = "splitmix64-boxmuller/v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("domain error: {0}")]
    DomainError(String),
}

/// SplitMix64: the k-th output is a bijective mix of `seed + k * gamma`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal draws, two per Box–Muller transform.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_open01();
        let u2 = self.rng.next_open01();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn next_normal(&mut self, mean: f64, sigma: f64) -> f64 {
        mean + sigma * self.next_standard()
    }
}

fn default_release() -> MonthKey {
    MonthKey::new(2000, 1).expect("valid month")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RddScenario {
    /// `(b0, b1, b2, b3)` of the window model.
    pub beta: [f64; 4],
    pub noise_sigma: f64,
    pub seed: u64,
    #[serde(default = "default_release")]
    pub release: MonthKey,
}

impl RddScenario {
    pub fn new(beta: [f64; 4], noise_sigma: f64, seed: u64) -> Self {
        Self {
            beta,
            noise_sigma,
            seed,
            release: default_release(),
        }
    }

    /// Noise-free model value at offset `t`.
    pub fn mean_at(&self, t: i32) -> f64 {
        let [b0, b1, b2, b3] = self.beta;
        let t = f64::from(t);
        let post = if t > 0.0 { 1.0 } else { 0.0 };
        b0 + b1 * t + b2 * post + b3 * t * post
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerScenario {
    pub coupling: f64,
    pub lag: usize,
    pub length: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

fn check_sigma(sigma: f64) -> Result<(), SynthError> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(SynthError::DomainError(format!(
            "noise sigma must be finite and >= 0, got {sigma}"
        )))
    }
}

/// Window from the forward RDD model. Draws are taken in window order
/// (`t = -12..-1`, then `1..12`). Values may be negative.
pub fn gen_rdd_window(scenario: &RddScenario) -> Result<EventWindow, SynthError> {
    check_sigma(scenario.noise_sigma)?;
    if scenario.beta.iter().any(|b| !b.is_finite()) {
        return Err(SynthError::DomainError("beta must be finite".into()));
    }
    let mut noise = GaussianStream::new(scenario.seed);
    let mut values = EventWindow::offsets().map(|t| {
        let eps = if scenario.noise_sigma > 0.0 {
            noise.next_normal(0.0, scenario.noise_sigma)
        } else {
            0.0
        };
        scenario.mean_at(t) + eps
    });
    let mut pre = [0.0; HALF_WINDOW];
    let mut post = [0.0; HALF_WINDOW];
    pre.iter_mut()
        .chain(post.iter_mut())
        .for_each(|slot| *slot = values.next().expect("24 offsets"));
    Ok(EventWindow {
        borrowed_id: format!("synthetic-borrowed-{}", scenario.seed),
        borrowee_id: format!("synthetic-borrowee-{}", scenario.seed),
        release: scenario.release,
        pre,
        post,
    })
}

/// `(target, predictor)` with `target[t] = coupling * predictor[t - lag] + eps`.
/// The predictor is standard normal; for `t < lag` the target is pure noise.
pub fn gen_granger_pair(scenario: &GrangerScenario) -> Result<(Vec<f64>, Vec<f64>), SynthError> {
    check_sigma(scenario.noise_sigma)?;
    if scenario.lag == 0 {
        return Err(SynthError::DomainError("lag must be >= 1".into()));
    }
    if !scenario.coupling.is_finite() {
        return Err(SynthError::DomainError("coupling must be finite".into()));
    }
    let mut g = GaussianStream::new(scenario.seed);
    let predictor: Vec<f64> = (0..scenario.length).map(|_| g.next_standard()).collect();
    let target = (0..scenario.length)
        .map(|t| {
            let driven = if t >= scenario.lag {
                scenario.coupling * predictor[t - scenario.lag]
            } else {
                0.0
            };
            driven + g.next_normal(0.0, scenario.noise_sigma)
        })
        .collect();
    Ok((target, predictor))
}

/// Scenario file: TOML with `[[rdd]]` and `[[granger]]` tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default)]
    pub rdd: Vec<RddScenario>,
    #[serde(default)]
    pub granger: Vec<GrangerScenario>,
}
