use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::catalog::LinkConfig;
use crate::granger::DEFAULT_MAX_LAG;
use crate::rdd::DEFAULT_ALPHA;

/// Environment variable that overrides `cache_dir`.
pub const CACHE_DIR_ENV: &str = "BORROWSCOPE_CACHE_DIR";

/// Which series the Granger test runs on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrangerMode {
    /// The same 24-point windows the RDD uses.
    #[default]
    Windowed,
    /// Full fetched histories, trimmed to their common months.
    Full,
}

impl fmt::Display for GrangerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrangerMode::Windowed => "windowed",
            GrangerMode::Full => "full",
        })
    }
}

impl FromStr for GrangerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "windowed" => Ok(GrangerMode::Windowed),
            "full" => Ok(GrangerMode::Full),
            other => Err(format!("unknown granger mode {other:?} (windowed|full)")),
        }
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_max_lag() -> usize {
    DEFAULT_MAX_LAG
}

fn default_jobs() -> usize {
    1
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_rps() -> f64 {
    5.0
}

/// Run configuration, read from TOML. Relative paths are resolved against
/// the directory holding the config file.
///
/// ```toml
/// edges = "edges.tsv"          # borrowed_id, borrowee_id, kind, release
/// songs = "songs.tsv"          # song_id, title, artist[, release]
/// entity_fixture = "entities.json"
/// cache_dir = "cache"
/// out_dir = "out"
/// alpha = 0.05
/// max_lag = 10
/// granger_mode = "windowed"    # or "full"
/// jobs = 4
///
/// [link]
/// similarity_threshold = 0.55
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub edges: PathBuf,
    pub songs: PathBuf,
    /// Offline entity fixture (JSON).
    #[serde(default)]
    pub entity_fixture: Option<PathBuf>,
    /// Live action-API endpoint; needs the `wikidata-http` feature.
    #[serde(default)]
    pub entity_endpoint: Option<String>,
    #[serde(default = "default_rps")]
    pub requests_per_second: f64,
    pub cache_dir: PathBuf,
    /// Directory of CSV exports named by percent-encoded MID, imported before analysis.
    #[serde(default)]
    pub csv_dir: Option<PathBuf>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
    #[serde(default)]
    pub granger_mode: GrangerMode,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub link: LinkConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies the cache-directory environment override.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut cfg = Self::from_toml(&text, base)?;
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            cfg.cache_dir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.edges);
        join(&mut self.songs);
        join(&mut self.cache_dir);
        join(&mut self.out_dir);
        if let Some(p) = self.entity_fixture.as_mut() {
            join(p);
        }
        if let Some(p) = self.csv_dir.as_mut() {
            join(p);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.max_lag == 0 {
            return bad("max_lag must be >= 1".into());
        }
        if self.jobs == 0 {
            return bad("jobs must be >= 1".into());
        }
        match (&self.entity_fixture, &self.entity_endpoint) {
            (None, None) => bad("one of entity_fixture or entity_endpoint is required".into()),
            (Some(_), Some(_)) => bad("entity_fixture and entity_endpoint are exclusive".into()),
            _ => Ok(()),
        }
    }
}
