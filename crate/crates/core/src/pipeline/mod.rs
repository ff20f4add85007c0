//! End-to-end batch analysis: link songs, load their series, cut windows,
//! and run both estimators on every borrowing pair.
//!
//! Drop rules apply in a fixed order: unlinked endpoints, insufficient window
//! coverage, all-zero windows, and finally the zero-baseline outlier flag.
//! Every input edge yields exactly one [`PairReport`].

mod config;
pub mod demo;
mod plot;
mod report;

pub use config::{GrangerMode, PipelineConfig, CACHE_DIR_ENV};
pub use plot::{emit_plot_data, write_histogram_csv, write_pair_csv};
pub use report::{
    read_reports, summarize, write_reports, AteHistogram, RunMetadata, RunSummary,
};

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    best_match, load_graph, load_songs, resolve_songs, BorrowingEdge, CatalogError, EntitySource,
    FixtureSource, MatchDecision, SongRecord,
};
use crate::granger::{align_series, granger_test, GrangerResult};
use crate::rdd::{fit_rdd, RddFit};
use crate::series::{extract_window, EventWindow, SeriesError};
use crate::trends::{Mid, SeriesSource, TrendsCache, TrendsError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Trends(#[from] TrendsError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Analyzed,
    Outlier,
    DroppedUnlinked,
    DroppedWindow,
    DroppedAllZero,
    /// An estimator returned an error; `detail` carries it.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    /// Position of the edge in the input file (after deduplication).
    pub index: usize,
    pub edge: BorrowingEdge,
    pub disposition: Disposition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub borrowed_mid: Option<Mid>,
    pub borrowee_mid: Option<Mid>,
    /// Borrowed song's 24-point window.
    pub window: Option<EventWindow>,
    pub rdd: Option<RddFit>,
    pub granger: Option<GrangerResult>,
}

impl PairReport {
    fn new(index: usize, edge: &BorrowingEdge) -> Self {
        Self {
            index,
            edge: edge.clone(),
            disposition: Disposition::Failed,
            detail: None,
            borrowed_mid: None,
            borrowee_mid: None,
            window: None,
            rdd: None,
            granger: None,
        }
    }

    fn finish(mut self, disposition: Disposition, detail: Option<String>) -> Self {
        self.disposition = disposition;
        self.detail = detail;
        self
    }
}

/// Knowledge-base link for one song.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SongLink {
    pub song_id: String,
    pub decision: Option<MatchDecision>,
    pub candidates: Vec<MatchDecision>,
}

impl SongLink {
    pub fn mid(&self) -> Option<Mid> {
        self.decision
            .as_ref()
            .and_then(|d| d.freebase_mid.as_deref())
            .and_then(|m| Mid::parse(m).ok())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub links: Vec<SongLink>,
    pub reports: Vec<PairReport>,
    pub summary: RunSummary,
}

impl RunOutput {
    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }
}

/// Estimator settings shared by every pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    pub alpha: f64,
    pub max_lag: usize,
    pub granger_mode: GrangerMode,
}

impl From<&PipelineConfig> for AnalysisParams {
    fn from(c: &PipelineConfig) -> Self {
        Self {
            alpha: c.alpha,
            max_lag: c.max_lag,
            granger_mode: c.granger_mode,
        }
    }
}

fn entity_source(config: &PipelineConfig) -> Result<Box<dyn EntitySource>, PipelineError> {
    if let Some(path) = &config.entity_fixture {
        return Ok(Box::new(FixtureSource::open(path)?));
    }
    #[cfg(feature = "wikidata-http")]
    if let Some(endpoint) = &config.entity_endpoint {
        return Ok(Box::new(crate::catalog::wikidata::WikidataSource::new(
            endpoint.clone(),
            config.requests_per_second,
        )));
    }
    Err(PipelineError::Config(
        "entity_endpoint needs a build with the `wikidata-http` feature".into(),
    ))
}

/// Resolves every song that appears on an edge. Songs absent from the song
/// file get a link without a decision.
pub fn link_songs(
    node_ids: &[String],
    songs: &[SongRecord],
    source: &dyn EntitySource,
    config: &crate::catalog::LinkConfig,
) -> Result<Vec<SongLink>, PipelineError> {
    let by_id: HashMap<&str, &SongRecord> = songs.iter().map(|s| (s.song_id.as_str(), s)).collect();
    let known: Vec<SongRecord> = node_ids
        .iter()
        .filter_map(|id| by_id.get(id.as_str()).map(|s| (*s).clone()))
        .collect();
    let mut resolved: HashMap<String, Vec<MatchDecision>> = known
        .iter()
        .map(|s| s.song_id.clone())
        .zip(resolve_songs(&known, source, config)?)
        .collect();
    Ok(node_ids
        .iter()
        .map(|id| {
            let candidates = resolved.remove(id).unwrap_or_default();
            SongLink {
                song_id: id.clone(),
                decision: best_match(&candidates).cloned(),
                candidates,
            }
        })
        .collect())
}

/// Runs both estimators on one edge.
pub fn analyze_pair(
    index: usize,
    edge: &BorrowingEdge,
    borrowed_mid: Option<Mid>,
    borrowee_mid: Option<Mid>,
    series: &dyn SeriesSource,
    params: AnalysisParams,
) -> PairReport {
    let mut report = PairReport::new(index, edge);
    report.borrowed_mid = borrowed_mid.clone();
    report.borrowee_mid = borrowee_mid.clone();

    let (Some(borrowed_mid), Some(borrowee_mid)) = (borrowed_mid, borrowee_mid) else {
        let which = match (&report.borrowed_mid, &report.borrowee_mid) {
            (None, None) => "both songs",
            (None, _) => "borrowed song",
            _ => "borrowee",
        };
        return report.finish(Disposition::DroppedUnlinked, Some(format!("no entity link for {which}")));
    };

    let load = |mid: &Mid| series.get(mid);
    let (borrowed, borrowee) = match (load(&borrowed_mid), load(&borrowee_mid)) {
        (Ok(Some(a)), Ok(Some(b))) => (a.series, b.series),
        (Err(e), _) | (_, Err(e)) => {
            return report.finish(Disposition::Failed, Some(e.to_string()));
        }
        (a, _) => {
            let missing = if a.ok().flatten().is_none() { &borrowed_mid } else { &borrowee_mid };
            return report.finish(
                Disposition::DroppedUnlinked,
                Some(format!("no series cached for {missing}")),
            );
        }
    };

    let windows = extract_window(&borrowed, edge.release).and_then(|w| {
        extract_window(&borrowee, edge.release).map(|p| (w, p))
    });
    let (window, predictor_window) = match windows {
        Ok((mut w, p)) => {
            w.borrowed_id = edge.borrowed_id.clone();
            w.borrowee_id = edge.borrowee_id.clone();
            (w, p)
        }
        Err(e @ SeriesError::WindowOutOfRange { .. }) => {
            return report.finish(Disposition::DroppedWindow, Some(e.to_string()));
        }
        Err(e) => return report.finish(Disposition::Failed, Some(e.to_string())),
    };
    if window.is_all_zero() || predictor_window.is_all_zero() {
        let which = if window.is_all_zero() { "borrowed" } else { "borrowee" };
        report.window = Some(window);
        return report.finish(
            Disposition::DroppedAllZero,
            Some(format!("{which} window is all zero")),
        );
    }
    report.window = Some(window.clone());

    let rdd = match fit_rdd(&window, params.alpha) {
        Ok(fit) => fit,
        Err(e) => return report.finish(Disposition::Failed, Some(format!("rdd: {e}"))),
    };
    let outlier = rdd.outlier;
    report.rdd = Some(rdd);

    let granger = match params.granger_mode {
        GrangerMode::Windowed => granger_test(
            &window.values(),
            &predictor_window.values(),
            params.max_lag,
            params.alpha,
        ),
        GrangerMode::Full => align_series(&borrowed, &borrowee).and_then(|a| {
            granger_test(&a.target, &a.predictor, params.max_lag, params.alpha)
        }),
    };
    match granger {
        Ok(g) => {
            let note = (g.max_lag_used < g.max_lag_requested).then(|| {
                format!(
                    "granger lags capped at {} of {} requested",
                    g.max_lag_used, g.max_lag_requested
                )
            });
            report.granger = Some(g);
            let disposition = if outlier { Disposition::Outlier } else { Disposition::Analyzed };
            let detail = match (outlier, note) {
                (true, Some(n)) => Some(format!("zero pre-release baseline; {n}")),
                (true, None) => Some("zero pre-release baseline".into()),
                (false, n) => n,
            };
            report.finish(disposition, detail)
        }
        Err(e) => report.finish(Disposition::Failed, Some(format!("granger: {e}"))),
    }
}

/// Analyzes every edge, in input order, on a pool of `jobs` workers.
pub fn analyze_edges(
    edges: &[BorrowingEdge],
    mids: &HashMap<String, Mid>,
    series: &dyn SeriesSource,
    params: AnalysisParams,
    jobs: usize,
) -> Result<Vec<PairReport>, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        edges
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                analyze_pair(
                    i,
                    e,
                    mids.get(&e.borrowed_id).cloned(),
                    mids.get(&e.borrowee_id).cloned(),
                    series,
                    params,
                )
            })
            .collect()
    }))
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    config.validate()?;
    let graph = load_graph(BufReader::new(File::open(&config.edges).map_err(|e| {
        PipelineError::Config(format!("edges {}: {e}", config.edges.display()))
    })?))?;
    let songs = load_songs(BufReader::new(File::open(&config.songs).map_err(|e| {
        PipelineError::Config(format!("songs {}: {e}", config.songs.display()))
    })?))?;

    let source = entity_source(config)?;
    let node_ids: Vec<String> = graph.nodes().map(str::to_string).collect();
    let links = link_songs(&node_ids, &songs, source.as_ref(), &config.link)?;
    let mids: HashMap<String, Mid> = links
        .iter()
        .filter_map(|l| l.mid().map(|m| (l.song_id.clone(), m)))
        .collect();
    log::info!("linked {} of {} songs", mids.len(), node_ids.len());

    let cache = TrendsCache::open(&config.cache_dir)?;
    if let Some(dir) = &config.csv_dir {
        import_csv_dir(&cache, dir)?;
    }

    let edges: Vec<BorrowingEdge> = graph.edges().cloned().collect();
    let reports = analyze_edges(&edges, &mids, &cache, config.into(), config.jobs)?;
    let summary = summarize(&reports);
    debug_assert!(summary.is_conserved());
    Ok(RunOutput {
        links,
        reports,
        summary,
    })
}

pub const REPORTS_FILE: &str = "reports.ldjson";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LINKS_FILE: &str = "links.json";
pub const METADATA_FILE: &str = "metadata.json";
pub const PLOT_DIR: &str = "plots";

/// Writes the deterministic outputs of a run: reports, summary and plot data.
pub fn write_outputs(
    out_dir: &Path,
    reports: &[PairReport],
    summary: &RunSummary,
) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out_dir)?;
    write_reports(
        std::io::BufWriter::new(File::create(out_dir.join(REPORTS_FILE))?),
        reports,
    )?;
    write_json(&out_dir.join(SUMMARY_FILE), summary)?;
    emit_plot_data(reports, &out_dir.join(PLOT_DIR))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::from)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn import_csv_dir(cache: &TrendsCache, dir: &Path) -> Result<(), PipelineError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    let now = chrono::Utc::now();
    for p in paths {
        match cache.import_csv(&p, now) {
            Ok(mid) => log::debug!("imported {} as {mid}", p.display()),
            Err(e) => log::warn!("skipping {}: {e}", p.display()),
        }
    }
    Ok(())
}
