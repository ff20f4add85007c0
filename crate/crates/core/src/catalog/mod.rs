//! Borrowing graph ingestion and song-to-entity linking.

mod entity;
mod graph;
mod resolve;
mod similarity;
pub mod wikidata;

pub use entity::{EntityCandidate, EntitySource, FixtureEntity, FixtureFile, FixtureSource};
pub use graph::{load_graph, load_songs, BorrowingEdge, BorrowingGraph, BorrowingKind, SongRecord};
pub use resolve::{
    best_match, resolve_song, resolve_songs, LinkConfig, MatchDecision, DEFAULT_ALLOWED_CLASSES,
    DEFAULT_SIMILARITY_THRESHOLD,
};
pub use similarity::{normalize_name, ratcliff_obershelp, string_similarity};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: self-loop edge on {song_id}")]
    SelfLoopEdge { line: usize, song_id: String },
    #[error("entity source unavailable: {0}")]
    SourceUnavailable(String),
    #[error("bad fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CatalogError {
    /// Whether retrying the same request may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, CatalogError::SourceUnavailable(_))
    }
}
