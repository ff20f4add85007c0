//! Song-to-entity linking: three searches per song, class filter, then a
//! separate title and artist similarity check.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::{string_similarity, CatalogError, EntityCandidate, EntitySource, SongRecord};

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.55;

/// Musical work, song, composition, single, musical work/composition.
pub const DEFAULT_ALLOWED_CLASSES: &[&str] =
    &["Q2188189", "Q7366", "Q204370", "Q134556", "Q105543609"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkConfig {
    /// Both similarities must be strictly above this.
    pub similarity_threshold: f64,
    pub allowed_classes: BTreeSet<String>,
    /// Results kept per search query.
    pub top_k: usize,
    /// Entity ids per property fetch.
    pub batch_size: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            similarity_threshold: DEFAULT_SIMILARITY_THRESHOLD,
            allowed_classes: DEFAULT_ALLOWED_CLASSES.iter().map(|s| s.to_string()).collect(),
            top_k: 10,
            batch_size: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub song_id: String,
    pub kb_id: String,
    pub freebase_mid: Option<String>,
    pub title_similarity: f64,
    pub artist_similarity: f64,
    pub class_passed: bool,
    pub accepted: bool,
}

impl MatchDecision {
    fn weakest_similarity(&self) -> f64 {
        self.title_similarity.min(self.artist_similarity)
    }
}

fn decide(song: &SongRecord, candidate: &EntityCandidate, config: &LinkConfig) -> MatchDecision {
    let title_similarity = string_similarity(&song.title, &candidate.label);
    // no performer on the entity: artist cannot be confirmed
    let artist_similarity = candidate
        .artist_label
        .as_deref()
        .map_or(0.0, |a| string_similarity(&song.artist, a));
    let class_passed = !candidate.class_ids.is_disjoint(&config.allowed_classes);
    let accepted = class_passed
        && candidate.freebase_mid.is_some()
        && title_similarity > config.similarity_threshold
        && artist_similarity > config.similarity_threshold;
    MatchDecision {
        song_id: song.song_id.clone(),
        kb_id: candidate.kb_id.clone(),
        freebase_mid: candidate.freebase_mid.clone(),
        title_similarity,
        artist_similarity,
        class_passed,
        accepted,
    }
}

/// Accepted first, then by the weaker of the two similarities (descending),
/// then by entity id.
fn decision_order(a: &MatchDecision, b: &MatchDecision) -> Ordering {
    b.accepted
        .cmp(&a.accepted)
        .then_with(|| b.weakest_similarity().total_cmp(&a.weakest_similarity()))
        .then_with(|| a.kb_id.cmp(&b.kb_id))
}

fn queries(song: &SongRecord) -> [String; 3] {
    [
        song.title.clone(),
        song.artist.clone(),
        format!("{} {}", song.title, song.artist),
    ]
}

/// Decisions for every candidate of every song, one list per input song.
/// Property fetches are batched across songs.
pub fn resolve_songs<S: EntitySource + ?Sized>(
    songs: &[SongRecord],
    source: &S,
    config: &LinkConfig,
) -> Result<Vec<Vec<MatchDecision>>, CatalogError> {
    let mut per_song: Vec<IndexSet<String>> = Vec::with_capacity(songs.len());
    let mut all_ids: IndexSet<String> = IndexSet::new();
    for song in songs {
        let mut ids = IndexSet::new();
        for q in queries(song) {
            ids.extend(source.search(&q, config.top_k)?.into_iter().take(config.top_k));
        }
        all_ids.extend(ids.iter().cloned());
        per_song.push(ids);
    }

    let all_ids: Vec<String> = all_ids.into_iter().collect();
    let mut fetched: HashMap<String, EntityCandidate> = HashMap::with_capacity(all_ids.len());
    for batch in all_ids.chunks(config.batch_size.max(1)) {
        for c in source.fetch(batch)? {
            fetched.insert(c.kb_id.clone(), c);
        }
    }

    Ok(songs
        .iter()
        .zip(per_song)
        .map(|(song, ids)| {
            let mut decisions: Vec<MatchDecision> = ids
                .iter()
                .filter_map(|id| fetched.get(id))
                .map(|c| decide(song, c, config))
                .collect();
            decisions.sort_by(decision_order);
            decisions
        })
        .collect())
}

pub fn resolve_song<S: EntitySource + ?Sized>(
    song: &SongRecord,
    source: &S,
    config: &LinkConfig,
) -> Result<Vec<MatchDecision>, CatalogError> {
    Ok(resolve_songs(std::slice::from_ref(song), source, config)?
        .pop()
        .unwrap_or_default())
}

/// The winning accepted decision, if any.
pub fn best_match(decisions: &[MatchDecision]) -> Option<&MatchDecision> {
    decisions
        .iter()
        .filter(|d| d.accepted)
        .min_by(|a, b| decision_order(a, b))
}
