use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use super::CatalogError;
use crate::series::MonthKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BorrowingKind {
    Sample,
    Cover,
    Remix,
}

impl fmt::Display for BorrowingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BorrowingKind::Sample => "sample",
            BorrowingKind::Cover => "cover",
            BorrowingKind::Remix => "remix",
        })
    }
}

impl FromStr for BorrowingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sample" => Ok(BorrowingKind::Sample),
            "cover" => Ok(BorrowingKind::Cover),
            "remix" => Ok(BorrowingKind::Remix),
            other => Err(format!("unknown borrowing kind {other:?}")),
        }
    }
}

/// Directed edge from the original song to the song that reuses it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BorrowingEdge {
    pub borrowed_id: String,
    pub borrowee_id: String,
    pub kind: BorrowingKind,
    /// Borrowee release, truncated to the month.
    pub release: MonthKey,
}

#[derive(Debug, Clone, Default)]
struct Adjacency {
    outgoing: Vec<usize>,
    incoming: Vec<usize>,
}

/// Directed multigraph of borrowings. Identical edges are stored once;
/// parallel edges that differ in kind or release are kept.
#[derive(Debug, Clone, Default)]
pub struct BorrowingGraph {
    nodes: IndexMap<String, Adjacency>,
    edges: IndexSet<BorrowingEdge>,
    duplicates: usize,
}

impl BorrowingGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an edge; returns `false` when an identical edge was already present.
    pub fn insert(&mut self, edge: BorrowingEdge) -> bool {
        let (idx, fresh) = self.edges.insert_full(edge);
        if !fresh {
            self.duplicates += 1;
            return false;
        }
        let edge = &self.edges[idx];
        self.nodes
            .entry(edge.borrowed_id.clone())
            .or_default()
            .outgoing
            .push(idx);
        self.nodes
            .entry(edge.borrowee_id.clone())
            .or_default()
            .incoming
            .push(idx);
        true
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    pub fn contains_node(&self, song_id: &str) -> bool {
        self.nodes.contains_key(song_id)
    }

    /// Node ids in first-seen order.
    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    /// Edges in first-seen order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &BorrowingEdge> {
        self.edges.iter()
    }

    /// Edges whose borrowed song is `song_id`.
    pub fn borrowings_of(&self, song_id: &str) -> impl Iterator<Item = &BorrowingEdge> {
        self.nodes
            .get(song_id)
            .into_iter()
            .flat_map(|a| a.outgoing.iter().map(|&i| &self.edges[i]))
    }

    /// Edges whose borrowee is `song_id`.
    pub fn sources_of(&self, song_id: &str) -> impl Iterator<Item = &BorrowingEdge> {
        self.nodes
            .get(song_id)
            .into_iter()
            .flat_map(|a| a.incoming.iter().map(|&i| &self.edges[i]))
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    let sep = if line.contains('\t') { '\t' } else { ',' };
    line.split(sep).map(str::trim).collect()
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Reads an edge file: `borrowed_id, borrowee_id, kind, release` per line,
/// tab- or comma-separated, `#` comments allowed.
pub fn load_graph<R: BufRead>(reader: R) -> Result<BorrowingGraph, CatalogError> {
    let mut graph = BorrowingGraph::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_start_matches('\u{feff}');
        if is_skippable(line) {
            continue;
        }
        let err = |message: String| CatalogError::ParseError {
            line: line_no,
            message,
        };
        let fields = split_fields(line);
        let [borrowed, borrowee, kind, release] = fields.as_slice() else {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        };
        if borrowed.is_empty() || borrowee.is_empty() {
            return Err(err("empty song id".into()));
        }
        if borrowed == borrowee {
            return Err(CatalogError::SelfLoopEdge {
                line: line_no,
                song_id: borrowed.to_string(),
            });
        }
        let kind: BorrowingKind = kind.parse().map_err(err)?;
        let release: MonthKey = release.parse().map_err(|e| err(format!("{e}")))?;
        graph.insert(BorrowingEdge {
            borrowed_id: borrowed.to_string(),
            borrowee_id: borrowee.to_string(),
            kind,
            release,
        });
    }
    if graph.duplicates > 0 {
        log::info!("edge file: dropped {} duplicate edge(s)", graph.duplicates);
    }
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SongRecord {
    pub song_id: String,
    pub title: String,
    pub artist: String,
    pub release: Option<MonthKey>,
}

impl SongRecord {
    /// Title and artist must contain something other than whitespace.
    pub fn new(
        song_id: impl Into<String>,
        title: impl Into<String>,
        artist: impl Into<String>,
        release: Option<MonthKey>,
    ) -> Result<Self, String> {
        let (song_id, title, artist) = (song_id.into(), title.into(), artist.into());
        if super::normalize_name(&title).is_empty() {
            return Err(format!("song {song_id}: empty title"));
        }
        if super::normalize_name(&artist).is_empty() {
            return Err(format!("song {song_id}: empty artist"));
        }
        Ok(Self {
            song_id,
            title,
            artist,
            release,
        })
    }
}

/// Reads a tab-separated song file: `song_id, title, artist[, release]`.
pub fn load_songs<R: BufRead>(reader: R) -> Result<Vec<SongRecord>, CatalogError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_start_matches('\u{feff}');
        if is_skippable(line) {
            continue;
        }
        let err = |message: String| CatalogError::ParseError {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (id, title, artist, release) = match fields.as_slice() {
            [id, title, artist] => (id, title, artist, None),
            [id, title, artist, ""] => (id, title, artist, None),
            [id, title, artist, rel] => (
                id,
                title,
                artist,
                Some(rel.parse().map_err(|e| err(format!("{e}")))?),
            ),
            _ => {
                return Err(err(format!(
                    "expected 3 or 4 tab-separated fields, found {}",
                    fields.len()
                )))
            }
        };
        out.push(SongRecord::new(*id, *title, *artist, release).map_err(err)?);
    }
    Ok(out)
}
