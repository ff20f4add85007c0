use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CatalogError;

/// Knowledge-base entity returned by a search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCandidate {
    pub kb_id: String,
    pub label: String,
    pub artist_label: Option<String>,
    /// Values of the entity's instance-of property.
    pub class_ids: BTreeSet<String>,
    pub freebase_mid: Option<String>,
}

/// Entity search backend: free-text search plus batched property fetch.
pub trait EntitySource: Sync {
    /// Up to `limit` entity ids, best first.
    fn search(&self, query: &str, limit: usize) -> Result<Vec<String>, CatalogError>;

    /// Properties for `ids`. Unknown ids are omitted from the result.
    fn fetch(&self, ids: &[String]) -> Result<Vec<EntityCandidate>, CatalogError>;
}

impl<S: EntitySource + ?Sized> EntitySource for &S {
    fn search(&self, query: &str, limit: usize) -> Result<Vec<String>, CatalogError> {
        (**self).search(query, limit)
    }

    fn fetch(&self, ids: &[String]) -> Result<Vec<EntityCandidate>, CatalogError> {
        (**self).fetch(ids)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntity {
    pub label: String,
    #[serde(default)]
    pub artist_label: Option<String>,
    #[serde(default)]
    pub class_ids: BTreeSet<String>,
    #[serde(default)]
    pub freebase_mid: Option<String>,
}

/// On-disk layout of an offline entity fixture.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureFile {
    /// Query string to ordered entity ids.
    pub search_results: BTreeMap<String, Vec<String>>,
    pub entities: BTreeMap<String, FixtureEntity>,
}

/// Offline entity source backed by a JSON fixture.
#[derive(Debug, Clone, Default)]
pub struct FixtureSource {
    data: FixtureFile,
}

impl FixtureSource {
    pub fn new(data: FixtureFile) -> Self {
        Self { data }
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let data: FixtureFile =
            serde_json::from_str(text).map_err(|e| CatalogError::Fixture(e.to_string()))?;
        Ok(Self { data })
    }

    pub fn open(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

impl EntitySource for FixtureSource {
    fn search(&self, query: &str, limit: usize) -> Result<Vec<String>, CatalogError> {
        Ok(self
            .data
            .search_results
            .get(query)
            .map(|ids| ids.iter().take(limit).cloned().collect())
            .unwrap_or_default())
    }

    fn fetch(&self, ids: &[String]) -> Result<Vec<EntityCandidate>, CatalogError> {
        Ok(ids
            .iter()
            .filter_map(|id| {
                self.data.entities.get(id).map(|e| EntityCandidate {
                    kb_id: id.clone(),
                    label: e.label.clone(),
                    artist_label: e.artist_label.clone(),
                    class_ids: e.class_ids.clone(),
                    freebase_mid: e.freebase_mid.clone(),
                })
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_search_and_fetch() {
        let src = FixtureSource::from_json(
            r#"{
                "search_results": {"q": ["Q1", "Q2", "Q3"]},
                "entities": {"Q1": {"label": "One", "class_ids": ["Q7366"], "freebase_mid": "/m/01"}}
            }"#,
        )
        .unwrap();
        assert_eq!(src.search("q", 2).unwrap(), vec!["Q1", "Q2"]);
        assert!(src.search("missing", 10).unwrap().is_empty());
        let got = src.fetch(&["Q1".into(), "Q9".into()]).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].label, "One");
        assert_eq!(got[0].artist_label, None);
    }

    #[test]
    fn malformed_fixture() {
        assert!(matches!(
            FixtureSource::from_json("{\"entities\": 3}"),
            Err(CatalogError::Fixture(_))
        ));
    }
}
