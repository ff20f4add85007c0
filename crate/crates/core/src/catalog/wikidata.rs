//! Wikidata action-API semantics: `wbsearchentities` for free-text search and
//! `wbgetentities` for batched property fetches.
//!
//! Response parsing is always available; the HTTP client needs the
//! `wikidata-http` feature.

use std::collections::BTreeSet;

use serde_json::Value;

use super::{CatalogError, EntityCandidate};

pub const PROP_INSTANCE_OF: &str = "P31";
pub const PROP_PERFORMER: &str = "P175";
pub const PROP_FREEBASE_ID: &str = "P646";

/// Entity as returned by `wbgetentities`, before performer labels are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntity {
    pub kb_id: String,
    pub label: Option<String>,
    pub class_ids: BTreeSet<String>,
    pub freebase_mid: Option<String>,
    pub performer_ids: Vec<String>,
}

fn bad(msg: impl Into<String>) -> CatalogError {
    CatalogError::SourceUnavailable(msg.into())
}

/// Entity ids from a `wbsearchentities` response, in rank order.
pub fn parse_search_response(body: &str) -> Result<Vec<String>, CatalogError> {
    let v: Value = serde_json::from_str(body).map_err(|e| bad(format!("search response: {e}")))?;
    if let Some(err) = v.get("error") {
        return Err(bad(format!("search error: {err}")));
    }
    let hits = v
        .get("search")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("search response without `search` array"))?;
    Ok(hits
        .iter()
        .filter_map(|h| h.get("id").and_then(Value::as_str).map(str::to_string))
        .collect())
}

fn claim_values<'a>(entity: &'a Value, prop: &str) -> impl Iterator<Item = &'a Value> + 'a {
    entity
        .get("claims")
        .and_then(|c| c.get(prop))
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .filter_map(|claim| claim.pointer("/mainsnak/datavalue/value"))
}

fn item_ids(entity: &Value, prop: &str) -> Vec<String> {
    claim_values(entity, prop)
        .filter_map(|v| v.get("id").and_then(Value::as_str).map(str::to_string))
        .collect()
}

/// Entities from a `wbgetentities` response, skipping ids flagged missing.
pub fn parse_entities_response(body: &str, language: &str) -> Result<Vec<RawEntity>, CatalogError> {
    let v: Value =
        serde_json::from_str(body).map_err(|e| bad(format!("entities response: {e}")))?;
    if let Some(err) = v.get("error") {
        return Err(bad(format!("entities error: {err}")));
    }
    let entities = v
        .get("entities")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("entities response without `entities` object"))?;
    let mut out: Vec<RawEntity> = entities
        .iter()
        .filter(|(_, e)| e.get("missing").is_none())
        .map(|(id, e)| RawEntity {
            kb_id: id.clone(),
            label: e
                .pointer(&format!("/labels/{language}/value"))
                .and_then(Value::as_str)
                .map(str::to_string),
            class_ids: item_ids(e, PROP_INSTANCE_OF).into_iter().collect(),
            freebase_mid: claim_values(e, PROP_FREEBASE_ID)
                .find_map(Value::as_str)
                .map(str::to_string),
            performer_ids: item_ids(e, PROP_PERFORMER),
        })
        .collect();
    out.sort_by(|a, b| a.kb_id.cmp(&b.kb_id));
    Ok(out)
}

/// Joins raw entities with performer labels. The first labelled performer wins.
pub fn to_candidates(
    raw: Vec<RawEntity>,
    performer_label: impl Fn(&str) -> Option<String>,
) -> Vec<EntityCandidate> {
    raw.into_iter()
        .map(|r| EntityCandidate {
            artist_label: r.performer_ids.iter().find_map(|p| performer_label(p)),
            label: r.label.unwrap_or_default(),
            kb_id: r.kb_id,
            class_ids: r.class_ids,
            freebase_mid: r.freebase_mid,
        })
        .collect()
}

#[cfg(feature = "wikidata-http")]
pub use http::WikidataSource;

#[cfg(feature = "wikidata-http")]
mod http {
    use std::collections::HashMap;
    use std::sync::Mutex;
    use std::time::{Duration, Instant};

    use super::*;
    use crate::catalog::EntitySource;

    /// Live client for a Wikidata-style action API, rate limited across threads.
    pub struct WikidataSource {
        endpoint: String,
        language: String,
        agent: ureq::Agent,
        min_interval: Duration,
        next_slot: Mutex<Instant>,
    }

    impl WikidataSource {
        pub fn new(endpoint: impl Into<String>, requests_per_second: f64) -> Self {
            let rps = if requests_per_second > 0.0 { requests_per_second } else { 1.0 };
            Self {
                endpoint: endpoint.into(),
                language: "en".into(),
                agent: ureq::Agent::new_with_defaults(),
                min_interval: Duration::from_secs_f64(1.0 / rps),
                next_slot: Mutex::new(Instant::now()),
            }
        }

        fn throttle(&self) {
            let wait = {
                let mut slot = self.next_slot.lock().expect("rate limiter poisoned");
                let now = Instant::now();
                let start = (*slot).max(now);
                *slot = start + self.min_interval;
                start - now
            };
            if !wait.is_zero() {
                std::thread::sleep(wait);
            }
        }

        fn get(&self, params: &[(&str, &str)]) -> Result<String, CatalogError> {
            self.throttle();
            let mut req = self.agent.get(&self.endpoint).query("format", "json");
            for (k, v) in params {
                req = req.query(*k, *v);
            }
            let mut resp = req.call().map_err(|e| bad(e.to_string()))?;
            resp.body_mut()
                .read_to_string()
                .map_err(|e| bad(e.to_string()))
        }

        fn get_entities(&self, ids: &[String], props: &str) -> Result<Vec<RawEntity>, CatalogError> {
            let joined = ids.join("|");
            let body = self.get(&[
                ("action", "wbgetentities"),
                ("ids", &joined),
                ("props", props),
                ("languages", &self.language),
            ])?;
            parse_entities_response(&body, &self.language)
        }
    }

    impl EntitySource for WikidataSource {
        fn search(&self, query: &str, limit: usize) -> Result<Vec<String>, CatalogError> {
            let limit = limit.to_string();
            let body = self.get(&[
                ("action", "wbsearchentities"),
                ("search", query),
                ("language", &self.language),
                ("type", "item"),
                ("limit", &limit),
            ])?;
            parse_search_response(&body)
        }

        fn fetch(&self, ids: &[String]) -> Result<Vec<EntityCandidate>, CatalogError> {
            if ids.is_empty() {
                return Ok(Vec::new());
            }
            let raw = self.get_entities(ids, "labels|claims")?;
            let mut performers: Vec<String> =
                raw.iter().flat_map(|r| r.performer_ids.iter().cloned()).collect();
            performers.sort();
            performers.dedup();
            let mut labels = HashMap::new();
            for chunk in performers.chunks(50) {
                for p in self.get_entities(chunk, "labels")? {
                    if let Some(l) = p.label {
                        labels.insert(p.kb_id, l);
                    }
                }
            }
            Ok(to_candidates(raw, |id| labels.get(id).cloned()))
        }
    }
}
