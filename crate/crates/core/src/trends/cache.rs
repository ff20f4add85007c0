use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};

use super::{parse_trends_csv, Mid, TrendsError, TrendsRecord};
use crate::series::MonthKey;

const FILE_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'_').remove(b'-');
const ARCHIVE_DIR: &str = "archive";

/// Where analyses read monthly series from.
pub trait SeriesSource: Sync {
    fn get(&self, mid: &Mid) -> Result<Option<TrendsRecord>, TrendsError>;
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope {
    mid: String,
    start: MonthKey,
    values: Vec<f64>,
    fetched_at: DateTime<Utc>,
}

/// One JSON file per MID under `root`, named by the percent-encoded MID.
/// Overwritten entries are kept under `root/archive/`.
#[derive(Debug, Clone)]
pub struct TrendsCache {
    root: PathBuf,
}

impl TrendsCache {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, TrendsError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn file_stem(mid: &Mid) -> String {
        utf8_percent_encode(mid.as_str(), FILE_SET).to_string()
    }

    pub fn entry_path(&self, mid: &Mid) -> PathBuf {
        self.root.join(format!("{}.json", Self::file_stem(mid)))
    }

    pub fn cache_get(&self, mid: &Mid) -> Result<Option<TrendsRecord>, TrendsError> {
        let path = self.entry_path(mid);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match decode(&text, mid) {
            Ok(record) => Ok(Some(record)),
            Err(reason) => {
                log::warn!("evicting corrupt cache entry {}: {reason}", path.display());
                if let Err(e) = fs::remove_file(&path) {
                    log::warn!("could not remove {}: {e}", path.display());
                }
                Err(TrendsError::CacheCorrupt {
                    mid: mid.to_string(),
                    reason,
                })
            }
        }
    }

    /// Atomically replaces the entry for `record.mid`, archiving any previous one.
    pub fn cache_put(&self, record: &TrendsRecord) -> Result<(), TrendsError> {
        let envelope = Envelope {
            mid: record.mid.to_string(),
            start: record.series.start(),
            values: record.series.values().to_vec(),
            fetched_at: record.fetched_at,
        };
        let mut body = serde_json::to_string(&envelope).expect("envelope serializes");
        body.push('\n');

        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;

        let path = self.entry_path(&record.mid);
        if path.exists() {
            self.archive(&record.mid, &path)?;
        }
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    fn archive(&self, mid: &Mid, current: &Path) -> Result<(), TrendsError> {
        let dir = self.root.join(ARCHIVE_DIR);
        fs::create_dir_all(&dir)?;
        let stem = Self::file_stem(mid);
        let prefix = format!("{stem}.");
        let next = fs::read_dir(&dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_prefix(&prefix)?
                    .strip_suffix(".json")?
                    .parse::<u64>()
                    .ok()
            })
            .max()
            .map_or(1, |n| n + 1);
        let target = dir.join(format!("{stem}.{next}.json"));
        if fs::hard_link(current, &target).is_err() {
            fs::copy(current, &target)?;
        }
        Ok(())
    }

    /// Archived versions for `mid`, oldest first.
    pub fn archived(&self, mid: &Mid) -> Result<Vec<PathBuf>, TrendsError> {
        let dir = self.root.join(ARCHIVE_DIR);
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let prefix = format!("{}.", Self::file_stem(mid));
        let mut found: Vec<(u64, PathBuf)> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let n = name.strip_prefix(&prefix)?.strip_suffix(".json")?.parse().ok()?;
                Some((n, e.path()))
            })
            .collect();
        found.sort();
        Ok(found.into_iter().map(|(_, p)| p).collect())
    }

    /// MIDs with a live entry, sorted.
    pub fn mids(&self) -> Result<Vec<Mid>, TrendsError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let entry = entry?;
            if !entry.file_type()?.is_file() {
                continue;
            }
            let name = entry.file_name();
            let Some(stem) = name.to_str().and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            if let Ok(mid) = Mid::parse(&percent_decode_str(stem).decode_utf8_lossy()) {
                out.push(mid);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Imports a CSV export whose file stem is the percent-encoded MID.
    pub fn import_csv(&self, path: &Path, fetched_at: DateTime<Utc>) -> Result<Mid, TrendsError> {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| TrendsError::BadMid(path.display().to_string()))?;
        let mid = Mid::parse(&percent_decode_str(stem).decode_utf8_lossy())?;
        let bytes = fs::read(path)?;
        let record = parse_trends_csv(&bytes, &mid, fetched_at)?;
        self.cache_put(&record)?;
        Ok(mid)
    }
}

impl SeriesSource for TrendsCache {
    fn get(&self, mid: &Mid) -> Result<Option<TrendsRecord>, TrendsError> {
        self.cache_get(mid)
    }
}

fn decode(text: &str, mid: &Mid) -> Result<TrendsRecord, String> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if env.mid != mid.as_str() {
        return Err(format!("entry holds {:?}", env.mid));
    }
    TrendsRecord::new(mid.clone(), env.start, env.values, env.fetched_at).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(mid: &str, values: Vec<f64>, day: u32) -> TrendsRecord {
        let ts = DateTime::parse_from_rfc3339(&format!("2019-06-{day:02}T12:00:00Z"))
            .unwrap()
            .into();
        TrendsRecord::new(Mid::parse(mid).unwrap(), MonthKey::new(2004, 1).unwrap(), values, ts).unwrap()
    }

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path()).unwrap();
        let r = record("/m/0zjw3z_", vec![0.0, 12.0, 100.0, 0.1 + 0.2], 1);
        cache.cache_put(&r).unwrap();
        assert_eq!(cache.cache_get(&r.mid).unwrap(), Some(r.clone()));
        assert!(cache.entry_path(&r.mid).ends_with("%2Fm%2F0zjw3z_.json"));
        assert_eq!(cache.mids().unwrap(), vec![r.mid.clone()]);
    }

    #[test]
    fn unknown_mid_is_absent() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path()).unwrap();
        assert_eq!(cache.cache_get(&Mid::parse("/m/none").unwrap()).unwrap(), None);
    }

    #[test]
    fn latest_put_wins_and_previous_is_archived() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path()).unwrap();
        let first = record("/g/11abc", vec![1.0, 2.0], 1);
        let second = record("/g/11abc", vec![3.0, 4.0, 5.0], 2);
        cache.cache_put(&first).unwrap();
        cache.cache_put(&second).unwrap();
        cache.cache_put(&second).unwrap();
        assert_eq!(cache.cache_get(&first.mid).unwrap(), Some(second));
        let archived = cache.archived(&first.mid).unwrap();
        assert_eq!(archived.len(), 2);
        let oldest = fs::read_to_string(&archived[0]).unwrap();
        assert!(oldest.contains("[1.0,2.0]"));
    }

    #[test]
    fn corrupt_entry_is_evicted() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path()).unwrap();
        let mid = Mid::parse("/m/bad").unwrap();
        fs::write(cache.entry_path(&mid), "{\"mid\": \"/m/bad\", \"start\": ").unwrap();
        assert!(matches!(
            cache.cache_get(&mid),
            Err(TrendsError::CacheCorrupt { .. })
        ));
        assert!(!cache.entry_path(&mid).exists());
        assert_eq!(cache.cache_get(&mid).unwrap(), None);
    }

    #[test]
    fn entry_for_another_mid_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path()).unwrap();
        let r = record("/m/one", vec![1.0], 1);
        cache.cache_put(&r).unwrap();
        let other = Mid::parse("/m/two").unwrap();
        fs::copy(cache.entry_path(&r.mid), cache.entry_path(&other)).unwrap();
        assert!(matches!(
            cache.cache_get(&other),
            Err(TrendsError::CacheCorrupt { .. })
        ));
    }

    #[test]
    fn imports_csv_exports() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TrendsCache::open(dir.path().join("cache")).unwrap();
        let csv = dir.path().join("%2Fm%2F0zjw3z_.csv");
        fs::write(&csv, "Month,x\n2004-01,<1\n2004-02,100\n").unwrap();
        let mid = cache.import_csv(&csv, Utc::now()).unwrap();
        assert_eq!(mid.as_str(), "/m/0zjw3z_");
        let got = cache.cache_get(&mid).unwrap().unwrap();
        assert_eq!(got.series.values(), &[0.0, 100.0]);
    }
}
