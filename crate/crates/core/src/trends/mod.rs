//! Monthly search-interest series: CSV export parsing and the on-disk cache.

mod cache;
mod csv;

pub use self::cache::{SeriesSource, TrendsCache};
pub use self::csv::{parse_trends_csv, write_trends_csv};

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::series::{MonthKey, MonthlySeries, SeriesError};

#[derive(Debug, Error)]
pub enum TrendsError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("missing months {from}..{to} after {previous}")]
    GapError {
        previous: MonthKey,
        from: MonthKey,
        to: MonthKey,
    },
    #[error("line {line}: month {month} does not follow {previous}")]
    OrderError {
        line: usize,
        month: MonthKey,
        previous: MonthKey,
    },
    #[error("line {line}: value {value} outside [0, 100]")]
    RangeError { line: usize, value: String },
    #[error("no `Month,` header row found")]
    MissingHeader,
    #[error("export has no data rows")]
    Empty,
    #[error("invalid Freebase MID {0:?}")]
    BadMid(String),
    #[error("cache entry for {mid} is corrupt ({reason}); evicted")]
    CacheCorrupt { mid: String, reason: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Freebase machine id, `/m/...` or `/g/...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mid(String);

impl Mid {
    pub fn parse(s: &str) -> Result<Self, TrendsError> {
        let s = s.trim();
        let rest = s
            .strip_prefix("/m/")
            .or_else(|| s.strip_prefix("/g/"))
            .ok_or_else(|| TrendsError::BadMid(s.to_string()))?;
        if rest.is_empty()
            || !rest
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err(TrendsError::BadMid(s.to_string()));
        }
        Ok(Self(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Mid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Mid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Mid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Mid::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// One entity's fetched series. The series id is the MID.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendsRecord {
    pub mid: Mid,
    pub series: MonthlySeries,
    pub fetched_at: DateTime<Utc>,
}

impl TrendsRecord {
    pub fn new(mid: Mid, start: MonthKey, values: Vec<f64>, fetched_at: DateTime<Utc>) -> Result<Self, TrendsError> {
        let series = MonthlySeries::new(mid.as_str(), start, values)?;
        Ok(Self {
            mid,
            series,
            fetched_at,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mid_grammar() {
        assert_eq!(Mid::parse("/m/0zjw3z_").unwrap().as_str(), "/m/0zjw3z_");
        assert!(Mid::parse("/g/11b6").is_ok());
        for bad in ["m/0zjw3z_", "/m/", "/x/abc", "/m/AB", "/m/a b"] {
            assert!(Mid::parse(bad).is_err(), "{bad}");
        }
    }
}
