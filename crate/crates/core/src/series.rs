//! Monthly search-interest series and the 24-point event windows cut from them.
//!
//! A window holds the twelve months strictly before a release and the twelve
//! months strictly after it. The release month itself is never part of the
//! window, so the time index runs over `-12..=-1` and `1..=12`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Months on each side of the release.
pub const HALF_WINDOW: usize = 12;
/// Points in an [`EventWindow`].
pub const WINDOW_LEN: usize = 2 * HALF_WINDOW;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series {entity_id} has invalid value {value} at index {index}")]
    InvalidValue {
        entity_id: String,
        index: usize,
        value: f64,
    },
    #[error("series {entity_id} lacks months needed for a window around {release}: {missing}")]
    WindowOutOfRange {
        entity_id: String,
        release: MonthKey,
        missing: MissingMonths,
    },
    #[error("invalid month key {0:?} (expected YYYY-MM)")]
    BadMonthKey(String),
}

/// Calendar month. Ordered by year, then month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthKey {
    year: i32,
    month: u8,
}

impl MonthKey {
    pub fn new(year: i32, month: u8) -> Result<Self, SeriesError> {
        if !(1..=12).contains(&month) {
            return Err(SeriesError::BadMonthKey(format!("{year}-{month}")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    /// Months since year 0, January.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12);
        let month = ordinal.rem_euclid(12) + 1;
        Self {
            year: year as i32,
            month: month as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.add_months(1)
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// `other - self` in months.
    pub fn months_until(self, other: MonthKey) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthKey {
    type Err = SeriesError;

    /// Accepts `YYYY-MM` and `YYYY-MM-DD`; day-level dates are truncated to the month.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeriesError::BadMonthKey(s.to_string());
        let mut parts = s.trim().split('-');
        let year: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month: u8 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if let Some(day) = parts.next() {
            let day: u8 = day.parse().map_err(|_| bad())?;
            if !(1..=31).contains(&day) {
                return Err(bad());
            }
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for MonthKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Months missing on either side of a requested window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingMonths {
    pub before: Option<(MonthKey, MonthKey)>,
    pub after: Option<(MonthKey, MonthKey)>,
}

impl fmt::Display for MissingMonths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some((a, b)) = self.before {
            parts.push(format!("{a}..{b}"));
        }
        if let Some((a, b)) = self.after {
            parts.push(format!("{a}..{b}"));
        }
        f.write_str(&parts.join(", "))
    }
}

/// Contiguous monthly values for one entity, starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    entity_id: String,
    start: MonthKey,
    values: Vec<f64>,
}

impl MonthlySeries {
    /// Values must be finite and non-negative.
    pub fn new(
        entity_id: impl Into<String>,
        start: MonthKey,
        values: Vec<f64>,
    ) -> Result<Self, SeriesError> {
        let entity_id = entity_id.into();
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(SeriesError::InvalidValue {
                entity_id,
                index,
                value,
            });
        }
        Ok(Self {
            entity_id,
            start,
            values,
        })
    }

    pub fn entity_id(&self) -> &str {
        &self.entity_id
    }

    pub fn start(&self) -> MonthKey {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last covered month, `None` for an empty series.
    pub fn end(&self) -> Option<MonthKey> {
        (!self.values.is_empty()).then(|| self.start.add_months(self.values.len() as i64 - 1))
    }

    pub fn value_at(&self, month: MonthKey) -> Option<f64> {
        let offset = self.start.months_until(month);
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.values.get(i).copied())
    }

    /// Multiplies every value by `factor` (which must be finite and non-negative).
    pub fn scaled(&self, factor: f64) -> Result<Self, SeriesError> {
        Self::new(
            self.entity_id.clone(),
            self.start,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Sub-series over `[from, to]` inclusive, clipped to the covered range.
    pub fn slice(&self, from: MonthKey, to: MonthKey) -> Self {
        let lo = self.start.months_until(from).max(0) as usize;
        let hi = (self.start.months_until(to) + 1).clamp(0, self.values.len() as i64) as usize;
        let lo = lo.min(hi);
        Self {
            entity_id: self.entity_id.clone(),
            start: self.start.add_months(lo as i64),
            values: self.values[lo..hi].to_vec(),
        }
    }
}

/// Rescales a series so its peak is exactly 100. All-zero series are returned unchanged.
pub fn normalize_peak(series: &MonthlySeries) -> Result<MonthlySeries, SeriesError> {
    let peak = series
        .values
        .iter()
        .copied()
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or(SeriesError::EmptySeries)?;
    if peak == 0.0 {
        return Ok(series.clone());
    }
    let factor = 100.0 / peak;
    let values = series
        .values
        .iter()
        .map(|&v| if v == peak { 100.0 } else { (v * factor).min(100.0) })
        .collect();
    Ok(MonthlySeries {
        entity_id: series.entity_id.clone(),
        start: series.start,
        values,
    })
}

/// Twelve months before and twelve months after a release, release month excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventWindow {
    pub borrowed_id: String,
    pub borrowee_id: String,
    pub release: MonthKey,
    /// `pre[i]` is month `release - (12 - i)`.
    pub pre: [f64; HALF_WINDOW],
    /// `post[j]` is month `release + (j + 1)`.
    pub post: [f64; HALF_WINDOW],
}

impl EventWindow {
    /// Time offsets in window order: `-12..=-1` then `1..=12`.
    pub fn offsets() -> impl Iterator<Item = i32> + Clone {
        (-(HALF_WINDOW as i32)..0).chain(1..=HALF_WINDOW as i32)
    }

    /// `(t, value)` pairs in window order.
    pub fn points(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        Self::offsets().zip(self.pre.iter().chain(self.post.iter()).copied())
    }

    pub fn values(&self) -> Vec<f64> {
        self.pre.iter().chain(self.post.iter()).copied().collect()
    }

    /// Calendar month of offset `t` (`t != 0`).
    pub fn month_of(&self, t: i32) -> MonthKey {
        self.release.add_months(i64::from(t))
    }

    pub fn with_borrowee(mut self, borrowee_id: impl Into<String>) -> Self {
        self.borrowee_id = borrowee_id.into();
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.pre.iter_mut().for_each(|v| *v *= factor);
        out.post.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// True when all 24 points are zero.
    pub fn is_all_zero(&self) -> bool {
        self.pre.iter().chain(self.post.iter()).all(|&v| v == 0.0)
    }

    /// True when every pre-release point is zero but some post-release point is not.
    pub fn has_zero_baseline(&self) -> bool {
        self.pre.iter().all(|&v| v == 0.0) && self.post.iter().any(|&v| v != 0.0)
    }
}

pub fn is_all_zero(window: &EventWindow) -> bool {
    window.is_all_zero()
}

pub fn has_zero_baseline(window: &EventWindow) -> bool {
    window.has_zero_baseline()
}

/// Cuts the 24-point window around `release`. The returned window carries the
/// series id as `borrowed_id`; set the other endpoint with [`EventWindow::with_borrowee`].
pub fn extract_window(series: &MonthlySeries, release: MonthKey) -> Result<EventWindow, SeriesError> {
    let first_needed = release.add_months(-(HALF_WINDOW as i64));
    let last_needed = release.add_months(HALF_WINDOW as i64);
    let covered = series.end().map(|end| (series.start, end));

    let (before, after) = match covered {
        None => (
            Some((first_needed, release.add_months(-1))),
            Some((release.succ(), last_needed)),
        ),
        Some((start, end)) => {
            let before = (start > first_needed).then(|| {
                (first_needed, start.add_months(-1).min(release.add_months(-1)))
            });
            let after =
                (end < last_needed).then(|| (end.succ().max(release.succ()), last_needed));
            (before, after)
        }
    };
    if before.is_some() || after.is_some() {
        return Err(SeriesError::WindowOutOfRange {
            entity_id: series.entity_id.clone(),
            release,
            missing: MissingMonths { before, after },
        });
    }

    let at = |t: i64| {
        series
            .value_at(release.add_months(t))
            .expect("coverage checked above")
    };
    let mut pre = [0.0; HALF_WINDOW];
    let mut post = [0.0; HALF_WINDOW];
    for i in 0..HALF_WINDOW {
        pre[i] = at(i as i64 - HALF_WINDOW as i64);
        post[i] = at(i as i64 + 1);
    }
    Ok(EventWindow {
        borrowed_id: series.entity_id.clone(),
        borrowee_id: String::new(),
        release,
        pre,
        post,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mk(y: i32, m: u8) -> MonthKey {
        MonthKey::new(y, m).unwrap()
    }

    fn series(start: MonthKey, values: Vec<f64>) -> MonthlySeries {
        MonthlySeries::new("s", start, values).unwrap()
    }

    #[test]
    fn month_arithmetic_carries_years() {
        assert_eq!(mk(2014, 12).succ(), mk(2015, 1));
        assert_eq!(mk(2015, 1).add_months(-1), mk(2014, 12));
        assert_eq!(mk(2013, 12).months_until(mk(2015, 12)), 24);
        assert_eq!(MonthKey::from_ordinal(mk(-3, 4).ordinal()), mk(-3, 4));
        assert!(mk(2014, 12) < mk(2015, 1));
    }

    #[test]
    fn month_key_parsing() {
        assert_eq!("2014-12".parse::<MonthKey>().unwrap(), mk(2014, 12));
        assert_eq!("2009-02-17".parse::<MonthKey>().unwrap(), mk(2009, 2));
        assert!("2014-13".parse::<MonthKey>().is_err());
        assert!("2014".parse::<MonthKey>().is_err());
        assert!("2014-01-40".parse::<MonthKey>().is_err());
        assert_eq!(mk(2004, 1).to_string(), "2004-01");
    }

    #[test]
    fn normalize_examples() {
        let s = series(mk(2004, 1), vec![5.0, 10.0, 20.0]);
        assert_eq!(normalize_peak(&s).unwrap().values(), &[25.0, 50.0, 100.0]);
        let z = series(mk(2004, 1), vec![0.0, 0.0, 0.0]);
        assert_eq!(normalize_peak(&z).unwrap(), z);
        let p = series(mk(2004, 1), vec![100.0, 50.0]);
        assert_eq!(normalize_peak(&p).unwrap().values(), &[100.0, 50.0]);
        let e = series(mk(2004, 1), vec![]);
        assert_eq!(normalize_peak(&e), Err(SeriesError::EmptySeries));
    }

    #[test]
    fn normalize_is_idempotent_on_awkward_peaks() {
        let s = series(mk(2004, 1), vec![3.0, 7.0, 0.1, 6.999_999_999, 7.0]);
        let once = normalize_peak(&s).unwrap();
        let twice = normalize_peak(&once).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.values().iter().copied().fold(0.0, f64::max), 100.0);
    }

    #[test]
    fn rejects_negative_values() {
        assert!(MonthlySeries::new("x", mk(2004, 1), vec![1.0, -0.5]).is_err());
        assert!(MonthlySeries::new("x", mk(2004, 1), vec![f64::NAN]).is_err());
    }

    #[test]
    fn window_around_late_2014_release() {
        let start = mk(2013, 1);
        let values: Vec<f64> = (0..48).map(f64::from).collect();
        let s = series(start, values);
        let release = mk(2014, 12);
        let w = extract_window(&s, release).unwrap();
        assert_eq!(w.month_of(-12), mk(2013, 12));
        assert_eq!(w.month_of(-1), mk(2014, 11));
        assert_eq!(w.month_of(1), mk(2015, 1));
        assert_eq!(w.month_of(12), mk(2015, 12));
        assert_eq!(w.pre[0], s.value_at(mk(2013, 12)).unwrap());
        assert_eq!(w.post[11], s.value_at(mk(2015, 12)).unwrap());
        // release month (index 23) is skipped
        assert_eq!(w.pre[11], 22.0);
        assert_eq!(w.post[0], 24.0);
    }

    #[test]
    fn window_out_of_range_names_missing_months() {
        let s = series(mk(2014, 6), vec![1.0; 30]);
        let err = extract_window(&s, mk(2014, 12)).unwrap_err();
        match err {
            SeriesError::WindowOutOfRange { missing, .. } => {
                assert_eq!(missing.before, Some((mk(2013, 12), mk(2014, 5))));
                assert_eq!(missing.after, None);
            }
            other => panic!("unexpected {other:?}"),
        }
        let short = series(mk(2013, 12), vec![1.0; 20]);
        match extract_window(&short, mk(2014, 12)).unwrap_err() {
            SeriesError::WindowOutOfRange { missing, .. } => {
                assert_eq!(missing.before, None);
                assert_eq!(missing.after, Some((mk(2015, 8), mk(2015, 12))));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_series_window() {
        let s = series(mk(2010, 1), vec![7.0; 60]);
        let w = extract_window(&s, mk(2012, 6)).unwrap();
        assert!(w.pre.iter().chain(w.post.iter()).all(|&v| v == 7.0));
    }

    #[test]
    fn degenerate_window_predicates() {
        let mut w = EventWindow {
            borrowed_id: "a".into(),
            borrowee_id: "b".into(),
            release: mk(2011, 3),
            pre: [0.0; 12],
            post: [0.0; 12],
        };
        assert!(w.is_all_zero());
        assert!(!w.has_zero_baseline());
        w.post[11] = 40.0;
        assert!(!w.is_all_zero());
        assert!(w.has_zero_baseline());
        w.pre[4] = 3.0;
        assert!(!w.has_zero_baseline());
    }

    #[test]
    fn offsets_skip_zero() {
        let offsets: Vec<i32> = EventWindow::offsets().collect();
        assert_eq!(offsets.len(), WINDOW_LEN);
        assert!(!offsets.contains(&0));
        assert_eq!(offsets.first(), Some(&-12));
        assert_eq!(offsets.last(), Some(&12));
    }
}
