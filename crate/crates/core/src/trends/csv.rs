use std::fmt::Write as _;

use chrono::{DateTime, Utc};

use super::{Mid, TrendsError, TrendsRecord};
use crate::series::MonthKey;

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(s)
}

fn parse_month(raw: &str, line: usize) -> Result<MonthKey, TrendsError> {
    let raw = unquote(raw);
    let bad = || TrendsError::ParseError {
        line,
        message: format!("bad month {raw:?}"),
    };
    let (y, m) = raw.split_once('-').ok_or_else(bad)?;
    if y.len() != 4 || m.len() != 2 {
        return Err(bad());
    }
    MonthKey::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?).map_err(|_| bad())
}

fn parse_value(raw: &str, line: usize) -> Result<f64, TrendsError> {
    let raw = unquote(raw);
    if raw == "<1" {
        return Ok(0.0);
    }
    match raw.parse::<i64>() {
        Ok(v) if (0..=100).contains(&v) => Ok(v as f64),
        Ok(_) => Err(TrendsError::RangeError {
            line,
            value: raw.to_string(),
        }),
        Err(_) => match raw.parse::<f64>() {
            Ok(v) if !(0.0..=100.0).contains(&v) => Err(TrendsError::RangeError {
                line,
                value: raw.to_string(),
            }),
            _ => Err(TrendsError::ParseError {
                line,
                message: format!("expected an integer value, got {raw:?}"),
            }),
        },
    }
}

/// Parses a Trends "interest over time" export: free-form preamble, a
/// `Month,<label>` header, then one `YYYY-MM,<value>` row per month.
/// `<1` is read as 0.
pub fn parse_trends_csv(
    bytes: &[u8],
    mid: &Mid,
    fetched_at: DateTime<Utc>,
) -> Result<TrendsRecord, TrendsError> {
    let text = std::str::from_utf8(bytes).map_err(|e| TrendsError::ParseError {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let text = text.trim_start_matches('\u{feff}');
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    lines
        .by_ref()
        .find(|(_, l)| {
            l.split(',')
                .next()
                .is_some_and(|first| unquote(first) == "Month")
        })
        .ok_or(TrendsError::MissingHeader)?;

    let mut start = None;
    let mut previous: Option<MonthKey> = None;
    let mut values = Vec::new();
    for (line, row) in lines {
        if row.trim().is_empty() {
            continue;
        }
        let (month, value) = row.split_once(',').ok_or_else(|| TrendsError::ParseError {
            line,
            message: "expected `month,value`".into(),
        })?;
        let month = parse_month(month, line)?;
        let value = parse_value(value, line)?;
        if let Some(prev) = previous {
            let expected = prev.succ();
            if month < expected {
                return Err(TrendsError::OrderError {
                    line,
                    month,
                    previous: prev,
                });
            }
            if month > expected {
                return Err(TrendsError::GapError {
                    previous: prev,
                    from: expected,
                    to: month.add_months(-1),
                });
            }
        } else {
            start = Some(month);
        }
        previous = Some(month);
        values.push(value);
    }
    let start = start.ok_or(TrendsError::Empty)?;
    TrendsRecord::new(mid.clone(), start, values, fetched_at)
}

/// Canonical export text for a record; [`parse_trends_csv`] reads it back unchanged.
pub fn write_trends_csv(record: &TrendsRecord) -> String {
    let mut out = String::from("Category: All categories\n\n");
    let _ = writeln!(out, "Month,{}: (Worldwide)", record.mid);
    let start = record.series.start();
    for (i, v) in record.series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", start.add_months(i as i64), v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mid() -> Mid {
        Mid::parse("/m/0zjw3z_").unwrap()
    }

    fn ts() -> DateTime<Utc> {
        DateTime::parse_from_rfc3339("2019-06-01T00:00:00Z").unwrap().into()
    }

    fn parse(text: &str) -> Result<TrendsRecord, TrendsError> {
        parse_trends_csv(text.as_bytes(), &mid(), ts())
    }

    #[test]
    fn simple_rows() {
        let r = parse("Month,x\n2004-01,0\n2004-02,50\n2004-03,100\n").unwrap();
        assert_eq!(r.series.values(), &[0.0, 50.0, 100.0]);
        assert_eq!(r.series.start().to_string(), "2004-01");
        assert_eq!(r.series.entity_id(), "/m/0zjw3z_");
    }

    #[test]
    fn gap_is_named() {
        match parse("Month,x\n2004-01,5\n2004-03,7\n").unwrap_err() {
            TrendsError::GapError { from, to, .. } => {
                assert_eq!(from.to_string(), "2004-02");
                assert_eq!(to.to_string(), "2004-02");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn order_and_range_errors() {
        assert!(matches!(
            parse("Month,x\n2004-02,5\n2004-01,7\n"),
            Err(TrendsError::OrderError { line: 3, .. })
        ));
        assert!(matches!(
            parse("Month,x\n2004-02,5\n2004-02,7\n"),
            Err(TrendsError::OrderError { .. })
        ));
        assert!(matches!(
            parse("Month,x\n2004-01,101\n"),
            Err(TrendsError::RangeError { line: 2, .. })
        ));
        assert!(matches!(
            parse("Month,x\n2004-01,-3\n"),
            Err(TrendsError::RangeError { .. })
        ));
        assert!(matches!(
            parse("Month,x\n2004-01,abc\n"),
            Err(TrendsError::ParseError { line: 2, .. })
        ));
        assert!(matches!(parse("2004-01,5\n"), Err(TrendsError::MissingHeader)));
        assert!(matches!(parse("Month,x\n"), Err(TrendsError::Empty)));
    }

    #[test]
    fn below_one_is_zero() {
        let r = parse("Category: All categories\r\n\r\nMonth,\"Shots: (Worldwide)\"\r\n2004-01,<1\r\n2004-02,3\r\n")
            .unwrap();
        assert_eq!(r.series.values(), &[0.0, 3.0]);
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let r = parse("\u{feff}Month,x\n2010-11,<1\n2010-12,17\n2011-01,100\n").unwrap();
        let text = write_trends_csv(&r);
        let again = parse(&text).unwrap();
        assert_eq!(again, r);
        assert_eq!(write_trends_csv(&again), text);
    }
}
