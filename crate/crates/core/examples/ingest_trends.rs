//! Imports a Trends CSV export into a fresh cache, reads it back, normalizes
//! it and cuts the window around a release month.
//!
//!     cargo run --example ingest_trends

use std::fs;

use chrono::{TimeZone, Utc};

use borrowscope::series::{extract_window, normalize_peak, MonthKey};
use borrowscope::trends::{write_trends_csv, Mid, SeriesSource, TrendsCache};

const EXPORT: &str = "\
Category: All categories

Month,Shots: (Worldwide)
2013-10,6
2013-11,<1
2013-12,5
2014-01,4
2014-02,5
2014-03,4
2014-04,4
2014-05,3
2014-06,5
2014-07,4
2014-08,4
2014-09,5
2014-10,4
2014-11,4
2014-12,21
2015-01,30
2015-02,38
2015-03,35
2015-04,33
2015-05,30
2015-06,27
2015-07,26
2015-08,24
2015-09,22
2015-10,21
2015-11,20
2015-12,19
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = tempfile::tempdir()?;
    let export = scratch.path().join(format!("{}.csv", TrendsCache::file_stem(&Mid::parse("/m/0demo01")?)));
    fs::write(&export, EXPORT)?;

    let cache = TrendsCache::open(scratch.path().join("cache"))?;
    let fetched_at = Utc.with_ymd_and_hms(2016, 1, 5, 0, 0, 0).unwrap();
    let mid = cache.import_csv(&export, fetched_at)?;
    println!("imported {mid} -> {}", cache.entry_path(&mid).display());

    let record = cache.get(&mid)?.expect("just imported");
    println!("{} months from {}, fetched {}", record.series.len(), record.series.start(), record.fetched_at);
    print!("canonical form:\n{}", write_trends_csv(&record));

    let series = normalize_peak(&record.series)?;
    let window = extract_window(&series, MonthKey::new(2014, 12)?)?;
    println!("window around {}:", window.release);
    for (t, v) in window.points() {
        println!("  {:>3} {}  {v:6.2}", t, window.month_of(t));
    }
    Ok(())
}
