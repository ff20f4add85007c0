//! Bundled five-pair dataset used by the examples, the golden tests and
//! `borrowscope synth demo`.
//!
//! | pair | borrowed                         | borrowee        | outcome            |
//! |------|----------------------------------|-----------------|--------------------|
//! | 0    | Shots (LMFAO)                    | Somebody        | renewed interest   |
//! | 1    | You Spin Me Round                | Right Round     | planted 200% jump  |
//! | 2    | Werewolves of London             | All Summer Long | analyzed           |
//! | 3    | Clube da Esquina vol. 2          | fictional cover | all-zero, dropped  |
//! | 4    | Are You My Woman (Tell Me So)    | Crazy in Love   | unlinked, dropped  |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeZone, Utc};

use super::PipelineError;
use crate::catalog::{FixtureEntity, FixtureFile};
use crate::series::{normalize_peak, MonthKey, MonthlySeries};
use crate::synth::{gen_rdd_window, GaussianStream, RddScenario};
use crate::trends::{Mid, TrendsCache, TrendsRecord};

pub const CONFIG_FILE: &str = "config.toml";
/// Number of monthly points per demo series, 2004-01 through 2019-06.
pub const DEMO_MONTHS: usize = 186;

const SONG_CLASS: &str = "Q7366";
const HUMAN_CLASS: &str = "Q5";
const GROUP_CLASS: &str = "Q215380";

/// Planted window model of the second pair: `b2 / b0 = 2`.
pub const PLANTED_BETA: [f64; 4] = [30.0, 0.2, 60.0, -1.5];
pub const PLANTED_SIGMA: f64 = 0.3;

struct Song {
    id: &'static str,
    title: &'static str,
    artist: &'static str,
    kb_id: &'static str,
    mid: Option<&'static str>,
}

const SONGS: &[Song] = &[
    Song { id: "shots", title: "Shots", artist: "LMFAO", kb_id: "Q9000001", mid: Some("/m/0demo01") },
    Song { id: "somebody", title: "Somebody", artist: "Natalie La Rose", kb_id: "Q9000002", mid: Some("/m/0demo02") },
    Song { id: "you-spin-me-round", title: "You Spin Me Round (Like a Record)", artist: "Dead or Alive", kb_id: "Q9000003", mid: Some("/m/0demo03") },
    Song { id: "right-round", title: "Right Round", artist: "Flo Rida", kb_id: "Q9000004", mid: Some("/m/0demo04") },
    Song { id: "werewolves-of-london", title: "Werewolves of London", artist: "Warren Zevon", kb_id: "Q9000005", mid: Some("/m/0demo05") },
    Song { id: "all-summer-long", title: "All Summer Long", artist: "Kid Rock", kb_id: "Q9000006", mid: Some("/m/0demo06") },
    Song { id: "clube-da-esquina-2", title: "Clube da Esquina vol. 2", artist: "Milton Nascimento", kb_id: "Q20053386", mid: Some("/m/0zjw3z_") },
    Song { id: "esquina-dois", title: "Esquina Dois", artist: "Lua Serrana", kb_id: "Q9000008", mid: Some("/m/0demo08") },
    Song { id: "are-you-my-woman", title: "Are You My Woman (Tell Me So)", artist: "The Chi-Lites", kb_id: "Q9000009", mid: None },
    Song { id: "crazy-in-love", title: "Crazy in Love", artist: "Beyonce", kb_id: "Q9000010", mid: Some("/m/0demo10") },
];

const EDGES: &[(&str, &str, &str, &str)] = &[
    ("shots", "somebody", "sample", "2014-12"),
    ("you-spin-me-round", "right-round", "sample", "2009-02"),
    ("werewolves-of-london", "all-summer-long", "sample", "2008-03"),
    ("clube-da-esquina-2", "esquina-dois", "cover", "2016-05"),
    ("are-you-my-woman", "crazy-in-love", "sample", "2003-05"),
];

pub fn demo_start() -> MonthKey {
    MonthKey::new(2004, 1).expect("valid month")
}

pub fn demo_fetched_at() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2019, 7, 1, 0, 0, 0).single().expect("valid timestamp")
}

fn idx(year: i32, month: u8) -> usize {
    demo_start().months_until(MonthKey::new(year, month).expect("valid month")) as usize
}

/// Decaying pulse starting at `at`: `height * exp(-(i - at) / tau)`.
fn pulse(i: usize, at: usize, height: f64, tau: f64) -> f64 {
    if i < at {
        0.0
    } else {
        height * (-((i - at) as f64) / tau).exp()
    }
}

fn raw_series(id: &str) -> Vec<f64> {
    let mut g = GaussianStream::new(seed_of(id));
    let n = DEMO_MONTHS;
    let mut out = vec![0.0; n];
    match id {
        "somebody" => {
            let r = idx(2014, 12);
            for (i, v) in out.iter_mut().enumerate() {
                if i + 1 >= r {
                    let rise = match i + 1 - r {
                        0 => 8.0,
                        1 => 40.0,
                        2 => 75.0,
                        _ => 0.0,
                    };
                    *v = rise + pulse(i, r + 2, 100.0, 6.0) + 4.0 + g.next_normal(0.0, 1.0);
                }
            }
        }
        "shots" => {
            let borrowee = raw_series("somebody");
            let hit = idx(2009, 1);
            for (i, v) in out.iter_mut().enumerate() {
                let base = if i >= hit { 8.0 } else { 0.0 };
                let echo = if i >= 1 { 0.6 * borrowee[i - 1] } else { 0.0 };
                *v = base + pulse(i, hit, 100.0, 5.0) + echo + g.next_normal(0.0, 0.8);
            }
        }
        "right-round" => {
            let r = idx(2009, 2);
            for (i, v) in out.iter_mut().enumerate() {
                if i >= r {
                    *v = pulse(i, r, 100.0, 8.0) + 6.0 + g.next_normal(0.0, 1.0);
                }
            }
        }
        "you-spin-me-round" => {
            let release = MonthKey::new(2009, 2).expect("valid month");
            let r = idx(2009, 2);
            let scenario = RddScenario {
                release,
                ..RddScenario::new(PLANTED_BETA, PLANTED_SIGMA, seed_of(id))
            };
            let window = gen_rdd_window(&scenario).expect("valid scenario");
            let last_post = window.post[11];
            for (i, v) in out.iter_mut().enumerate() {
                *v = if i + 12 < r {
                    30.0 + g.next_normal(0.0, 1.5)
                } else if i < r {
                    window.pre[i + 12 - r]
                } else if i == r {
                    scenario.mean_at(0) + PLANTED_BETA[2]
                } else if i <= r + 12 {
                    window.post[i - r - 1]
                } else {
                    30.0 + (last_post - 30.0) * (-((i - r - 12) as f64) / 6.0).exp()
                        + g.next_normal(0.0, 1.5)
                };
            }
        }
        "werewolves-of-london" => {
            let r = idx(2008, 3);
            for (i, v) in out.iter_mut().enumerate() {
                let october = if i % 12 == 9 { 45.0 } else if i % 12 == 8 { 12.0 } else { 0.0 };
                *v = 22.0 + october + pulse(i, r, 6.0, 4.0) + g.next_normal(0.0, 2.0);
            }
        }
        "all-summer-long" => {
            let r = idx(2008, 3);
            for (i, v) in out.iter_mut().enumerate() {
                if i >= r {
                    let summer = if (5..=7).contains(&(i % 12)) { 10.0 } else { 0.0 };
                    *v = pulse(i, r + 3, 100.0, 5.0)
                        + if i < r + 3 { 25.0 * (i - r + 1) as f64 } else { 0.0 }
                        + summer
                        + 8.0
                        + g.next_normal(0.0, 1.5);
                }
            }
        }
        "esquina-dois" => {
            let r = idx(2016, 5);
            for (i, v) in out.iter_mut().enumerate() {
                if i >= r {
                    *v = pulse(i, r, 100.0, 4.0) + 3.0 + g.next_normal(0.0, 1.0);
                }
            }
        }
        "crazy-in-love" => {
            for (i, v) in out.iter_mut().enumerate() {
                *v = pulse(i, 0, 80.0, 10.0) + 25.0 + g.next_normal(0.0, 2.0);
            }
        }
        // the borrowed song of the all-zero pair never registers any interest
        _ => {}
    }
    out
}

fn seed_of(id: &str) -> u64 {
    // FNV-1a, stable across platforms and releases
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Peak-normalized, integer-valued series as a Trends export would report it.
pub fn demo_series(song_id: &str) -> Option<MonthlySeries> {
    let song = SONGS.iter().find(|s| s.id == song_id)?;
    let mid = song.mid?;
    let raw: Vec<f64> = raw_series(song.id).into_iter().map(|v| v.max(0.0)).collect();
    let series = MonthlySeries::new(mid, demo_start(), raw).expect("finite, non-negative");
    let peaked = normalize_peak(&series).expect("non-empty");
    let rounded = peaked.values().iter().map(|v| v.round()).collect();
    Some(MonthlySeries::new(mid, demo_start(), rounded).expect("finite, non-negative"))
}

fn entities() -> FixtureFile {
    let mut search_results: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut entities: BTreeMap<String, FixtureEntity> = BTreeMap::new();
    let classes = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();

    for (n, song) in SONGS.iter().enumerate() {
        let artist_id = format!("Q91{n:05}");
        entities.insert(
            artist_id.clone(),
            FixtureEntity {
                label: song.artist.to_string(),
                artist_label: None,
                class_ids: classes(&[if song.artist.starts_with("The ") { GROUP_CLASS } else { HUMAN_CLASS }]),
                freebase_mid: None,
            },
        );
        search_results.insert(song.artist.to_string(), vec![artist_id.clone()]);

        let mut title_hits = Vec::new();
        if song.mid.is_some() {
            entities.insert(
                song.kb_id.to_string(),
                FixtureEntity {
                    label: song.title.to_string(),
                    artist_label: Some(song.artist.to_string()),
                    class_ids: classes(&[SONG_CLASS]),
                    freebase_mid: song.mid.map(str::to_string),
                },
            );
            title_hits.push(song.kb_id.to_string());
        } else {
            // only a person matches this title
            entities.insert(
                song.kb_id.to_string(),
                FixtureEntity {
                    label: "Eugene Record".into(),
                    artist_label: None,
                    class_ids: classes(&[HUMAN_CLASS]),
                    freebase_mid: Some("/m/0demo09".into()),
                },
            );
            title_hits.push(song.kb_id.to_string());
        }
        search_results.insert(song.title.to_string(), title_hits.clone());
        search_results.insert(format!("{} {}", song.title, song.artist), title_hits);
    }

    // decoys: a same-titled song by another act and an album
    entities.insert(
        "Q9200001".into(),
        FixtureEntity {
            label: "Shots".into(),
            artist_label: Some("Imagine Dragons".into()),
            class_ids: classes(&[SONG_CLASS]),
            freebase_mid: Some("/m/0decoy1".into()),
        },
    );
    entities.insert(
        "Q9200002".into(),
        FixtureEntity {
            label: "Right Round".into(),
            artist_label: Some("Flo Rida".into()),
            class_ids: classes(&["Q482994"]),
            freebase_mid: Some("/m/0decoy2".into()),
        },
    );
    search_results.get_mut("Shots").expect("inserted").push("Q9200001".into());
    search_results.get_mut("Right Round").expect("inserted").insert(0, "Q9200002".into());

    FixtureFile {
        search_results,
        entities,
    }
}

fn config_text() -> String {
    "\
# Bundled demo run. Paths are relative to this file.
edges = \"edges.tsv\"
songs = \"songs.tsv\"
entity_fixture = \"entities.json\"
cache_dir = \"cache\"
out_dir = \"out\"
alpha = 0.05
max_lag = 10
granger_mode = \"windowed\"
jobs = 1
"
    .to_string()
}

/// Writes the demo dataset into `dir`, which must be empty or absent.
/// Returns the path of the config file.
pub fn write_demo_dataset(dir: &Path) -> Result<PathBuf, PipelineError> {
    if dir.exists() && fs::read_dir(dir)?.next().is_some() {
        return Err(PipelineError::Config(format!(
            "{} is not empty",
            dir.display()
        )));
    }
    fs::create_dir_all(dir)?;

    let mut edges = String::from("# borrowed_id\tborrowee_id\tkind\trelease\n");
    for (a, b, kind, release) in EDGES {
        writeln!(edges, "{a}\t{b}\t{kind}\t{release}").expect("string write");
    }
    fs::write(dir.join("edges.tsv"), edges)?;

    let mut songs = String::from("# song_id\ttitle\tartist\n");
    for s in SONGS {
        writeln!(songs, "{}\t{}\t{}", s.id, s.title, s.artist).expect("string write");
    }
    fs::write(dir.join("songs.tsv"), songs)?;

    super::write_json(&dir.join("entities.json"), &entities())?;
    fs::write(dir.join(CONFIG_FILE), config_text())?;

    let cache = TrendsCache::open(dir.join("cache"))?;
    for s in SONGS {
        if let Some(series) = demo_series(s.id) {
            let mid = Mid::parse(series.entity_id())?;
            let record = TrendsRecord::new(mid, series.start(), series.values().to_vec(), demo_fetched_at())?;
            cache.cache_put(&record)?;
        }
    }
    Ok(dir.join(CONFIG_FILE))
}
