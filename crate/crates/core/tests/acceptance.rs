//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use borrowscope::catalog::{
    resolve_song, string_similarity, FixtureEntity, FixtureFile, FixtureSource, LinkConfig,
    SongRecord,
};
use borrowscope::granger::granger_test;
use borrowscope::pipeline::{demo, run_pipeline, write_reports, PipelineConfig};
use borrowscope::rdd::fit_rdd;
use borrowscope::stats::{f_sf, t_sf_two_sided};
use borrowscope::synth::{gen_granger_pair, gen_rdd_window, GaussianStream, GrangerScenario, RddScenario, SplitMix64};

use common::{granger_reference, window};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_open01()
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn c1_exact_recovery() -> Outcome {
    let mut rng = SplitMix64::new(0xC1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..1000 {
        let mut b0 = uniform(&mut rng, -100.0, 100.0);
        if b0.abs() <= 1e-3 {
            b0 = 1.0;
        }
        let beta = [
            b0,
            uniform(&mut rng, -5.0, 5.0),
            uniform(&mut rng, -100.0, 100.0),
            uniform(&mut rng, -5.0, 5.0),
        ];
        let w = gen_rdd_window(&RddScenario::new(beta, 0.0, seed)).unwrap();
        let fit = fit_rdd(&w, 0.05).unwrap();
        let scale = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        for (got, want) in fit.coefficients().iter().zip(beta) {
            worst = worst.max((got - want).abs() / scale);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max relative error {worst:.2e}, {}", secs(elapsed)),
    )
}

fn c2_null_calibration() -> Outcome {
    let mut rng = SplitMix64::new(0xC2);
    let start = Instant::now();
    let trials = 5000;
    let mut rejected = 0;
    for seed in 0..trials {
        let beta = [uniform(&mut rng, 20.0, 80.0), uniform(&mut rng, -1.0, 1.0), 0.0, 0.0];
        let w = gen_rdd_window(&RddScenario::new(beta, 2.0, 1_000_000 + seed)).unwrap();
        if fit_rdd(&w, 0.05).unwrap().significant {
            rejected += 1;
        }
    }
    let elapsed = start.elapsed();
    let rate = f64::from(rejected) / trials as f64;
    outcome(
        (0.035..=0.065).contains(&rate) && elapsed < Duration::from_secs(10),
        format!("rejection rate {rate:.4} over {trials} windows, {}", secs(elapsed)),
    )
}

fn c3_step_function() -> Outcome {
    let fit = fit_rdd(&window([10.0; 12], [30.0; 12]), 0.05).unwrap();
    let ate = fit.ate_relative_pct.unwrap_or(f64::NAN);
    outcome(
        (ate - 200.0).abs() <= 1e-9 && fit.residual_sum_squares <= 1e-9,
        format!("ATE {ate} %, SSR {:.1e}", fit.residual_sum_squares),
    )
}

fn c4_scale_invariance() -> Outcome {
    let mut rng = SplitMix64::new(0xC4);
    let mut worst_ate = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut worst_g = 0.0f64;
    for seed in 0..200u64 {
        let beta = [
            uniform(&mut rng, 10.0, 60.0),
            uniform(&mut rng, -1.0, 1.0),
            uniform(&mut rng, -20.0, 20.0),
            uniform(&mut rng, -1.0, 1.0),
        ];
        let w = gen_rdd_window(&RddScenario::new(beta, uniform(&mut rng, 0.5, 5.0), seed)).unwrap();
        let mut g = GaussianStream::new(seed ^ 0xABCD);
        let predictor: Vec<f64> = (0..24).map(|_| 20.0 + 5.0 * g.next_standard()).collect();
        let base = fit_rdd(&w, 0.05).unwrap();
        let base_g = granger_test(&w.values(), &predictor, 10, 0.05).unwrap();
        for c in [0.1, 3.0, 100.0] {
            let fit = fit_rdd(&w.scaled(c), 0.05).unwrap();
            let a0 = base.ate_relative_pct.unwrap();
            let a1 = fit.ate_relative_pct.unwrap();
            worst_ate = worst_ate.max((a1 - a0).abs() / a0.abs().max(1.0));
            worst_p = worst_p.max((fit.p_value_jump - base.p_value_jump).abs());
            let xs: Vec<f64> = predictor.iter().map(|v| v * c).collect();
            let gs = granger_test(&w.scaled(c).values(), &xs, 10, 0.05).unwrap();
            if gs.per_lag.len() != base_g.per_lag.len() {
                worst_g = f64::INFINITY;
                continue;
            }
            for (a, b) in gs.per_lag.iter().zip(&base_g.per_lag) {
                worst_g = worst_g.max((a.p_value - b.p_value).abs());
            }
        }
    }
    outcome(
        worst_ate <= 1e-9 && worst_p <= 1e-9 && worst_g <= 1e-9,
        format!("max drift: ATE {worst_ate:.1e} (relative), p_jump {worst_p:.1e}, granger p {worst_g:.1e}"),
    )
}

fn c5_granger_reference() -> Outcome {
    let mut rng = SplitMix64::new(0xC5);
    let mut worst_f = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut compared = 0;
    for seed in 0..100u64 {
        let len = 11 + (rng.next_u64() % 20) as usize;
        let max_lag = 1 + (rng.next_u64() % 3) as usize;
        let s = GrangerScenario {
            coupling: uniform(&mut rng, -1.0, 1.0),
            lag: 1,
            length: len,
            noise_sigma: 1.0,
            seed,
        };
        let (y, x) = gen_granger_pair(&s).unwrap();
        let got = granger_test(&y, &x, max_lag, 0.05).unwrap();
        let want = granger_reference(&y, &x, max_lag);
        if got.per_lag.len() != want.len() {
            return outcome(false, format!("seed {seed}: {} lags vs {}", got.per_lag.len(), want.len()));
        }
        for (g, (f, p)) in got.per_lag.iter().zip(want) {
            worst_f = worst_f.max((g.f_stat - f).abs() / f.abs().max(1.0));
            worst_p = worst_p.max((g.p_value - p).abs());
            compared += 1;
        }
    }
    outcome(
        worst_f <= 1e-8 && worst_p <= 1e-8,
        format!("{compared} lag tests, max F error {worst_f:.1e} (relative), max p error {worst_p:.1e}"),
    )
}

fn c6_power_and_null() -> Outcome {
    let start = Instant::now();
    let rejections = |coupling: f64, trials: u64, seed0: u64| {
        (0..trials)
            .filter(|i| {
                let s = GrangerScenario {
                    coupling,
                    lag: 1,
                    length: 100,
                    noise_sigma: 1.0,
                    seed: seed0 + i,
                };
                let (y, x) = gen_granger_pair(&s).unwrap();
                granger_test(&y, &x, 1, 0.05).unwrap().causal
            })
            .count() as f64
            / trials as f64
    };
    let power = rejections(0.8, 500, 60_000);
    let null = rejections(0.0, 1000, 70_000);
    let elapsed = start.elapsed();
    outcome(
        power >= 0.95 && (null - 0.05).abs() <= 0.02 && elapsed < Duration::from_secs(30),
        format!("power {power:.3}, null rejection {null:.3}, {}", secs(elapsed)),
    )
}

fn c7_lag_feasibility() -> Outcome {
    let mut g = GaussianStream::new(0xC7);
    let y: Vec<f64> = (0..24).map(|_| g.next_standard()).collect();
    let x: Vec<f64> = (0..24).map(|_| g.next_standard()).collect();
    let r = granger_test(&y, &x, 10, 0.05).unwrap();
    let min_df2 = r.per_lag.iter().map(|l| l.df2).min().unwrap_or(0);
    outcome(
        r.max_lag_used == 7 && r.per_lag.len() == 7 && min_df2 >= 1,
        format!("max_lag_used {}, smallest df2 {min_df2}", r.max_lag_used),
    )
}

fn c8_distributions() -> Outcome {
    let t = t_sf_two_sided(2.086, 20).unwrap();
    let f = f_sf(4.351, 1, 20).unwrap();
    let mut rng = SplitMix64::new(0xC8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = uniform(&mut rng, 0.0, 8.0);
        let df = 1 + (rng.next_u64() % 300) as usize;
        let a = t_sf_two_sided(x, df).unwrap();
        let b = f_sf(x * x, 1, df).unwrap();
        worst = worst.max((a - b).abs());
    }
    outcome(
        (t - 0.05).abs() <= 5e-4 && (f - 0.05).abs() <= 5e-4 && worst <= 1e-10,
        format!("t tail {t:.6}, F tail {f:.6}, max duality gap {worst:.1e}"),
    )
}

fn c9_linking() -> Outcome {
    let bitwise = string_similarity("abc", "abc") == 1.0
        && string_similarity("abcd", "bcde") == 0.75
        && string_similarity("", "abc") == 0.0;

    let entity = |label: &str, artist: &str, mid: &str| FixtureEntity {
        label: label.into(),
        artist_label: Some(artist.into()),
        class_ids: BTreeSet::from(["Q7366".to_string()]),
        freebase_mid: Some(mid.into()),
    };
    let clube = SongRecord::new("clube", "Clube da Esquina vol. 2", "Milton Nascimento", None).unwrap();
    let near = SongRecord::new("near", "abcdefghij", "abcd", None).unwrap();
    let hits = |id: &str| vec![id.to_string()];
    let fixture = FixtureFile {
        search_results: BTreeMap::from([
            ("Clube da Esquina vol. 2".to_string(), hits("Q20053386")),
            ("abcdefghij".to_string(), hits("Q1")),
        ]),
        entities: BTreeMap::from([
            ("Q20053386".to_string(), entity("Clube da Esquina vol. 2", "Milton Nascimento", "/m/0zjw3z_")),
            ("Q1".to_string(), entity("abcdefghiX", "abxy", "/m/01")),
        ]),
    };
    let source = FixtureSource::new(fixture);
    let config = LinkConfig::default();
    let a = resolve_song(&clube, &source, &config).unwrap();
    let accepted = a.first().is_some_and(|d| {
        d.accepted && d.kb_id == "Q20053386" && d.freebase_mid.as_deref() == Some("/m/0zjw3z_")
    });
    let b = resolve_song(&near, &source, &config).unwrap();
    let rejected = b.first().is_some_and(|d| {
        !d.accepted && d.title_similarity == 0.9 && d.artist_similarity == 0.5
    });
    outcome(
        bitwise && accepted && rejected,
        format!("examples bitwise {bitwise}, Q20053386 accepted {accepted}, 0.9/0.5 rejected {rejected}"),
    )
}

fn run_demo(dir: &Path, jobs: usize) -> Vec<u8> {
    let mut config = PipelineConfig::load(&dir.join(demo::CONFIG_FILE)).unwrap();
    config.jobs = jobs;
    let run = run_pipeline(&config).unwrap();
    assert!(run.summary.is_conserved());
    let mut buf = Vec::new();
    write_reports(&mut buf, &run.reports).unwrap();
    buf
}

fn c10_golden_run() -> Outcome {
    let start = Instant::now();
    let scratch = tempfile::tempdir().unwrap();
    let dir = scratch.path().join("demo");
    demo::write_demo_dataset(&dir).unwrap();
    let first = run_demo(&dir, 1);
    let second = run_demo(&dir, 1);
    let parallel = run_demo(&dir, 4);
    let golden = std::fs::read(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo/expected/reports.ldjson"),
    )
    .unwrap_or_default();

    let mut config = PipelineConfig::load(&dir.join(demo::CONFIG_FILE)).unwrap();
    config.jobs = 4;
    let summary = run_pipeline(&config).unwrap().summary;
    let elapsed = start.elapsed();
    let identical = first == second && first == parallel;
    let matches_golden = first == golden;
    outcome(
        identical && matches_golden && summary.is_conserved() && elapsed < Duration::from_secs(5),
        format!(
            "runs identical {identical}, matches committed golden {matches_golden}, {} pairs = {} analyzed + {} dropped, {}",
            summary.total_pairs,
            summary.analyzed,
            summary.total_pairs - summary.analyzed,
            secs(elapsed)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("rdd exact recovery", c1_exact_recovery),
        ("rdd null calibration", c2_null_calibration),
        ("step-function window", c3_step_function),
        ("scale invariance", c4_scale_invariance),
        ("granger vs normal equations", c5_granger_reference),
        ("granger power and null", c6_power_and_null),
        ("lag feasibility", c7_lag_feasibility),
        ("distribution functions", c8_distributions),
        ("linking", c9_linking),
        ("end-to-end golden run", c10_golden_run),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        failed += usize::from(!result.pass);
        println!(
            "criterion {:>2} {:<28} {}  {}",
            i + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
