//! Writes the bundled demo dataset to a scratch directory, runs the full
//! pipeline on it and prints one line per borrowing pair.
//!
//!     cargo run --example run_pipeline [-- <out_dir>]

use std::path::PathBuf;

use borrowscope::pipeline::{demo, run_pipeline, write_outputs, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = tempfile::tempdir()?;
    let config_path = demo::write_demo_dataset(&scratch.path().join("demo"))?;
    let mut config = PipelineConfig::load(&config_path)?;
    config.jobs = 4;
    if let Some(out) = std::env::args().nth(1) {
        config.out_dir = PathBuf::from(out);
    }

    let run = run_pipeline(&config)?;
    for r in &run.reports {
        let ate = r
            .rdd
            .as_ref()
            .and_then(|f| f.ate_relative_pct)
            .map_or("-".to_string(), |a| format!("{a:+.1}%"));
        let p_jump = r.rdd.as_ref().map_or("-".to_string(), |f| format!("{:.2e}", f.p_value_jump));
        let granger = r
            .granger
            .as_ref()
            .map_or("-".to_string(), |g| format!("min p {:.2e} over {} lags", g.min_p_value(), g.max_lag_used));
        println!(
            "{:>2} {:<22} <- {:<16} {:<17} ATE {:>8}  p {:>8}  granger {}",
            r.index,
            r.edge.borrowed_id,
            r.edge.borrowee_id,
            format!("{:?}", r.disposition),
            ate,
            p_jump,
            granger
        );
    }
    let s = &run.summary;
    println!(
        "\n{} pairs: {} analyzed, {} rdd-significant, {} granger-causal, {} either, {} both",
        s.total_pairs,
        s.analyzed,
        s.rdd_significant_count,
        s.granger_causal_count,
        s.either_causal_count,
        s.both_causal_count
    );

    write_outputs(&config.out_dir, &run.reports, &run.summary)?;
    println!("outputs written to {}", config.out_dir.display());
    Ok(())
}
