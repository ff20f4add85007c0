use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::Utc;
use clap::{Args, Parser, Subcommand};

use borrowscope::catalog::{load_graph, load_songs, FixtureSource};
use borrowscope::pipeline::{
    demo, emit_plot_data, link_songs, read_reports, run_pipeline, summarize, write_json,
    write_outputs, GrangerMode, PipelineConfig, PipelineError, RunMetadata, LINKS_FILE,
    METADATA_FILE, PLOT_DIR, REPORTS_FILE, SUMMARY_FILE,
};
use borrowscope::synth::{gen_granger_pair, gen_rdd_window, ScenarioFile, GENERATOR};

#[derive(Parser)]
#[command(name = "borrowscope", version, about = "Borrowing impact analysis over monthly search-interest series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve every song in the edge file to a knowledge-base entity.
    Link {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run RDD and Granger analysis on every borrowing pair.
    Analyze(AnalyzeArgs),
    /// Rebuild the summary and plot data from an existing reports file.
    Report {
        /// Directory holding reports.ldjson.
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic data.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    granger_mode: Option<GrangerMode>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Write the bundled five-pair demo dataset.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate series from a TOML scenario file into CSV files.
    Scenarios {
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Other(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(m) => Failure::Config(m),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Link { config, out } => link(&config, out),
        Command::Analyze(args) => analyze(args),
        Command::Report { out } => report(&out),
        Command::Synth { command } => synth(command),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn link(config_path: &Path, out: Option<PathBuf>) -> Result<ExitCode, Failure> {
    let config = PipelineConfig::load(config_path)?;
    let Some(fixture) = &config.entity_fixture else {
        return Err(Failure::Config("link needs entity_fixture in the config".into()));
    };
    let source = FixtureSource::open(fixture).map_err(PipelineError::from)?;
    let graph = load_graph(BufReader::new(File::open(&config.edges)?)).map_err(PipelineError::from)?;
    let songs = load_songs(BufReader::new(File::open(&config.songs)?)).map_err(PipelineError::from)?;
    let ids: Vec<String> = graph.nodes().map(str::to_string).collect();
    let links = link_songs(&ids, &songs, &source, &config.link)?;

    let out = out.unwrap_or(config.out_dir);
    std::fs::create_dir_all(&out)?;
    write_json(&out.join(LINKS_FILE), &links)?;
    for l in &links {
        match l.mid() {
            Some(mid) => println!("{}\t{}", l.song_id, mid),
            None => println!("{}\t-", l.song_id),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode, Failure> {
    let started_at = Utc::now();
    let mut config = PipelineConfig::load(&args.config)?;
    if let Some(a) = args.alpha {
        config.alpha = a;
    }
    if let Some(l) = args.max_lag {
        config.max_lag = l;
    }
    if let Some(m) = args.granger_mode {
        config.granger_mode = m;
    }
    if let Some(j) = args.jobs {
        config.jobs = j;
    }
    if let Some(o) = args.out {
        config.out_dir = o;
    }
    config.validate()?;

    let run = run_pipeline(&config)?;
    write_outputs(&config.out_dir, &run.reports, &run.summary)?;
    write_json(&config.out_dir.join(LINKS_FILE), &run.links)?;
    write_json(
        &config.out_dir.join(METADATA_FILE),
        &RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at,
            finished_at: Utc::now(),
            config_path: Some(args.config.display().to_string()),
            jobs: config.jobs,
        },
    )?;

    let s = &run.summary;
    println!(
        "{} pairs: {} analyzed, {} outliers, {} unlinked, {} out of window, {} all-zero, {} failed",
        s.total_pairs, s.analyzed, s.outliers, s.dropped_unlinked, s.dropped_window, s.dropped_all_zero, s.failed
    );
    println!(
        "rdd significant {}, granger causal {}, either {}, both {}",
        s.rdd_significant_count, s.granger_causal_count, s.either_causal_count, s.both_causal_count
    );
    Ok(if run.has_failures() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn report(out: &Path) -> Result<ExitCode, Failure> {
    let path = out.join(REPORTS_FILE);
    let file = File::open(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let reports = read_reports(BufReader::new(file))?;
    let summary = summarize(&reports);
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    let written = emit_plot_data(&reports, &out.join(PLOT_DIR))?;
    println!("{} reports, {} plot files", reports.len(), written.len());
    Ok(if summary.failed > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn synth(command: SynthCommand) -> Result<ExitCode, Failure> {
    match command {
        SynthCommand::Demo { out } => {
            let config = demo::write_demo_dataset(&out)?;
            println!("{}", config.display());
        }
        SynthCommand::Scenarios { scenarios, out } => {
            let text = std::fs::read_to_string(&scenarios)
                .map_err(|e| Failure::Config(format!("{}: {e}", scenarios.display())))?;
            let file: ScenarioFile = toml::from_str(&text).map_err(|e| Failure::Config(e.to_string()))?;
            std::fs::create_dir_all(&out)?;
            let bad = |e: borrowscope::synth::SynthError| Failure::Config(e.to_string());
            for (i, s) in file.rdd.iter().enumerate() {
                let w = gen_rdd_window(s).map_err(bad)?;
                let mut csv = String::from("t,value\n");
                for (t, y) in w.points() {
                    csv.push_str(&format!("{t},{y}\n"));
                }
                std::fs::write(out.join(format!("rdd_{i:04}.csv")), csv)?;
            }
            for (i, s) in file.granger.iter().enumerate() {
                let (target, predictor) = gen_granger_pair(s).map_err(bad)?;
                let mut csv = String::from("i,target,predictor\n");
                for (k, (y, x)) in target.iter().zip(&predictor).enumerate() {
                    csv.push_str(&format!("{k},{y},{x}\n"));
                }
                std::fs::write(out.join(format!("granger_{i:04}.csv")), csv)?;
            }
            println!(
                "{} rdd and {} granger scenarios written with {GENERATOR}",
                file.rdd.len(),
                file.granger.len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
