use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use mppi_guidance::harness::{
    compare_variants, emit_outputs, run_engagement, run_file_stem, run_monte_carlo, summarize, train_on,
    EngagementConfig, RunReport,
};
use mppi_guidance::mppi::Variant;
use mppi_guidance::neural::{load_params, save_params};
use mppi_guidance::pipeline::{collect, export_csv, load_dataset, save_dataset};
use mppi_guidance::{Error, Result};

/// Paper-scale Monte Carlo batch size.
const FULL_SCALE_RUNS: usize = 3500;

#[derive(Parser)]
#[command(version, about = "Meta-learning MPPI impact-angle guidance simulator")]
struct Cli {
    /// Scenario file (TOML). Overrides --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in scenario: case1, case2, monte_carlo, case1_fixed, case2_fixed.
    #[arg(long, global = true, default_value = "case1")]
    preset: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output / working directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Prior weights file; defaults to <out>/weights.mgw.
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect random-control trajectories into <out>/dataset.mgd.
    Collect {
        /// Number of trajectories (default from the config).
        #[arg(long)]
        runs: Option<usize>,
        /// Also write <out>/dataset.csv.
        #[arg(long)]
        csv: bool,
    },
    /// Train the prior on <out>/dataset.mgd.
    Train,
    /// One closed-loop engagement.
    Run {
        #[arg(long)]
        variant: Option<Variant>,
    },
    /// Randomized batch with histograms.
    Montecarlo {
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// Paper-scale batch of 3500 runs (roughly 10-20 s per run per core).
        #[arg(long)]
        full_scale: bool,
        #[arg(long)]
        variant: Option<Variant>,
    },
    /// All variants on identical seeds.
    Compare {
        /// Seeds per variant.
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Variants to compare (repeatable); defaults to proposed,
        /// no_adaptation and fixed_high.
        #[arg(long)]
        variant: Vec<Variant>,
    },
    /// Re-emit CSV files from the JSON reports in <out>/reports.
    Emit,
    /// Print the resolved scenario as TOML (a starting point for --config).
    Config,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}

fn mkdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn save_reports(out: &Path, runs: &[RunReport]) -> Result<()> {
    let dir = out.join("reports");
    mkdir(&dir)?;
    for r in runs {
        r.save(&dir.join(format!("{}.json", run_file_stem(r))))?;
    }
    Ok(())
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => EngagementConfig::load(path)?,
        None => EngagementConfig::preset(&cli.preset)?,
    };
    let out = cli.out.clone();
    let weights = cli.weights.clone().unwrap_or_else(|| out.join("weights.mgw"));
    let dataset_path = out.join("dataset.mgd");

    match cli.command {
        Command::Config => print!("{}", cfg.to_toml()),
        Command::Collect { runs, csv } => {
            mkdir(&out)?;
            let n = runs.unwrap_or(cfg.pipeline.trajectories);
            let ds = collect(&cfg.collection, n, cli.seed)?;
            save_dataset(&dataset_path, &ds)?;
            println!("{}", dataset_path.display());
            if csv {
                let p = out.join("dataset.csv");
                export_csv(&p, &ds)?;
                println!("{}", p.display());
            }
        }
        Command::Train => {
            let ds = load_dataset(&dataset_path)?;
            let (ckpt, report) = train_on(&ds, &cfg, cli.seed)?;
            if let Some(parent) = weights.parent() {
                mkdir(parent)?;
            }
            save_params(&weights, &ckpt)?;
            let history = serde_json::to_string_pretty(&report).expect("report serializes");
            let hist_path = out.join("training.json");
            fs::write(&hist_path, history).map_err(|e| Error::io(format!("writing {}", hist_path.display()), e))?;
            info!("best epoch {} of {}", report.best_epoch, report.history.len());
            print_paths(&[weights, hist_path]);
        }
        Command::Run { variant } => {
            if let Some(v) = variant {
                cfg.controller.variant = v;
            }
            let model = load_params(&weights)?;
            let report = run_engagement(&cfg, &model, cli.seed)?;
            print_run(&report);
            save_reports(&out, std::slice::from_ref(&report))?;
            print_paths(&emit_outputs(std::slice::from_ref(&report), None, None, &out)?);
        }
        Command::Montecarlo {
            runs,
            full_scale,
            variant,
        } => {
            if let Some(v) = variant {
                cfg.controller.variant = v;
            }
            let n = if full_scale { FULL_SCALE_RUNS } else { runs };
            let model = load_params(&weights)?;
            let mc = run_monte_carlo(&cfg, n, &model, cli.seed)?;
            println!(
                "runs {n}  hit rate {:.3}  median terminal angle error {}",
                mc.hit_rate,
                mc.median_angle_error.map_or("n/a".into(), |e| format!("{e:.4} rad"))
            );
            save_reports(&out, &mc.runs)?;
            print_paths(&emit_outputs(&mc.runs, Some(&mc), None, &out)?);
        }
        Command::Compare { runs, variant } => {
            let variants = if variant.is_empty() {
                vec![Variant::Proposed, Variant::NoAdaptation, Variant::FIXED_HIGH]
            } else {
                variant
            };
            let seeds: Vec<u64> = (0..runs as u64).map(|i| cli.seed + i).collect();
            let model = load_params(&weights)?;
            let cmp = compare_variants(&cfg, &variants, &seeds, &model)?;
            println!(
                "{:<24} {:>5} {:>5} {:>12} {:>9} {:>9} {:>9} {:>10}",
                "variant", "runs", "hits", "miss (m)", "θ_LT", "φ_LT", "t_imp", "post-rate"
            );
            let f = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.4}"));
            for r in &cmp.rows {
                println!(
                    "{:<24} {:>5} {:>5} {:>12.4e} {:>9} {:>9} {:>9} {:>10}",
                    r.variant.to_string(),
                    r.runs,
                    r.hits,
                    r.mean_miss_distance,
                    f(r.mean_terminal_elevation),
                    f(r.mean_terminal_azimuth),
                    f(r.mean_impact_time),
                    f(r.mean_post_fault_los_rate)
                );
            }
            let all: Vec<RunReport> = cmp.reports.concat();
            save_reports(&out, &all)?;
            print_paths(&emit_outputs(&all, None, Some(&cmp), &out)?);
        }
        Command::Emit => {
            let dir = out.join("reports");
            let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::io(format!("reading {}", dir.display()), e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            let runs = entries.iter().map(|p| RunReport::load(p)).collect::<Result<Vec<_>>>()?;
            let mc = (runs.len() > 1).then(|| summarize(runs.clone()));
            print_paths(&emit_outputs(&runs, mc.as_ref(), None, &out)?);
        }
    }
    Ok(())
}

fn print_run(r: &RunReport) {
    match r.hit() {
        Some(h) => println!(
            "hit: miss {:.4e} m  θ_LT {:.4}  φ_LT {:.4}  t {:.3} s  (adapted {} cycles)",
            h.miss_distance, h.terminal_los.elevation, h.terminal_los.azimuth, h.time, r.adapt_calls
        ),
        None => println!("no intercept: {:?}", r.outcome),
    }
}
