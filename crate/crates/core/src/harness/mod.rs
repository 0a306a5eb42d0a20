//! Scenario configuration, closed-loop runs, batches and output files.

mod batch;
mod config;
mod emit;
mod run;

pub use batch::{
    compare_variants, median, post_fault_start, run_monte_carlo, summarize, Comparison, Histogram, MonteCarloReport,
    VariantRow, HIT_MISS_LIMIT,
};
pub use config::{ControllerSection, EngagementConfig, FaultSpec, PipelineSection, Scenario, SimulationConfig};
pub use emit::{comparison_csv, emit_outputs, histogram_csv, run_csv, run_file_stem, summary_csv};
pub use run::{run_engagement, simulate, Outcome, RunReport, TimeSample};

use crate::error::Result;
use crate::meta::{meta_train, TrainConfig, TrainReport};
use crate::neural::Checkpoint;
use crate::pipeline::{collect, preprocess, Dataset};
use crate::seed::derive_seed;

/// Collects the training set, preprocesses it and trains the prior.
pub fn train_pipeline(cfg: &EngagementConfig, seed: u64) -> Result<(Checkpoint, Dataset, TrainReport)> {
    let dataset = collect(&cfg.collection, cfg.pipeline.trajectories, derive_seed(seed, 0))?;
    let (ckpt, report) = train_on(&dataset, cfg, seed)?;
    Ok((ckpt, dataset, report))
}

/// Preprocesses `dataset` and trains the prior on it.
pub fn train_on(dataset: &Dataset, cfg: &EngagementConfig, seed: u64) -> Result<(Checkpoint, TrainReport)> {
    let set = preprocess(dataset, &cfg.preprocess, derive_seed(seed, 1))?;
    let train = TrainConfig {
        seed: derive_seed(seed, 2),
        ..cfg.training.clone()
    };
    meta_train(&set, &train)
}
