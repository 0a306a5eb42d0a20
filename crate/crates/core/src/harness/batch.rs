use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_engagement, EngagementConfig, Outcome, RunReport};
use crate::error::{Error, Result};
use crate::mppi::Variant;
use crate::neural::Checkpoint;
use crate::seed::derive_seed;

/// Miss distance below which a run counts as an interception, m.
pub const HIT_MISS_LIMIT: f64 = 1.0;

/// Equal-width histogram over `[low, high]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub label: String,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(label: &str, values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        let (mut low, mut high) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if finite.is_empty() {
            (low, high) = (0.0, 1.0);
        } else if low == high {
            (low, high) = (low - 0.5, high + 0.5);
        }
        let width = (high - low) / bins as f64;
        let edges = (0..=bins).map(|i| low + width * i as f64).collect();
        let mut counts = vec![0; bins];
        for v in finite {
            let i = (((v - low) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self {
            label: label.into(),
            edges,
            counts,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub runs: Vec<RunReport>,
    /// Fraction of runs intercepted within [`HIT_MISS_LIMIT`].
    pub hit_rate: f64,
    /// Median over intercepted runs of the larger terminal angle error, rad.
    pub median_angle_error: Option<f64>,
    pub miss_histogram: Histogram,
    pub elevation_histogram: Histogram,
    pub azimuth_histogram: Histogram,
    pub speed_histogram: Histogram,
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(f)),
        None => Ok(f()),
    }
}

/// Runs `n_runs` engagements with independent draws of the ranged fields.
/// A run that errors is recorded as failed and the batch continues.
pub fn run_monte_carlo(
    cfg: &EngagementConfig,
    n_runs: usize,
    model: &Checkpoint,
    seed: u64,
) -> Result<MonteCarloReport> {
    if n_runs == 0 {
        return Err(Error::Config("need at least one run".into()));
    }
    let runs: Vec<RunReport> = in_pool(cfg.simulation.workers, || {
        (0..n_runs as u64)
            .into_par_iter()
            .map(|i| {
                let run_seed = derive_seed(seed, i);
                run_engagement(cfg, model, run_seed).unwrap_or_else(|e| failed_run(cfg, run_seed, e))
            })
            .collect()
    })?;
    let report = summarize(runs);
    info!(
        "{} runs: hit rate {:.3}, median angle error {:?}",
        n_runs, report.hit_rate, report.median_angle_error
    );
    Ok(report)
}

fn failed_run(cfg: &EngagementConfig, seed: u64, e: Error) -> RunReport {
    RunReport {
        name: cfg.name.clone(),
        variant: cfg.controller.variant,
        seed,
        desired: cfg.desired,
        fault_start: cfg.fault.map(|f| f.start),
        outcome: Outcome::Failed {
            reason: e.to_string(),
            min_range: f64::MAX,
            time: 0.0,
        },
        adapt_calls: 0,
        series: Vec::new(),
    }
}

pub fn summarize(runs: Vec<RunReport>) -> MonteCarloReport {
    const BINS: usize = 20;
    let n = runs.len();
    let hits = runs.iter().filter(|r| r.intercepted(HIT_MISS_LIMIT)).count();
    let errors: Vec<f64> = runs
        .iter()
        .filter(|r| r.intercepted(HIT_MISS_LIMIT))
        .filter_map(RunReport::angle_error)
        .collect();
    let misses: Vec<f64> = runs.iter().map(RunReport::miss_distance).collect();
    let terminal = |f: fn(&[f64; 2]) -> f64| -> Vec<f64> {
        runs.iter()
            .filter_map(|r| r.hit().map(|h| f(&[h.terminal_los.elevation, h.terminal_los.azimuth])))
            .collect()
    };
    let speeds: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.series.last().map(|s| s.interceptor_speed))
        .collect();
    MonteCarloReport {
        hit_rate: hits as f64 / n as f64,
        median_angle_error: median(&errors),
        miss_histogram: Histogram::new("miss_distance_m", &misses, BINS),
        elevation_histogram: Histogram::new("terminal_los_elevation_rad", &terminal(|a| a[0]), BINS),
        azimuth_histogram: Histogram::new("terminal_los_azimuth_rad", &terminal(|a| a[1]), BINS),
        speed_histogram: Histogram::new("terminal_speed_mps", &speeds, BINS),
        runs,
    }
}

/// Aggregate metrics of one variant, laid out like the paper's result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRow {
    pub variant: Variant,
    pub runs: usize,
    pub hits: usize,
    pub mean_miss_distance: f64,
    pub mean_terminal_elevation: Option<f64>,
    pub mean_terminal_azimuth: Option<f64>,
    pub mean_impact_time: Option<f64>,
    /// Mean LOS-rate magnitude from half a second after fault onset, rad/s.
    pub mean_post_fault_los_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<VariantRow>,
    /// `reports[v][s]`: variant `v` on seed `s`.
    pub reports: Vec<Vec<RunReport>>,
}

/// Start of the post-fault evaluation window, s.
pub fn post_fault_start(cfg: &EngagementConfig) -> f64 {
    cfg.fault.map_or(0.0, |f| f.start + 0.5)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Runs every variant on the same configuration and seeds.
pub fn compare_variants(
    cfg: &EngagementConfig,
    variants: &[Variant],
    seeds: &[u64],
    model: &Checkpoint,
) -> Result<Comparison> {
    let from = post_fault_start(cfg);
    let jobs: Vec<(usize, u64)> = (0..variants.len())
        .flat_map(|v| seeds.iter().map(move |&s| (v, s)))
        .collect();
    let flat: Vec<RunReport> = in_pool(cfg.simulation.workers, || {
        jobs.par_iter()
            .map(|&(v, s)| {
                let c = cfg.with_variant(variants[v]);
                run_engagement(&c, model, s).unwrap_or_else(|e| failed_run(&c, s, e))
            })
            .collect()
    })?;
    let reports: Vec<Vec<RunReport>> = flat.chunks(seeds.len().max(1)).map(<[RunReport]>::to_vec).collect();
    let rows = variants
        .iter()
        .zip(&reports)
        .map(|(&variant, runs)| {
            let hits: Vec<&RunReport> = runs.iter().filter(|r| r.intercepted(HIT_MISS_LIMIT)).collect();
            VariantRow {
                variant,
                runs: runs.len(),
                hits: hits.len(),
                mean_miss_distance: mean(runs.iter().map(RunReport::miss_distance)).unwrap_or(f64::NAN),
                mean_terminal_elevation: mean(hits.iter().filter_map(|r| r.hit()).map(|h| h.terminal_los.elevation)),
                mean_terminal_azimuth: mean(hits.iter().filter_map(|r| r.hit()).map(|h| h.terminal_los.azimuth)),
                mean_impact_time: mean(hits.iter().filter_map(|r| r.impact_time())),
                mean_post_fault_los_rate: mean(runs.iter().filter_map(|r| r.mean_los_rate_after(from))),
            }
        })
        .collect();
    Ok(Comparison { rows, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_every_value() {
        let v = [0.0, 0.1, 0.5, 0.99, 1.0, 1.0];
        let h = Histogram::new("x", &v, 4);
        assert_eq!(h.total(), v.len());
        assert_eq!(h.counts, vec![2, 0, 1, 3]);
        assert_eq!(Histogram::new("c", &[2.0; 3], 5).total(), 3);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
