use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Comparison, Histogram, MonteCarloReport, RunReport};
use crate::error::{Error, Result};

const RUN_COLUMNS: [(&str, &str, &str); 23] = [
    ("time", "s", "elapsed engagement time"),
    ("range", "m", "interceptor-target range R"),
    ("range_rate", "m/s", "closing rate dR/dt"),
    ("los_elevation", "rad", "LOS elevation θ_L"),
    ("los_azimuth", "rad", "LOS azimuth φ_L"),
    ("los_rate_elevation", "rad/s", "LOS elevation rate"),
    ("los_rate_azimuth", "rad/s", "LOS azimuth rate"),
    ("interceptor_speed", "m/s", "interceptor speed V_M"),
    ("command_ay", "m/s^2", "commanded lateral acceleration"),
    ("command_az", "m/s^2", "commanded normal acceleration"),
    ("applied_ay", "m/s^2", "lateral acceleration after fault and saturation"),
    ("applied_az", "m/s^2", "normal acceleration after fault and saturation"),
    (
        "lambda",
        "-",
        "MPPI temperature of the cycle (empty inside the blind range)",
    ),
    ("min_cost", "-", "lowest sampled trajectory cost"),
    ("mean_cost", "-", "mean sampled trajectory cost"),
    ("effective_sample_size", "-", "1 / sum of squared importance weights"),
    ("adapted", "0/1", "whether the model was adapted this cycle"),
    (
        "interceptor_x",
        "m",
        "interceptor position, inertial frame with origin at launch",
    ),
    ("interceptor_y", "m", ""),
    ("interceptor_z", "m", ""),
    ("target_x", "m", "target position, same frame"),
    ("target_y", "m", ""),
    ("target_z", "m", ""),
];

const SUMMARY_COLUMNS: [(&str, &str, &str); 10] = [
    ("name", "-", "scenario name"),
    ("variant", "-", "controller variant"),
    ("seed", "-", "run seed"),
    ("outcome", "-", "hit, diverged or failed"),
    ("miss_distance", "m", "closest approach"),
    (
        "theta_lt",
        "rad",
        "terminal LOS elevation (direction of closing at closest approach)",
    ),
    ("phi_lt", "rad", "terminal LOS azimuth"),
    ("impact_time", "s", "time of closest approach"),
    (
        "angle_error",
        "rad",
        "larger terminal angle error against the desired angles",
    ),
    ("adapt_calls", "-", "control cycles that adapted the model"),
];

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(path.to_path_buf())
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run_file_stem(r: &RunReport) -> String {
    format!("{}_{}_{}", r.name, r.variant, r.seed).replace([':', '/', ' '], "_")
}

pub fn run_csv(r: &RunReport) -> String {
    let mut out = RUN_COLUMNS.map(|c| c.0).join(",");
    out.push('\n');
    for s in &r.series {
        let d = s.diagnostics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.time,
            s.range,
            s.range_rate,
            s.los.elevation,
            s.los.azimuth,
            s.los_rate.elevation,
            s.los_rate.azimuth,
            s.interceptor_speed,
            s.command.ay,
            s.command.az,
            s.applied.ay,
            s.applied.az,
            opt(d.map(|d| d.lambda)),
            opt(d.map(|d| d.min_cost)),
            opt(d.map(|d| d.mean_cost)),
            opt(d.map(|d| d.effective_sample_size)),
            d.map(|d| if d.adapted { "1" } else { "0" }).unwrap_or_default(),
            s.interceptor_position[0],
            s.interceptor_position[1],
            s.interceptor_position[2],
            s.target_position[0],
            s.target_position[1],
            s.target_position[2],
        );
    }
    out
}

pub fn summary_csv(runs: &[RunReport]) -> String {
    let mut out = SUMMARY_COLUMNS.map(|c| c.0).join(",");
    out.push('\n');
    for r in runs {
        let hit = r.hit();
        let outcome = match r.outcome {
            super::Outcome::Hit(_) => "hit",
            super::Outcome::Diverged { .. } => "diverged",
            super::Outcome::Failed { .. } => "failed",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.name,
            r.variant,
            r.seed,
            outcome,
            r.miss_distance(),
            opt(hit.map(|h| h.terminal_los.elevation)),
            opt(hit.map(|h| h.terminal_los.azimuth)),
            opt(r.impact_time()),
            opt(r.angle_error()),
            r.adapt_calls,
        );
    }
    out
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", h.edges[i], h.edges[i + 1], c);
    }
    out
}

pub fn comparison_csv(c: &Comparison) -> String {
    let mut out = String::from(
        "variant,runs,hits,mean_miss_distance,mean_theta_lt,mean_phi_lt,mean_impact_time,mean_post_fault_los_rate\n",
    );
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.variant,
            r.runs,
            r.hits,
            r.mean_miss_distance,
            opt(r.mean_terminal_elevation),
            opt(r.mean_terminal_azimuth),
            opt(r.mean_impact_time),
            opt(r.mean_post_fault_los_rate),
        );
    }
    out
}

fn data_dictionary() -> String {
    let mut out = String::from("# Output files\n\n");
    out.push_str("`<name>_<variant>_<seed>.csv` — one row per control cycle (the simulation step):\n\n");
    out.push_str("| column | unit | meaning |\n|---|---|---|\n");
    for (c, u, m) in RUN_COLUMNS {
        let _ = writeln!(out, "| {c} | {u} | {m} |");
    }
    out.push_str("\n`summary.csv` — one row per run:\n\n| column | unit | meaning |\n|---|---|---|\n");
    for (c, u, m) in SUMMARY_COLUMNS {
        let _ = writeln!(out, "| {c} | {u} | {m} |");
    }
    out.push_str(
        "\n`hist_<quantity>.csv` — `bin_low,bin_high,count`, equal-width bins over the observed range; \
         terminal-angle histograms cover intercepted runs only.\n\n\
         `comparison.csv` — per-variant means over identical seeds; terminal quantities average the \
         intercepted runs, `mean_post_fault_los_rate` (rad/s) averages |LOS rate| from 0.5 s after \
         fault onset to the end of each run.\n",
    );
    out
}

/// Writes per-run time series, the run summary, histograms (for a Monte
/// Carlo batch), the comparison table and the data dictionary. Returns the
/// written paths.
pub fn emit_outputs(
    runs: &[RunReport],
    monte_carlo: Option<&MonteCarloReport>,
    comparison: Option<&Comparison>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(format!("creating {}", out_dir.display()), e))?;
    let mut paths = Vec::new();
    for r in runs {
        paths.push(write(&out_dir.join(format!("{}.csv", run_file_stem(r))), &run_csv(r))?);
    }
    paths.push(write(&out_dir.join("summary.csv"), &summary_csv(runs))?);
    if let Some(mc) = monte_carlo {
        for h in [
            &mc.miss_histogram,
            &mc.elevation_histogram,
            &mc.azimuth_histogram,
            &mc.speed_histogram,
        ] {
            paths.push(write(
                &out_dir.join(format!("hist_{}.csv", h.label)),
                &histogram_csv(h),
            )?);
        }
    }
    if let Some(c) = comparison {
        paths.push(write(&out_dir.join("comparison.csv"), &comparison_csv(c))?);
    }
    paths.push(write(&out_dir.join("DATA_DICTIONARY.md"), &data_dictionary())?);
    Ok(paths)
}
