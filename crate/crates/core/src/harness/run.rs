use std::fs;
use std::path::Path;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EngagementConfig;
use crate::engagement::{
    apply_fault, interceptor_velocity, los_basis, observe, wrap_angle, Angles, ControlCommand, HitInfo, Observation,
    TerminalMonitor, TerminalStatus,
};
use crate::error::{Error, Result};
use crate::mppi::{CycleDiagnostics, GuidanceController, Variant};
use crate::neural::Checkpoint;
use crate::seed::derive_seed;

/// One row of the per-cycle log. LOS quantities are truth values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub time: f64,
    pub range: f64,
    pub range_rate: f64,
    pub los: Angles,
    pub los_rate: Angles,
    pub interceptor_speed: f64,
    pub command: ControlCommand,
    /// Acceleration delivered by the actuator after fault and saturation.
    pub applied: ControlCommand,
    /// `None` inside the blind range, where no planning happens.
    pub diagnostics: Option<CycleDiagnostics>,
    pub interceptor_position: [f64; 3],
    pub target_position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Hit(HitInfo),
    Diverged { min_range: f64, time: f64 },
    Failed { reason: String, min_range: f64, time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub variant: Variant,
    pub seed: u64,
    pub desired: Angles,
    pub fault_start: Option<f64>,
    pub outcome: Outcome,
    pub adapt_calls: usize,
    pub series: Vec<TimeSample>,
}

impl RunReport {
    pub fn hit(&self) -> Option<&HitInfo> {
        match &self.outcome {
            Outcome::Hit(h) => Some(h),
            _ => None,
        }
    }

    /// Closest approach over the run, m.
    pub fn miss_distance(&self) -> f64 {
        match &self.outcome {
            Outcome::Hit(h) => h.miss_distance,
            Outcome::Diverged { min_range, .. } | Outcome::Failed { min_range, .. } => *min_range,
        }
    }

    pub fn impact_time(&self) -> Option<f64> {
        self.hit().map(|h| h.time)
    }

    /// Terminal LOS angle errors `(θ_LT - θ_LD, φ_LT - φ_LD)`.
    pub fn angle_errors(&self) -> Option<[f64; 2]> {
        self.hit().map(|h| {
            [
                wrap_angle(h.terminal_los.elevation - self.desired.elevation),
                wrap_angle(h.terminal_los.azimuth - self.desired.azimuth),
            ]
        })
    }

    /// Larger of the two terminal angle errors in magnitude.
    pub fn angle_error(&self) -> Option<f64> {
        self.angle_errors().map(|e| e[0].abs().max(e[1].abs()))
    }

    /// Interception within `miss_limit` metres.
    pub fn intercepted(&self, miss_limit: f64) -> bool {
        self.hit().is_some_and(|h| h.miss_distance < miss_limit)
    }

    /// Mean of `|(θ̇_L, φ̇_L)|` over the samples with `time ≥ from`.
    pub fn mean_los_rate_after(&self, from: f64) -> Option<f64> {
        let rates: Vec<f64> = self
            .series
            .iter()
            .filter(|s| s.time >= from)
            .map(|s| s.los_rate.elevation.hypot(s.los_rate.azimuth))
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::corrupt(path, e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(format!("writing report {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading report {}", path.display()), e))?;
        Self::from_json(&text, path)
    }
}

/// Closed-loop engagement with the adaptive MPPI guidance law.
pub fn run_engagement(cfg: &EngagementConfig, model: &Checkpoint, seed: u64) -> Result<RunReport> {
    let mut controller = GuidanceController::new(cfg.controller_config())?;
    let mut report = simulate(cfg, seed, |obs, cycle_seed| {
        let (cmd, diag) = controller.step(obs, &model.params, &model.normalizer, cycle_seed)?;
        Ok((cmd, Some(diag)))
    })?;
    report.adapt_calls = controller.adapt_calls();
    Ok(report)
}

/// Runs the truth loop `observe → guidance → fault → step` until the
/// terminal monitor fires. `guidance` is called once per cycle outside the
/// blind range with the observation and a per-cycle seed.
pub fn simulate(
    cfg: &EngagementConfig,
    seed: u64,
    mut guidance: impl FnMut(&Observation, u64) -> Result<(ControlCommand, Option<CycleDiagnostics>)>,
) -> Result<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenario = cfg.sample(&mut rng)?;
    let plant = scenario.plant;
    let sim = &cfg.simulation;
    let mut state = scenario.initial;
    let mut monitor = TerminalMonitor::new(sim.terminal);
    let mut command = ControlCommand::ZERO;
    let mut position = [0.0; 3];
    let mut series = Vec::new();
    let straight_horizon = 2.0 * sim.dt;

    let outcome = loop {
        let step = series.len() as u64;
        let result = (|| -> Result<(TimeSample, _)> {
            let obs = observe(&state, &cfg.observation, &plant.guard, derive_seed(seed, 2 * step))?;
            let mut diagnostics = None;
            if obs.range >= sim.blind_range {
                let (c, d) = guidance(&obs, derive_seed(seed, 2 * step + 1))?;
                command = c;
                diagnostics = d;
            }
            let truth = plant.derivative(&state, command)?;
            let e_r = los_basis(state.los)[0];
            let sample = TimeSample {
                time: state.time,
                range: state.range,
                range_rate: truth.range_rate,
                los: state.los,
                los_rate: truth.los_rate,
                interceptor_speed: state.interceptor_speed,
                command,
                applied: apply_fault(command, plant.fault.as_ref(), state.time, plant.max_accel),
                diagnostics,
                interceptor_position: position,
                target_position: std::array::from_fn(|i| position[i] + state.range * e_r[i]),
            };
            let next = plant.step(&state, command, sim.dt)?;
            Ok((sample, next))
        })();
        match result {
            Ok((sample, next)) => {
                series.push(sample);
                let (v0, v1) = (interceptor_velocity(&state), interceptor_velocity(&next));
                for i in 0..3 {
                    position[i] += 0.5 * sim.dt * (v0[i] + v1[i]);
                }
                state = next;
            }
            Err(Error::SingularGeometry(what)) => {
                // Near the pass the LOS frame swings through large angles
                // within one step, so a stage can reach R = 0 or a heading
                // of ±π/2 relative to the LOS.
                debug!("seed {seed}: singular geometry ({what}) at t = {:.3}", state.time);
                break match monitor.finish_within(2.0 * straight_horizon) {
                    Some(h) => Outcome::Hit(h),
                    _ => Outcome::Failed {
                        reason: format!("singular geometry: {what}"),
                        min_range: monitor.min_range().min(state.range),
                        time: state.time,
                    },
                };
            }
            Err(e) => return Err(e),
        }
        match monitor.check(&state) {
            // Near the pass the LOS rate grows without bound and a polar
            // step loses accuracy; the last few milliseconds are flown on
            // straight lines instead.
            TerminalStatus::Continue => {
                if let Some(h) = monitor.finish_within(straight_horizon) {
                    break Outcome::Hit(h);
                }
            }
            TerminalStatus::Hit(h) => break Outcome::Hit(h),
            TerminalStatus::Diverged => {
                break Outcome::Diverged {
                    min_range: monitor.min_range(),
                    time: state.time,
                }
            }
        }
    };

    Ok(RunReport {
        name: cfg.name.clone(),
        variant: cfg.controller.variant,
        seed,
        desired: cfg.desired,
        fault_start: cfg.fault.map(|f| f.start),
        outcome,
        adapt_calls: 0,
        series,
    })
}
