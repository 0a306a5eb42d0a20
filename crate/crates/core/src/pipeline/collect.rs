use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engagement::{
    observe, Angles, ControlCommand, EngagementState, InitialSpec, ObservationConfig, Param, Plant, SpeedModel,
    TargetManeuver, TerminalConfig, TerminalMonitor, TerminalStatus, DEFAULT_MAX_ACCEL,
};
use crate::error::{Error, Result};
use crate::neural::{ModelInput, INPUT_DIM, LOS_RATE};
use crate::seed::derive_seed;

/// Randomized open-loop engagements used to build the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollectionConfig {
    pub initial: InitialSpec,
    /// Target maneuver amplitude on both axes, m/s².
    pub maneuver_amplitude: Param,
    pub maneuver_frequency: Param,
    pub boost_duration: Param,
    pub speed_model: SpeedModel,
    /// Sensor model during collection. Ideal by default: the per-step rate
    /// increments are small enough that sensor noise swamps the control
    /// effect, and robustness to noise comes from augmentation instead.
    pub observation: ObservationConfig,
    /// Per-axis standard deviation of the random commands, m/s².
    pub control_sigma: f64,
    pub dt: f64,
    pub max_accel: f64,
    pub terminal: TerminalConfig,
    /// Recording stops once the observed range falls below this, m.
    pub min_record_range: f64,
    /// Recording stops once either observed LOS rate exceeds this, rad/s.
    /// Past that point the flight has missed and its rapidly diverging rates
    /// would dominate the target statistics.
    pub max_record_los_rate: f64,
    /// Fraction of trajectories launched near a collision course instead of
    /// with the configured interceptor headings. Random-heading flights
    /// rarely come close to the target, so without these the terminal phase
    /// is barely represented.
    pub aimed_fraction: f64,
    /// Initial range of the aimed trajectories, m.
    pub aimed_range: Param,
    /// Heading offset from the collision course on each axis, rad.
    pub aim_error: Param,
}

impl Default for CollectionConfig {
    fn default() -> Self {
        Self {
            initial: InitialSpec {
                range: Param::uniform(2500.0, 4500.0),
                los_elevation: Param::uniform(-1.0, -0.4),
                los_azimuth: Param::uniform(0.3, 1.1),
                interceptor_elevation: Param::uniform(-0.6, 0.6),
                interceptor_azimuth: Param::uniform(-0.6, 0.6),
                interceptor_speed: 800.0.into(),
                target_elevation: Param::uniform(-0.5, 0.7),
                target_azimuth: Param::uniform(-0.8, 0.3),
                target_speed: 270.0.into(),
            },
            maneuver_amplitude: Param::uniform(0.0, 45.0),
            maneuver_frequency: 1.0.into(),
            boost_duration: Param::uniform(3.0, 4.0),
            speed_model: SpeedModel::default(),
            observation: ObservationConfig::default(),
            control_sigma: 60.0,
            dt: 0.005,
            max_accel: DEFAULT_MAX_ACCEL,
            terminal: TerminalConfig::default(),
            min_record_range: 10.0,
            max_record_los_rate: 0.5,
            aimed_fraction: 0.7,
            aimed_range: Param::uniform(200.0, 4500.0),
            aim_error: Param::uniform(-0.08, 0.08),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    /// SHA-256 of the generating configuration.
    pub config_hash: String,
    /// Trajectories dropped because the geometry became singular.
    pub discarded: usize,
    pub dt: f64,
}

/// Observed state and applied command at every recorded step, grouped into
/// consecutive trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub time: Vec<f64>,
    /// Row-major `len × INPUT_DIM` raw model inputs.
    pub features: Vec<f64>,
    pub trajectory_lengths: Vec<usize>,
    pub meta: DatasetMeta,
}

/// A consecutive pair of recorded steps within one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRecord {
    pub trajectory: usize,
    pub time: f64,
    pub input: ModelInput,
    pub command: ControlCommand,
    /// Observed change of the LOS rates over the step, rad/s.
    pub target: [f64; 2],
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * INPUT_DIM..(i + 1) * INPUT_DIM]
    }

    /// Every within-trajectory pair of consecutive rows.
    pub fn transitions(&self) -> impl Iterator<Item = TransitionRecord> + '_ {
        let mut start = 0;
        self.trajectory_lengths.iter().enumerate().flat_map(move |(k, &len)| {
            let s = start;
            start += len;
            (s..(s + len).saturating_sub(1)).map(move |i| {
                let (a, b) = (
                    ModelInput::from_slice(self.row(i)),
                    ModelInput::from_slice(self.row(i + 1)),
                );
                TransitionRecord {
                    trajectory: k,
                    time: self.time[i],
                    input: a,
                    command: a.control(),
                    target: [b.0[LOS_RATE] - a.0[LOS_RATE], b.0[LOS_RATE + 1] - a.0[LOS_RATE + 1]],
                }
            })
        })
    }
}

/// SHA-256 of the configuration's JSON form, hex encoded.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_vec(cfg).expect("configuration serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

/// Recorded `(time, features)` of one random-control engagement.
pub fn collect_trajectory(cfg: &CollectionConfig, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = cfg.initial.sample(&mut rng);
    if rng.gen::<f64>() < cfg.aimed_fraction {
        state.range = cfg.aimed_range.sample(&mut rng);
        let lead = collision_heading(&state);
        state.interceptor = Angles::new(
            lead.elevation + cfg.aim_error.sample(&mut rng),
            lead.azimuth + cfg.aim_error.sample(&mut rng),
        );
    }
    let amplitude = cfg.maneuver_amplitude.sample(&mut rng);
    let plant = Plant {
        fault: None,
        maneuver: TargetManeuver {
            amplitude_y: amplitude,
            amplitude_z: amplitude,
            angular_frequency: cfg.maneuver_frequency.sample(&mut rng),
        },
        speed_model: SpeedModel {
            boost_duration: cfg.boost_duration.sample(&mut rng),
            ..cfg.speed_model
        },
        max_accel: cfg.max_accel,
        ..Plant::default()
    };
    let control = Normal::new(0.0, cfg.control_sigma).map_err(|e| Error::Config(format!("control sigma: {e}")))?;
    let mut monitor = TerminalMonitor::new(cfg.terminal);
    let (mut time, mut features) = (Vec::new(), Vec::new());

    for step in 0u64.. {
        let obs = observe(&state, &cfg.observation, &plant.guard, derive_seed(seed, step))?;
        if obs.range < cfg.min_record_range
            || obs.los_rate.elevation.abs() > cfg.max_record_los_rate
            || obs.los_rate.azimuth.abs() > cfg.max_record_los_rate
        {
            break;
        }
        let u = ControlCommand::new(control.sample(&mut rng), control.sample(&mut rng)).saturate(cfg.max_accel);
        time.push(obs.time);
        features.extend_from_slice(&ModelInput::new(&obs, u).0);
        state = plant.step(&state, u, cfg.dt)?;
        if monitor.check(&state) != TerminalStatus::Continue {
            break;
        }
    }
    Ok((time, features))
}

/// Interceptor heading (LOS frame) whose velocity cancels the target's
/// velocity across the LOS, i.e. zero initial LOS rates.
fn collision_heading(state: &EngagementState) -> Angles {
    let ratio = state.target_speed / state.interceptor_speed;
    let (st, ct) = state.target.elevation.sin_cos();
    let elevation = (ratio * st).clamp(-1.0, 1.0).asin();
    let azimuth = (ratio * ct * state.target.azimuth.sin() / elevation.cos())
        .clamp(-1.0, 1.0)
        .asin();
    Angles::new(elevation, azimuth)
}

/// Runs `n_trajectories` independent collection engagements. Trajectories
/// that hit a singular geometry are discarded and counted.
pub fn collect(cfg: &CollectionConfig, n_trajectories: usize, seed: u64) -> Result<Dataset> {
    if n_trajectories == 0 {
        return Err(Error::Config("need at least one trajectory".into()));
    }
    cfg.initial.validate()?;
    cfg.aim_error.validate("aim_error")?;
    InitialSpec {
        range: cfg.aimed_range,
        ..cfg.initial
    }
    .validate()?;
    if !(0.0..=1.0).contains(&cfg.aimed_fraction) {
        return Err(Error::Config(format!(
            "aimed_fraction {} outside [0, 1]",
            cfg.aimed_fraction
        )));
    }
    let runs: Vec<_> = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|k| collect_trajectory(cfg, derive_seed(seed, k)))
        .collect();

    let mut ds = Dataset {
        time: Vec::new(),
        features: Vec::new(),
        trajectory_lengths: Vec::new(),
        meta: DatasetMeta {
            seed,
            config_hash: config_hash(cfg),
            discarded: 0,
            dt: cfg.dt,
        },
    };
    for (k, run) in runs.into_iter().enumerate() {
        match run {
            Ok((t, f)) if t.len() >= 2 => {
                ds.trajectory_lengths.push(t.len());
                ds.time.extend(t);
                ds.features.extend(f);
            }
            Ok(_) => {}
            Err(e @ Error::SingularGeometry(_)) => {
                warn!("trajectory {k} discarded: {e}");
                ds.meta.discarded += 1;
            }
            Err(e) => return Err(e),
        }
    }
    info!(
        "collected {} rows from {} trajectories ({} discarded)",
        ds.len(),
        ds.trajectory_lengths.len(),
        ds.meta.discarded
    );
    Ok(ds)
}
