use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engagement::{
    ActuatorFault, Angles, EngagementState, InitialSpec, ObservationConfig, Plant, SingularityGuard, SpeedModel,
    TargetManeuver, TerminalConfig, DEFAULT_MAX_ACCEL,
};
use crate::error::{Error, Result};
use crate::meta::{AdaptationConfig, TrainConfig};
use crate::mppi::{ControllerConfig, MppiConfig, Variant};
use crate::pipeline::{CollectionConfig, PreprocessConfig};

/// Loss-of-effectiveness fault as written in a config file; a missing `end`
/// keeps the fault active until intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub gain: f64,
    pub start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

impl FaultSpec {
    pub fn to_fault(self) -> Result<ActuatorFault> {
        ActuatorFault::new(self.gain, self.start, self.end.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub dt: f64,
    pub max_accel: f64,
    /// Below this observed range the last command is held instead of
    /// re-planning, m.
    pub blind_range: f64,
    pub terminal: TerminalConfig,
    /// Logical worker budget for concurrent engagements.
    pub workers: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 0.005,
            max_accel: DEFAULT_MAX_ACCEL,
            blind_range: 20.0,
            terminal: TerminalConfig::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerSection {
    pub variant: Variant,
    #[serde(flatten)]
    pub mppi: MppiConfig,
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            variant: Variant::Proposed,
            mppi: MppiConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineSection {
    /// Collection engagements used to train the prior.
    pub trajectories: usize,
}

impl Default for PipelineSection {
    fn default() -> Self {
        Self { trajectories: 200 }
    }
}

/// One engagement scenario plus everything needed to train and run the
/// guidance law on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngagementConfig {
    pub name: String,
    pub initial: InitialSpec,
    /// Desired terminal LOS angles.
    pub desired: Angles,
    pub maneuver: TargetManeuver,
    pub speed_model: SpeedModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultSpec>,
    pub observation: ObservationConfig,
    pub simulation: SimulationConfig,
    pub controller: ControllerSection,
    pub adaptation: AdaptationConfig,
    pub pipeline: PipelineSection,
    pub collection: CollectionConfig,
    pub preprocess: PreprocessConfig,
    pub training: TrainConfig,
}

impl Default for EngagementConfig {
    fn default() -> Self {
        Self::case1()
    }
}

/// A concrete engagement drawn from an [`EngagementConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub initial: EngagementState,
    pub plant: Plant,
}

impl EngagementConfig {
    fn base(name: &str, initial: InitialSpec, desired: Angles) -> Self {
        Self {
            name: name.into(),
            initial,
            desired,
            maneuver: TargetManeuver {
                amplitude_y: 40.0,
                amplitude_z: 40.0,
                angular_frequency: 1.0,
            },
            speed_model: SpeedModel::default(),
            fault: Some(FaultSpec {
                gain: 0.5,
                start: 3.0,
                end: None,
            }),
            observation: ObservationConfig::default(),
            simulation: SimulationConfig::default(),
            controller: ControllerSection::default(),
            adaptation: AdaptationConfig::default(),
            pipeline: PipelineSection::default(),
            collection: CollectionConfig::default(),
            preprocess: PreprocessConfig::default(),
            training: TrainConfig::default(),
        }
    }

    pub fn case1() -> Self {
        Self::base("case1", InitialSpec::case1(), Angles::new(-0.6, 0.8))
    }

    pub fn case2() -> Self {
        let mut c = Self::base("case2", InitialSpec::case2(), Angles::new(-0.6, 0.8));
        c.speed_model.boost_duration = 3.0;
        c
    }

    /// Randomized geometry with noisy, uncertain observations.
    pub fn monte_carlo() -> Self {
        let mut c = Self::base("monte_carlo", InitialSpec::monte_carlo(), Angles::new(-0.8, 0.6));
        c.maneuver.amplitude_y = 30.0;
        c.maneuver.amplitude_z = 30.0;
        c.speed_model.boost_duration = 4.0;
        c.fault = Some(FaultSpec {
            gain: 0.6,
            start: 3.5,
            end: None,
        });
        c.observation = ObservationConfig::noisy();
        c
    }

    /// Built-in scenarios: `case1`, `case2`, `monte_carlo`, and the
    /// fixed-temperature comparison runs `case1_fixed` (λ = 1e-3) and
    /// `case2_fixed` (λ = 1e-4).
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = match name {
            "case1" | "case1_fixed" => Self::case1(),
            "case2" | "case2_fixed" => Self::case2(),
            "monte_carlo" => Self::monte_carlo(),
            _ => return Err(Error::Config(format!("unknown preset `{name}`"))),
        };
        match name {
            "case1_fixed" => c.controller.variant = Variant::FIXED_HIGH,
            "case2_fixed" => c.controller.variant = Variant::FIXED_LOW,
            _ => {}
        }
        c.name = name.into();
        Ok(c)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// Normalizes descending ranges and checks physical bounds.
    pub fn validated(mut self) -> Result<Self> {
        self.initial = self.initial.normalized();
        self.collection.initial = self.collection.initial.normalized();
        self.initial.validate()?;
        self.collection.initial.validate()?;
        if let Some(f) = self.fault {
            f.to_fault()?;
        }
        let s = &self.simulation;
        if !(s.dt > 0.0 && s.max_accel > 0.0) {
            return Err(Error::Config("simulation dt and max_accel must be positive".into()));
        }
        let m = &self.controller.mppi;
        if m.samples == 0 || m.horizon == 0 || !(m.lambda_star > 0.0) {
            return Err(Error::Config(
                "controller needs samples ≥ 1, horizon ≥ 1 and lambda_star > 0".into(),
            ));
        }
        if m.noise_sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Config("noise_sigma must be non-negative".into()));
        }
        let c = &m.cost;
        if c.k1.iter().chain(&c.k2).chain(&c.rate_gain).any(|w| !(*w >= 0.0)) || !(c.terminal_weight >= 0.0) {
            return Err(Error::Config("cost weights must be non-negative".into()));
        }
        if !(self.adaptation.alpha > 0.0) || self.adaptation.window == 0 {
            return Err(Error::Config("adaptation needs alpha > 0 and window ≥ 1".into()));
        }
        if self.maneuver.amplitude_y < 0.0 || self.maneuver.amplitude_z < 0.0 {
            return Err(Error::Config("maneuver amplitudes must be non-negative".into()));
        }
        Ok(self)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<Scenario> {
        Ok(Scenario {
            initial: self.initial.sample(rng),
            plant: Plant {
                fault: self.fault.map(FaultSpec::to_fault).transpose()?,
                maneuver: self.maneuver,
                speed_model: self.speed_model,
                max_accel: self.simulation.max_accel,
                guard: SingularityGuard::default(),
            },
        })
    }

    pub fn controller_config(&self) -> ControllerConfig {
        let mut mppi = self.controller.mppi;
        mppi.cost.desired = self.desired;
        ControllerConfig {
            variant: self.controller.variant,
            mppi,
            adaptation: self.adaptation,
            dt: self.simulation.dt,
            max_accel: self.simulation.max_accel,
        }
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        let mut c = self.clone();
        c.controller.variant = variant;
        c
    }
}
