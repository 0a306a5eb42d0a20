use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use log::debug;
use serde::{Deserialize, Serialize};

use super::cost::CostConfig;
use super::rollout::{rollout_costs, RolloutSettings};
use super::weights::{importance_weights, Temperature};
use super::{ControlPlan, NoiseBatch};
use crate::engagement::{ControlCommand, Observation, DEFAULT_MAX_ACCEL};
use crate::error::{Error, Result};
use crate::meta::{adapt, AdaptationConfig, ExperienceBuffer};
use crate::neural::{LosRateModel, ModelInput, ModelNormalizer, NetworkParams, NeuralDynamics};

/// Temperature guard used by the controller. The LOS tracking costs are of
/// order 1e-4 and their spread across samples routinely falls below 1e-6,
/// so the guard has to sit far below that to keep the temperature adaptive.
pub const CONTROLLER_SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MppiConfig {
    pub samples: usize,
    pub horizon: usize,
    /// Per-axis exploration standard deviation, m/s².
    pub noise_sigma: [f64; 2],
    pub lambda_star: f64,
    pub sigma_floor: f64,
    #[serde(flatten)]
    pub cost: CostConfig,
}

impl Default for MppiConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            horizon: 3,
            noise_sigma: [20.0, 20.0],
            lambda_star: 1.0,
            sigma_floor: CONTROLLER_SIGMA_FLOOR,
            cost: CostConfig::default(),
        }
    }
}

/// The compared guidance laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Variant {
    /// Online adaptation with the adaptive temperature.
    Proposed,
    /// Adaptive temperature on the frozen prior.
    NoAdaptation,
    /// Online adaptation with a constant temperature.
    FixedTemperature(f64),
}

impl Variant {
    /// Fixed temperatures of the two comparison runs.
    pub const FIXED_HIGH: Self = Self::FixedTemperature(1e-3);
    pub const FIXED_LOW: Self = Self::FixedTemperature(1e-4);

    pub fn adapts(self) -> bool {
        !matches!(self, Self::NoAdaptation)
    }

    pub fn temperature(self, lambda_star: f64) -> Temperature {
        match self {
            Self::FixedTemperature(l) => Temperature::Fixed(l),
            _ => Temperature::Adaptive { lambda_star },
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Proposed => f.write_str("proposed"),
            Self::NoAdaptation => f.write_str("no_adaptation"),
            Self::FixedTemperature(l) => write!(f, "fixed_temperature:{l}"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `proposed`, `no_adaptation`, `fixed_temperature:<λ>`,
    /// `fixed_high` and `fixed_low`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "proposed" => return Ok(Self::Proposed),
            "no_adaptation" => return Ok(Self::NoAdaptation),
            "fixed_high" => return Ok(Self::FIXED_HIGH),
            "fixed_low" => return Ok(Self::FIXED_LOW),
            _ => {}
        }
        let lambda = s
            .strip_prefix("fixed_temperature:")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| Error::Config(format!("unknown controller variant `{s}`")))?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("fixed temperature {lambda} must be positive")));
        }
        Ok(Self::FixedTemperature(lambda))
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> Self {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub variant: Variant,
    pub mppi: MppiConfig,
    pub adaptation: AdaptationConfig,
    /// Control cycle and prediction step, s.
    pub dt: f64,
    pub max_accel: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Proposed,
            mppi: MppiConfig::default(),
            adaptation: AdaptationConfig::default(),
            dt: 0.005,
            max_accel: DEFAULT_MAX_ACCEL,
        }
    }
}

/// Per-cycle quantities streamed to the run log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleDiagnostics {
    pub lambda: f64,
    pub min_cost: f64,
    pub mean_cost: f64,
    pub effective_sample_size: f64,
    pub adapted: bool,
}

/// Plan and temperature carried between control cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct MppiState {
    pub plan: ControlPlan,
    /// Temperature of the previous cycle, used by the coupling term.
    pub last_lambda: f64,
}

impl MppiState {
    pub fn new(horizon: usize) -> Self {
        Self {
            plan: ControlPlan::new(horizon),
            last_lambda: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CycleOutput<'a> {
    pub command: ControlCommand,
    pub params: Cow<'a, NetworkParams>,
    pub diagnostics: CycleDiagnostics,
}

/// One MPPI iteration with any model: sample, roll out, weight, update and
/// shift. Returns the command to execute.
pub fn mppi_step(
    model: &dyn LosRateModel,
    obs: &Observation,
    state: &mut MppiState,
    cfg: &ControllerConfig,
    seed: u64,
) -> Result<(ControlCommand, CycleDiagnostics)> {
    let m = &cfg.mppi;
    let start = ModelInput::new(obs, state.plan.controls[0]);
    let noise = NoiseBatch::sample(m.samples, state.plan.horizon(), m.noise_sigma, seed);
    let settings = RolloutSettings {
        cost: &m.cost,
        dt: cfg.dt,
        max_accel: cfg.max_accel,
        coupling_lambda: state.last_lambda,
    };
    let costs = rollout_costs(model, &start, &state.plan, &noise, &settings)?;
    let w = importance_weights(&costs, cfg.variant.temperature(m.lambda_star), m.sigma_floor);
    state.plan.update(&noise, &w.weights, cfg.max_accel);
    state.last_lambda = w.lambda;
    let diagnostics = CycleDiagnostics {
        lambda: w.lambda,
        min_cost: w.min_cost,
        mean_cost: w.mean_cost,
        effective_sample_size: w.effective_sample_size(),
        adapted: false,
    };
    Ok((state.plan.shift(), diagnostics))
}

/// A full online-adaptive control cycle: refit the prior to the buffered
/// experience (unless the variant is frozen), then run MPPI on the adapted
/// model.
pub fn control_cycle<'a>(
    obs: &Observation,
    prior: &'a NetworkParams,
    normalizer: &ModelNormalizer,
    buffer: &ExperienceBuffer,
    state: &mut MppiState,
    cfg: &ControllerConfig,
    seed: u64,
) -> Result<CycleOutput<'a>> {
    let params = if cfg.variant.adapts() && !buffer.is_empty() {
        Cow::Owned(adapt(prior, normalizer, buffer, &cfg.adaptation)?)
    } else {
        Cow::Borrowed(prior)
    };
    let model = NeuralDynamics::new(&params, normalizer)?;
    let (command, mut diagnostics) = mppi_step(&model, obs, state, cfg, seed)?;
    diagnostics.adapted = matches!(params, Cow::Owned(_));
    debug!(
        "t={:.3} λ={:.4e} min={:.4e} mean={:.4e} ess={:.1}",
        obs.time, diagnostics.lambda, diagnostics.min_cost, diagnostics.mean_cost, diagnostics.effective_sample_size
    );
    Ok(CycleOutput {
        command,
        params,
        diagnostics,
    })
}

/// Controller state across an engagement: plan, experience window and the
/// previous cycle's input.
#[derive(Debug, Clone)]
pub struct GuidanceController {
    pub cfg: ControllerConfig,
    pub state: MppiState,
    pub buffer: ExperienceBuffer,
    previous: Option<(ModelInput, [f64; 2])>,
    adapt_calls: usize,
}

impl GuidanceController {
    pub fn new(cfg: ControllerConfig) -> Result<Self> {
        if cfg.mppi.samples == 0 || cfg.mppi.horizon == 0 {
            return Err(Error::Config(
                "MPPI needs at least one sample and one horizon step".into(),
            ));
        }
        Ok(Self {
            state: MppiState::new(cfg.mppi.horizon),
            buffer: ExperienceBuffer::new(cfg.adaptation.window)?,
            previous: None,
            adapt_calls: 0,
            cfg,
        })
    }

    /// Number of cycles that ran the adaptation update.
    pub fn adapt_calls(&self) -> usize {
        self.adapt_calls
    }

    /// Records the transition that ended in `obs`, then runs a control cycle.
    pub fn step(
        &mut self,
        obs: &Observation,
        prior: &NetworkParams,
        normalizer: &ModelNormalizer,
        seed: u64,
    ) -> Result<(ControlCommand, CycleDiagnostics)> {
        self.record(obs);
        let out = control_cycle(obs, prior, normalizer, &self.buffer, &mut self.state, &self.cfg, seed)?;
        if out.diagnostics.adapted {
            self.adapt_calls += 1;
        }
        self.previous = Some((ModelInput::new(obs, out.command), obs_rate(obs)));
        Ok((out.command, out.diagnostics))
    }

    /// Executes `command` without planning (used inside the blind range),
    /// keeping the experience window up to date.
    pub fn hold(&mut self, obs: &Observation, command: ControlCommand) {
        self.record(obs);
        self.previous = Some((ModelInput::new(obs, command), obs_rate(obs)));
    }

    fn record(&mut self, obs: &Observation) {
        if let Some((input, rate)) = self.previous.take() {
            self.buffer.record(input, rate, obs_rate(obs), self.cfg.dt);
        }
    }
}

fn obs_rate(obs: &Observation) -> [f64; 2] {
    [obs.los_rate.elevation, obs.los_rate.azimuth]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in [
            Variant::Proposed,
            Variant::NoAdaptation,
            Variant::FIXED_HIGH,
            Variant::FIXED_LOW,
        ] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("fixed_low".parse::<Variant>().unwrap(), Variant::FixedTemperature(1e-4));
        assert!("fixed_temperature:-1".parse::<Variant>().is_err());
        assert!("mpc".parse::<Variant>().is_err());
    }

    #[test]
    fn only_no_adaptation_skips_the_update() {
        assert!(Variant::Proposed.adapts());
        assert!(Variant::FIXED_HIGH.adapts());
        assert!(!Variant::NoAdaptation.adapts());
    }
}
