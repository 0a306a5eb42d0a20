//! Sampling-based model predictive path integral controller.

mod controller;
mod cost;
mod model;
mod noise;
mod plan;
mod rollout;
mod weights;

pub use controller::{
    control_cycle, mppi_step, ControllerConfig, CycleDiagnostics, CycleOutput, GuidanceController, MppiConfig,
    MppiState, Variant, CONTROLLER_SIGMA_FLOOR,
};
pub use cost::{control_coupling, running_cost, state_cost, terminal_cost, CostConfig};
pub use model::KinematicModel;
pub use noise::NoiseBatch;
pub use plan::ControlPlan;
pub use rollout::{rollout_costs, rollout_costs_chunked, rollout_range, RolloutSettings, ROLLOUT_CHUNK};
pub use weights::{
    adaptive_temperature, importance_weights, population_std, ImportanceWeights, Temperature, DEFAULT_SIGMA_FLOOR,
};
