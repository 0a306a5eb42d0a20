use crate::engagement::{ControlCommand, Observation};

pub const STATE_FEATURES: usize = 9;
pub const INPUT_DIM: usize = STATE_FEATURES + 2;
/// The network predicts per-step increments of `(θ̇_L, φ̇_L)`.
pub const OUTPUT_DIM: usize = 2;

pub const FEATURE_NAMES: [&str; INPUT_DIM] = [
    "range",
    "range_rate",
    "los_elevation",
    "los_azimuth",
    "los_elevation_rate",
    "los_azimuth_rate",
    "interceptor_speed",
    "interceptor_elevation",
    "interceptor_azimuth",
    "accel_y",
    "accel_z",
];

pub const FEATURE_UNITS: [&str; INPUT_DIM] = [
    "m", "m/s", "rad", "rad", "rad/s", "rad/s", "m/s", "rad", "rad", "m/s^2", "m/s^2",
];

pub const RANGE: usize = 0;
pub const RANGE_RATE: usize = 1;
pub const LOS: usize = 2;
pub const LOS_RATE: usize = 4;
pub const CONTROL: usize = STATE_FEATURES;

/// Raw (un-normalized) network input: observed state features followed by
/// the commanded acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelInput(pub [f64; INPUT_DIM]);

impl ModelInput {
    pub fn new(obs: &Observation, command: ControlCommand) -> Self {
        Self([
            obs.range,
            obs.range_rate,
            obs.los.elevation,
            obs.los.azimuth,
            obs.los_rate.elevation,
            obs.los_rate.azimuth,
            obs.interceptor_speed,
            obs.interceptor.elevation,
            obs.interceptor.azimuth,
            command.ay,
            command.az,
        ])
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut a = [0.0; INPUT_DIM];
        a.copy_from_slice(values);
        Self(a)
    }

    pub fn q(&self) -> [f64; 2] {
        [self.0[LOS], self.0[LOS + 1]]
    }

    pub fn q_dot(&self) -> [f64; 2] {
        [self.0[LOS_RATE], self.0[LOS_RATE + 1]]
    }

    pub fn control(&self) -> ControlCommand {
        ControlCommand::new(self.0[CONTROL], self.0[CONTROL + 1])
    }

    pub fn set_control(&mut self, command: ControlCommand) {
        self.0[CONTROL] = command.ay;
        self.0[CONTROL + 1] = command.az;
    }
}
