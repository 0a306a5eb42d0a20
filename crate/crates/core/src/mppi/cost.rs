use serde::{Deserialize, Serialize};

use crate::engagement::{wrap_angle, Angles};

/// Weights of the LOS tracking cost.
///
/// The state cost penalizes the LOS angle error and the deviation of the LOS
/// rate from a desired rate `-rate_gain · (q - q_D)`, so that a rate error
/// term also drives the angles towards the desired impact angles. With
/// `rate_gain = 0` the rate term is a plain LOS rate penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostConfig {
    /// Weight on LOS angle error `(θ_L, φ_L)`.
    pub k1: [f64; 2],
    /// Weight on LOS rate error `(θ̇_L, φ̇_L)`.
    pub k2: [f64; 2],
    /// Desired-rate gain, 1/s.
    pub rate_gain: [f64; 2],
    /// Multiplier of the state cost at the end of the horizon.
    pub terminal_weight: f64,
    /// Dimensionless multiplier on `λ uᵀ Σ⁻¹ δu`.
    pub control_penalty: f64,
    /// Desired terminal LOS angles.
    #[serde(skip)]
    pub desired: Angles,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            k1: [0.6, 0.5],
            k2: [3.0, 2.0],
            rate_gain: [0.5, 0.5],
            terminal_weight: 10.0,
            control_penalty: 0.0,
            desired: Angles::default(),
        }
    }
}

impl CostConfig {
    pub fn desired_array(&self) -> [f64; 2] {
        [self.desired.elevation, self.desired.azimuth]
    }
}

/// Quadratic LOS angle and LOS rate tracking cost of one predicted state.
pub fn state_cost(q: [f64; 2], q_dot: [f64; 2], cfg: &CostConfig) -> f64 {
    let qd = cfg.desired_array();
    (0..2)
        .map(|i| {
            let err = wrap_angle(q[i] - qd[i]);
            let rate_err = q_dot[i] + cfg.rate_gain[i] * err;
            cfg.k1[i] * err * err + cfg.k2[i] * rate_err * rate_err
        })
        .sum()
}

/// Control/noise coupling `λ uᵀ Σ⁻¹ δu` for a diagonal `Σ`, evaluated on the
/// unsaturated plan control.
pub fn control_coupling(u: [f64; 2], du: [f64; 2], noise_sigma: [f64; 2], lambda: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        if noise_sigma[i] > 0.0 {
            acc += u[i] * du[i] / (noise_sigma[i] * noise_sigma[i]);
        }
    }
    lambda * acc
}

pub fn running_cost(
    q: [f64; 2],
    q_dot: [f64; 2],
    u: [f64; 2],
    du: [f64; 2],
    noise_sigma: [f64; 2],
    coupling_lambda: f64,
    cfg: &CostConfig,
) -> f64 {
    state_cost(q, q_dot, cfg) + cfg.control_penalty * control_coupling(u, du, noise_sigma, coupling_lambda)
}

pub fn terminal_cost(q: [f64; 2], q_dot: [f64; 2], cfg: &CostConfig) -> f64 {
    cfg.terminal_weight * state_cost(q, q_dot, cfg)
}
