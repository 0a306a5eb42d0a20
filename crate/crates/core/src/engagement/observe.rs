use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{kinematics_derivative, Angles, ControlCommand, EngagementState, SingularityGuard};
use crate::error::Result;

/// What the guidance computer sees each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub range: f64,
    pub range_rate: f64,
    pub los: Angles,
    pub los_rate: Angles,
    pub interceptor_speed: f64,
    pub interceptor: Angles,
}

/// Observation channels that a multiplicative uncertainty can be applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Range,
    RangeRate,
    LosAngles,
    LosRates,
    Heading,
}

/// Slowly varying multiplicative error `1 + amplitude · sin(ω t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub amplitude: f64,
    pub angular_frequency: f64,
    pub channels: Vec<Channel>,
}

impl Default for Uncertainty {
    fn default() -> Self {
        Self {
            amplitude: 0.15,
            angular_frequency: 1.0,
            channels: vec![Channel::Range, Channel::RangeRate, Channel::Heading],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ObservationConfig {
    pub uncertainty: Option<Uncertainty>,
    /// Standard deviation of additive LOS angle noise, rad.
    pub los_angle_sigma: f64,
    /// Standard deviation of LOS rate noise as a fraction of the measured rate.
    pub los_rate_relative_sigma: f64,
}

impl ObservationConfig {
    /// The sensor model used for the randomized engagements: 15 % sinusoidal
    /// uncertainty, 8 mrad LOS noise and 1 % LOS-rate noise.
    pub fn noisy() -> Self {
        Self {
            uncertainty: Some(Uncertainty::default()),
            los_angle_sigma: 0.008,
            los_rate_relative_sigma: 0.01,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.uncertainty.is_none() && self.los_angle_sigma == 0.0 && self.los_rate_relative_sigma == 0.0
    }
}

pub fn observe(
    state: &EngagementState,
    cfg: &ObservationConfig,
    guard: &SingularityGuard,
    seed: u64,
) -> Result<Observation> {
    let rates = kinematics_derivative(state, ControlCommand::ZERO, ControlCommand::ZERO, guard)?;
    let mut obs = Observation {
        time: state.time,
        range: state.range,
        range_rate: rates.range_rate,
        los: state.los,
        los_rate: rates.los_rate,
        interceptor_speed: state.interceptor_speed,
        interceptor: state.interceptor,
    };

    if let Some(u) = &cfg.uncertainty {
        let k = 1.0 + u.amplitude * (u.angular_frequency * state.time).sin();
        for channel in &u.channels {
            match channel {
                Channel::Range => obs.range *= k,
                Channel::RangeRate => obs.range_rate *= k,
                Channel::LosAngles => obs.los = Angles::new(obs.los.elevation * k, obs.los.azimuth * k),
                Channel::LosRates => obs.los_rate = Angles::new(obs.los_rate.elevation * k, obs.los_rate.azimuth * k),
                Channel::Heading => {
                    obs.interceptor = Angles::new(obs.interceptor.elevation * k, obs.interceptor.azimuth * k)
                }
            }
        }
    }

    if cfg.los_angle_sigma > 0.0 || cfg.los_rate_relative_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n = || -> f64 { StandardNormal.sample(&mut rng) };
        let (n0, n1, n2, n3) = (n(), n(), n(), n());
        obs.los.elevation += cfg.los_angle_sigma * n0;
        obs.los.azimuth += cfg.los_angle_sigma * n1;
        let rel = cfg.los_rate_relative_sigma;
        obs.los_rate.elevation += rel * obs.los_rate.elevation.abs() * n2;
        obs.los_rate.azimuth += rel * obs.los_rate.azimuth.abs() * n3;
    }
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> EngagementState {
        EngagementState {
            range: 4000.0,
            los: Angles::new(-0.7, 0.65),
            interceptor: Angles::new(-0.36, -0.2),
            target: Angles::new(-0.32, -0.22),
            interceptor_speed: 800.0,
            target_speed: 270.0,
            time: 1.3,
        }
    }

    #[test]
    fn ideal_sensor_is_identity() {
        let s = state();
        let g = SingularityGuard::default();
        let o = observe(&s, &ObservationConfig::default(), &g, 7).unwrap();
        let d = kinematics_derivative(&s, ControlCommand::ZERO, ControlCommand::ZERO, &g).unwrap();
        assert_eq!(o.range, s.range);
        assert_eq!(o.los, s.los);
        assert_eq!(o.interceptor, s.interceptor);
        assert_eq!(o.los_rate, d.los_rate);
        assert_eq!(o.range_rate, d.range_rate);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let cfg = ObservationConfig::noisy();
        let g = SingularityGuard::default();
        let a = observe(&state(), &cfg, &g, 42).unwrap();
        let b = observe(&state(), &cfg, &g, 42).unwrap();
        let c = observe(&state(), &cfg, &g, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uncertainty_scales_selected_channels_only() {
        let cfg = ObservationConfig {
            uncertainty: Some(Uncertainty {
                amplitude: 0.15,
                angular_frequency: 1.0,
                channels: vec![Channel::Range],
            }),
            ..Default::default()
        };
        let s = state();
        let o = observe(&s, &cfg, &SingularityGuard::default(), 0).unwrap();
        assert!((o.range - s.range * (1.0 + 0.15 * 1.3f64.sin())).abs() < 1e-9);
        assert_eq!(o.los, s.los);
    }
}
