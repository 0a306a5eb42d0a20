use crate::engagement::{
    kinematics_derivative, Angles, ControlCommand, EngagementState, Plant, SingularityGuard, SpeedModel,
    TargetManeuver, DEFAULT_MAX_ACCEL,
};
use crate::error::Result;
use crate::neural::{LosRateModel, ModelInput};

/// Analytic LOS-rate model built from the engagement kinematics.
///
/// Reconstructs the target velocity from the observed range rate and LOS
/// rates, assumes a non-maneuvering target and integrates one RK4 step.
/// Useful as a reference model in place of the network.
#[derive(Debug, Clone, Copy)]
pub struct KinematicModel {
    pub dt: f64,
    pub speed_model: SpeedModel,
    /// Gain applied to the commanded acceleration, `1` for a healthy actuator.
    pub control_gain: f64,
    pub max_accel: f64,
}

impl KinematicModel {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            speed_model: SpeedModel {
                thrust_accel: 0.0,
                boost_duration: 0.0,
                drag_parasite: 0.0,
                drag_induced: 0.0,
                min_speed: 1.0,
            },
            control_gain: 1.0,
            max_accel: DEFAULT_MAX_ACCEL,
        }
    }

    /// Truth state consistent with the features of `input`.
    pub fn reconstruct(input: &ModelInput) -> EngagementState {
        let x = &input.0;
        let (range, range_rate) = (x[0], x[1]);
        let los = Angles::new(x[2], x[3]);
        let (vm, m_el, m_az) = (x[6], x[7], x[8]);
        let (sm, cm) = m_el.sin_cos();
        let (spm, cpm) = m_az.sin_cos();
        let vt_r = range_rate + vm * cm * cpm;
        let vt_el = range * x[4] + vm * sm;
        let vt_az = range * x[5] * los.elevation.cos() + vm * cm * spm;
        let vt = (vt_r * vt_r + vt_el * vt_el + vt_az * vt_az).sqrt();
        EngagementState {
            range,
            los,
            interceptor: Angles::new(m_el, m_az),
            target: Angles::new((vt_el / vt).asin(), vt_az.atan2(vt_r)),
            interceptor_speed: vm,
            target_speed: vt,
            time: 0.0,
        }
    }
}

impl LosRateModel for KinematicModel {
    fn predict_deltas(&self, inputs: &[ModelInput]) -> Result<Vec<[f64; 2]>> {
        let plant = Plant {
            fault: None,
            maneuver: TargetManeuver::default(),
            speed_model: self.speed_model,
            max_accel: self.max_accel,
            guard: SingularityGuard::default(),
        };
        inputs
            .iter()
            .map(|input| {
                let state = Self::reconstruct(input);
                let u = input.control();
                let u = ControlCommand::new(self.control_gain * u.ay, self.control_gain * u.az);
                let next = plant.step(&state, u, self.dt)?;
                let z = ControlCommand::ZERO;
                let before = kinematics_derivative(&state, z, z, &plant.guard)?.los_rate;
                let after = kinematics_derivative(&next, z, z, &plant.guard)?.los_rate;
                Ok([after.elevation - before.elevation, after.azimuth - before.azimuth])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::{observe, ObservationConfig};

    #[test]
    fn reconstruction_recovers_target_heading() {
        let truth = EngagementState {
            range: 3500.0,
            los: Angles::new(-0.7, 0.65),
            interceptor: Angles::new(-0.36, -0.2),
            target: Angles::new(-0.32, -0.22),
            interceptor_speed: 810.0,
            target_speed: 270.0,
            time: 0.0,
        };
        let obs = observe(&truth, &ObservationConfig::default(), &SingularityGuard::default(), 0).unwrap();
        let back = KinematicModel::reconstruct(&ModelInput::new(&obs, ControlCommand::ZERO));
        assert!((back.target_speed - 270.0).abs() < 1e-9);
        assert!((back.target.elevation + 0.32).abs() < 1e-12);
        assert!((back.target.azimuth + 0.22).abs() < 1e-12);
    }
}
