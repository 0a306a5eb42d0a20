//! Ground-truth pursuer/target kinematics in the rotating line-of-sight frame.
//!
//! Heading angles of both vehicles are measured relative to the LOS frame,
//! so the state is `(R, θ_L, φ_L, θ_m, φ_m, θ_t, φ_t, V_M)` with the target
//! speed held constant.

mod geometry;
mod observe;
mod scenario;
mod terminal;

pub use geometry::{impact_los_angles, interceptor_velocity, los_basis, relative_velocity_los};
pub use observe::{observe, Channel, Observation, ObservationConfig, Uncertainty};
pub use scenario::{InitialSpec, Param};
pub use terminal::{HitInfo, TerminalConfig, TerminalMonitor, TerminalStatus};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical acceleration limit of the interceptor, m/s².
pub const DEFAULT_MAX_ACCEL: f64 = 200.0;

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Elevation/azimuth pair, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Angles {
    pub elevation: f64,
    pub azimuth: f64,
}

impl Angles {
    pub const fn new(elevation: f64, azimuth: f64) -> Self {
        Self { elevation, azimuth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementState {
    /// Interceptor-to-target range, m.
    pub range: f64,
    pub los: Angles,
    /// Interceptor flight-path angles relative to the LOS frame.
    pub interceptor: Angles,
    /// Target flight-path angles relative to the LOS frame.
    pub target: Angles,
    pub interceptor_speed: f64,
    pub target_speed: f64,
    /// Elapsed time, s.
    pub time: f64,
}

impl EngagementState {
    fn to_vec(self) -> [f64; 8] {
        [
            self.range,
            self.los.elevation,
            self.los.azimuth,
            self.interceptor.elevation,
            self.interceptor.azimuth,
            self.target.elevation,
            self.target.azimuth,
            self.interceptor_speed,
        ]
    }

    fn with_vec(self, y: &[f64; 8], time: f64) -> Self {
        Self {
            range: y[0],
            los: Angles::new(y[1], y[2]),
            interceptor: Angles::new(y[3], y[4]),
            target: Angles::new(y[5], y[6]),
            interceptor_speed: y[7],
            target_speed: self.target_speed,
            time,
        }
    }
}

/// Lateral (`ay`) and normal (`az`) acceleration, m/s².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub ay: f64,
    pub az: f64,
}

impl ControlCommand {
    pub const ZERO: Self = Self { ay: 0.0, az: 0.0 };

    pub const fn new(ay: f64, az: f64) -> Self {
        Self { ay, az }
    }

    pub fn saturate(self, limit: f64) -> Self {
        Self::new(self.ay.clamp(-limit, limit), self.az.clamp(-limit, limit))
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.ay, self.az]
    }

    pub fn from_array(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

/// Loss-of-effectiveness actuator fault.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorFault {
    /// Actuator gain in `(0, 1]`.
    pub gain: f64,
    pub start: f64,
    /// May be `f64::INFINITY`.
    pub end: f64,
}

impl ActuatorFault {
    pub fn new(gain: f64, start: f64, end: f64) -> Result<Self> {
        if !(gain > 0.0 && gain <= 1.0) {
            return Err(Error::Config(format!("fault gain {gain} outside (0, 1]")));
        }
        if !(start < end) {
            return Err(Error::Config(format!("fault window [{start}, {end}) is empty")));
        }
        Ok(Self { gain, start, end })
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

/// Applies the actuator gain inside the fault window, then clamps each axis
/// to `max_accel`.
pub fn apply_fault(command: ControlCommand, fault: Option<&ActuatorFault>, t: f64, max_accel: f64) -> ControlCommand {
    let gained = match fault {
        Some(f) if f.is_active(t) => ControlCommand::new(f.gain * command.ay, f.gain * command.az),
        _ => command,
    };
    gained.saturate(max_accel)
}

/// Sinusoidal target acceleration `amplitude · sin(ω t)` on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetManeuver {
    pub amplitude_y: f64,
    pub amplitude_z: f64,
    pub angular_frequency: f64,
}

impl TargetManeuver {
    pub fn accel(&self, t: f64) -> ControlCommand {
        let s = (self.angular_frequency * t).sin();
        ControlCommand::new(self.amplitude_y * s, self.amplitude_z * s)
    }
}

/// Boost-then-drag interceptor speed model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedModel {
    /// Net thrust acceleration while boosting, m/s².
    pub thrust_accel: f64,
    /// Boost duration `T_B`, s.
    pub boost_duration: f64,
    /// Parasite drag coefficient, 1/m.
    pub drag_parasite: f64,
    /// Induced drag scale on `|a|² / V_M²`, m/s².
    pub drag_induced: f64,
    pub min_speed: f64,
}

impl Default for SpeedModel {
    fn default() -> Self {
        Self {
            thrust_accel: 30.0,
            boost_duration: 3.5,
            drag_parasite: 2.0e-5,
            drag_induced: 100.0,
            min_speed: 200.0,
        }
    }
}

impl SpeedModel {
    pub fn drag(&self, speed: f64, accel: ControlCommand) -> f64 {
        let lateral_sq = accel.ay * accel.ay + accel.az * accel.az;
        self.drag_parasite * speed * speed + self.drag_induced * lateral_sq / (speed * speed)
    }
}

/// `dV_M/dt` for the interceptor, held at zero once the speed floor is reached.
pub fn speed_derivative(state: &EngagementState, accel: ControlCommand, model: &SpeedModel) -> f64 {
    let thrust = if state.time < model.boost_duration {
        model.thrust_accel
    } else {
        0.0
    };
    let dv = thrust - model.drag(state.interceptor_speed, accel);
    if state.interceptor_speed <= model.min_speed && dv < 0.0 {
        0.0
    } else {
        dv
    }
}

/// Thresholds below which the kinematic equations are treated as singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityGuard {
    pub min_cos: f64,
    pub min_range: f64,
}

impl Default for SingularityGuard {
    fn default() -> Self {
        Self {
            min_cos: 1e-6,
            min_range: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub range_rate: f64,
    pub los_rate: Angles,
    pub interceptor_rate: Angles,
    pub target_rate: Angles,
}

/// Three-dimensional engagement kinematics.
///
/// `accel` is the acceleration actually delivered by the interceptor and
/// `target_accel` the target's lateral/normal acceleration.
pub fn kinematics_derivative(
    state: &EngagementState,
    accel: ControlCommand,
    target_accel: ControlCommand,
    guard: &SingularityGuard,
) -> Result<StateDerivative> {
    let r = state.range;
    let (vm, vt) = (state.interceptor_speed, state.target_speed);
    let (sl, cl) = state.los.elevation.sin_cos();
    let (sm, cm) = state.interceptor.elevation.sin_cos();
    let (spm, cpm) = state.interceptor.azimuth.sin_cos();
    let (st, ct) = state.target.elevation.sin_cos();
    let (spt, cpt) = state.target.azimuth.sin_cos();

    if r < guard.min_range {
        return Err(Error::SingularGeometry("range below guard"));
    }
    if cl.abs() < guard.min_cos {
        return Err(Error::SingularGeometry("LOS elevation at ±π/2"));
    }
    if cm.abs() < guard.min_cos {
        return Err(Error::SingularGeometry("interceptor elevation at ±π/2"));
    }
    if ct.abs() < guard.min_cos {
        return Err(Error::SingularGeometry("target elevation at ±π/2"));
    }

    let range_rate = vt * ct * cpt - vm * cm * cpm;
    let los_el_rate = (vt * st - vm * sm) / r;
    let los_az_rate = (vt * ct * spt - vm * cm * spm) / (r * cl);

    let (tm, tt) = (sm / cm, st / ct);
    let m_el_rate = accel.az / vm - los_az_rate * sl * spm - los_el_rate * cpm;
    let m_az_rate = accel.ay / (vm * cm) + los_az_rate * tm * cpm * sl - los_el_rate * tm * spm - los_az_rate * cl;
    let t_el_rate = target_accel.az / vt - los_az_rate * sl * spt - los_el_rate * cpt;
    let t_az_rate =
        target_accel.ay / (vt * ct) + los_az_rate * tt * cpt * sl - los_el_rate * tt * spt - los_az_rate * cl;

    Ok(StateDerivative {
        range_rate,
        los_rate: Angles::new(los_el_rate, los_az_rate),
        interceptor_rate: Angles::new(m_el_rate, m_az_rate),
        target_rate: Angles::new(t_el_rate, t_az_rate),
    })
}

/// Everything the truth simulation needs besides the state and the command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub fault: Option<ActuatorFault>,
    pub maneuver: TargetManeuver,
    pub speed_model: SpeedModel,
    pub max_accel: f64,
    pub guard: SingularityGuard,
}

impl Default for Plant {
    fn default() -> Self {
        Self {
            fault: None,
            maneuver: TargetManeuver::default(),
            speed_model: SpeedModel::default(),
            max_accel: DEFAULT_MAX_ACCEL,
            guard: SingularityGuard::default(),
        }
    }
}

impl Plant {
    fn rates(&self, state: &EngagementState, accel: ControlCommand) -> Result<[f64; 8]> {
        let d = kinematics_derivative(state, accel, self.maneuver.accel(state.time), &self.guard)?;
        Ok([
            d.range_rate,
            d.los_rate.elevation,
            d.los_rate.azimuth,
            d.interceptor_rate.elevation,
            d.interceptor_rate.azimuth,
            d.target_rate.elevation,
            d.target_rate.azimuth,
            speed_derivative(state, accel, &self.speed_model),
        ])
    }

    /// Advances the truth state by one RK4 step of length `dt` with the
    /// commanded acceleration held constant. The fault and saturation are
    /// applied to `command` at the start of the step.
    pub fn step(&self, state: &EngagementState, command: ControlCommand, dt: f64) -> Result<EngagementState> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("step size {dt} must be positive")));
        }
        let accel = apply_fault(command, self.fault.as_ref(), state.time, self.max_accel);
        let t0 = state.time;
        let y0 = state.to_vec();
        let stage = |y: &[f64; 8], h: f64, k: &[f64; 8]| -> [f64; 8] { std::array::from_fn(|i| y[i] + h * k[i]) };

        let k1 = self.rates(state, accel)?;
        let y2 = stage(&y0, 0.5 * dt, &k1);
        let k2 = self.rates(&state.with_vec(&y2, t0 + 0.5 * dt), accel)?;
        let y3 = stage(&y0, 0.5 * dt, &k2);
        let k3 = self.rates(&state.with_vec(&y3, t0 + 0.5 * dt), accel)?;
        let y4 = stage(&y0, dt, &k3);
        let k4 = self.rates(&state.with_vec(&y4, t0 + dt), accel)?;

        let mut y: [f64; 8] = std::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        for angle in &mut y[1..7] {
            *angle = wrap_angle(*angle);
        }
        y[7] = y[7].max(self.speed_model.min_speed);

        Ok(state.with_vec(&y, t0 + dt))
    }

    /// LOS kinematic rates of `state` (independent of the interceptor command).
    pub fn derivative(&self, state: &EngagementState, command: ControlCommand) -> Result<StateDerivative> {
        let accel = apply_fault(command, self.fault.as_ref(), state.time, self.max_accel);
        kinematics_derivative(state, accel, self.maneuver.accel(state.time), &self.guard)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn head_on() -> EngagementState {
        EngagementState {
            range: 4000.0,
            los: Angles::default(),
            interceptor: Angles::default(),
            target: Angles::default(),
            interceptor_speed: 800.0,
            target_speed: 270.0,
            time: 0.0,
        }
    }

    #[test]
    fn collinear_closing_rate() {
        let d = kinematics_derivative(
            &head_on(),
            ControlCommand::ZERO,
            ControlCommand::ZERO,
            &SingularityGuard::default(),
        )
        .unwrap();
        assert_eq!(d.range_rate, -530.0);
        assert_eq!(d.los_rate, Angles::default());
        assert_eq!(d.interceptor_rate, Angles::default());
        assert_eq!(d.target_rate, Angles::default());
    }

    #[test]
    fn normal_accel_turns_heading() {
        let d = kinematics_derivative(
            &head_on(),
            ControlCommand::new(0.0, 200.0),
            ControlCommand::ZERO,
            &SingularityGuard::default(),
        )
        .unwrap();
        assert_eq!(d.interceptor_rate.elevation, 0.25);
    }

    #[test]
    fn singular_geometry_is_rejected() {
        let guard = SingularityGuard::default();
        let mut s = head_on();
        s.range = 0.05;
        assert!(matches!(
            kinematics_derivative(&s, ControlCommand::ZERO, ControlCommand::ZERO, &guard),
            Err(Error::SingularGeometry(_))
        ));
        let mut s = head_on();
        s.interceptor.elevation = PI / 2.0;
        assert!(kinematics_derivative(&s, ControlCommand::ZERO, ControlCommand::ZERO, &guard).is_err());
        let mut s = head_on();
        s.los.elevation = -PI / 2.0;
        assert!(kinematics_derivative(&s, ControlCommand::ZERO, ControlCommand::ZERO, &guard).is_err());
    }

    #[test]
    fn closing_rate_antisymmetric_under_vehicle_swap() {
        let mut s = head_on();
        s.interceptor = Angles::new(-0.36, -0.2);
        s.target = Angles::new(-0.32, -0.22);
        let mut swapped = s;
        swapped.interceptor = s.target;
        swapped.target = s.interceptor;
        swapped.interceptor_speed = s.target_speed;
        swapped.target_speed = s.interceptor_speed;
        let g = SingularityGuard::default();
        let z = ControlCommand::ZERO;
        let a = kinematics_derivative(&s, z, z, &g).unwrap().range_rate;
        let b = kinematics_derivative(&swapped, z, z, &g).unwrap().range_rate;
        assert_eq!(a, -b);
    }

    #[test]
    fn speed_model_cases() {
        let free = SpeedModel {
            thrust_accel: 30.0,
            boost_duration: 3.5,
            drag_parasite: 0.0,
            drag_induced: 0.0,
            min_speed: 100.0,
        };
        let mut s = head_on();
        assert_eq!(speed_derivative(&s, ControlCommand::ZERO, &free), 30.0);
        s.time = 4.0;
        assert_eq!(speed_derivative(&s, ControlCommand::ZERO, &free), 0.0);

        let draggy = SpeedModel {
            drag_parasite: 1e-5,
            ..free
        };
        let dv = speed_derivative(&s, ControlCommand::ZERO, &draggy);
        assert!((dv + 6.4).abs() < 1e-12, "{dv}");

        s.interceptor_speed = 100.0;
        assert_eq!(speed_derivative(&s, ControlCommand::ZERO, &draggy), 0.0);
    }

    #[test]
    fn fault_gain_and_saturation() {
        let fault = ActuatorFault::new(0.5, 3.0, f64::INFINITY).unwrap();
        let u = ControlCommand::new(100.0, -100.0);
        assert_eq!(
            apply_fault(u, Some(&fault), 3.5, 200.0),
            ControlCommand::new(50.0, -50.0)
        );
        assert_eq!(apply_fault(u, Some(&fault), 1.0, 200.0), u);

        let fault = ActuatorFault::new(0.6, 0.0, 10.0).unwrap();
        assert_eq!(
            apply_fault(ControlCommand::new(400.0, 0.0), Some(&fault), 5.0, 200.0),
            ControlCommand::new(200.0, 0.0)
        );
        assert_eq!(
            apply_fault(ControlCommand::new(400.0, 0.0), Some(&fault), 10.0, 200.0),
            ControlCommand::new(200.0, 0.0)
        );
    }

    #[test]
    fn invalid_faults() {
        assert!(ActuatorFault::new(0.0, 0.0, 1.0).is_err());
        assert!(ActuatorFault::new(1.2, 0.0, 1.0).is_err());
        assert!(ActuatorFault::new(0.5, 2.0, 1.0).is_err());
    }

    #[test]
    fn step_advances_time_exactly() {
        let plant = Plant::default();
        let s = plant.step(&head_on(), ControlCommand::ZERO, 0.005).unwrap();
        assert_eq!(s.time, 0.005);
        assert!(plant.step(&head_on(), ControlCommand::ZERO, 0.0).is_err());
    }

    #[test]
    fn drag_free_boost_is_linear_in_time() {
        let plant = Plant {
            speed_model: SpeedModel {
                thrust_accel: 30.0,
                boost_duration: 3.5,
                drag_parasite: 0.0,
                drag_induced: 0.0,
                min_speed: 100.0,
            },
            ..Plant::default()
        };
        let mut s = head_on();
        for _ in 0..200 {
            s = plant.step(&s, ControlCommand::ZERO, 0.005).unwrap();
        }
        assert!((s.interceptor_speed - 830.0).abs() < 1e-6);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.3), 0.3);
    }
}
