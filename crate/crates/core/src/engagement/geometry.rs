use super::{Angles, EngagementState};

/// Unit vectors `(e_r, e_θ, e_φ)` of the LOS frame in inertial coordinates.
///
/// `e_r` points from interceptor to target, `e_θ` toward increasing LOS
/// elevation and `e_φ` toward increasing LOS azimuth.
pub fn los_basis(los: Angles) -> [[f64; 3]; 3] {
    let (st, ct) = los.elevation.sin_cos();
    let (sp, cp) = los.azimuth.sin_cos();
    [[ct * cp, ct * sp, st], [-st * cp, -st * sp, ct], [-sp, cp, 0.0]]
}

fn velocity_components(speed: f64, heading: Angles) -> [f64; 3] {
    let (s, c) = heading.elevation.sin_cos();
    let (sp, cp) = heading.azimuth.sin_cos();
    [speed * c * cp, speed * s, speed * c * sp]
}

/// Target-minus-interceptor velocity expressed along `(e_r, e_θ, e_φ)`.
pub fn relative_velocity_los(state: &EngagementState) -> [f64; 3] {
    let t = velocity_components(state.target_speed, state.target);
    let m = velocity_components(state.interceptor_speed, state.interceptor);
    [t[0] - m[0], t[1] - m[1], t[2] - m[2]]
}

/// Inertial velocity of the interceptor.
pub fn interceptor_velocity(state: &EngagementState) -> [f64; 3] {
    let basis = los_basis(state.los);
    let v = velocity_components(state.interceptor_speed, state.interceptor);
    let mut out = [0.0; 3];
    for (axis, comp) in basis.iter().zip(v) {
        for i in 0..3 {
            out[i] += comp * axis[i];
        }
    }
    out
}

/// LOS elevation/azimuth of the closing direction `-v_rel`.
///
/// For a trajectory that ends in a direct hit this is the limit of the LOS
/// angles at impact; unlike the LOS itself it stays well defined at the
/// point of closest approach.
pub fn impact_los_angles(state: &EngagementState) -> Angles {
    let basis = los_basis(state.los);
    let rel = relative_velocity_los(state);
    let mut closing = [0.0; 3];
    for (axis, comp) in basis.iter().zip(rel) {
        for i in 0..3 {
            closing[i] -= comp * axis[i];
        }
    }
    let norm = closing.iter().map(|c| c * c).sum::<f64>().sqrt();
    Angles::new((closing[2] / norm).asin(), closing[1].atan2(closing[0]))
}
