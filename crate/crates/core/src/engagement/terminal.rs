use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{impact_los_angles, relative_velocity_los, Angles, EngagementState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerminalConfig {
    /// Range at or below which the engagement counts as a direct hit, m.
    pub hit_radius: f64,
    pub max_range: f64,
    pub max_time: f64,
    /// Consecutive range increases that confirm a closest approach has passed.
    pub increasing_steps: usize,
}

impl Default for TerminalConfig {
    fn default() -> Self {
        Self {
            hit_radius: 0.1,
            max_range: 20_000.0,
            max_time: 15.0,
            increasing_steps: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitInfo {
    pub miss_distance: f64,
    pub time: f64,
    /// LOS angles of the closing direction at closest approach.
    pub terminal_los: Angles,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalStatus {
    Continue,
    Hit(HitInfo),
    Diverged,
}

/// Watches the range history of one engagement and decides when it ends.
#[derive(Debug, Clone)]
pub struct TerminalMonitor {
    cfg: TerminalConfig,
    history: VecDeque<EngagementState>,
    increasing: usize,
    min_range: f64,
}

impl TerminalMonitor {
    pub fn new(cfg: TerminalConfig) -> Self {
        Self {
            cfg,
            history: VecDeque::with_capacity(cfg.increasing_steps + 2),
            increasing: 0,
            min_range: f64::INFINITY,
        }
    }

    pub fn min_range(&self) -> f64 {
        self.min_range
    }

    pub fn check(&mut self, state: &EngagementState) -> TerminalStatus {
        if let Some(prev) = self.history.back() {
            if state.range > prev.range {
                self.increasing += 1;
            } else {
                self.increasing = 0;
            }
        }
        self.history.push_back(*state);
        if self.history.len() > self.cfg.increasing_steps + 2 {
            self.history.pop_front();
        }
        self.min_range = self.min_range.min(state.range);

        if state.range <= self.cfg.hit_radius {
            return TerminalStatus::Hit(HitInfo {
                miss_distance: state.range,
                time: state.time,
                terminal_los: impact_los_angles(state),
            });
        }
        if self.increasing >= self.cfg.increasing_steps.max(1) {
            return TerminalStatus::Hit(self.closest_approach());
        }
        if state.range > self.cfg.max_range || state.time > self.cfg.max_time {
            return TerminalStatus::Diverged;
        }
        TerminalStatus::Continue
    }

    /// Closest approach from the latest sample, extrapolated along straight
    /// lines, if it falls within `horizon` seconds.
    pub fn finish_within(&self, horizon: f64) -> Option<HitInfo> {
        let last = self.history.back()?;
        let ahead = straight_line_closest_approach(last).filter(|(_, t)| *t <= horizon);
        let (miss, dt) = ahead?;
        Some(HitInfo {
            miss_distance: miss.min(self.min_range),
            time: last.time + dt,
            terminal_los: impact_los_angles(last),
        })
    }

    fn closest_approach(&self) -> HitInfo {
        let n = self.history.len();
        let min_idx = n - 1 - self.increasing.min(n - 1);
        let mid = &self.history[min_idx];
        let fallback = HitInfo {
            miss_distance: mid.range,
            time: mid.time,
            terminal_los: impact_los_angles(mid),
        };
        if min_idx == 0 || min_idx + 1 >= n {
            return fallback;
        }
        let (before, after) = (&self.history[min_idx - 1], &self.history[min_idx + 1]);
        match interpolate_min_range([before.range, mid.range, after.range], mid.time - before.time) {
            Some((miss, offset)) => HitInfo {
                miss_distance: miss,
                time: mid.time + offset,
                terminal_los: fallback.terminal_los,
            },
            None => fallback,
        }
    }
}

/// Distance and time of the closest approach if both vehicles keep their
/// current velocities; `None` when the range is already opening.
pub fn straight_line_closest_approach(state: &EngagementState) -> Option<(f64, f64)> {
    let v = relative_velocity_los(state);
    let speed_sq = v.iter().map(|c| c * c).sum::<f64>();
    if !(speed_sq > 0.0) || v[0] >= 0.0 {
        return None;
    }
    let t = -state.range * v[0] / speed_sq;
    let offset = [state.range + v[0] * t, v[1] * t, v[2] * t];
    Some((offset.iter().map(|c| c * c).sum::<f64>().sqrt(), t))
}

/// Closest approach from three equally spaced range samples.
///
/// Fits a parabola to `R²`, which is exactly quadratic in time for
/// unaccelerated relative motion. Returns the minimum range and its time
/// offset from the middle sample.
pub fn interpolate_min_range(ranges: [f64; 3], spacing: f64) -> Option<(f64, f64)> {
    let [r0, r1, r2] = ranges.map(|r| r * r);
    let curvature = (r0 - 2.0 * r1 + r2) / (2.0 * spacing * spacing);
    if !(curvature > 0.0) {
        return None;
    }
    let slope = (r2 - r0) / (2.0 * spacing);
    let offset = (-slope / (2.0 * curvature)).clamp(-spacing, spacing);
    let min_sq = r1 + slope * offset + curvature * offset * offset;
    let miss = min_sq.max(0.0).sqrt().min(ranges[1]);
    Some((miss, offset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(range: f64, time: f64) -> EngagementState {
        EngagementState {
            range,
            los: Angles::new(-0.6, 0.8),
            interceptor: Angles::default(),
            target: Angles::default(),
            interceptor_speed: 800.0,
            target_speed: 270.0,
            time,
        }
    }

    #[test]
    fn threshold_crossing_is_a_hit() {
        let mut m = TerminalMonitor::new(TerminalConfig::default());
        assert_eq!(m.check(&at(3.0, 0.0)), TerminalStatus::Continue);
        match m.check(&at(0.05, 0.005)) {
            TerminalStatus::Hit(h) => assert!(h.miss_distance <= 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn timeout_diverges() {
        let mut m = TerminalMonitor::new(TerminalConfig {
            max_time: 1.0,
            ..Default::default()
        });
        assert_eq!(m.check(&at(5000.0, 1.5)), TerminalStatus::Diverged);
    }

    #[test]
    fn exact_for_straight_line_pass() {
        // R(t)² = d² + v²(t - t*)²
        let (d, v, tstar, h) = (0.7_f64, 530.0_f64, 0.0123_f64, 0.005_f64);
        let r = |t: f64| (d * d + v * v * (t - tstar).powi(2)).sqrt();
        let (miss, off) = interpolate_min_range([r(0.005), r(0.010), r(0.015)], h).unwrap();
        assert!((miss - d).abs() < 1e-9, "{miss}");
        assert!((0.010 + off - tstar).abs() < 1e-12);
    }

    #[test]
    fn straight_line_approach_of_offset_pass() {
        // Interceptor flies at 800 m/s parallel to the LOS, target at rest 3 m off its path.
        let miss: f64 = 3.0;
        let along: f64 = 4.0;
        let los_angle = (miss / along).atan();
        let state = EngagementState {
            range: miss.hypot(along),
            los: Angles::new(los_angle, 0.0),
            interceptor: Angles::new(-los_angle, 0.0),
            target: Angles::default(),
            interceptor_speed: 800.0,
            target_speed: 0.0,
            time: 1.0,
        };
        let (d, t) = straight_line_closest_approach(&state).unwrap();
        assert!((d - miss).abs() < 1e-12, "{d}");
        assert!((t - along / 800.0).abs() < 1e-15);

        let mut m = TerminalMonitor::new(TerminalConfig::default());
        m.check(&state);
        let h = m.finish_within(0.01).unwrap();
        assert!((h.miss_distance - miss).abs() < 1e-12);
        assert!(m.finish_within(1e-3).is_none());
    }

    #[test]
    fn receding_range_ends_engagement() {
        let mut m = TerminalMonitor::new(TerminalConfig::default());
        assert_eq!(m.check(&at(10.0, 0.0)), TerminalStatus::Continue);
        assert_eq!(m.check(&at(5.0, 0.005)), TerminalStatus::Continue);
        match m.check(&at(6.0, 0.010)) {
            TerminalStatus::Hit(h) => assert!(h.miss_distance <= 5.0),
            other => panic!("{other:?}"),
        }
    }
}
