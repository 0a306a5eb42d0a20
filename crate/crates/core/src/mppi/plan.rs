use serde::{Deserialize, Serialize};

use super::NoiseBatch;
use crate::engagement::ControlCommand;

/// Receding-horizon control sequence `u_0 .. u_{T-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPlan {
    pub controls: Vec<ControlCommand>,
}

impl ControlPlan {
    pub fn new(horizon: usize) -> Self {
        assert!(horizon >= 1, "horizon must be at least one step");
        Self {
            controls: vec![ControlCommand::ZERO; horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.controls.len()
    }

    /// `u_t ← sat(u_t + Σ_n w_n δu_t^n)`.
    pub fn update(&mut self, noise: &NoiseBatch, weights: &[f64], max_accel: f64) {
        assert_eq!(noise.samples, weights.len());
        assert_eq!(noise.horizon, self.horizon());
        for (t, u) in self.controls.iter_mut().enumerate() {
            let mut acc = [0.0; 2];
            for (n, w) in weights.iter().enumerate() {
                let du = noise.get(n, t);
                acc[0] += w * du[0];
                acc[1] += w * du[1];
            }
            *u = ControlCommand::new(u.ay + acc[0], u.az + acc[1]).saturate(max_accel);
        }
    }

    /// Pops `u_0` for execution, shifts the rest forward and repeats the last
    /// command in the freed slot.
    pub fn shift(&mut self) -> ControlCommand {
        let first = self.controls[0];
        self.controls.rotate_left(1);
        let t = self.controls.len();
        if t >= 2 {
            self.controls[t - 1] = self.controls[t - 2];
        } else {
            self.controls[0] = first;
        }
        first
    }
}
