use rayon::prelude::*;

use super::cost::{running_cost, terminal_cost, CostConfig};
use super::{ControlPlan, NoiseBatch};
use crate::engagement::ControlCommand;
use crate::error::Result;
use crate::neural::{euler_update, LosRateModel, ModelInput, LOS, LOS_RATE, RANGE, RANGE_RATE};

/// Samples propagated together through one batched model call.
pub const ROLLOUT_CHUNK: usize = 250;

#[derive(Debug, Clone, Copy)]
pub struct RolloutSettings<'a> {
    pub cost: &'a CostConfig,
    pub dt: f64,
    pub max_accel: f64,
    /// Temperature used in the control/noise coupling term.
    pub coupling_lambda: f64,
}

/// Trajectory cost of every noise sample, evaluated in parallel chunks.
pub fn rollout_costs(
    model: &dyn LosRateModel,
    start: &ModelInput,
    plan: &ControlPlan,
    noise: &NoiseBatch,
    settings: &RolloutSettings,
) -> Result<Vec<f64>> {
    rollout_costs_chunked(model, start, plan, noise, settings, ROLLOUT_CHUNK)
}

pub fn rollout_costs_chunked(
    model: &dyn LosRateModel,
    start: &ModelInput,
    plan: &ControlPlan,
    noise: &NoiseBatch,
    settings: &RolloutSettings,
    chunk: usize,
) -> Result<Vec<f64>> {
    let starts: Vec<usize> = (0..noise.samples).step_by(chunk.max(1)).collect();
    let parts = starts
        .par_iter()
        .map(|&s| rollout_range(model, start, plan, noise, settings, s..(s + chunk).min(noise.samples)))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.concat())
}

/// Costs of samples `range`, propagated through `plan + noise` for the full
/// horizon.
///
/// Only the LOS angles and rates are predicted by the model; range moves
/// with the observed closing rate and the remaining features are held.
pub fn rollout_range(
    model: &dyn LosRateModel,
    start: &ModelInput,
    plan: &ControlPlan,
    noise: &NoiseBatch,
    settings: &RolloutSettings,
    range: std::ops::Range<usize>,
) -> Result<Vec<f64>> {
    let (dt, cost) = (settings.dt, settings.cost);
    let mut states = vec![*start; range.len()];
    let mut costs = vec![0.0; range.len()];
    let mut inputs = Vec::with_capacity(range.len());

    for (t, u) in plan.controls.iter().enumerate() {
        inputs.clear();
        for (x, n) in states.iter().zip(range.clone()) {
            let du = noise.get(n, t);
            let mut input = *x;
            input.set_control(ControlCommand::new(u.ay + du[0], u.az + du[1]).saturate(settings.max_accel));
            inputs.push(input);
        }
        let deltas = model.predict_deltas(&inputs)?;
        for (((x, c), d), n) in states.iter_mut().zip(&mut costs).zip(&deltas).zip(range.clone()) {
            let p = euler_update(x.q(), x.q_dot(), [d[0] / dt, d[1] / dt], dt);
            x.0[LOS] = p.q[0];
            x.0[LOS + 1] = p.q[1];
            x.0[LOS_RATE] = p.q_dot[0];
            x.0[LOS_RATE + 1] = p.q_dot[1];
            x.0[RANGE] += x.0[RANGE_RATE] * dt;
            *c += running_cost(
                p.q,
                p.q_dot,
                u.as_array(),
                noise.get(n, t),
                noise.sigma,
                settings.coupling_lambda,
                cost,
            );
        }
    }
    for (x, c) in states.iter().zip(&mut costs) {
        *c += terminal_cost(x.q(), x.q_dot(), cost);
    }
    Ok(costs)
}
