use super::{ModelInput, ModelNormalizer, NetworkParams, INPUT_DIM, OUTPUT_DIM};
use crate::error::{Error, Result};

/// Predicts the per-step increment of the LOS rates `(θ̇_L, φ̇_L)` for a batch
/// of raw inputs.
pub trait LosRateModel: Sync {
    fn predict_deltas(&self, inputs: &[ModelInput]) -> Result<Vec<[f64; 2]>>;
}

/// One-step prediction of the LOS angles `q`, rates `q̇` and the extended
/// state `q̈`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub q: [f64; 2],
    pub q_dot: [f64; 2],
    pub q_ddot: [f64; 2],
}

/// Euler rows of the extended-state predictor:
/// `q ← q + q̇ Δt`, `q̇ ← q̇ + q̈ Δt`.
pub fn euler_update(q: [f64; 2], q_dot: [f64; 2], q_ddot: [f64; 2], dt: f64) -> Prediction {
    Prediction {
        q: [q[0] + q_dot[0] * dt, q[1] + q_dot[1] * dt],
        q_dot: [q_dot[0] + q_ddot[0] * dt, q_dot[1] + q_ddot[1] * dt],
        q_ddot,
    }
}

/// Uses `model` to predict the next `(q, q̇, q̈)` from `input`, taking `q`
/// and `q̇` from the input's LOS features.
pub fn predict_next(model: &dyn LosRateModel, input: &ModelInput, dt: f64) -> Result<Prediction> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("prediction step {dt} must be positive")));
    }
    let delta = model.predict_deltas(std::slice::from_ref(input))?[0];
    Ok(euler_update(
        input.q(),
        input.q_dot(),
        [delta[0] / dt, delta[1] / dt],
        dt,
    ))
}

/// The neural dynamics model: normalize, forward, denormalize.
#[derive(Debug, Clone, Copy)]
pub struct NeuralDynamics<'a> {
    pub params: &'a NetworkParams,
    pub normalizer: &'a ModelNormalizer,
}

impl<'a> NeuralDynamics<'a> {
    pub fn new(params: &'a NetworkParams, normalizer: &'a ModelNormalizer) -> Result<Self> {
        if params.input_dim() != INPUT_DIM || normalizer.input.dim() != INPUT_DIM {
            return Err(Error::ShapeMismatch {
                expected: INPUT_DIM,
                actual: params.input_dim(),
            });
        }
        if params.output_dim() != OUTPUT_DIM || normalizer.output.dim() != OUTPUT_DIM {
            return Err(Error::ShapeMismatch {
                expected: OUTPUT_DIM,
                actual: params.output_dim(),
            });
        }
        Ok(Self { params, normalizer })
    }
}

impl LosRateModel for NeuralDynamics<'_> {
    fn predict_deltas(&self, inputs: &[ModelInput]) -> Result<Vec<[f64; 2]>> {
        let mut x = vec![0.0; inputs.len() * INPUT_DIM];
        for (row, input) in x.chunks_exact_mut(INPUT_DIM).zip(inputs) {
            self.normalizer.input.normalize_into(&input.0, row);
        }
        let y = self.params.forward_batch(&x, inputs.len())?;
        let out = &self.normalizer.output;
        Ok(y.chunks_exact(OUTPUT_DIM)
            .map(|r| [r[0] * out.scale[0] + out.mean[0], r[1] * out.scale[1] + out.mean[1]])
            .collect())
    }
}
