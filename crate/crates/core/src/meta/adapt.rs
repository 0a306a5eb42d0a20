use serde::{Deserialize, Serialize};

use super::ExperienceBuffer;
use crate::error::{Error, Result};
use crate::neural::{ModelNormalizer, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptationConfig {
    /// Step size of the online gradient update.
    pub alpha: f64,
    /// Number of recent transitions the update fits.
    pub window: usize,
    pub steps_per_cycle: usize,
}

impl Default for AdaptationConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            window: 16,
            steps_per_cycle: 1,
        }
    }
}

/// Refits the prior to the buffered transitions with plain gradient descent
/// on the window MAE.
///
/// Always starts from `prior`, so adaptation never accumulates across
/// control cycles.
pub fn adapt(
    prior: &NetworkParams,
    normalizer: &ModelNormalizer,
    buffer: &ExperienceBuffer,
    cfg: &AdaptationConfig,
) -> Result<NetworkParams> {
    if buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let (x, y) = buffer.normalized_batch(normalizer);
    let mut params = prior.clone();
    for _ in 0..cfg.steps_per_cycle {
        let (_, grad) = params.mae_loss_and_gradient(&x, &y, buffer.len())?;
        for (p, g) in params.tensors_mut().zip(grad.tensors()) {
            for (p, g) in p.iter_mut().zip(g) {
                *p -= cfg.alpha * g;
            }
        }
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{Layer, ModelInput, Normalizer, INPUT_DIM, OUTPUT_DIM};

    /// Linear `INPUT_DIM → OUTPUT_DIM` model with identity normalization.
    fn linear(w: f64) -> (NetworkParams, ModelNormalizer) {
        let mut weights = vec![0.0; INPUT_DIM * OUTPUT_DIM];
        weights[0] = w;
        let params = NetworkParams {
            layers: vec![Layer {
                inputs: INPUT_DIM,
                outputs: OUTPUT_DIM,
                weights,
                biases: vec![0.0; OUTPUT_DIM],
            }],
        };
        let normalizer = ModelNormalizer {
            input: Normalizer::identity(INPUT_DIM),
            output: Normalizer::identity(OUTPUT_DIM),
        };
        (params, normalizer)
    }

    #[test]
    fn empty_buffer_is_an_error() {
        let (p, n) = linear(1.0);
        let b = ExperienceBuffer::new(4).unwrap();
        assert!(matches!(
            adapt(&p, &n, &b, &AdaptationConfig::default()),
            Err(Error::EmptyBuffer)
        ));
    }

    #[test]
    fn one_step_matches_hand_gradient() {
        // y0 = w·x0 with x0 = 2, target 1, w = 2: residual 3 > 0, so
        // d/dw mean|r| over two outputs = x0 / 2 = 1 and the bias gets 1/2
        let (p, n) = linear(2.0);
        let mut x = [0.0; INPUT_DIM];
        x[0] = 2.0;
        let mut b = ExperienceBuffer::new(1).unwrap();
        b.record(ModelInput(x), [0.0, 0.0], [1.0, 0.0], 0.005);
        let cfg = AdaptationConfig {
            alpha: 0.1,
            ..Default::default()
        };
        let q = adapt(&p, &n, &b, &cfg).unwrap();
        assert!((q.layers[0].weights[0] - 1.9).abs() < 1e-15);
        assert!((q.layers[0].biases[0] + 0.05).abs() < 1e-15);
        // second output has zero residual: untouched
        assert_eq!(q.layers[0].biases[1], 0.0);
        assert_eq!(p.layers[0].weights[0], 2.0);
    }

    #[test]
    fn zero_residual_keeps_prior() {
        let (p, n) = linear(0.5);
        let mut x = [0.0; INPUT_DIM];
        x[0] = 4.0;
        let mut b = ExperienceBuffer::new(2).unwrap();
        b.record(ModelInput(x), [0.0, 0.0], [2.0, 0.0], 0.005);
        assert_eq!(adapt(&p, &n, &b, &AdaptationConfig::default()).unwrap(), p);
    }
}
