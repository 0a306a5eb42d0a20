use super::NetworkParams;
use crate::error::{Error, Result};

/// Adam optimizer state with bias-corrected moments.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: NetworkParams,
    pub second_moment: NetworkParams,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    pub fn new(like: &NetworkParams, learning_rate: f64) -> Self {
        Self {
            first_moment: like.zeros_like(),
            second_moment: like.zeros_like(),
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            learning_rate,
        }
    }
}

pub fn adam_step(params: &mut NetworkParams, adam: &mut AdamState, grad: &NetworkParams) -> Result<()> {
    if !params.same_shape(grad) || !params.same_shape(&adam.first_moment) {
        return Err(Error::ShapeMismatch {
            expected: params.num_params(),
            actual: grad.num_params(),
        });
    }
    adam.step += 1;
    let (b1, b2) = (adam.beta1, adam.beta2);
    let c1 = 1.0 - b1.powi(adam.step as i32);
    let c2 = 1.0 - b2.powi(adam.step as i32);
    let (lr, eps) = (adam.learning_rate, adam.epsilon);

    let tensors = params
        .tensors_mut()
        .zip(adam.first_moment.tensors_mut())
        .zip(adam.second_moment.tensors_mut())
        .zip(grad.tensors());
    for (((p, m), v), g) in tensors {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
