use serde::{Deserialize, Serialize};

use crate::neural::neumaier_sum;

/// Guard on the cost standard deviation when every rollout ties.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Temperature {
    /// `λ = λ* · σ(S')`.
    Adaptive {
        lambda_star: f64,
    },
    Fixed(f64),
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    (neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / n).sqrt()
}

/// Temperature proportional to the spread of the min-shifted costs.
pub fn adaptive_temperature(costs_shifted: &[f64], lambda_star: f64, sigma_floor: f64) -> f64 {
    let sigma = population_std(costs_shifted);
    lambda_star * if sigma < sigma_floor { sigma_floor } else { sigma }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceWeights {
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub min_cost: f64,
    pub mean_cost: f64,
}

impl ImportanceWeights {
    /// `1 / Σ w²`.
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / neumaier_sum(self.weights.iter().map(|w| w * w))
    }
}

/// Softmax weights `exp(-S'/λ) / η` over min-shifted costs `S' = S - min S`.
pub fn importance_weights(costs: &[f64], temperature: Temperature, sigma_floor: f64) -> ImportanceWeights {
    assert!(!costs.is_empty(), "importance weights need at least one sample");
    let min_cost = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = costs.iter().map(|c| c - min_cost).collect();
    let lambda = match temperature {
        Temperature::Adaptive { lambda_star } => adaptive_temperature(&shifted, lambda_star, sigma_floor),
        Temperature::Fixed(l) => l,
    };
    // S' ≥ 0, so every term lies in (0, 1] and the minimum contributes exactly 1
    let unnormalized: Vec<f64> = shifted.iter().map(|s| (-s / lambda).exp()).collect();
    let eta = neumaier_sum(unnormalized.iter().copied());
    ImportanceWeights {
        weights: unnormalized.iter().map(|w| w / eta).collect(),
        lambda,
        min_cost,
        mean_cost: neumaier_sum(costs.iter().copied()) / costs.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_temperature() {
        assert_eq!(adaptive_temperature(&[0.0, 2.0], 1.0, DEFAULT_SIGMA_FLOOR), 1.0);
    }

    #[test]
    fn tied_costs_use_floor() {
        assert_eq!(
            adaptive_temperature(&[0.0; 5], 2.0, DEFAULT_SIGMA_FLOOR),
            2.0 * DEFAULT_SIGMA_FLOOR
        );
        let w = importance_weights(
            &[3.0; 4],
            Temperature::Adaptive { lambda_star: 1.0 },
            DEFAULT_SIGMA_FLOOR,
        );
        assert!(w.weights.iter().all(|&x| x == 0.25));
    }

    #[test]
    fn four_point_temperature() {
        let l = adaptive_temperature(&[0.0, 1.0, 2.0, 3.0], 2.0, DEFAULT_SIGMA_FLOOR);
        assert!((l - 2.0 * 1.25f64.sqrt()).abs() < 1e-15);
        assert!((l - 2.2360679774997896).abs() < 1e-15);
    }

    #[test]
    fn analytic_softmax_pair() {
        let lambda = 0.7;
        let w = importance_weights(
            &[0.0, lambda * 2f64.ln()],
            Temperature::Fixed(lambda),
            DEFAULT_SIGMA_FLOOR,
        );
        assert!((w.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.weights[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn huge_cost_spread_does_not_underflow_the_minimum() {
        let w = importance_weights(&[0.0, 1e300, 5.0], Temperature::Fixed(1e-3), DEFAULT_SIGMA_FLOOR);
        assert_eq!(w.weights[0], 1.0);
        assert_eq!(w.effective_sample_size(), 1.0);
    }
}
