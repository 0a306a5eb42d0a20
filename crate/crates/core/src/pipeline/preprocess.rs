use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::meta::TransitionSet;
use crate::neural::{ModelNormalizer, Normalizer, DEFAULT_SCALE_FLOOR, INPUT_DIM, OUTPUT_DIM, STATE_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    /// Augmentation noise on the state features, as a fraction of each
    /// feature's standard deviation.
    pub noise_fraction: f64,
    pub input_scale_floor: f64,
    /// Floor on the target scale; the per-step increments are tiny in raw
    /// units.
    pub output_scale_floor: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            noise_fraction: 0.01,
            input_scale_floor: DEFAULT_SCALE_FLOOR,
            output_scale_floor: 1e-9,
        }
    }
}

/// Differences consecutive LOS-rate observations into targets, adds white
/// noise to the state features and fits the normalizer on the result.
pub fn preprocess(dataset: &Dataset, cfg: &PreprocessConfig, seed: u64) -> Result<TransitionSet> {
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut trajectory = Vec::new();
    for t in dataset.transitions() {
        inputs.extend_from_slice(&t.input.0);
        targets.extend_from_slice(&t.target);
        trajectory.push(t.trajectory as u32);
    }
    if trajectory.is_empty() {
        return Err(Error::EmptyDataset);
    }

    if cfg.noise_fraction > 0.0 {
        let clean = Normalizer::fit(&inputs, INPUT_DIM, cfg.input_scale_floor)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for row in inputs.chunks_exact_mut(INPUT_DIM) {
            for (x, s) in row[..STATE_FEATURES].iter_mut().zip(&clean.scale) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *x += cfg.noise_fraction * s * z;
            }
        }
    }
    let normalizer = ModelNormalizer {
        input: Normalizer::fit(&inputs, INPUT_DIM, cfg.input_scale_floor)?,
        output: Normalizer::fit(&targets, OUTPUT_DIM, cfg.output_scale_floor)?,
    };
    Ok(TransitionSet {
        inputs,
        targets,
        trajectory,
        normalizer,
    })
}
