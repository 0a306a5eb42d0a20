use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Exploration noise `δu ~ N(0, diag(σ²))` for `samples × horizon` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBatch {
    pub samples: usize,
    pub horizon: usize,
    pub sigma: [f64; 2],
    data: Vec<[f64; 2]>,
}

impl NoiseBatch {
    /// Each sample draws from its own ChaCha stream keyed by `(seed, n)`, so
    /// the batch does not depend on how samples are scheduled.
    pub fn sample(samples: usize, horizon: usize, sigma: [f64; 2], seed: u64) -> Self {
        let mut data = Vec::with_capacity(samples * horizon);
        for n in 0..samples {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n as u64);
            for _ in 0..horizon {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                data.push([sigma[0] * a, sigma[1] * b]);
            }
        }
        Self {
            samples,
            horizon,
            sigma,
            data,
        }
    }

    pub fn from_fn(samples: usize, horizon: usize, f: impl Fn(usize, usize) -> [f64; 2]) -> Self {
        let mut data = Vec::with_capacity(samples * horizon);
        for n in 0..samples {
            for t in 0..horizon {
                data.push(f(n, t));
            }
        }
        Self {
            samples,
            horizon,
            sigma: [1.0, 1.0],
            data,
        }
    }

    pub fn get(&self, sample: usize, step: usize) -> [f64; 2] {
        self.data[sample * self.horizon + step]
    }

    pub fn sample_slice(&self, sample: usize) -> &[[f64; 2]] {
        &self.data[sample * self.horizon..(sample + 1) * self.horizon]
    }
}
