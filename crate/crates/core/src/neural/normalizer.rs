use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound on per-feature scale.
pub const DEFAULT_SCALE_FLOOR: f64 = 1e-3;

/// Per-feature affine normalization `(x - mean) / scale`.
///
/// `scale` is the feature's standard deviation, but never below a floor, so
/// nearly constant features are centred without being blown up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Normalizer {
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Fits mean and floored standard deviation over row-major `rows`.
    pub fn fit(rows: &[f64], dim: usize, scale_floor: f64) -> Result<Self> {
        if dim == 0 || rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() % dim != 0 {
            return Err(Error::ShapeMismatch {
                expected: dim * (rows.len() / dim + 1),
                actual: rows.len(),
            });
        }
        let n = (rows.len() / dim) as f64;
        let mut mean = vec![0.0; dim];
        for (j, m) in mean.iter_mut().enumerate() {
            *m = neumaier_sum(rows.iter().skip(j).step_by(dim).copied()) / n;
        }
        // second pass removes the residual bias of the first mean estimate
        for (j, m) in mean.iter_mut().enumerate() {
            let mu = *m;
            *m += neumaier_sum(rows.iter().skip(j).step_by(dim).map(|x| x - mu)) / n;
        }
        let scale = mean
            .iter()
            .enumerate()
            .map(|(j, mu)| {
                let var = neumaier_sum(rows.iter().skip(j).step_by(dim).map(|x| (x - mu).powi(2))) / n;
                var.sqrt().max(scale_floor)
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn normalize_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, x), m), s) in out.iter_mut().zip(x).zip(&self.mean).zip(&self.scale) {
            *o = (x - m) / s;
        }
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.normalize_into(x, &mut out);
        out
    }

    pub fn denormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((y, m), s)| y * s + m)
            .collect()
    }

    /// Normalizes every `dim`-wide row of `rows`.
    pub fn normalize_rows(&self, rows: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; rows.len()];
        for (o, x) in out.chunks_exact_mut(self.dim()).zip(rows.chunks_exact(self.dim())) {
            self.normalize_into(x, o);
        }
        out
    }
}

/// Input and output normalizers of the dynamics network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelNormalizer {
    pub input: Normalizer,
    pub output: Normalizer,
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
