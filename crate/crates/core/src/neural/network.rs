use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default hidden width of the dynamics network.
pub const HIDDEN_WIDTH: usize = 200;

/// One affine layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }
}

/// Fully connected ReLU network with a linear output layer.
///
/// Also used as the container for gradients and optimizer moments, which
/// share its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

/// `c[m×n] = a[m×k] · bᵀ` where `b` is stored `n × k` row-major.
fn matmul_transposed(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= n * k && c.len() >= m * n);
    // SAFETY: the slices cover the strided extents asserted above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c[m×n] = aᵀ · b` where `a` is `k × m` and `b` is `k × n`, both row-major.
fn matmul_lhs_transposed(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= n * k && c.len() >= m * n);
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c[m×n] = a[m×k] · b[k×n]`, all row-major.
fn matmul(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= n * k && c.len() >= m * n);
    // SAFETY: as above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

impl NetworkParams {
    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.contains(&0) {
            return Err(Error::Config(format!("invalid layer dims {layer_dims:?}")));
        }
        Ok(Self {
            layers: layer_dims.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        })
    }

    /// He-style uniform initialization: `U(-√(6/fan_in), √(6/fan_in))`,
    /// zero biases.
    pub fn init(layer_dims: &[usize], seed: u64) -> Result<Self> {
        let mut params = Self::zeros(layer_dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut params.layers {
            let bound = (6.0 / layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.gen_range(-bound..bound);
            }
        }
        Ok(params)
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].inputs];
        dims.extend(self.layers.iter().map(|l| l.outputs));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self.layers.iter().map(|l| Layer::zeros(l.inputs, l.outputs)).collect(),
        }
    }

    /// Parameter tensors in storage order: `w0, b0, w1, b1, ...`.
    pub fn tensors(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()])
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.biases.as_mut_slice()])
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.inputs == b.inputs && a.outputs == b.outputs)
    }

    fn check_batch(&self, inputs: &[f64], batch: usize) -> Result<()> {
        let expected = batch * self.input_dim();
        if inputs.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: inputs.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(input, 1)
    }

    /// Forward pass over `batch` row-major input rows.
    ///
    /// Each output row depends only on its own input row, and the arithmetic
    /// per row does not depend on the batch size.
    pub fn forward_batch(&self, inputs: &[f64], batch: usize) -> Result<Vec<f64>> {
        self.check_batch(inputs, batch)?;
        let mut act = inputs.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = vec![0.0; batch * layer.outputs];
            matmul_transposed(batch, layer.inputs, layer.outputs, &act, &layer.weights, &mut out);
            for row in out.chunks_exact_mut(layer.outputs) {
                for (o, b) in row.iter_mut().zip(&layer.biases) {
                    *o += b;
                    if i < last && *o < 0.0 {
                        *o = 0.0;
                    }
                }
            }
            act = out;
        }
        Ok(act)
    }

    /// Mean absolute error over every sample and output coordinate, with its
    /// gradient by reverse-mode accumulation. `sign(0)` is taken as zero.
    pub fn mae_loss_and_gradient(&self, inputs: &[f64], targets: &[f64], batch: usize) -> Result<(f64, NetworkParams)> {
        if batch == 0 {
            return Err(Error::EmptyDataset);
        }
        self.check_batch(inputs, batch)?;
        let out_dim = self.output_dim();
        if targets.len() != batch * out_dim {
            return Err(Error::ShapeMismatch {
                expected: batch * out_dim,
                actual: targets.len(),
            });
        }

        // activations[0] is the input; activations[i + 1] the output of layer i.
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(inputs.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = vec![0.0; batch * layer.outputs];
            matmul_transposed(
                batch,
                layer.inputs,
                layer.outputs,
                &activations[i],
                &layer.weights,
                &mut out,
            );
            for row in out.chunks_exact_mut(layer.outputs) {
                for (o, b) in row.iter_mut().zip(&layer.biases) {
                    *o += b;
                    if i < last && *o < 0.0 {
                        *o = 0.0;
                    }
                }
            }
            activations.push(out);
        }

        let norm = 1.0 / (batch * out_dim) as f64;
        let prediction = &activations[self.layers.len()];
        let mut loss = 0.0;
        let mut delta: Vec<f64> = prediction
            .iter()
            .zip(targets)
            .map(|(p, t)| {
                let r = p - t;
                loss += r.abs();
                if r > 0.0 {
                    norm
                } else if r < 0.0 {
                    -norm
                } else {
                    0.0
                }
            })
            .collect();
        loss *= norm;

        let mut grad = self.zeros_like();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let g = &mut grad.layers[i];
            matmul_lhs_transposed(
                layer.outputs,
                batch,
                layer.inputs,
                &delta,
                &activations[i],
                &mut g.weights,
            );
            for row in delta.chunks_exact(layer.outputs) {
                for (gb, d) in g.biases.iter_mut().zip(row) {
                    *gb += d;
                }
            }
            if i > 0 {
                let mut prev = vec![0.0; batch * layer.inputs];
                matmul(batch, layer.outputs, layer.inputs, &delta, &layer.weights, &mut prev);
                for (p, a) in prev.iter_mut().zip(&activations[i]) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        Ok((loss, grad))
    }

    pub fn mae(&self, inputs: &[f64], targets: &[f64], batch: usize) -> Result<f64> {
        if batch == 0 {
            return Err(Error::EmptyDataset);
        }
        let pred = self.forward_batch(inputs, batch)?;
        if targets.len() != pred.len() {
            return Err(Error::ShapeMismatch {
                expected: pred.len(),
                actual: targets.len(),
            });
        }
        let sum: f64 = pred.iter().zip(targets).map(|(p, t)| (p - t).abs()).sum();
        Ok(sum / pred.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let p = NetworkParams::zeros(&[3, 4, 4, 2]).unwrap();
        assert_eq!(p.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn hand_computed_two_neuron_network() {
        // hidden = relu([0.5 x0 - 0.25 x1 + 0.1, -x0 + 2 x1]); y = 2 h0 - h1 + 0.3
        let mut p = NetworkParams::zeros(&[2, 2, 1]).unwrap();
        p.layers[0].weights = vec![0.5, -0.25, -1.0, 2.0];
        p.layers[0].biases = vec![0.1, 0.0];
        p.layers[1].weights = vec![2.0, -1.0];
        p.layers[1].biases = vec![0.3];
        // x = (1, 0.5): h = (0.5 - 0.125 + 0.1, -1 + 1) = (0.475, 0) → y = 1.25
        let y = p.forward(&[1.0, 0.5]).unwrap();
        assert!((y[0] - 1.25).abs() < 1e-15);
        // x = (0, 1): h = (-0.15 → 0, 2) → y = -2 + 0.3
        let y = p.forward(&[0.0, 1.0]).unwrap();
        assert!((y[0] + 1.7).abs() < 1e-15);
    }

    #[test]
    fn dead_relu_leaves_bias_path() {
        let mut p = NetworkParams::init(&[2, 5, 1], 3).unwrap();
        for w in &mut p.layers[0].weights {
            *w = w.abs();
        }
        p.layers[1].biases = vec![0.7];
        let y = p.forward(&[-100.0, -100.0]).unwrap();
        assert_eq!(y, vec![0.7]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let p = NetworkParams::zeros(&[3, 2]).unwrap();
        assert!(matches!(
            p.forward(&[1.0, 2.0]),
            Err(Error::ShapeMismatch { expected: 3, actual: 2 })
        ));
        assert!(p.mae_loss_and_gradient(&[1.0, 2.0, 3.0], &[1.0], 1).is_err());
    }

    #[test]
    fn scalar_linear_mae_gradient() {
        let mut p = NetworkParams::zeros(&[1, 1]).unwrap();
        p.layers[0].weights = vec![2.0];
        let (loss, g) = p.mae_loss_and_gradient(&[1.0], &[0.0], 1).unwrap();
        assert_eq!(loss, 2.0);
        assert_eq!(g.layers[0].weights, vec![1.0]);
        assert_eq!(g.layers[0].biases, vec![1.0]);
    }

    #[test]
    fn perfect_prediction_has_zero_gradient() {
        let p = NetworkParams::init(&[3, 6, 2], 9).unwrap();
        let x = [0.3, -0.1, 0.8, 1.0, 0.2, -0.4];
        let y = p.forward_batch(&x, 2).unwrap();
        let (loss, g) = p.mae_loss_and_gradient(&x, &y, 2).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.tensors().all(|t| t.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn output_layer_is_positively_homogeneous() {
        let p = NetworkParams::init(&[4, 8, 8, 2], 11).unwrap();
        let mut doubled = p.clone();
        let last = doubled.layers.last_mut().unwrap();
        last.weights.iter_mut().for_each(|w| *w *= 2.0);
        last.biases.iter_mut().for_each(|b| *b *= 2.0);
        let x = [0.1, -0.5, 0.9, 0.3];
        let a = p.forward(&x).unwrap();
        let b = doubled.forward(&x).unwrap();
        for (a, b) in a.iter().zip(&b) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn batch_rows_match_single_forward_bitwise() {
        let p = NetworkParams::init(&[11, 200, 200, 2], 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..37 * 11).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let batched = p.forward_batch(&x, 37).unwrap();
        for (row, out) in x.chunks(11).zip(batched.chunks(2)) {
            assert_eq!(p.forward(row).unwrap(), out);
        }
    }
}
