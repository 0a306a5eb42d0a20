//! Fully connected dynamics network with hand-written backpropagation.

mod adam;
mod dynamics;
mod features;
mod network;
mod normalizer;
mod persist;

pub use adam::{adam_step, AdamState};
pub use dynamics::{euler_update, predict_next, LosRateModel, NeuralDynamics, Prediction};
pub use features::*;
pub use network::{Layer, NetworkParams, HIDDEN_WIDTH};
pub(crate) use normalizer::neumaier_sum;
pub use normalizer::{ModelNormalizer, Normalizer, DEFAULT_SCALE_FLOOR};
pub use persist::{decode_checkpoint, encode_checkpoint, load_params, save_params, Checkpoint};
pub(crate) use persist::{ByteReader, ByteWriter};

/// Default layer widths: inputs, two hidden layers of 200, outputs.
pub fn default_layer_dims() -> Vec<usize> {
    vec![INPUT_DIM, HIDDEN_WIDTH, HIDDEN_WIDTH, OUTPUT_DIM]
}
