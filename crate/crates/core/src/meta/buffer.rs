use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::neural::{ModelInput, ModelNormalizer, INPUT_DIM, OUTPUT_DIM};

/// One observed step: the model input and the LOS-rate increment that
/// followed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub input: ModelInput,
    pub target: [f64; 2],
}

/// The most recent `capacity` transitions, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceBuffer {
    capacity: usize,
    entries: VecDeque<Transition>,
}

impl ExperienceBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config(
                "experience window must hold at least one transition".into(),
            ));
        }
        Ok(Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        })
    }

    /// Stores the per-step increment `q̇_next - q̇_prev` observed after
    /// `input`, evicting the oldest entry when full.
    pub fn record(&mut self, input: ModelInput, q_dot_prev: [f64; 2], q_dot_next: [f64; 2], dt: f64) {
        debug_assert!(dt > 0.0);
        self.push(Transition {
            input,
            target: [q_dot_next[0] - q_dot_prev[0], q_dot_next[1] - q_dot_prev[1]],
        });
    }

    pub fn push(&mut self, transition: Transition) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(transition);
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.entries.iter()
    }

    /// Normalized `(inputs, targets)` rows, as seen by the network.
    pub fn normalized_batch(&self, normalizer: &ModelNormalizer) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; self.len() * INPUT_DIM];
        let mut y = vec![0.0; self.len() * OUTPUT_DIM];
        for (i, t) in self.entries.iter().enumerate() {
            normalizer
                .input
                .normalize_into(&t.input.0, &mut x[i * INPUT_DIM..(i + 1) * INPUT_DIM]);
            normalizer
                .output
                .normalize_into(&t.target, &mut y[i * OUTPUT_DIM..(i + 1) * OUTPUT_DIM]);
        }
        (x, y)
    }
}
