use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{
    adam_step, default_layer_dims, AdamState, Checkpoint, ModelNormalizer, NetworkParams, INPUT_DIM, OUTPUT_DIM,
};

/// Preprocessed training transitions in raw units, with the normalizer fitted
/// on them.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    /// Row-major `len × INPUT_DIM`.
    pub inputs: Vec<f64>,
    /// Row-major `len × OUTPUT_DIM` per-step LOS-rate increments.
    pub targets: Vec<f64>,
    /// Source trajectory of every row.
    pub trajectory: Vec<u32>,
    pub normalizer: ModelNormalizer,
}

impl TransitionSet {
    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub layer_dims: Vec<usize>,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a validation improvement before stopping.
    pub patience: usize,
    pub learning_rate: f64,
    /// Fraction of whole trajectories held out for validation.
    pub validation_fraction: f64,
    /// Caps the number of shuffled training rows visited per epoch.
    pub samples_per_epoch: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            layer_dims: default_layer_dims(),
            batch_size: 512,
            max_epochs: 300,
            patience: 20,
            learning_rate: 1e-3,
            validation_fraction: 0.1,
            samples_per_epoch: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_mae: f64,
    pub validation_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub train_rows: usize,
    pub validation_rows: usize,
}

/// Trains the dynamics prior by Adam on the normalized MAE, keeping the
/// parameters with the best validation error.
pub fn meta_train(set: &TransitionSet, cfg: &TrainConfig) -> Result<(Checkpoint, TrainReport)> {
    if set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    let x = set.normalizer.input.normalize_rows(&set.inputs);
    let y = set.normalizer.output.normalize_rows(&set.targets);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut ids: Vec<u32> = set.trajectory.clone();
    ids.sort_unstable();
    ids.dedup();
    ids.shuffle(&mut rng);
    let n_val = ((ids.len() as f64 * cfg.validation_fraction).round() as usize).min(ids.len() - 1);
    let held_out = &ids[..n_val];
    let (mut train, mut val): (Vec<usize>, Vec<usize>) =
        (0..set.len()).partition(|&i| !held_out.contains(&set.trajectory[i]));
    if val.is_empty() {
        val = train.clone();
    }
    let (val_x, val_y) = gather(&x, &y, &val);

    let mut params = NetworkParams::init(&cfg.layer_dims, cfg.seed)?;
    let mut adam = AdamState::new(&params, cfg.learning_rate);
    let mut best = (params.mae(&val_x, &val_y, val.len())?, params.clone(), 0);
    let mut history = Vec::new();
    info!(
        "training on {} rows ({} validation) for up to {} epochs",
        train.len(),
        val.len(),
        cfg.max_epochs
    );

    for epoch in 1..=cfg.max_epochs {
        train.shuffle(&mut rng);
        let visit = cfg.samples_per_epoch.unwrap_or(train.len()).min(train.len());
        let mut loss_sum = 0.0;
        for batch in train[..visit].chunks(cfg.batch_size) {
            let (bx, by) = gather(&x, &y, batch);
            let (loss, grad) = params.mae_loss_and_gradient(&bx, &by, batch.len())?;
            adam_step(&mut params, &mut adam, &grad)?;
            loss_sum += loss * batch.len() as f64;
        }
        let stats = EpochStats {
            epoch,
            train_mae: loss_sum / visit as f64,
            validation_mae: params.mae(&val_x, &val_y, val.len())?,
        };
        debug!(
            "epoch {epoch}: train {:.5} validation {:.5}",
            stats.train_mae, stats.validation_mae
        );
        history.push(stats);
        if stats.validation_mae < best.0 {
            best = (stats.validation_mae, params.clone(), epoch);
        } else if epoch - best.2 >= cfg.patience {
            info!("validation plateau, stopping after epoch {epoch}");
            break;
        }
    }
    info!("best validation MAE {:.5} at epoch {}", best.0, best.2);

    let report = TrainReport {
        history,
        best_epoch: best.2,
        train_rows: train.len(),
        validation_rows: val.len(),
    };
    let ckpt = Checkpoint {
        params: best.1,
        normalizer: set.normalizer.clone(),
        adam,
    };
    Ok((ckpt, report))
}

fn gather(x: &[f64], y: &[f64], rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut bx = Vec::with_capacity(rows.len() * INPUT_DIM);
    let mut by = Vec::with_capacity(rows.len() * OUTPUT_DIM);
    for &i in rows {
        bx.extend_from_slice(&x[i * INPUT_DIM..(i + 1) * INPUT_DIM]);
        by.extend_from_slice(&y[i * OUTPUT_DIM..(i + 1) * OUTPUT_DIM]);
    }
    (bx, by)
}
