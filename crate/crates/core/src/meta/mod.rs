//! Meta-training of the dynamics prior and its per-cycle online adaptation.

mod adapt;
mod buffer;
mod train;

pub use adapt::{adapt, AdaptationConfig};
pub use buffer::{ExperienceBuffer, Transition};
pub use train::{meta_train, EpochStats, TrainConfig, TrainReport, TransitionSet};
