//! Training data: randomized collection runs, preprocessing into model
//! transitions, and dataset files.

mod collect;
mod preprocess;
mod store;

pub use collect::{collect, collect_trajectory, config_hash, CollectionConfig, Dataset, DatasetMeta, TransitionRecord};
pub use preprocess::{preprocess, PreprocessConfig};
pub use store::{export_csv, load_dataset, save_dataset, DATASET_MAGIC};
