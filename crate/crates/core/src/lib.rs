//! Meta-learning MPPI guidance: a learned LOS-rate dynamics model adapted
//! online each control cycle, driving a sampling-based predictive controller
//! in a 3D interceptor/target engagement.

pub mod engagement;
pub mod error;
pub mod harness;
pub mod meta;
pub mod mppi;
pub mod neural;
pub mod pipeline;
pub mod seed;

pub use error::{Error, Result};
