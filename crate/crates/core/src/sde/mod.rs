//! Controlled time-homogeneous SDEs `dX = b(X,u) dt + σ(X,u) dW` and path simulation.
//!
//! Paths are driven by a counter-based noise stream keyed on `(master_seed, path_index)`,
//! so every path is reproducible on its own, in any evaluation order.

mod control_set;
mod controlled;
mod grid;
mod noise;
mod path;
mod regularity;

pub use control_set::ControlSet;
pub use controlled::{euler_maruyama_step, ControlledSde, DiffusionFn, DriftFn};
pub use grid::TimeGrid;
pub use noise::{coarsen_increments, NoiseSource};
pub use path::{
    simulate_closed_loop, simulate_closed_loop_with_increments, simulate_exact_gbm,
    simulate_exact_gbm_with_increments, Absorption, SamplePath,
};
pub use regularity::{check_regularity, ProbePair, RegularityReport, StateBounds};
