//! Random walks `Φ_n = s_1 ∘ ... ∘ s_n` on `Aut(F_N)` and `A_n ... A_1` on
//! integer matrices, with the experiment suite built on them.
//!
//! Increments are drawn from [`CounterRng`](crate::rng::CounterRng) keyed by
//! `(master_seed, path_id)` at counter `n - 1`, so every path is a pure
//! function of its key. Paths run in parallel and are merged in `path_id`
//! order.

mod experiments;
mod measure;
mod path;
mod series;

pub use experiments::{
    conjugacy_growth_experiment, drift_experiment, geometric_schedule, gromov_decay_experiment, matrix_experiment,
    ratio_subadditive, spectral_experiment, MatrixObservable, MatrixSettings, WalkSettings,
};
pub use measure::{ProbMeasure, SupportElement, WEIGHT_TOLERANCE};
pub use path::{abelianized_increment, increment_indices, matrix_increments, sample_path, WalkPath};
pub use series::{
    batch_means_halfwidth, mean, median, summarize, EstimateSeries, Record, Status, SummaryRow, MAX_BATCHES,
    TRUNCATION_MARKER,
};
