//! Monte Carlo laboratory for random walks on `Out(F_N)` and on integer
//! matrix groups.
//!
//! * [`free_group`]: reduced words, automorphisms with certified inverses.
//! * [`outer_metric`]: Lipschitz distances on the rose orbit of outer space,
//!   Gromov products, highness ratios, four-point `delta`.
//! * [`spectral`]: certified brackets on log stretch factors.
//! * [`matrix_oracle`]: exact integer matrix products and spectral radii.
//! * [`walk`]: random walk sampling and the experiment suite.

pub mod error;
pub mod free_group;
pub mod matrix_oracle;
pub mod outer_metric;
pub mod rng;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
