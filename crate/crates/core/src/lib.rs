//! Quantifiers for joint localizability and joint measurability of
//! finite-outcome quantum observables.
//!
//! The crate computes, for PVMs and POVMs over finite metric spaces:
//!
//! - the overall width `W_eps` of an outcome distribution (localizability),
//! - the error-bar width `We(M1, A)` of an approximating POVM relative to a
//!   reference PVM (measurability),
//! - the Werner (Monge/Kantorovich-type) distance `D_W` and the l-infinity
//!   distance `D_inf` between observables,
//! - the localization error `LE` of a distribution,
//!
//! together with the entanglement-based witness construction that transfers
//! measurability bounds into localizability bounds, and a verification
//! harness that checks every supported inequality (Landau-Pollak, width
//! transfer, ball-counting bounds, Werner-distance bounds, l-infinity
//! bounds) on structured and seeded random instances.
//!
//! Everything is dense, deterministic and desk-scale: dimensions up to a few
//! dozen, outcome sets up to a few hundred points. With the default
//! `parallel` feature, sweeps over states, instances and grid points run on
//! rayon; without it the same code runs sequentially.

pub mod checks;
pub mod distances;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod metric;
pub mod observables;
pub mod scenario;
pub mod seed;
pub mod tol;
mod transport;
pub mod widths;
pub mod witness;

pub use num_complex;

pub use error::{Error, Result};
pub use linalg::{CMatrix, DensityOperator, HermitianOperator, Spectrum};
pub use metric::FiniteMetricSpace;
pub use observables::{JointPovm, Povm, ProbabilityDistribution, Pvm};
