//! Numerical tolerances used across the crate.
//!
//! Kept in one place so each threshold is declared once, with its origin.

/// Hermiticity of operator entries, relative to the largest entry magnitude.
pub const HERMITICITY: f64 = 1e-9;

/// Floor below which an eigenvalue counts as genuinely negative; values in
/// `[-EIG_CLAMP, 0)` are rounding noise from products of PSD factors and get
/// clamped to zero.
pub const EIG_CLAMP: f64 = 1e-9;

/// Unit-trace check on density operators.
pub const TRACE_ONE: f64 = 1e-9;

/// POVM completeness: max-entry deviation of the element sum from identity.
pub const POVM_SUM: f64 = 1e-9;

/// PVM idempotence and mutual orthogonality, in max-entry norm.
pub const PVM_SHARP: f64 = 1e-8;

/// Residual of a PSD square root: max-entry norm of `R^2 - P`.
pub const SQRT_RESIDUAL: f64 = 1e-8;

/// Jacobi sweep convergence: off-diagonal Frobenius mass relative to the
/// Frobenius norm of the input.
pub const JACOBI_OFF: f64 = 1e-14;

/// Maximum number of Jacobi sweeps before reporting no convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Metric axioms (symmetry, triangle inequality) on explicit matrices.
pub const METRIC: f64 = 1e-12;

/// Slack on ball membership `d(x,y) <= w/2 + BALL_SLACK`, so exact grid
/// widths do not flap on float boundaries.
pub const BALL_SLACK: f64 = 1e-12;

/// Slack on confidence comparisons `mass >= 1 - eps - CONFIDENCE_SLACK`.
pub const CONFIDENCE_SLACK: f64 = 1e-12;

/// Probability weights below this are treated as zero outcomes.
pub const ZERO_PROB: f64 = 1e-12;

/// Renormalize an induced distribution when its total drifts further than
/// this from one.
pub const DISTRIBUTION_DRIFT: f64 = 1e-10;

/// Balance requirement on signed measures fed to the transport solver.
pub const MEASURE_BALANCE: f64 = 1e-10;

/// Convergence of the alternating ascent for the Werner distance.
pub const ALTERNATING_CONVERGENCE: f64 = 1e-10;

/// Maximum iterations per alternating-ascent start.
pub const ALTERNATING_MAX_ITERS: usize = 500;

/// Number of seeded random starts for the alternating ascent.
pub const ALTERNATING_STARTS: usize = 20;

/// Grid used to deduplicate enumerated polytope vertices.
pub const VERTEX_DEDUP: f64 = 1e-9;

/// Default tolerance for inequality check reports.
pub const CHECK_DEFAULT: f64 = 1e-9;
