//! Numerical defaults shared by the library and the command line.

/// Default Grunsky/Taylor truncation.
pub const DEFAULT_TRUNCATION: usize = 128;
/// Allowed truncation range for user input.
pub const TRUNCATION_RANGE: (usize, usize) = (8, 512);
/// Gauss–Jacobi nodes per quadrature panel.
pub const QUADRATURE_NODES: usize = 24;
/// Parameter-problem iteration budget.
pub const SOLVER_BUDGET: usize = 200;
/// Parameter-problem residual tolerance.
pub const SOLVER_TOL: f64 = 1e-10;
/// Power-iteration relative tolerance.
pub const NORM_TOL: f64 = 1e-10;
/// Power-iteration budget per matrix dimension.
pub const NORM_BUDGET_PER_DIM: usize = 10;
/// Longest Taylor series the binomial-product expansion accepts.
pub const MAX_SERIES_LEN: usize = 4096;
/// Default seed for randomized checks.
pub const DEFAULT_SEED: u64 = 20_240_611;
