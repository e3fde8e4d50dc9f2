//! Scalar special functions and generic solvers.

mod fixed_point;
mod lambert;
mod oracle;

pub use fixed_point::{fixed_point, FixedPoint, SolverConfig};
pub use lambert::lambert_w0;
pub use oracle::{oracle_optimize, OracleOptimum, DEFAULT_ORACLE_RESOLUTION};
