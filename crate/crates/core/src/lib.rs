//! Cooperative pricing games among transport operators facing multinomial-logit demand.
//!
//! Operators either price independently (Nash equilibrium) or collaborate while holding
//! their total market share fixed. The resulting TU game has closed-form coalition
//! values; this crate builds it, evaluates proportional, Shapley and market-share
//! exchange allocations, tests core membership, and runs the Monte Carlo study of how
//! often each rule is stable.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod coalition;
pub mod error;
pub mod experiments;
pub mod game;
pub mod model;
pub mod numerics;

pub use allocation::{
    core_check, core_violations, iprop, mprop, mse, mse_delta, mse_delta_threshold, phi_closed_form, shapley,
    Allocation, AllocationMetadata, CoreReport, Rule, DEFAULT_CORE_TOLERANCE,
};
pub use coalition::CoalitionMask;
pub use error::{Result, TcError};
pub use experiments::{random_situation, run_experiment, ExperimentReport, GridSpec, RuleOutcome};
pub use game::{
    build_delta_game, build_game, check_properties, coalition_value, max_feasible_delta, Game, GameKind,
    PropertyReport, Violation,
};
pub use model::{nash_prices, CollaborativeOptimum, MarketState, TcSituation};
pub use numerics::{fixed_point, lambert_w0, oracle_optimize, SolverConfig};
