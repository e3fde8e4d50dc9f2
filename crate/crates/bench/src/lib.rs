//! Shared fixtures for the criterion benchmarks.

use tcgame_core::experiments::{random_situation, trial_rng, GridSpec};
use tcgame_core::{SolverConfig, TcSituation};

/// The three-operator market used throughout the documentation.
pub fn three_operator_market() -> TcSituation {
    TcSituation::new(vec![6.0, 8.0, 15.0], vec![8.0, 4.0, 1.0], vec![1.0, 0.5, 1.5], 0.36)
        .expect("valid fixture")
}

/// `count` equilibrium-priced situations with `n` operators drawn from the default grid.
pub fn equilibrium_markets(n: usize, count: usize, seed: u64) -> Vec<TcSituation> {
    let grid = GridSpec::default();
    let config = SolverConfig::default();
    (0..count as u64)
        .map(|k| random_situation(&mut trial_rng(seed, k), n, &grid, &config).expect("solver converges"))
        .collect()
}
