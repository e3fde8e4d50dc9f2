#![allow(dead_code)]

use tcgame_core::experiments::{random_situation, trial_rng, GridSpec};
use tcgame_core::{CoalitionMask, SolverConfig, TcSituation};

/// p = (6, 8, 15), c = (8, 4, 1), alpha = (1, 0.5, 1.5), beta = 0.36.
pub fn example_market() -> TcSituation {
    TcSituation::new(vec![6.0, 8.0, 15.0], vec![8.0, 4.0, 1.0], vec![1.0, 0.5, 1.5], 0.36).unwrap()
}

/// Neither monotonic nor convex.
pub fn counterexample_market() -> TcSituation {
    TcSituation::new(vec![0.5, 0.5, 2.0], vec![0.5, 1.0, 1.5], vec![1.0, 2.0, 1.5], 0.1).unwrap()
}

/// Coalitions in the column order {}, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}.
pub fn table_order() -> [CoalitionMask; 8] {
    [
        CoalitionMask::EMPTY,
        CoalitionMask::from_players([0]),
        CoalitionMask::from_players([1]),
        CoalitionMask::from_players([2]),
        CoalitionMask::from_players([0, 1]),
        CoalitionMask::from_players([0, 2]),
        CoalitionMask::from_players([1, 2]),
        CoalitionMask::from_players([0, 1, 2]),
    ]
}

pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Asserts agreement with a three-decimal table entry.
pub fn assert_table(actual: f64, expected: f64, what: &str) {
    assert!(
        (round3(actual) - expected).abs() < 5e-4,
        "{what}: got {actual} (rounds to {}), table says {expected}",
        round3(actual)
    );
}

pub fn grid_markets(n: usize, count: usize, seed: u64) -> Vec<TcSituation> {
    let grid = GridSpec::default();
    let config = SolverConfig::default();
    (0..count as u64)
        .map(|k| random_situation(&mut trial_rng(seed, k), n, &grid, &config).unwrap())
        .collect()
}
