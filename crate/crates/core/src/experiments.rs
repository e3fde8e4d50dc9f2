//! Monte Carlo study of how often each allocation rule lands in the core.
//!
//! Each trial draws costs and utility constants uniformly from a discrete grid,
//! prices the market at its Nash equilibrium, builds the game and core-checks every
//! requested rule. Trial `k` uses its own ChaCha8 stream (`set_stream(k)`) under the
//! master seed, so reports do not depend on how trials are scheduled.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{self, core_check, Allocation, Rule, DEFAULT_CORE_TOLERANCE};
use crate::coalition::CoalitionMask;
use crate::error::{Result, TcError};
use crate::game::{build_game, superadditivity_violation, MAX_PLAYERS};
use crate::model::TcSituation;
use crate::numerics::SolverConfig;

pub const MAX_CONSECUTIVE_FAILURES: usize = 100;
const FAILURE_SAMPLES_PER_RULE: usize = 5;

/// Support of the parameter draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub cost_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
}

impl Default for GridSpec {
    /// Costs and alphas on {0.5, 1.0, ..., 15.0}; beta on {0.1, 0.2, ..., 1.0}.
    fn default() -> Self {
        let half_steps: Vec<f64> = (1..=30).map(|k| k as f64 * 0.5).collect();
        Self {
            cost_grid: half_steps.clone(),
            alpha_grid: half_steps,
            beta_grid: (1..=10).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.cost_grid.is_empty() || self.alpha_grid.is_empty() || self.beta_grid.is_empty() {
            return Err(TcError::InvalidArgument("parameter grids must be nonempty".into()));
        }
        if self.beta_grid.iter().any(|b| !(*b > 0.0)) {
            return Err(TcError::InvalidArgument("beta grid must be positive".into()));
        }
        Ok(())
    }
}

/// Draws one equilibrium-priced situation, redrawing when the price solver fails.
pub fn random_situation<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<TcSituation> {
    draw(rng, n, grid, config).map(|(theta, _)| theta)
}

fn draw<R: Rng + ?Sized>(rng: &mut R, n: usize, grid: &GridSpec, config: &SolverConfig) -> Result<(TcSituation, usize)> {
    if n < 2 {
        return Err(TcError::InvalidArgument(format!("experiments need at least 2 players, got {n}")));
    }
    if n > MAX_PLAYERS {
        return Err(TcError::TooManyPlayers { players: n, max: MAX_PLAYERS });
    }
    grid.validate()?;
    for retries in 0..MAX_CONSECUTIVE_FAILURES {
        let c: Vec<f64> = (0..n).map(|_| *grid.cost_grid.choose(rng).unwrap()).collect();
        let alpha: Vec<f64> = (0..n).map(|_| *grid.alpha_grid.choose(rng).unwrap()).collect();
        let beta = *grid.beta_grid.choose(rng).unwrap();
        match TcSituation::at_equilibrium(c, alpha, beta, config) {
            Ok(theta) => return Ok((theta, retries)),
            Err(TcError::NoConvergence { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(TcError::GenerationAborted(MAX_CONSECUTIVE_FAILURES))
}

/// Per-rule tallies. `fraction = in_core / trials`; undefined evaluations count as
/// trials but never as in-core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub rule: Rule,
    pub evaluated: usize,
    pub in_core: usize,
    pub undefined: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureSample {
    pub trial: u64,
    pub rule: Rule,
    pub situation: TcSituation,
    pub payoffs: Vec<f64>,
    pub worst_coalition: CoalitionMask,
    pub worst_deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_players: usize,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub rules: Vec<RuleOutcome>,
    /// Redraws caused by equilibrium-solver failures.
    pub nash_retries: usize,
    /// Generated games that failed the superadditivity check.
    pub non_superadditive: usize,
    pub failures: Vec<FailureSample>,
}

impl ExperimentReport {
    pub fn outcome(&self, rule: Rule) -> Option<&RuleOutcome> {
        self.rules.iter().find(|o| o.rule == rule)
    }

    pub fn fraction(&self, rule: Rule) -> Option<f64> {
        self.outcome(rule).map(|o| o.fraction)
    }
}

enum Verdict {
    InCore,
    Outside(Allocation, CoalitionMask, f64),
    Undefined,
}

struct Trial {
    situation: TcSituation,
    retries: usize,
    superadditive: bool,
    verdicts: Vec<Verdict>,
}

pub fn run_experiment(
    n_players: usize,
    trials: usize,
    rules: &[Rule],
    seed: u64,
    grid: &GridSpec,
) -> Result<ExperimentReport> {
    run_experiment_with(n_players, trials, rules, seed, grid, &SolverConfig::default())
}

pub fn run_experiment_with(
    n_players: usize,
    trials: usize,
    rules: &[Rule],
    seed: u64,
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(TcError::InvalidArgument("trials must be at least 1".into()));
    }
    let mut unique: Vec<Rule> = Vec::new();
    for &rule in rules {
        if !Rule::STUDIED.contains(&rule) {
            return Err(TcError::InvalidArgument(format!("rule {rule} is not part of the study")));
        }
        if !unique.contains(&rule) {
            unique.push(rule);
        }
    }
    if unique.is_empty() {
        return Err(TcError::InvalidArgument("no rules requested".into()));
    }

    let outcomes: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|k| run_trial(k, n_players, &unique, seed, grid, config))
        .collect::<Result<_>>()?;

    let mut tallies: Vec<RuleOutcome> = unique
        .iter()
        .map(|&rule| RuleOutcome { rule, evaluated: 0, in_core: 0, undefined: 0, fraction: 0.0 })
        .collect();
    let mut failures = Vec::new();
    let mut sampled = vec![0usize; unique.len()];
    let mut nash_retries = 0;
    let mut non_superadditive = 0;

    for (k, trial) in outcomes.into_iter().enumerate() {
        nash_retries += trial.retries;
        non_superadditive += usize::from(!trial.superadditive);
        for (r, verdict) in trial.verdicts.into_iter().enumerate() {
            let tally = &mut tallies[r];
            match verdict {
                Verdict::InCore => {
                    tally.evaluated += 1;
                    tally.in_core += 1;
                }
                Verdict::Outside(allocation, worst_coalition, worst_deficit) => {
                    tally.evaluated += 1;
                    if sampled[r] < FAILURE_SAMPLES_PER_RULE {
                        sampled[r] += 1;
                        failures.push(FailureSample {
                            trial: k as u64,
                            rule: tally.rule,
                            situation: trial.situation.clone(),
                            payoffs: allocation.payoffs,
                            worst_coalition,
                            worst_deficit,
                        });
                    }
                }
                Verdict::Undefined => tally.undefined += 1,
            }
        }
    }
    for tally in &mut tallies {
        tally.fraction = tally.in_core as f64 / trials as f64;
    }

    Ok(ExperimentReport {
        n_players,
        trials,
        seed,
        grid: grid.clone(),
        rules: tallies,
        nash_retries,
        non_superadditive,
        failures,
    })
}

/// The RNG stream owned by trial `k`.
pub fn trial_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn run_trial(k: u64, n: usize, rules: &[Rule], seed: u64, grid: &GridSpec, config: &SolverConfig) -> Result<Trial> {
    let mut rng = trial_rng(seed, k);
    let (situation, retries) = draw(&mut rng, n, grid, config)?;
    let game = build_game(&situation)?;
    let superadditive = superadditivity_violation(&game).is_none();
    let mut verdicts = Vec::with_capacity(rules.len());
    for &rule in rules {
        let allocation = match rule {
            Rule::IProp => allocation::iprop(&game),
            Rule::MProp => allocation::mprop(&situation, &game),
            Rule::Shapley => allocation::shapley(&game),
            Rule::Mse => allocation::mse(&situation, &game),
            Rule::MseDelta | Rule::Custom => unreachable!("filtered by run_experiment"),
        };
        let verdict = match allocation {
            Ok(allocation) => {
                let report = core_check(&game, &allocation, DEFAULT_CORE_TOLERANCE)?;
                if report.in_core {
                    Verdict::InCore
                } else {
                    Verdict::Outside(allocation, report.worst_coalition, report.worst_deficit)
                }
            }
            Err(TcError::DegenerateDenominator(_)) => Verdict::Undefined,
            Err(e) => return Err(e),
        };
        verdicts.push(verdict);
    }
    Ok(Trial { situation, retries, superadditive, verdicts })
}

/// One row per rule per report: `rule,n,trials,in_core,undefined,fraction,seed`.
pub fn write_csv<W: Write>(reports: &[ExperimentReport], writer: W) -> Result<()> {
    let io = |e: csv::Error| TcError::InvalidArgument(format!("csv output failed: {e}"));
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["rule", "n", "trials", "in_core", "undefined", "fraction", "seed"]).map_err(io)?;
    for report in reports {
        for o in &report.rules {
            out.write_record([
                o.rule.label().to_string(),
                report.n_players.to_string(),
                report.trials.to_string(),
                o.in_core.to_string(),
                o.undefined.to_string(),
                o.fraction.to_string(),
                report.seed.to_string(),
            ])
            .map_err(io)?;
        }
    }
    out.flush().map_err(|e| TcError::InvalidArgument(format!("csv output failed: {e}")))?;
    Ok(())
}
