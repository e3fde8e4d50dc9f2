//! `tcgame`: solve transport-choice markets, build their games, allocate profits and
//! run the Monte Carlo core study from the command line.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

mod render;
mod scenario;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tcgame_core::experiments::{run_experiment, write_csv, GridSpec};
use tcgame_core::{
    build_delta_game, build_game, core_check, iprop, max_feasible_delta, mprop, mse, mse_delta, mse_delta_threshold,
    shapley, Allocation, Game, Rule, TcError, DEFAULT_CORE_TOLERANCE,
};

use crate::scenario::ScenarioFile;

#[derive(Parser)]
#[command(name = "tcgame", version, about = "Cooperative transport-choice pricing games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Status-quo market and the collaborative optimum.
    Solve(ScenarioArgs),
    /// All coalition values, optionally of the payback game.
    Game {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = parse_delta)]
        delta: Option<f64>,
    },
    /// Evaluate one allocation rule and test it against the core.
    Allocate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = parse_rule)]
        rule: Rule,
        #[arg(long, value_parser = parse_delta)]
        delta: Option<f64>,
    },
    /// Core verdicts for several rules or for an allocation read from a file.
    CheckCore {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Rules to check; defaults to the scenario's list, then to all four studied rules.
        #[arg(long, value_parser = parse_rule, value_delimiter = ',')]
        rule: Vec<Rule>,
        /// JSON allocation `{"rule": "CUSTOM", "payoffs": [...]}` to check instead.
        #[arg(long, conflicts_with = "rule")]
        allocation: Option<PathBuf>,
        #[arg(long, value_parser = parse_delta)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_CORE_TOLERANCE)]
        tolerance: f64,
    },
    /// Largest feasible payback fraction and the MSE stability threshold.
    DeltaThreshold {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = parse_delta)]
        delta: Option<f64>,
    },
    /// Monte Carlo core-membership study.
    Experiment {
        /// Player counts, e.g. `--n 3,4,5`.
        #[arg(long = "n", value_delimiter = ',', default_values_t = [3usize, 4, 5],
              value_parser = parse_players)]
        players: Vec<usize>,
        #[arg(long, default_value_t = 10_000, value_parser = parse_trials)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_rule, value_delimiter = ',')]
        rule: Vec<Rule>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let d: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if d > 0.0 && d < 1.0 {
        Ok(d)
    } else {
        Err(format!("delta must lie in (0, 1), got {d}"))
    }
}

fn parse_players(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a player count"))?;
    if (2..=tcgame_core::game::MAX_PLAYERS).contains(&n) {
        Ok(n)
    } else {
        Err(format!("player count must lie in 2..={}, got {n}", tcgame_core::game::MAX_PLAYERS))
    }
}

fn parse_trials(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("trials must be at least 1".into()),
        Ok(t) => Ok(t),
        Err(_) => Err(format!("{s:?} is not a trial count")),
    }
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    match s.parse::<Rule>()? {
        Rule::Custom => Err("the custom rule is only available through --allocation".into()),
        rule => Ok(rule),
    }
}

enum Failure {
    Data(String),
    Usage(String),
}

impl From<TcError> for Failure {
    fn from(e: TcError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(args: &ScenarioArgs) -> Result<ScenarioFile, Failure> {
    ScenarioFile::load(&args.scenario).map_err(Failure::Data)
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve(args) => {
            let sc = load(&args)?;
            emit(&render::solve(&sc.situation, args.format))
        }
        Command::Game { scenario, delta } => {
            let sc = load(&scenario)?;
            let mut game = build_game(&sc.situation)?;
            if let Some(d) = delta.or(sc.delta) {
                game = build_delta_game(&game, d)?;
            }
            emit(&render::game(&game, scenario.format))
        }
        Command::Allocate { scenario, rule, delta } => {
            let sc = load(&scenario)?;
            let delta = delta.or(sc.delta);
            let game = build_game(&sc.situation)?;
            let (target, allocation) = evaluate(&sc, &game, rule, delta)?;
            let report = core_check(&target, &allocation, DEFAULT_CORE_TOLERANCE)?;
            emit(&render::allocation(&allocation, &report, scenario.format))
        }
        Command::CheckCore { scenario, rule, allocation, delta, tolerance } => {
            let sc = load(&scenario)?;
            let delta = delta.or(sc.delta);
            let game = build_game(&sc.situation)?;
            let mut checks = Vec::new();
            if let Some(path) = allocation {
                let text = fs::read_to_string(&path)
                    .map_err(|e| Failure::Data(format!("cannot read allocation {}: {e}", path.display())))?;
                let custom: Allocation = serde_json::from_str(&text)
                    .map_err(|e| Failure::Data(format!("invalid allocation {}: {e}", path.display())))?;
                let target = match delta {
                    Some(d) => build_delta_game(&game, d)?,
                    None => game.clone(),
                };
                let report = core_check(&target, &custom, tolerance)?;
                checks.push((custom, report));
            } else {
                let rules = if !rule.is_empty() {
                    rule
                } else if !sc.rules.is_empty() {
                    sc.rules.clone()
                } else {
                    Rule::STUDIED.to_vec()
                };
                for r in rules {
                    let (target, allocation) = evaluate(&sc, &game, r, delta)?;
                    let report = core_check(&target, &allocation, tolerance)?;
                    checks.push((allocation, report));
                }
            }
            emit(&render::core_checks(&checks, scenario.format))
        }
        Command::DeltaThreshold { scenario, delta } => {
            let sc = load(&scenario)?;
            let delta = delta.or(sc.delta);
            let game = build_game(&sc.situation)?;
            let feasible = max_feasible_delta(&game).map_err(|e| Failure::Data(e.to_string()));
            let threshold = mse_delta_threshold(&sc.situation, &game)?;
            let check = match delta {
                Some(d) => {
                    let scaled = build_delta_game(&game, d)?;
                    let alloc = mse_delta(&sc.situation, &game, d)?;
                    Some((d, core_check(&scaled, &alloc, DEFAULT_CORE_TOLERANCE)?))
                }
                None => None,
            };
            emit(&render::thresholds(feasible.ok(), threshold, check, scenario.format))
        }
        Command::Experiment { players, trials, seed, rule, format, out } => {
            let rules = if rule.is_empty() { Rule::STUDIED.to_vec() } else { rule };
            if let Some(bad) = rules.iter().find(|r| !Rule::STUDIED.contains(r)) {
                return Err(Failure::Usage(format!("rule {bad} is not part of the study")));
            }
            let grid = GridSpec::default();
            let reports = players
                .iter()
                .map(|&n| run_experiment(n, trials, &rules, seed, &grid))
                .collect::<Result<Vec<_>, _>>()?;
            let text = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&reports, &mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&reports).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Table => render::experiments(&reports),
            };
            match out {
                Some(path) => {
                    fs::write(&path, text)
                        .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))?;
                    eprintln!("seed {seed}: wrote {}", path.display());
                    Ok(())
                }
                None => emit(&text),
            }
        }
    }
}

/// Evaluates `rule`; returns the game it must be checked against alongside it.
fn evaluate(sc: &ScenarioFile, game: &Game, rule: Rule, delta: Option<f64>) -> Result<(Game, Allocation), Failure> {
    let theta = &sc.situation;
    let allocation = match rule {
        Rule::IProp => iprop(game)?,
        Rule::MProp => mprop(theta, game)?,
        Rule::Shapley => shapley(game)?,
        Rule::Mse => mse(theta, game)?,
        Rule::MseDelta => {
            let d = delta.ok_or_else(|| Failure::Usage("rule mse-delta needs --delta".into()))?;
            let alloc = mse_delta(theta, game, d)?;
            return Ok((build_delta_game(game, d)?, alloc));
        }
        Rule::Custom => return Err(Failure::Usage("custom allocations are read with --allocation".into())),
    };
    Ok((game.clone(), allocation))
}
