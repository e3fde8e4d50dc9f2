//! Acceptance suite. Runs every exit criterion and prints one PASS/FAIL line each;
//! exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcgame_core::game::{oracle_coalition_value, superadditivity_violation};
use tcgame_core::numerics::DEFAULT_ORACLE_RESOLUTION;
use tcgame_core::*;

type Outcome = Result<String, String>;

const GOLDEN_TOLERANCE: f64 = 5e-4;
const ORACLE_TOLERANCE: f64 = 1e-3;
const REPLICATION_BAND: f64 = 0.02;
const DEGRADATION_SLACK: f64 = 0.01;
const TRIALS: usize = 10_000;
const PLAYER_COUNTS: [usize; 3] = [3, 4, 5];
const REPLICATION_SEED: u64 = 20_240_601;
const MSE_SUITE_SEED: u64 = 777;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_values(what: &str, got: &[f64], want: &[f64]) -> Result<(), String> {
    ensure(got.len() == want.len(), || format!("{what}: length {} vs {}", got.len(), want.len()))?;
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        ensure((round3(*g) - w).abs() < GOLDEN_TOLERANCE, || format!("{what}[{i}] = {g:.6}, expected {w}"))?;
    }
    Ok(())
}

fn table_values(game: &Game) -> Vec<f64> {
    table_order().iter().map(|&m| game.value(m)).collect()
}

fn err(e: TcError) -> String {
    e.to_string()
}

fn status_quo() -> Outcome {
    let state = example_market().market_state();
    check_values("shares", &state.shares, &[0.220, 0.065, 0.014])?;
    check_values("profits", &state.profits, &[-0.440, 0.260, 0.199])?;
    Ok(format!("shares {:.3?}, profits {:.3?}", state.shares, state.profits))
}

fn collaborative_optimum() -> Outcome {
    let opt = example_market().optimal_prices();
    check_values("p*", &opt.prices, &[13.980, 9.980, 6.980])?;
    check_values("profits", &opt.state.profits, &[0.074, 0.190, 1.523])?;
    check_values("P*", &[opt.joint_profit], &[1.787])?;
    Ok(format!("p* {:.3?}, P* {:.3}", opt.prices, opt.joint_profit))
}

fn golden_games() -> Outcome {
    let game = build_game(&example_market()).map_err(err)?;
    check_values("example game", &table_values(&game), &[0.0, -0.440, 0.260, 0.199, 0.230, 1.485, 0.756, 1.787])?;
    let counter = build_game(&counterexample_market()).map_err(err)?;
    check_values("counterexample game", &table_values(&counter), &[0.0, 0.0, -0.246, 0.128, -0.244, 0.130, -0.109, -0.109])?;
    Ok("16 coalition values match".into())
}

fn allocation_goldens() -> Outcome {
    let theta = example_market();
    let game = build_game(&theta).map_err(err)?;
    let tol = DEFAULT_CORE_TOLERANCE;

    let ip = iprop(&game).map_err(err)?;
    check_values("I-PROP", &ip.payoffs, &[-42.101, 24.859, 19.029])?;
    let mp = mprop(&theta, &game).map_err(err)?;
    check_values("M-PROP", &mp.payoffs, &[1.314, 0.388, 0.085])?;
    let sv = shapley(&game).map_err(err)?;
    check_values("SV", &sv.payoffs, &[0.407, 0.392, 0.989])?;
    let ms = mse(&theta, &game).map_err(err)?;
    let phi = ms.metadata.phi.unwrap_or(f64::NAN);
    check_values("phi", &[phi], &[3.202])?;
    check_values("MSE", &ms.payoffs, &[0.738, 0.296, 0.753])?;

    let violated = |a: &Allocation, m: CoalitionMask| -> Result<bool, String> {
        Ok(core_violations(&game, a, tol).map_err(err)?.iter().any(|(v, _)| *v == m))
    };
    ensure(!core_check(&game, &ip, tol).map_err(err)?.in_core, || "I-PROP reported in core".into())?;
    ensure(violated(&ip, CoalitionMask::from_players([0, 1]))?, || "I-PROP does not fail via {1,2}".into())?;
    ensure(!core_check(&game, &mp, tol).map_err(err)?.in_core, || "M-PROP reported in core".into())?;
    ensure(violated(&mp, CoalitionMask::singleton(2))?, || "M-PROP does not fail via {3}".into())?;
    ensure(!core_check(&game, &sv, tol).map_err(err)?.in_core, || "SV reported in core".into())?;
    ensure(core_check(&game, &ms, tol).map_err(err)?.in_core, || "MSE reported outside core".into())?;
    Ok(format!("phi {phi:.3}; core verdicts I-PROP/M-PROP/SV out, MSE in"))
}

fn payback_extension() -> Outcome {
    let theta = example_market();
    let game = build_game(&theta).map_err(err)?;
    let scaled = build_delta_game(&game, 0.08).map_err(err)?;
    check_values("delta game", &table_values(&scaled), &[0.0, -0.440, 0.260, 0.199, 0.212, 1.366, 0.695, 1.644])?;
    let alloc = mse_delta(&theta, &game, 0.08).map_err(err)?;
    check_values("(1-delta) MSE", &alloc.payoffs, &[0.679, 0.272, 0.693])?;
    let threshold = mse_delta_threshold(&theta, &game).map_err(err)?;
    check_values("threshold", &[threshold], &[0.124])?;
    ensure(0.08 <= threshold, || "delta above threshold".into())?;
    ensure(core_check(&scaled, &alloc, DEFAULT_CORE_TOLERANCE).map_err(err)?.in_core, || {
        "(1-delta) MSE outside the delta core".into()
    })?;
    Ok(format!("threshold {threshold:.3}, core pass at delta = 0.08"))
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let markets = grid_markets(2, 50, 61).into_iter().chain(grid_markets(3, 50, 62));
    for theta in markets {
        let game = build_game(&theta).map_err(err)?;
        for m in game.coalitions().skip(1) {
            let opt = oracle_coalition_value(&theta, m, DEFAULT_ORACLE_RESOLUTION).map_err(err)?;
            let gap = game.value(m) - opt.value;
            ensure(gap >= -1e-9, || format!("oracle exceeds closed form by {:e} for {m}", -gap))?;
            ensure(gap < ORACLE_TOLERANCE, || format!("oracle gap {gap:e} for {m} in {theta:?}"))?;
            worst = worst.max(gap);
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed.as_secs() < 60, || format!("took {elapsed:?}"))?;
    Ok(format!("100 markets, {checked} coalitions, worst gap {worst:.2e}, {elapsed:.1?}"))
}

fn mse_core_guarantee() -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    for n in PLAYER_COUNTS {
        let report = run_experiment(n, TRIALS, &[Rule::Mse], MSE_SUITE_SEED, &GridSpec::default()).map_err(err)?;
        let o = report.outcome(Rule::Mse).ok_or("missing MSE outcome")?;
        ensure(o.in_core == TRIALS, || format!("n={n}: {} of {TRIALS} MSE allocations outside the core", TRIALS - o.in_core))?;
        parts.push(format!("n={n} {}/{}", o.in_core, TRIALS));
    }
    let elapsed = started.elapsed();
    ensure(elapsed.as_secs() < 120, || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {elapsed:.1?}", parts.join(", ")))
}

fn replication() -> Outcome {
    let targets = [
        (Rule::IProp, [0.9460, 0.8959, 0.8538]),
        (Rule::MProp, [0.0001, 0.0000, 0.0000]),
        (Rule::Shapley, [0.9620, 0.9303, 0.8991]),
    ];
    let mut fractions = Vec::new();
    let mut lines = Vec::new();
    for n in PLAYER_COUNTS {
        let report = run_experiment(n, TRIALS, &Rule::STUDIED, REPLICATION_SEED, &GridSpec::default()).map_err(err)?;
        ensure(report.non_superadditive == 0, || format!("n={n}: {} games not superadditive", report.non_superadditive))?;
        let f = |r| report.fraction(r).unwrap_or(f64::NAN);
        fractions.push([f(Rule::IProp), f(Rule::MProp), f(Rule::Shapley), f(Rule::Mse)]);
        lines.push(format!(
            "n={n}: I-PROP {:.4} M-PROP {:.4} SV {:.4} MSE {:.4}",
            f(Rule::IProp),
            f(Rule::MProp),
            f(Rule::Shapley),
            f(Rule::Mse)
        ));
    }
    println!("    replication seed {REPLICATION_SEED}, {TRIALS} trials per n");
    for line in &lines {
        println!("    {line}");
    }

    for (k, n) in PLAYER_COUNTS.iter().enumerate() {
        let [ip, mp, sv, ms] = fractions[k];
        for (slot, (rule, table)) in targets.iter().enumerate() {
            let got = fractions[k][slot];
            ensure((got - table[k]).abs() <= REPLICATION_BAND, || {
                format!("n={n}: {rule} fraction {got:.4} vs table {:.4}", table[k])
            })?;
        }
        ensure(ms == 1.0, || format!("n={n}: MSE fraction {ms}"))?;
        ensure(ms > sv && sv > ip && ip - mp > 0.5, || format!("n={n}: ordering broken ({ip}, {mp}, {sv}, {ms})"))?;
    }
    for slot in [0, 2] {
        for k in 1..PLAYER_COUNTS.len() {
            let (prev, cur) = (fractions[k - 1][slot], fractions[k][slot]);
            ensure(cur <= prev + DEGRADATION_SLACK, || format!("fraction rises with n: {prev:.4} -> {cur:.4}"))?;
        }
    }
    Ok("all fractions within ±0.02; MSE = 1; ordering and degradation hold".into())
}

fn invariant_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Lambert W residuals on [-1/e, 1e6]
    let mut xs: Vec<f64> = (0..10_000)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < 0.3 {
                -1.0 / std::f64::consts::E * rng.gen::<f64>()
            } else {
                10f64.powf(rng.gen_range(-8.0..6.0))
            }
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut last = f64::NEG_INFINITY;
    for &x in &xs {
        let w = lambert_w0(x).map_err(err)?;
        ensure((w * w.exp() - x).abs() <= 1e-10 * x.abs().max(1.0), || format!("W residual at {x}"))?;
        ensure(w >= last, || format!("W not monotone at {x}"))?;
        last = w;
    }

    // A >= B (ln(A/B) + 1)
    for _ in 0..10_000 {
        let a: f64 = rng.gen_range(f64::MIN_POSITIVE..=1e3);
        let b: f64 = rng.gen_range(f64::MIN_POSITIVE..=1e3);
        ensure(a >= b * ((a / b).ln() + 1.0) - 1e-12 * a.max(b), || format!("tangent inequality fails at ({a}, {b})"))?;
    }

    let markets = grid_markets(3, 250, 71)
        .into_iter()
        .chain(grid_markets(4, 250, 72))
        .chain(grid_markets(5, 250, 73))
        .chain(grid_markets(2, 250, 74));
    let mut games = 0;
    for theta in markets {
        let state = theta.market_state();
        ensure((state.total_share() + state.outside_share - 1.0).abs() < 1e-12, || "share normalization".into())?;
        ensure(theta.nash_residual() <= 1e-8, || "Nash residual".into())?;
        let opt = theta.optimal_prices();
        let grand = theta.grand();
        let dp = theta.d_aggregate(grand, theta.prices());
        ensure((theta.d_aggregate(grand, &opt.prices) - dp).abs() < 1e-10 * dp.max(1.0), || "D(p*) != D(p)".into())?;
        ensure(theta.collaboration_gain() >= -1e-12, || "negative collaboration gain".into())?;

        let game = build_game(&theta).map_err(err)?;
        ensure(superadditivity_violation(&game).is_none(), || format!("not superadditive: {theta:?}"))?;
        let sv = shapley(&game).map_err(err)?;
        ensure((sv.total() - game.grand_value()).abs() < 1e-9, || "Shapley not efficient".into())?;
        let phi = mse(&theta, &game).map_err(err)?.metadata.phi.unwrap_or(f64::NAN);
        ensure((phi - phi_closed_form(&theta)).abs() < 1e-10, || format!("phi {phi} vs closed form"))?;
        games += 1;

        // equal margins: collaboration is worthless
        let margin = theta.prices()[0] - theta.costs()[0];
        let flat = TcSituation::new(
            theta.costs().iter().map(|c| c + margin).collect(),
            theta.costs().to_vec(),
            theta.alphas().to_vec(),
            theta.beta(),
        )
        .map_err(err)?;
        ensure(flat.collaboration_gain().abs() < 1e-9, || "equal-margin gain is not zero".into())?;
    }

    // null player: player 4 adds nothing to any coalition
    let base = build_game(&example_market()).map_err(err)?;
    let values = CoalitionMask::all(4).map(|m| base.value(m.without(3))).collect();
    let padded = Game::from_values(4, values).map_err(err)?;
    let sv = shapley(&padded).map_err(err)?;
    ensure(sv.payoffs[3].abs() < 1e-12, || format!("null player receives {}", sv.payoffs[3]))?;

    Ok(format!("10,000 W samples, 10,000 (A,B) pairs, {games} grid games"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden status quo", status_quo),
        ("golden collaborative optimum", collaborative_optimum),
        ("golden coalition values", golden_games),
        ("allocation goldens and core verdicts", allocation_goldens),
        ("payback extension", payback_extension),
        ("closed forms vs brute-force oracle", oracle_equivalence),
        ("MSE core guarantee", mse_core_guarantee),
        ("Monte Carlo replication", replication),
        ("invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {reason}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
