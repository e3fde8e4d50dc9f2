//! Text, JSON and CSV output. Tables round to three decimals; JSON keeps full precision.

use std::fmt::Write;

use serde::Serialize;
use serde_json::json;
use tcgame_core::{Allocation, CoreReport, ExperimentReport, Game, GameKind, MarketState, TcSituation};

use crate::Format;

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn row(out: &mut String, label: &str, values: &[f64]) {
    let _ = write!(out, "{label:<10}");
    for v in values {
        let _ = write!(out, " {v:>10.3}");
    }
    out.push('\n');
}

fn header(out: &mut String, n: usize) {
    let _ = write!(out, "{:<10}", "operator");
    for i in 1..=n {
        let _ = write!(out, " {i:>10}");
    }
    out.push('\n');
}

fn market_rows(out: &mut String, prices: &[f64], state: &MarketState) {
    header(out, prices.len());
    row(out, "price", prices);
    row(out, "share", &state.shares);
    row(out, "profit", &state.profits);
}

fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub fn solve(theta: &TcSituation, format: Format) -> String {
    let status = theta.market_state();
    let optimum = theta.optimal_prices();
    let status_total: f64 = status.profits.iter().sum();
    let gain = theta.collaboration_gain();
    match format {
        Format::Json => to_json(&json!({
            "situation": theta,
            "status_quo": status,
            "collaborative": optimum,
            "gain": gain,
        })),
        Format::Csv => {
            let mut out = String::new();
            csv_line(&mut out, &["scenario,operator,price,share,profit".into()]);
            for (label, prices, state) in [("status_quo", theta.prices(), &status), ("collaborative", &optimum.prices[..], &optimum.state)] {
                for (i, price) in prices.iter().enumerate() {
                    csv_line(
                        &mut out,
                        &[label.into(), (i + 1).to_string(), price.to_string(), state.shares[i].to_string(), state.profits[i].to_string()],
                    );
                }
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "status quo (total share {:.3})", status.total_share());
            market_rows(&mut out, theta.prices(), &status);
            let _ = writeln!(out, "\ncollaborative optimum (total share {:.3})", optimum.state.total_share());
            market_rows(&mut out, &optimum.prices, &optimum.state);
            let _ = writeln!(
                out,
                "\njoint profit {:.3} (status quo {:.3}, gain {:.3})",
                optimum.joint_profit, status_total, gain
            );
            out
        }
    }
}

pub fn game(game: &Game, format: Format) -> String {
    let n = game.n();
    match format {
        Format::Json => to_json(game),
        Format::Csv => {
            let mut out = String::from("key,coalition,value\n");
            for m in game.coalitions() {
                csv_line(&mut out, &[m.binary_key(n), format!("\"{m}\""), game.value(m).to_string()]);
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            if let GameKind::DeltaScaled { delta } = game.kind() {
                let _ = writeln!(out, "payback game, delta = {delta}");
            }
            let _ = writeln!(out, "{:<16} {:>10}", "coalition", "value");
            for m in game.coalitions() {
                let _ = writeln!(out, "{:<16} {:>10.3}", m.to_string(), game.value(m));
            }
            out
        }
    }
}

fn verdict(report: &CoreReport) -> String {
    if report.in_core {
        "in core".into()
    } else if report.worst_deficit > report.tolerance {
        format!("not in core (coalition {} short by {:.3})", report.worst_coalition, report.worst_deficit)
    } else {
        format!("not in core (inefficient by {:.3})", report.efficiency_gap)
    }
}

fn allocation_rows(out: &mut String, allocation: &Allocation, report: &CoreReport) {
    let _ = writeln!(out, "rule {}", allocation.rule);
    header(out, allocation.payoffs.len());
    row(out, "payoff", &allocation.payoffs);
    let meta = &allocation.metadata;
    if let Some(phi) = meta.phi {
        let _ = writeln!(out, "phi {phi:.3}");
    }
    if let Some(delta) = meta.delta {
        let _ = writeln!(out, "delta {delta:.3}");
    }
    if let Some(t) = meta.threshold {
        let _ = writeln!(out, "threshold {t:.3}");
    }
    let _ = writeln!(out, "{}", verdict(report));
}

fn allocation_csv(out: &mut String, allocation: &Allocation, report: &CoreReport) {
    for (i, x) in allocation.payoffs.iter().enumerate() {
        csv_line(
            out,
            &[
                allocation.rule.to_string(),
                (i + 1).to_string(),
                x.to_string(),
                report.in_core.to_string(),
                format!("\"{}\"", report.worst_coalition),
                report.worst_deficit.to_string(),
            ],
        );
    }
}

const ALLOCATION_CSV_HEADER: &str = "rule,operator,payoff,in_core,worst_coalition,worst_deficit\n";

pub fn allocation(allocation: &Allocation, report: &CoreReport, format: Format) -> String {
    match format {
        Format::Json => to_json(&json!({ "allocation": allocation, "core": report })),
        Format::Csv => {
            let mut out = String::from(ALLOCATION_CSV_HEADER);
            allocation_csv(&mut out, allocation, report);
            out
        }
        Format::Table => {
            let mut out = String::new();
            allocation_rows(&mut out, allocation, report);
            out
        }
    }
}

pub fn core_checks(checks: &[(Allocation, CoreReport)], format: Format) -> String {
    match format {
        Format::Json => {
            let items: Vec<_> = checks.iter().map(|(a, r)| json!({ "allocation": a, "core": r })).collect();
            to_json(&items)
        }
        Format::Csv => {
            let mut out = String::from(ALLOCATION_CSV_HEADER);
            for (a, r) in checks {
                allocation_csv(&mut out, a, r);
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            for (k, (a, r)) in checks.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                allocation_rows(&mut out, a, r);
            }
            out
        }
    }
}

pub fn thresholds(feasible: Option<f64>, threshold: f64, check: Option<(f64, CoreReport)>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut value = json!({ "max_feasible_delta": feasible, "mse_threshold": threshold });
            if let Some((delta, report)) = check {
                value["delta"] = json!(delta);
                value["stable"] = json!(delta <= threshold);
                value["core"] = json!(report);
            }
            to_json(&value)
        }
        Format::Csv => {
            let mut out = String::from("max_feasible_delta,mse_threshold,delta,in_core\n");
            let feasible = feasible.map(|f| f.to_string()).unwrap_or_default();
            let (delta, in_core) = match &check {
                Some((d, r)) => (d.to_string(), r.in_core.to_string()),
                None => (String::new(), String::new()),
            };
            csv_line(&mut out, &[feasible, threshold.to_string(), delta, in_core]);
            out
        }
        Format::Table => {
            let mut out = String::new();
            match feasible {
                Some(f) => {
                    let _ = writeln!(out, "max feasible delta {f:.3}");
                }
                None => out.push_str("max feasible delta undefined\n"),
            }
            let _ = writeln!(out, "mse threshold {threshold:.3}");
            if let Some((delta, report)) = check {
                let _ = writeln!(out, "delta {delta:.3}: (1 - delta) MSE {}", verdict(&report));
            }
            out
        }
    }
}

pub fn experiments(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>3} {:>8} {:>8} {:>9} {:>8}", "rule", "n", "trials", "in_core", "undefined", "fraction");
    for report in reports {
        for o in &report.rules {
            let _ = writeln!(
                out,
                "{:<8} {:>3} {:>8} {:>8} {:>9} {:>8.3}",
                o.rule.to_string(),
                report.n_players,
                report.trials,
                o.in_core,
                o.undefined,
                o.fraction
            );
        }
    }
    if let Some(first) = reports.first() {
        let _ = writeln!(out, "seed {}", first.seed);
    }
    out
}

