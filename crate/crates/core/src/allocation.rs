//! Profit-allocation rules for TC games and the core-membership test.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coalition::CoalitionMask;
use crate::error::{Result, TcError};
use crate::game::{Game, GameKind, MAX_PLAYERS};
use crate::model::TcSituation;

/// Absolute tolerance for efficiency and stability.
pub const DEFAULT_CORE_TOLERANCE: f64 = 1e-9;

const DEGENERATE_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "I-PROP")]
    IProp,
    #[serde(rename = "M-PROP")]
    MProp,
    #[serde(rename = "SHAPLEY")]
    Shapley,
    #[serde(rename = "MSE")]
    Mse,
    #[serde(rename = "MSE-DELTA")]
    MseDelta,
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl Rule {
    /// The four rules compared in the Monte Carlo study.
    pub const STUDIED: [Rule; 4] = [Rule::IProp, Rule::MProp, Rule::Shapley, Rule::Mse];

    pub fn label(self) -> &'static str {
        match self {
            Rule::IProp => "I-PROP",
            Rule::MProp => "M-PROP",
            Rule::Shapley => "SHAPLEY",
            Rule::Mse => "MSE",
            Rule::MseDelta => "MSE-DELTA",
            Rule::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "iprop" => Ok(Rule::IProp),
            "mprop" => Ok(Rule::MProp),
            "shapley" | "sv" => Ok(Rule::Shapley),
            "mse" => Ok(Rule::Mse),
            "msedelta" => Ok(Rule::MseDelta),
            "custom" => Ok(Rule::Custom),
            _ => Err(format!("unknown rule {s:?} (expected iprop, mprop, shapley, mse or mse-delta)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AllocationMetadata {
    /// Price per unit of exchanged market share (MSE rules).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Largest delta for which `(1 - delta) MSE` is guaranteed stable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub rule: Rule,
    pub payoffs: Vec<f64>,
    #[serde(default)]
    pub metadata: AllocationMetadata,
}

impl Allocation {
    pub fn custom(payoffs: Vec<f64>) -> Self {
        Self { rule: Rule::Custom, payoffs, metadata: AllocationMetadata::default() }
    }

    fn plain(rule: Rule, payoffs: Vec<f64>) -> Self {
        Self { rule, payoffs, metadata: AllocationMetadata::default() }
    }

    pub fn total(&self) -> f64 {
        self.payoffs.iter().sum()
    }

    pub fn coalition_total(&self, m: CoalitionMask) -> f64 {
        m.members().map(|i| self.payoffs[i]).sum()
    }
}

/// Splits `v(N)` in proportion to the stand-alone values `v({i})`.
pub fn iprop(game: &Game) -> Result<Allocation> {
    let singles: Vec<f64> = (0..game.n()).map(|i| game.singleton_value(i)).collect();
    let total: f64 = singles.iter().sum();
    if total.abs() < DEGENERATE_DENOMINATOR {
        return Err(TcError::DegenerateDenominator(total));
    }
    let grand = game.grand_value();
    Ok(Allocation::plain(Rule::IProp, singles.iter().map(|v| v / total * grand).collect()))
}

/// Splits `v(N)` in proportion to the status-quo market shares.
pub fn mprop(theta: &TcSituation, game: &Game) -> Result<Allocation> {
    check_sizes(theta, game)?;
    let shares = theta.market_state().shares;
    let total: f64 = shares.iter().sum();
    let grand = game.grand_value();
    Ok(Allocation::plain(Rule::MProp, shares.iter().map(|s| s / total * grand).collect()))
}

/// Shapley value by exact enumeration of all coalitions.
pub fn shapley(game: &Game) -> Result<Allocation> {
    let n = game.n();
    if n > MAX_PLAYERS {
        return Err(TcError::TooManyPlayers { players: n, max: MAX_PLAYERS });
    }
    // |M|! (n - 1 - |M|)! / n! = 1 / (n * C(n - 1, |M|))
    let mut weights = vec![0.0; n];
    let mut binom = 1.0;
    for (s, w) in weights.iter_mut().enumerate() {
        *w = 1.0 / (n as f64 * binom);
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }
    let mut payoffs = vec![0.0; n];
    for m in game.coalitions() {
        let w = m.len();
        for (i, payoff) in payoffs.iter_mut().enumerate() {
            if !m.contains(i) {
                *payoff += weights[w] * (game.value(m.with(i)) - game.value(m));
            }
        }
    }
    Ok(Allocation::plain(Rule::Shapley, payoffs))
}

/// Market-share exchange: each operator keeps its collaborative profit and trades
/// the market share it gains or loses at price `phi`.
pub fn mse(theta: &TcSituation, game: &Game) -> Result<Allocation> {
    check_plain_source(theta, game)?;
    let before = theta.market_state().shares;
    let optimum = theta.optimal_prices();
    let after = &optimum.state.shares;
    let phi = exchange_price(theta, game.grand_value())?;
    let payoffs = (0..theta.n())
        .map(|i| (optimum.prices[i] - theta.costs()[i]) * after[i] - phi * (after[i] - before[i]))
        .collect();
    Ok(Allocation {
        rule: Rule::Mse,
        payoffs,
        metadata: AllocationMetadata { phi: Some(phi), ..Default::default() },
    })
}

/// `phi = (v(N) - v_hat(N)) / (D^N(p) / (D^N(p) + 1))`, where `v_hat` is the game of the
/// benchmark situation with every margin equal to `1 / beta`.
fn exchange_price(theta: &TcSituation, grand_value: f64) -> Result<f64> {
    let inv_beta = 1.0 / theta.beta();
    let benchmark = TcSituation::new(
        theta.prices().to_vec(),
        theta.prices().iter().map(|p| p - inv_beta).collect(),
        theta.alphas().to_vec(),
        theta.beta(),
    )?;
    let dp = theta.d_aggregate(theta.grand(), theta.prices());
    Ok((grand_value - benchmark.optimal_prices().joint_profit) / (dp / (dp + 1.0)))
}

/// Closed form of the exchange price, `(ln(D^N(c) / D^N(p)) - 1) / beta`.
pub fn phi_closed_form(theta: &TcSituation) -> f64 {
    let grand = theta.grand();
    let ratio = theta.d_aggregate(grand, theta.costs()) / theta.d_aggregate(grand, theta.prices());
    (ratio.ln() - 1.0) / theta.beta()
}

/// `(1 - delta) MSE`, the candidate core allocation of the delta-scaled game.
pub fn mse_delta(theta: &TcSituation, game: &Game, delta: f64) -> Result<Allocation> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TcError::DeltaOutOfRange(delta));
    }
    let base = mse(theta, game)?;
    let threshold = threshold_from(game, &base).ok();
    Ok(Allocation {
        rule: Rule::MseDelta,
        payoffs: base.payoffs.iter().map(|x| (1.0 - delta) * x).collect(),
        metadata: AllocationMetadata { phi: base.metadata.phi, delta: Some(delta), threshold },
    })
}

/// `1 - max_i v({i}) / MSE_i`.
pub fn mse_delta_threshold(theta: &TcSituation, game: &Game) -> Result<f64> {
    threshold_from(game, &mse(theta, game)?)
}

fn threshold_from(game: &Game, mse: &Allocation) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for (player, &x) in mse.payoffs.iter().enumerate() {
        if x == 0.0 {
            return Err(TcError::ZeroMsePayoff { player });
        }
        worst = worst.max(game.singleton_value(player) / x);
    }
    Ok(1.0 - worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreReport {
    pub in_core: bool,
    /// `sum(x) - v(N)`.
    pub efficiency_gap: f64,
    /// Nonempty coalition with the largest `v(M) - sum_{i in M} x_i`.
    pub worst_coalition: CoalitionMask,
    pub worst_deficit: f64,
    pub tolerance: f64,
}

pub fn core_check(game: &Game, allocation: &Allocation, tolerance: f64) -> Result<CoreReport> {
    check_dimension(game, allocation)?;
    let efficiency_gap = allocation.total() - game.grand_value();
    let (worst_coalition, worst_deficit) = game
        .coalitions()
        .skip(1)
        .map(|m| (m, game.value(m) - allocation.coalition_total(m)))
        .fold((game.grand(), f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(CoreReport {
        in_core: efficiency_gap.abs() <= tolerance && worst_deficit <= tolerance,
        efficiency_gap,
        worst_coalition,
        worst_deficit,
        tolerance,
    })
}

/// Every coalition whose deficit exceeds `tolerance`, in mask order.
pub fn core_violations(game: &Game, allocation: &Allocation, tolerance: f64) -> Result<Vec<(CoalitionMask, f64)>> {
    check_dimension(game, allocation)?;
    Ok(game
        .coalitions()
        .skip(1)
        .map(|m| (m, game.value(m) - allocation.coalition_total(m)))
        .filter(|(_, deficit)| *deficit > tolerance)
        .collect())
}

fn check_dimension(game: &Game, allocation: &Allocation) -> Result<()> {
    if allocation.payoffs.len() != game.n() {
        return Err(TcError::DimensionMismatch { expected: game.n(), actual: allocation.payoffs.len() });
    }
    Ok(())
}

fn check_sizes(theta: &TcSituation, game: &Game) -> Result<()> {
    if theta.n() != game.n() {
        return Err(TcError::DimensionMismatch { expected: game.n(), actual: theta.n() });
    }
    Ok(())
}

fn check_plain_source(theta: &TcSituation, game: &Game) -> Result<()> {
    check_sizes(theta, game)?;
    if game.kind() != GameKind::Plain {
        return Err(TcError::AlreadyScaled);
    }
    match game.source() {
        Some(source) if source == theta => Ok(()),
        Some(_) => Err(TcError::InvalidArgument("game was built from a different situation".into())),
        None => Err(TcError::MissingSource("MSE")),
    }
}
