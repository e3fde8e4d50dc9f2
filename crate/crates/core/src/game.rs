//! The cooperative game induced by a transport-choice situation.
//!
//! `v(M)` is the best joint profit coalition `M` reaches when it keeps its members'
//! total market share and outsiders keep their prices. It has the closed form
//! `D^M(p) / (beta (D^N(p) + 1)) * ln(D^M(c) / D^M(p))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coalition::CoalitionMask;
use crate::error::{Result, TcError};
use crate::model::TcSituation;
use crate::numerics::{oracle_optimize, OracleOptimum};

pub const MAX_PLAYERS: usize = 24;

/// Additive slack used by the structural property checks.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GameKind {
    Plain,
    /// Every coalition of two or more players pays a fraction `delta` of its worth to society.
    DeltaScaled { delta: f64 },
}

/// A TU game stored densely: `values[m]` is the worth of the coalition with bits `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct Game {
    n: usize,
    values: Vec<f64>,
    kind: GameKind,
    source: Option<TcSituation>,
}

impl Game {
    /// Wraps an arbitrary characteristic function given in mask order.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(TcError::TooManyPlayers { players: n, max: MAX_PLAYERS });
        }
        if values.len() != 1 << n {
            return Err(TcError::DimensionMismatch { expected: 1 << n, actual: values.len() });
        }
        if values[0] != 0.0 {
            return Err(TcError::MalformedGame(format!("v(empty) must be 0, got {}", values[0])));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TcError::MalformedGame("coalition values must be finite".into()));
        }
        Ok(Self { n, values, kind: GameKind::Plain, source: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn delta(&self) -> Option<f64> {
        match self.kind {
            GameKind::Plain => None,
            GameKind::DeltaScaled { delta } => Some(delta),
        }
    }

    /// The situation this game was built from, if any.
    pub fn source(&self) -> Option<&TcSituation> {
        self.source.as_ref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, m: CoalitionMask) -> f64 {
        self.values[m.index()]
    }

    pub fn grand(&self) -> CoalitionMask {
        CoalitionMask::grand(self.n)
    }

    pub fn grand_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn singleton_value(&self, player: usize) -> f64 {
        self.values[1 << player]
    }

    pub fn coalitions(&self) -> impl Iterator<Item = CoalitionMask> {
        CoalitionMask::all(self.n)
    }
}

/// Worth of a nonempty coalition from the closed form.
pub fn coalition_value(theta: &TcSituation, m: CoalitionMask) -> Result<f64> {
    if m.is_empty() {
        return Err(TcError::EmptyCoalition(m));
    }
    if !m.is_subset_of(theta.grand()) {
        return Err(TcError::InvalidArgument(format!("coalition {m} has players outside 1..={}", theta.n())));
    }
    let dn = theta.d_aggregate(theta.grand(), theta.prices());
    let dp = theta.d_aggregate(m, theta.prices());
    let dc = theta.d_aggregate(m, theta.costs());
    Ok(dp / (theta.beta() * (dn + 1.0)) * (dc / dp).ln())
}

pub fn build_game(theta: &TcSituation) -> Result<Game> {
    let n = theta.n();
    if n > MAX_PLAYERS {
        return Err(TcError::TooManyPlayers { players: n, max: MAX_PLAYERS });
    }
    let size = 1usize << n;
    let wp: Vec<f64> = (0..n).map(|i| theta.attraction(i, theta.prices()[i])).collect();
    let wc: Vec<f64> = (0..n).map(|i| theta.attraction(i, theta.costs()[i])).collect();

    // D^M by peeling the lowest member off M
    let mut dp = vec![0.0; size];
    let mut dc = vec![0.0; size];
    for m in 1..size {
        let low = m.trailing_zeros() as usize;
        dp[m] = dp[m & (m - 1)] + wp[low];
        dc[m] = dc[m & (m - 1)] + wc[low];
    }
    let scale = theta.beta() * (dp[size - 1] + 1.0);
    let values = (0..size)
        .map(|m| if m == 0 { 0.0 } else { dp[m] / scale * (dc[m] / dp[m]).ln() })
        .collect();
    Ok(Game { n, values, kind: GameKind::Plain, source: Some(theta.clone()) })
}

/// The game in which every coalition of size two or more keeps `1 - delta` of its worth.
pub fn build_delta_game(game: &Game, delta: f64) -> Result<Game> {
    if game.kind != GameKind::Plain {
        return Err(TcError::AlreadyScaled);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TcError::DeltaOutOfRange(delta));
    }
    let values = game
        .values
        .iter()
        .enumerate()
        .map(|(m, v)| if m.count_ones() >= 2 { (1.0 - delta) * v } else { *v })
        .collect();
    Ok(Game { n: game.n, values, kind: GameKind::DeltaScaled { delta }, source: game.source.clone() })
}

/// Largest payback fraction that keeps `v^delta(N) >= sum_i v({i})`.
pub fn max_feasible_delta(game: &Game) -> Result<f64> {
    if game.kind != GameKind::Plain {
        return Err(TcError::AlreadyScaled);
    }
    let grand = game.grand_value();
    if !(grand > 0.0) {
        return Err(TcError::UndefinedThreshold(grand));
    }
    let individual: f64 = (0..game.n).map(|i| game.singleton_value(i)).sum();
    Ok(1.0 - individual / grand)
}

/// Brute-force value of coalition `m`: maximizes the coalition's literal profit
/// objective over prices that keep its total share, without using the closed form.
pub fn oracle_coalition_value(theta: &TcSituation, m: CoalitionMask, resolution: usize) -> Result<OracleOptimum> {
    if m.is_empty() {
        return Err(TcError::EmptyCoalition(m));
    }
    let members: Vec<usize> = m.members().collect();
    let outsiders = theta.d_aggregate(theta.grand().without_all(m), theta.prices());
    let budget = theta.d_aggregate(m, theta.prices());
    let alphas: Vec<f64> = members.iter().map(|&i| theta.alphas()[i]).collect();
    let objective = |x: &[f64]| {
        let weights: Vec<f64> = members.iter().zip(x).map(|(&i, &xi)| theta.attraction(i, xi)).collect();
        let denom = 1.0 + weights.iter().sum::<f64>() + outsiders;
        members
            .iter()
            .zip(x)
            .zip(&weights)
            .map(|((&i, &xi), w)| (xi - theta.costs()[i]) * w / denom)
            .sum()
    };
    oracle_optimize(objective, budget, &alphas, theta.beta(), resolution)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// `v(smaller) > v(larger)` although `smaller` is a subset of `larger`.
    Monotonicity { smaller: CoalitionMask, larger: CoalitionMask },
    /// `v(left) + v(right) > v(left ∪ right)` for disjoint coalitions.
    Superadditivity { left: CoalitionMask, right: CoalitionMask },
    /// Player's marginal contribution to `smaller` exceeds that to `larger`.
    Convexity { player: usize, smaller: CoalitionMask, larger: CoalitionMask },
}

/// Outcome of [`check_properties`]; each field holds the first violation found, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport {
    pub monotonic: Option<Violation>,
    pub superadditive: Option<Violation>,
    pub convex: Option<Violation>,
}

impl PropertyReport {
    pub fn is_monotonic(&self) -> bool {
        self.monotonic.is_none()
    }

    pub fn is_superadditive(&self) -> bool {
        self.superadditive.is_none()
    }

    pub fn is_convex(&self) -> bool {
        self.convex.is_none()
    }
}

pub fn check_properties(game: &Game) -> PropertyReport {
    PropertyReport {
        monotonic: monotonicity_violation(game),
        superadditive: superadditivity_violation(game),
        convex: convexity_violation(game),
    }
}

fn monotonicity_violation(game: &Game) -> Option<Violation> {
    let grand = game.grand();
    // nonempty subsets first so the witness is informative; v(empty) = 0 is checked last
    for small in game.coalitions().skip(1) {
        let free = grand.without_all(small);
        for extra in subsets(free).skip(1) {
            let large = small.union(extra);
            if game.value(small) > game.value(large) + PROPERTY_TOLERANCE {
                return Some(Violation::Monotonicity { smaller: small, larger: large });
            }
        }
    }
    game.coalitions()
        .find(|&m| game.value(m) < -PROPERTY_TOLERANCE)
        .map(|m| Violation::Monotonicity { smaller: CoalitionMask::EMPTY, larger: m })
}

pub fn superadditivity_violation(game: &Game) -> Option<Violation> {
    let grand = game.grand();
    for left in game.coalitions().skip(1) {
        for right in subsets(grand.without_all(left)).skip(1) {
            if right < left {
                continue;
            }
            if game.value(left) + game.value(right) > game.value(left.union(right)) + PROPERTY_TOLERANCE {
                return Some(Violation::Superadditivity { left, right });
            }
        }
    }
    None
}

fn convexity_violation(game: &Game) -> Option<Violation> {
    let grand = game.grand();
    for player in 0..game.n {
        let others = grand.without(player);
        for small in subsets(others) {
            let gain_small = game.value(small.with(player)) - game.value(small);
            for extra in subsets(others.without_all(small)).skip(1) {
                let large = small.union(extra);
                let gain_large = game.value(large.with(player)) - game.value(large);
                if gain_small > gain_large + PROPERTY_TOLERANCE {
                    return Some(Violation::Convexity { player, smaller: small, larger: large });
                }
            }
        }
    }
    None
}

/// Subsets of `m` in increasing bit order, starting with the empty set.
fn subsets(m: CoalitionMask) -> impl Iterator<Item = CoalitionMask> {
    let full = m.bits();
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
        Some(CoalitionMask::from_bits(cur))
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameRepr {
    n: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    situation: Option<TcSituation>,
}

impl From<Game> for GameRepr {
    fn from(g: Game) -> Self {
        let (kind, delta) = match g.kind {
            GameKind::Plain => ("plain", None),
            GameKind::DeltaScaled { delta } => ("delta", Some(delta)),
        };
        let values = g.coalitions().map(|m| (m.binary_key(g.n), g.value(m))).collect();
        Self { n: g.n, kind: kind.into(), delta, values, situation: g.source }
    }
}

impl TryFrom<GameRepr> for Game {
    type Error = TcError;

    fn try_from(r: GameRepr) -> Result<Self> {
        if r.n == 0 || r.n > MAX_PLAYERS {
            return Err(TcError::TooManyPlayers { players: r.n, max: MAX_PLAYERS });
        }
        let size = 1usize << r.n;
        let mut values = vec![f64::NAN; size];
        for (key, v) in &r.values {
            let m = CoalitionMask::parse_binary_key(key)
                .filter(|m| m.index() < size)
                .ok_or_else(|| TcError::MalformedGame(format!("bad coalition key {key:?}")))?;
            values[m.index()] = *v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(TcError::MalformedGame(format!("expected {size} coalition values")));
        }
        let mut game = Game::from_values(r.n, values)?;
        game.kind = match (r.kind.as_str(), r.delta) {
            ("plain", None) => GameKind::Plain,
            ("delta", Some(d)) if d > 0.0 && d < 1.0 => GameKind::DeltaScaled { delta: d },
            ("delta", Some(d)) => return Err(TcError::DeltaOutOfRange(d)),
            (kind, _) => return Err(TcError::MalformedGame(format!("bad kind {kind:?} / delta combination"))),
        };
        if let Some(theta) = &r.situation {
            if theta.n() != r.n {
                return Err(TcError::MalformedGame("situation size does not match n".into()));
            }
        }
        game.source = r.situation;
        Ok(game)
    }
}
