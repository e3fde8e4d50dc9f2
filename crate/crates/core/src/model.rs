//! Transport-choice situations and the multinomial-logit market they induce.
//!
//! Operator `i` has deterministic utility `alpha_i - beta * p_i`; the no-buy option has
//! utility zero. Everything below is expressed through the coalition aggregate
//! `D^M(x) = sum_{i in M} exp(alpha_i - beta * x_i)`.

use serde::{Deserialize, Serialize};

use crate::coalition::CoalitionMask;
use crate::error::{Result, TcError};
use crate::numerics::{fixed_point, lambert_w0, SolverConfig};

/// Residual bound for a situation to count as priced at equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-8;

/// A market instance: prices `p`, costs `c`, utility constants `alpha` and the common
/// price sensitivity `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SituationRepr", into = "SituationRepr")]
pub struct TcSituation {
    p: Vec<f64>,
    c: Vec<f64>,
    alpha: Vec<f64>,
    beta: f64,
    equilibrium: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SituationRepr {
    p: Vec<f64>,
    c: Vec<f64>,
    alpha: Vec<f64>,
    beta: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    equilibrium: bool,
}

impl TryFrom<SituationRepr> for TcSituation {
    type Error = TcError;

    fn try_from(r: SituationRepr) -> Result<Self> {
        let theta = Self::new(r.p, r.c, r.alpha, r.beta)?;
        if r.equilibrium {
            theta.into_equilibrium(EQUILIBRIUM_TOLERANCE)
        } else {
            Ok(theta)
        }
    }
}

impl From<TcSituation> for SituationRepr {
    fn from(t: TcSituation) -> Self {
        Self { p: t.p, c: t.c, alpha: t.alpha, beta: t.beta, equilibrium: t.equilibrium }
    }
}

impl TcSituation {
    pub fn new(p: Vec<f64>, c: Vec<f64>, alpha: Vec<f64>, beta: f64) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(TcError::InvalidSituation("at least one operator is required".into()));
        }
        if c.len() != n || alpha.len() != n {
            return Err(TcError::InvalidSituation(format!(
                "vector lengths disagree: p={}, c={}, alpha={}",
                n,
                c.len(),
                alpha.len()
            )));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(TcError::InvalidSituation(format!("beta must be positive and finite, got {beta}")));
        }
        if p.iter().chain(&c).chain(&alpha).any(|v| !v.is_finite()) {
            return Err(TcError::InvalidSituation("prices, costs and alphas must be finite".into()));
        }
        Ok(Self { p, c, alpha, beta, equilibrium: false })
    }

    /// Builds the situation whose prices are the Nash equilibrium for `c`, `alpha`, `beta`.
    pub fn at_equilibrium(c: Vec<f64>, alpha: Vec<f64>, beta: f64, config: &SolverConfig) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(TcError::InvalidSituation(format!("beta must be positive and finite, got {beta}")));
        }
        let p = nash_prices(&c, &alpha, beta, config)?;
        let mut theta = Self::new(p, c, alpha, beta)?;
        theta.equilibrium = true;
        Ok(theta)
    }

    /// Flags the situation as an equilibrium after checking the pricing condition.
    pub fn into_equilibrium(mut self, tolerance: f64) -> Result<Self> {
        let residual = self.nash_residual();
        if !(residual <= tolerance) {
            return Err(TcError::InvalidSituation(format!(
                "prices are not a Nash equilibrium (residual {residual:e})"
            )));
        }
        self.equilibrium = true;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn prices(&self) -> &[f64] {
        &self.p
    }

    pub fn costs(&self) -> &[f64] {
        &self.c
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_equilibrium(&self) -> bool {
        self.equilibrium
    }

    pub fn grand(&self) -> CoalitionMask {
        CoalitionMask::grand(self.n())
    }

    /// `exp(alpha_i - beta * x_i)` for a single operator.
    pub fn attraction(&self, player: usize, x: f64) -> f64 {
        (self.alpha[player] - self.beta * x).exp()
    }

    /// `D^M(x)`; zero for the empty coalition. `x` is indexed by player.
    pub fn d_aggregate(&self, coalition: CoalitionMask, x: &[f64]) -> f64 {
        coalition.members().map(|i| self.attraction(i, x[i])).sum()
    }

    pub fn market_state(&self) -> MarketState {
        MarketState::at_prices(self, &self.p)
    }

    /// Largest deviation of `p` from the equilibrium pricing condition.
    pub fn nash_residual(&self) -> f64 {
        nash_residual(&self.c, &self.alpha, self.beta, &self.p)
    }

    /// Joint-profit maximizing prices with total market share held fixed.
    pub fn optimal_prices(&self) -> CollaborativeOptimum {
        let grand = self.grand();
        let dp = self.d_aggregate(grand, &self.p);
        let dc = self.d_aggregate(grand, &self.c);
        let markup = (dc / dp).ln() / self.beta;
        let prices: Vec<f64> = self.c.iter().map(|c| c + markup).collect();
        let joint_profit = dp / (self.beta * (dp + 1.0)) * (dc / dp).ln();
        let state = MarketState::at_prices(self, &prices);
        CollaborativeOptimum { prices, state, joint_profit }
    }

    /// Joint profit gained by collaborating over the status quo.
    pub fn collaboration_gain(&self) -> f64 {
        self.optimal_prices().joint_profit - self.market_state().profits.iter().sum::<f64>()
    }
}

/// Shares and profits at some price vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub shares: Vec<f64>,
    pub outside_share: f64,
    pub profits: Vec<f64>,
}

impl MarketState {
    pub fn at_prices(theta: &TcSituation, x: &[f64]) -> Self {
        let weights: Vec<f64> = (0..theta.n()).map(|i| theta.attraction(i, x[i])).collect();
        let denom = 1.0 + weights.iter().sum::<f64>();
        let shares: Vec<f64> = weights.iter().map(|w| w / denom).collect();
        let profits = shares.iter().enumerate().map(|(i, s)| (x[i] - theta.c[i]) * s).collect();
        Self { shares, outside_share: 1.0 / denom, profits }
    }

    pub fn total_share(&self) -> f64 {
        self.shares.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollaborativeOptimum {
    pub prices: Vec<f64>,
    pub state: MarketState,
    pub joint_profit: f64,
}

/// Right-hand side of the equilibrium pricing condition
/// `p_i = c_i + (1 + W(exp(alpha_i - 1 - beta c_i) / A_i)) / beta`,
/// with `A_i = 1 + sum_{j != i} exp(alpha_j - beta p_j)`.
pub fn best_response(c: &[f64], alpha: &[f64], beta: f64, p: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = p.iter().zip(alpha).map(|(p, a)| (a - beta * p).exp()).collect();
    let total: f64 = weights.iter().sum();
    (0..p.len())
        .map(|i| {
            let others = 1.0 + (total - weights[i]).max(0.0);
            let arg = (alpha[i] - 1.0 - beta * c[i] - others.ln()).exp();
            let w = lambert_w0(arg).unwrap_or(f64::NAN);
            c[i] + (1.0 + w) / beta
        })
        .collect()
}

pub fn nash_residual(c: &[f64], alpha: &[f64], beta: f64, p: &[f64]) -> f64 {
    best_response(c, alpha, beta, p)
        .iter()
        .zip(p)
        .map(|(r, p)| (r - p).abs())
        .fold(0.0, f64::max)
}

/// Bertrand-Nash equilibrium prices of the logit market, solved as a simultaneous
/// fixed point of the best responses starting from `c_i + 2 / beta`.
pub fn nash_prices(c: &[f64], alpha: &[f64], beta: f64, config: &SolverConfig) -> Result<Vec<f64>> {
    if c.len() != alpha.len() {
        return Err(TcError::DimensionMismatch { expected: c.len(), actual: alpha.len() });
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(TcError::InvalidSituation(format!("beta must be positive and finite, got {beta}")));
    }
    let start: Vec<f64> = c.iter().map(|c| c + 2.0 / beta).collect();
    let solved = fixed_point(|p| best_response(c, alpha, beta, p), &start, config)?;
    Ok(solved.point)
}
