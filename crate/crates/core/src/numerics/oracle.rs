//! Brute-force maximizer for profit objectives under a fixed logit share budget.
//!
//! Feasible prices are parametrized by positive weights `w` with `sum(w) = budget`,
//! `x_i = (alpha_i - ln w_i) / beta`, so `sum(exp(alpha_i - beta x_i)) = budget` holds
//! exactly at every grid point. The weight simplex is scanned on a regular grid in
//! log-ratio coordinates and the box around the incumbent is shrunk tenfold between
//! rounds.

use crate::error::{Result, TcError};

pub const DEFAULT_ORACLE_RESOLUTION: usize = 200;
const ROUNDS: usize = 3;
const SHRINK: f64 = 10.0;
/// Half-width of the first grid in log-ratio coordinates.
const LOG_RATIO_SPAN: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptimum {
    pub point: Vec<f64>,
    pub value: f64,
}

pub fn oracle_optimize<F>(
    objective: F,
    share_budget: f64,
    alphas: &[f64],
    beta: f64,
    resolution: usize,
) -> Result<OracleOptimum>
where
    F: Fn(&[f64]) -> f64,
{
    if !(share_budget > 0.0) || !share_budget.is_finite() {
        return Err(TcError::InvalidArgument(format!("share budget must be positive, got {share_budget}")));
    }
    if !(beta > 0.0) {
        return Err(TcError::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    if alphas.is_empty() {
        return Err(TcError::DimensionMismatch { expected: 1, actual: 0 });
    }
    if resolution < 100 {
        return Err(TcError::InvalidArgument(format!("resolution must be at least 100, got {resolution}")));
    }

    let k = alphas.len();
    let to_prices = |fractions: &[f64]| -> Vec<f64> {
        fractions
            .iter()
            .zip(alphas)
            .map(|(t, a)| (a - (t * share_budget).ln()) / beta)
            .collect()
    };

    if k == 1 {
        let point = to_prices(&[1.0]);
        let value = objective(&point);
        return Ok(OracleOptimum { point, value });
    }

    // grid over log-ratios s_d = ln(w_d / w_k) of the first k - 1 weights, so shares
    // spanning many orders of magnitude are all resolved
    let mut lo = vec![-LOG_RATIO_SPAN; k - 1];
    let mut hi = vec![LOG_RATIO_SPAN; k - 1];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut coords = vec![0.0; k - 1];
    let mut fractions = vec![0.0; k];

    for _ in 0..ROUNDS {
        let steps: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) / resolution as f64).collect();
        let mut index = vec![0usize; k - 1];
        loop {
            for d in 0..k - 1 {
                coords[d] = lo[d] + index[d] as f64 * steps[d];
            }
            softmax_with_anchor(&coords, &mut fractions);
            let value = objective(&to_prices(&fractions));
            if value.is_finite() && best.as_ref().map_or(true, |(_, b)| value > *b) {
                best = Some((coords.clone(), value));
            }
            if !advance(&mut index, resolution) {
                break;
            }
        }

        let Some((incumbent, _)) = best.as_ref() else { break };
        for d in 0..k - 1 {
            let half = (hi[d] - lo[d]) / SHRINK / 2.0;
            lo[d] = incumbent[d] - half;
            hi[d] = incumbent[d] + half;
        }
    }

    let (coords, value) = best.ok_or_else(|| TcError::InvalidArgument("objective is not finite on the grid".into()))?;
    softmax_with_anchor(&coords, &mut fractions);
    Ok(OracleOptimum { point: to_prices(&fractions), value })
}

// fractions proportional to (e^{s_1}, ..., e^{s_{k-1}}, 1)
fn softmax_with_anchor(coords: &[f64], fractions: &mut [f64]) {
    let top = coords.iter().copied().fold(0.0, f64::max);
    let mut total = (-top).exp();
    for (f, s) in fractions.iter_mut().zip(coords) {
        *f = (s - top).exp();
        total += *f;
    }
    let k = fractions.len();
    fractions[k - 1] = (-top).exp();
    for f in fractions.iter_mut() {
        *f /= total;
    }
}

// odometer over {0..=resolution}^d; false once every index wrapped
fn advance(index: &mut [usize], resolution: usize) -> bool {
    for i in index.iter_mut() {
        if *i < resolution {
            *i += 1;
            return true;
        }
        *i = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_weight_is_pinned() {
        let alphas = [1.0];
        let beta = 0.5;
        let p = 3.0_f64;
        let budget = (alphas[0] - beta * p).exp();
        let opt = oracle_optimize(|x| x[0], budget, &alphas, beta, 100).unwrap();
        assert!((opt.point[0] - p).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = |_: &[f64]| 0.0;
        assert!(oracle_optimize(f, 0.0, &[1.0, 1.0], 1.0, 100).is_err());
        assert!(oracle_optimize(f, 1.0, &[], 1.0, 100).is_err());
        assert!(oracle_optimize(f, 1.0, &[1.0, 1.0], 1.0, 10).is_err());
    }

    #[test]
    fn every_grid_point_is_feasible() {
        let alphas = [0.3, 1.2, -0.4];
        let beta = 0.7;
        let budget = 1.9;
        let check = |x: &[f64]| {
            let d: f64 = x.iter().zip(&alphas).map(|(x, a)| (a - beta * x).exp()).sum();
            assert!((d - budget).abs() < 1e-12 * budget);
            -x.iter().map(|v| v * v).sum::<f64>()
        };
        oracle_optimize(check, budget, &alphas, beta, 100).unwrap();
    }
}
