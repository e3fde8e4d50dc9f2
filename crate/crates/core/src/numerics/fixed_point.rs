use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};

/// Stopping rule and step control for iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    tolerance: f64,
    max_iterations: usize,
    damping: f64,
}

impl SolverConfig {
    pub fn new(tolerance: f64, max_iterations: usize, damping: f64) -> Result<Self> {
        if !(tolerance > 0.0) || !tolerance.is_finite() {
            return Err(TcError::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_iterations == 0 {
            return Err(TcError::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(damping > 0.0 && damping <= 1.0) {
            return Err(TcError::InvalidArgument(format!("damping must lie in (0, 1], got {damping}")));
        }
        Ok(Self { tolerance, max_iterations, damping })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: 10_000, damping: 1.0 }
    }
}

/// Converged output of [`fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub point: Vec<f64>,
    /// Number of map evaluations.
    pub iterations: usize,
    /// `max_i |map(x)_i - x_i|` at the returned point.
    pub residual: f64,
}

/// Damped fixed-point iteration `x <- (1 - d) x + d map(x)`.
///
/// The damping factor starts at `config.damping()` and is halved whenever the
/// residual grows between steps.
pub fn fixed_point<F>(map: F, start: &[f64], config: &SolverConfig) -> Result<FixedPoint>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = start.to_vec();
    let mut damping = config.damping;
    let mut previous = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for iteration in 1..=config.max_iterations {
        let image = map(&x);
        if image.len() != x.len() {
            return Err(TcError::DimensionMismatch { expected: x.len(), actual: image.len() });
        }
        residual = image.iter().zip(&x).map(|(fx, x)| (fx - x).abs()).fold(0.0, f64::max);
        if !residual.is_finite() {
            return Err(TcError::NoConvergence { iterations: iteration, residual });
        }
        if residual <= config.tolerance {
            return Ok(FixedPoint { point: x, iterations: iteration, residual });
        }
        if residual > previous {
            damping = (damping * 0.5).max(1e-6);
        }
        previous = residual;
        for (xi, fi) in x.iter_mut().zip(&image) {
            *xi = (1.0 - damping) * *xi + damping * fi;
        }
    }
    Err(TcError::NoConvergence { iterations: config.max_iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identity_returns_start_immediately() {
        let start = [1.5, -2.0, 7.25];
        let fp = fixed_point(|x| x.to_vec(), &start, &SolverConfig::default()).unwrap();
        assert_eq!(fp.point, start);
        assert_eq!(fp.iterations, 1);
    }

    #[test]
    fn dottie_number() {
        let oracle = bisect(|x| x.cos() - x, 0.0, 1.0);
        let fp = fixed_point(|x| vec![x[0].cos()], &[1.0], &SolverConfig::default()).unwrap();
        assert!((fp.point[0].cos() - fp.point[0]).abs() < 1e-10);
        assert!((fp.point[0] - oracle).abs() < 1e-10);
        assert!((fp.point[0] - 0.739085).abs() < 1e-6);
    }

    #[test]
    fn damping_rescues_an_oscillating_map() {
        // x -> -1.5 x + 5 diverges undamped; fixed point is 2
        let fp = fixed_point(|x| vec![-1.5 * x[0] + 5.0], &[0.0], &SolverConfig::default()).unwrap();
        assert!((fp.point[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = SolverConfig::new(1e-12, 5, 1.0).unwrap();
        let err = fixed_point(|x| vec![x[0] + 1.0], &[0.0], &cfg).unwrap_err();
        assert!(matches!(err, TcError::NoConvergence { iterations: 5, residual } if residual == 1.0));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 10, 1.0).is_err());
        assert!(SolverConfig::new(1e-9, 0, 1.0).is_err());
        assert!(SolverConfig::new(1e-9, 10, 0.0).is_err());
        assert!(SolverConfig::new(1e-9, 10, 1.5).is_err());
        assert!(SolverConfig::new(1e-9, 10, 0.5).is_ok());
    }
}
