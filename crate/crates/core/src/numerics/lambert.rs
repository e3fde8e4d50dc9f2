use std::f64::consts::E;

use crate::error::{Result, TcError};

const BRANCH_POINT: f64 = -1.0 / E;
const MAX_HALLEY_STEPS: usize = 64;

/// Principal branch of the Lambert W function: the `w >= -1` solving `w * e^w = x`.
///
/// Halley iteration from a branch-point series seed close to `-1/e`, `ln(1 + x)` for
/// moderate arguments and `ln x - ln ln x` for large ones.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(TcError::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = seed(x);
    if w <= -1.0 {
        return Ok(-1.0);
    }
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 <= 0.0 {
            return Ok(-1.0);
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 1e-15 * (1.0 + next.abs());
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

fn seed(x: f64) -> f64 {
    if x < -0.25 {
        // series in p = sqrt(2(ex + 1)) about the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= E {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambert_w0(BRANCH_POINT).unwrap() + 1.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_below_branch_point() {
        assert!(matches!(lambert_w0(-0.4), Err(TcError::LambertDomain(_))));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn residual_small_across_ranges() {
        for &x in &[-0.3678, -0.3, -0.1, 1e-300, 1e-8, 0.5, 2.5, 10.0, 1e3, 1e6, 1e100, 1e300] {
            let w = lambert_w0(x).unwrap();
            let r = (w * w.exp() - x).abs();
            assert!(r <= 1e-10 * x.abs().max(1.0), "x={x} w={w} r={r}");
        }
    }
}
