//! Entropy bounds on the median size of a primitive subset of `[1, n]`.
//!
//! The fractions are asymptotic: lower-order terms are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance of [`entropy_inverse`].
pub const INVERSE_TOLERANCE: f64 = 1e-9;

/// `H(l) = -l log2 l + (l - 1) log2 (1 - l)` on `(0, 1/2]`.
pub fn binary_entropy(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(Error::invalid(format!("binary entropy needs 0 < lambda <= 1/2, got {lambda}")));
    }
    Ok(entropy(lambda))
}

fn entropy(l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    -l * l.log2() + (l - 1.0) * (1.0 - l).log2()
}

/// The `l` in `(0, 1/2]` with `H(l) = y`, by bisection.
pub fn entropy_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::invalid(format!("entropy inverse needs 0 < y <= 1, got {y}")));
    }
    Ok(bisect(y))
}

fn bisect(y: f64) -> f64 {
    // H is flat at its maximum, so f64 bisection would stop short of 1/2
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > INVERSE_TOLERANCE / 4.0 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Asymptotic bounds `lower_frac * n < median < upper_frac * n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianBounds {
    pub lower_frac: f64,
    pub upper_frac: f64,
}

/// Median-size bounds from an interval for `alpha` and a lower bound for `eta`.
///
/// The upper fraction uses `H^-1(2 (ln alpha_hi - ln eta_lo) / ln 2)`; a
/// nonpositive argument can only come from `eta_lo >= alpha_hi` and yields
/// the trivial fraction `1/2`.
pub fn median_bounds(alpha_lo: f64, alpha_hi: f64, eta_lo: f64) -> Result<MedianBounds> {
    if !(1.0 < alpha_lo && alpha_lo <= alpha_hi && alpha_hi < 2.0) {
        return Err(Error::invalid(format!(
            "median bounds need 1 < alpha_lo <= alpha_hi < 2, got {alpha_lo}, {alpha_hi}"
        )));
    }
    if !(eta_lo > 1.0) {
        return Err(Error::invalid(format!("median bounds need eta_lo > 1, got {eta_lo}")));
    }
    let lower_frac = entropy_inverse(alpha_lo.ln() / 2f64.ln())?;
    let y = 2.0 * (alpha_hi.ln() - eta_lo.ln()) / 2f64.ln();
    if y > 1.0 {
        return Err(Error::invalid(format!(
            "inconsistent inputs: entropy argument {y} exceeds 1"
        )));
    }
    let inner = if y <= 0.0 { 0.0 } else { bisect(y) };
    Ok(MedianBounds {
        lower_frac,
        upper_frac: 0.5 * (1.0 - inner),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(binary_entropy(1e-6).unwrap() < 1e-4);
        assert!(binary_entropy(0.0).is_err());
        assert!(binary_entropy(0.6).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!((entropy_inverse(1.0).unwrap() - 0.5).abs() < 1e-9);
        let y = binary_entropy(0.25).unwrap();
        assert!((entropy_inverse(y).unwrap() - 0.25).abs() < 1e-9);
        let l = entropy_inverse(1.572939f64.ln() / 2f64.ln()).unwrap();
        assert!((l - 0.168153).abs() < 1e-6);
        assert!(entropy_inverse(0.0).is_err());
        assert!(entropy_inverse(1.5).is_err());
    }

    #[test]
    fn median_examples() {
        let m = median_bounds(1.572939, 1.574445, 1.2125).unwrap();
        assert!((m.lower_frac - 0.168153).abs() < 1e-6);
        assert!((m.upper_frac - 0.391752).abs() < 1e-6);

        let r2 = 2f64.sqrt();
        let m = median_bounds(r2, r2, r2 * (1.0 + 1e-9)).unwrap();
        assert!((m.lower_frac - entropy_inverse(0.5).unwrap()).abs() < 1e-12);
        assert_eq!(m.upper_frac, 0.5);

        let m = median_bounds(1.5, 1.5, 1.5).unwrap();
        assert_eq!(m.upper_frac, 0.5);
        assert!(median_bounds(0.9, 1.5, 1.2).is_err());
    }
}
