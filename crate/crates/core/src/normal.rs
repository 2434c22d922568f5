//! Standard normal CDF, density and quantile.
//!
//! The CDF goes through `erfc` (musl's, via `libm`), which keeps full
//! relative precision in the lower tail. The quantile starts from the
//! `statrs` inverse and takes one Newton step against that CDF.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Φ(x)
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// φ(x)
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ⁻¹(p) for p in (0, 1).
pub fn quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let d = pdf(x);
    if d > 0.0 {
        x - (cdf(x) - p) / d
    } else {
        x
    }
}
