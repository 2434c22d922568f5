//! One-term Edgeworth expansion for studentized network moments, its
//! Cornish-Fisher inversion, and the shape-dependent error rate.
//!
//! ```text
//! G(x) = Φ(x) + φ(x) / (√n ξ₁³) · { (2x²+1)/6 · E[g₁³] + (r−1)/2 · (x²+1) · E[g₁g₁g₂] }
//! q_α  = z_α − 1 / (√n ξ₁³) · { (2z_α²+1)/6 · E[g₁³] + (r−1)/2 · (z_α²+1) · E[g₁g₁g₂] }
//! ```
//!
//! `G` is not clamped: it can leave [0, 1] and need not be monotone.

use crate::error::{Error, Result};
use crate::graphon::PopulationCoefficients;
use crate::moments::MomentStats;
use crate::motif::{Motif, ShapeClass};
use crate::normal;
use serde::Serialize;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Population,
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeworthCoefficients {
    pub xi1: f64,
    pub e_g1_cubed: f64,
    pub e_g1g1g2: f64,
    pub r: usize,
    pub n: usize,
    pub provenance: Provenance,
}

impl EdgeworthCoefficients {
    pub fn new(
        xi1: f64,
        e_g1_cubed: f64,
        e_g1g1g2: f64,
        r: usize,
        n: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        if !(xi1 > 0.0) {
            return Err(Error::Degenerate(format!("xi1 = {xi1} must be positive")));
        }
        if r < 2 || n < r {
            return Err(Error::Parameter(format!(
                "need n >= r >= 2, got n={n}, r={r}"
            )));
        }
        Ok(Self {
            xi1,
            e_g1_cubed,
            e_g1g1g2,
            r,
            n,
            provenance,
        })
    }

    /// Plug-in coefficients from a sample.
    pub fn empirical(stats: &MomentStats) -> Result<Self> {
        Self::new(
            stats.xi1_hat_sq.sqrt(),
            stats.e_g1_cubed,
            stats.e_g1g1g2,
            stats.r,
            stats.n,
            Provenance::Empirical,
        )
    }

    pub fn population(c: &PopulationCoefficients, r: usize, n: usize) -> Result<Self> {
        Self::new(
            c.xi1,
            c.e_g1_cubed,
            c.e_g1g1g2,
            r,
            n,
            Provenance::Population,
        )
    }

    /// The bracketed polynomial divided by `√n ξ₁³`.
    pub fn correction_poly(&self, x: f64) -> f64 {
        let x2 = x * x;
        let bracket = (2.0 * x2 + 1.0) / 6.0 * self.e_g1_cubed
            + (self.r as f64 - 1.0) / 2.0 * (x2 + 1.0) * self.e_g1g1g2;
        bracket / ((self.n as f64).sqrt() * self.xi1.powi(3))
    }
}

/// `G(x)`, unclamped.
pub fn expansion_cdf(c: &EdgeworthCoefficients, x: f64) -> f64 {
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    normal::cdf(x) + normal::pdf(x) * c.correction_poly(x)
}

/// `G(x)` clamped to [0, 1], for display only.
pub fn expansion_cdf_clamped(c: &EdgeworthCoefficients, x: f64) -> f64 {
    expansion_cdf(c, x).clamp(0.0, 1.0)
}

/// The Cornish-Fisher approximation to the `alpha` quantile.
pub fn cornish_fisher_quantile(c: &EdgeworthCoefficients, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    let z = normal::quantile(alpha);
    Ok(z - c.correction_poly(z))
}

/// Error-rate shorthand with natural logarithms:
/// acyclic `(ρn)⁻¹ log^{1/2} n + n⁻¹ log^{3/2} n`,
/// cyclic `ρ^{−r/2} n⁻¹ log^{1/2} n + n⁻¹ log^{3/2} n`.
pub fn rate_bound(rho: f64, n: usize, motif: &Motif) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Parameter(format!("rho = {rho} outside (0, 1]")));
    }
    if n < 3 {
        return Err(Error::Parameter(format!("n = {n} must be at least 3")));
    }
    let nf = n as f64;
    let l = nf.ln();
    let lead = match motif.shape() {
        ShapeClass::Acyclic => 1.0 / (rho * nf),
        ShapeClass::Cyclic => rho.powf(-(motif.r() as f64) / 2.0) / nf,
    };
    Ok(lead * l.sqrt() + l.powf(1.5) / nf)
}

/// Returns a warning unless the expansion's smoothness requirement is met by
/// sparsity (`rho ≤ 1/ln n`) or the caller asserts `g₁` is non-lattice.
pub fn applicability_warning(rho: f64, n: usize, assume_nonlattice: bool) -> Option<String> {
    if assume_nonlattice || rho <= 1.0 / (n as f64).ln() {
        None
    } else {
        Some(format!(
            "rho = {rho} exceeds 1/ln(n) = {:.4} and g1 is not asserted non-lattice; \
             the expansion relies on edge noise or a non-lattice g1 for smoothness",
            1.0 / (n as f64).ln()
        ))
    }
}

/// `{−2.0, −1.9, …, 2.0}`, built as `k/10` so each point is the nearest double.
pub fn default_grid() -> Vec<f64> {
    (-20..=20).map(|k| f64::from(k) / 10.0).collect()
}

/// Writes `x,value` rows with a header.
pub fn write_grid_csv<W: Write>(mut w: W, xs: &[f64], values: &[f64]) -> Result<()> {
    writeln!(w, "x,value")?;
    for (x, v) in xs.iter().zip(values) {
        writeln!(w, "{x},{v}")?;
    }
    Ok(())
}
