//! One-sample tests and confidence intervals for a network moment.

use crate::edgeworth::{cornish_fisher_quantile, expansion_cdf, EdgeworthCoefficients};
use crate::error::{Error, Result};
use crate::moments::MomentStats;
use crate::normal;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Alternative {
    TwoSided,
    /// `H_a: μ < c`
    Less,
    /// `H_a: μ > c`
    Greater,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub t_obs: f64,
    /// In [0, 1].
    pub p_value: f64,
    /// Before clamping; the expansion is not a proper CDF.
    pub p_value_raw: f64,
    pub c_n: f64,
    pub u_hat: f64,
    pub s_hat: f64,
    pub alternative: Alternative,
}

fn check_scale(stats: &MomentStats) -> Result<f64> {
    let s = stats.s_hat();
    if stats.degenerate || !(s > 0.0) {
        return Err(Error::Degenerate("S_hat is zero; cannot studentize".into()));
    }
    Ok(s)
}

/// Two-sided test of `H_0: μ = c_n` with p-value `2 min{Ĝ(t), 1 − Ĝ(t)}`.
pub fn one_sample_test(stats: &MomentStats, c_n: f64) -> Result<TestResult> {
    one_sample_test_with(stats, c_n, Alternative::TwoSided)
}

pub fn one_sample_test_with(
    stats: &MomentStats,
    c_n: f64,
    alternative: Alternative,
) -> Result<TestResult> {
    let s_hat = check_scale(stats)?;
    let coeffs = EdgeworthCoefficients::empirical(stats)?;
    let t_obs = (stats.u_hat - c_n) / s_hat;
    let g = expansion_cdf(&coeffs, t_obs);
    let raw = match alternative {
        Alternative::TwoSided => 2.0 * g.min(1.0 - g),
        Alternative::Less => g,
        Alternative::Greater => 1.0 - g,
    };
    Ok(TestResult {
        t_obs,
        p_value: raw.clamp(0.0, 1.0),
        p_value_raw: raw,
        c_n,
        u_hat: stats.u_hat,
        s_hat,
        alternative,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CiMethod {
    EdgeworthCF,
    Normal,
}

impl std::str::FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edgeworth" | "edgeworthcf" | "cornish-fisher" => Ok(CiMethod::EdgeworthCF),
            "normal" => Ok(CiMethod::Normal),
            other => Err(Error::Parameter(format!("unknown CI method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub method: CiMethod,
    /// Set when the quantiles came out in the wrong order and the endpoints
    /// were swapped.
    pub warning: Option<String>,
}

impl ConfidenceInterval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// `(Û − q_{1−α/2} Ŝ, Û − q_{α/2} Ŝ)` with Cornish-Fisher or normal quantiles.
pub fn confidence_interval(
    stats: &MomentStats,
    alpha: f64,
    method: CiMethod,
) -> Result<ConfidenceInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    let s_hat = check_scale(stats)?;
    let (q_lo, q_hi) = match method {
        CiMethod::Normal => (
            normal::quantile(alpha / 2.0),
            normal::quantile(1.0 - alpha / 2.0),
        ),
        CiMethod::EdgeworthCF => {
            let c = EdgeworthCoefficients::empirical(stats)?;
            (
                cornish_fisher_quantile(&c, alpha / 2.0)?,
                cornish_fisher_quantile(&c, 1.0 - alpha / 2.0)?,
            )
        }
    };
    let mut lo = stats.u_hat - q_hi * s_hat;
    let mut hi = stats.u_hat - q_lo * s_hat;
    let mut warning = None;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
        warning = Some("Cornish-Fisher quantiles are not monotone here; endpoints swapped".into());
    }
    Ok(ConfidenceInterval {
        lo,
        hi,
        alpha,
        method,
        warning,
    })
}
