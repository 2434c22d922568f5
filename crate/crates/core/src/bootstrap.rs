//! Node sub-sampling and node re-sampling bootstraps of the studentized
//! moment `T* = (Û* − Û) / Ŝ*`.

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::moments::{moment_and_scale, CostLimits, Studentization};
use crate::motif::Motif;
use crate::rng;
use rayon::prelude::*;
use serde::Serialize;

/// Right-continuous step CDF of a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Sorts the samples. Fails on an empty sample or a NaN.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSize(
                "empirical CDF of an empty sample".into(),
            ));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Parameter("NaN in empirical CDF sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{samples ≤ u} / B`.
    pub fn eval(&self, u: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= u) as f64 / self.sorted.len() as f64
    }

    /// Lower empirical quantile: the smallest sample `v` with `F(v) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let b = self.sorted.len();
        let k = ((p * b as f64).ceil() as usize).clamp(1, b);
        self.sorted[k - 1]
    }
}

pub fn cdf_eval(f: &EmpiricalCdf, u: f64) -> f64 {
    f.eval(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// `n*` distinct nodes without replacement.
    Subsample,
    /// `n` nodes with replacement.
    Resample,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsample" | "sub-sample" => Ok(Scheme::Subsample),
            "resample" | "re-sample" => Ok(Scheme::Resample),
            other => Err(Error::Parameter(format!(
                "unknown bootstrap scheme {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapOptions {
    pub studentization: Studentization,
    /// Largest tolerated fraction of degenerate (`Ŝ* = 0`) replicates.
    pub max_degenerate_fraction: f64,
    pub limits: CostLimits,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            studentization: Studentization::Plugin,
            max_degenerate_fraction: 0.1,
            limits: CostLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapDistribution {
    pub cdf: EmpiricalCdf,
    /// Replicates dropped because `Ŝ* = 0`.
    pub dropped: usize,
    pub replicates: usize,
}

pub fn subsample_distribution(
    a: &AdjacencyMatrix,
    motif: &Motif,
    n_star: usize,
    b: usize,
    seed: u64,
    opts: &BootstrapOptions,
) -> Result<BootstrapDistribution> {
    let n = a.n();
    if n_star < motif.r() || n_star >= n {
        return Err(Error::Parameter(format!(
            "n* = {n_star} must satisfy r = {} <= n* < n = {n}",
            motif.r()
        )));
    }
    run(a, motif, b, seed, opts, "subsample", |s| {
        rng::sample_without_replacement(s, n, n_star)
    })
}

pub fn resample_distribution(
    a: &AdjacencyMatrix,
    motif: &Motif,
    b: usize,
    seed: u64,
    opts: &BootstrapOptions,
) -> Result<BootstrapDistribution> {
    let n = a.n();
    if n < motif.r() {
        return Err(Error::InvalidSize(format!(
            "graph has {n} nodes, motif needs {}",
            motif.r()
        )));
    }
    run(a, motif, b, seed, opts, "resample", |s| {
        (0..n).map(|_| rng::uniform_index(s, n)).collect()
    })
}

/// Studentized replicate on a drawn index list; `None` when `Ŝ* = 0`.
pub fn replicate_statistic(
    a: &AdjacencyMatrix,
    motif: &Motif,
    idx: &[usize],
    u_hat: f64,
    opts: &BootstrapOptions,
) -> Result<Option<f64>> {
    let sub = a.induced(idx);
    let (u_star, s_star) = moment_and_scale(&sub, motif, opts.studentization, &opts.limits)?;
    Ok((s_star > 0.0).then(|| (u_star - u_hat) / s_star))
}

fn run(
    a: &AdjacencyMatrix,
    motif: &Motif,
    b: usize,
    seed: u64,
    opts: &BootstrapOptions,
    label: &str,
    draw: impl Fn(&mut rng::Stream) -> Vec<usize> + Sync,
) -> Result<BootstrapDistribution> {
    if b == 0 {
        return Err(Error::Parameter(
            "need at least one bootstrap replicate".into(),
        ));
    }
    let (u_hat, _) = moment_and_scale(a, motif, Studentization::Plugin, &opts.limits)?;
    let values: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|k| {
            let mut s = rng::stream(seed, label, k as u64);
            let idx = draw(&mut s);
            replicate_statistic(a, motif, &idx, u_hat, opts)
        })
        .collect::<Result<_>>()?;
    let kept: Vec<f64> = values.iter().flatten().copied().collect();
    let dropped = b - kept.len();
    if dropped as f64 > opts.max_degenerate_fraction * b as f64 {
        return Err(Error::TooManyDegenerate { dropped, total: b });
    }
    Ok(BootstrapDistribution {
        cdf: EmpiricalCdf::new(kept)?,
        dropped,
        replicates: b,
    })
}
