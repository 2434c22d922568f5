//! Simulation protocols: Monte-Carlo ground truth for the distribution of
//! the studentized moment, CDF-approximation accuracy, confidence-interval
//! coverage, and sparsity sweeps.
//!
//! Every random quantity is drawn from a stream keyed by the config seed, a
//! label naming its role, and its replicate index, so results do not depend
//! on thread count or scheduling. Sample and truth streams are keyed by `n`
//! and replicate only, so runs at different `rho` share random numbers.

use crate::bootstrap::{
    resample_distribution, subsample_distribution, BootstrapDistribution, BootstrapOptions,
};
use crate::edgeworth::{default_grid, expansion_cdf, EdgeworthCoefficients};
use crate::error::{Error, Result};
use crate::graphon::{
    population_moment, sample_network, Estimate, Graphon, GraphonSpec, MomentMethod, RhoSpec,
};
use crate::inference::{confidence_interval, CiMethod};
use crate::moments::{binom, compute_stats, moment_and_scale, CostLimits, Studentization};
use crate::motif::Motif;
use crate::normal;
use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Motif in a config: a built-in name or an explicit 1-based edge list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MotifSpec {
    Name(String),
    EdgeList(EdgeListSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeListSpec {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

impl MotifSpec {
    pub fn build(&self) -> Result<Motif> {
        match self {
            MotifSpec::Name(name) => Motif::builtin(name),
            MotifSpec::EdgeList(e) => {
                let edges: Vec<(usize, usize)> = e.edges.iter().map(|&[a, b]| (a, b)).collect();
                Motif::from_edge_list(e.nodes, &edges)
            }
        }
    }

    /// A built-in name or inline JSON.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            Ok(serde_json::from_str(t)?)
        } else {
            Ok(MotifSpec::Name(t.to_string()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    EdgeworthEmpirical,
    Normal,
    Subsample,
    Resample,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::EdgeworthEmpirical => "edgeworth_empirical",
            Method::Normal => "normal",
            Method::Subsample => "subsample",
            Method::Resample => "resample",
        }
    }
}

fn one_or_many<'de, D>(d: D) -> std::result::Result<Vec<RhoSpec>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        One(RhoSpec),
        Many(Vec<RhoSpec>),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::One(r) => vec![r],
        Raw::Many(v) => v,
    })
}

fn default_rho() -> Vec<RhoSpec> {
    vec![RhoSpec::Literal(1.0)]
}
fn default_n_mc() -> usize {
    100_000
}
fn default_n_boot() -> usize {
    500
}
fn default_reps() -> usize {
    30
}
fn default_methods() -> Vec<Method> {
    vec![Method::EdgeworthEmpirical, Method::Normal]
}
fn default_alpha() -> f64 {
    0.2
}
fn default_max_degenerate() -> f64 {
    MAX_TRUTH_DEGENERATE
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphon: GraphonSpec,
    pub motif: MotifSpec,
    pub n: Vec<usize>,
    #[serde(default = "default_rho", deserialize_with = "one_or_many")]
    pub rho: Vec<RhoSpec>,
    #[serde(default = "default_n_mc")]
    pub n_mc: usize,
    #[serde(default = "default_n_boot")]
    pub n_boot: usize,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Evaluation points; defaults to −2.0, −1.9, …, 2.0.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    /// Nominal non-coverage for the coverage experiment.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Sub-sample size; defaults to `n / 2`.
    #[serde(default)]
    pub n_star: Option<usize>,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Directory for cached Monte-Carlo population moments.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Emit `time_seconds` records. Timings are the only output that is not
    /// reproducible from the seed.
    #[serde(default = "default_true")]
    pub record_time: bool,
    /// Largest tolerated fraction of degenerate Monte-Carlo truth replicates.
    #[serde(default = "default_max_degenerate")]
    pub max_degenerate_fraction: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let motif = self.motif.build()?;
        self.graphon.build()?;
        if self.n_mc < 1000 {
            return Err(Error::Config(format!(
                "n_mc = {} must be at least 1000",
                self.n_mc
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.n.is_empty() || self.rho.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("n, rho and methods must be non-empty".into()));
        }
        if let Some(&bad) = self.n.iter().find(|&&n| n <= motif.r()) {
            return Err(Error::Config(format!(
                "n = {bad} is too small for a motif on {} nodes",
                motif.r()
            )));
        }
        if let Some(g) = &self.grid {
            if g.is_empty() || g.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config(
                    "grid must be non-empty and strictly increasing".into(),
                ));
            }
        }
        if !(0.0..1.0).contains(&self.max_degenerate_fraction) {
            return Err(Error::Config(
                "max_degenerate_fraction must lie in [0, 1)".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha = {} outside (0, 1)",
                self.alpha
            )));
        }
        let needs_boot = self
            .methods
            .iter()
            .any(|m| matches!(m, Method::Subsample | Method::Resample));
        if needs_boot && self.n_boot == 0 {
            return Err(Error::Config(
                "n_boot must be positive for bootstrap methods".into(),
            ));
        }
        Ok(())
    }

    pub fn truth_options(&self) -> TruthOptions {
        TruthOptions {
            max_degenerate_fraction: self.max_degenerate_fraction,
            ..Default::default()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone().unwrap_or_else(default_grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SupError,
    Coverage,
    Length,
    TimeSeconds,
    Power,
    /// The configuration or replicate could not be evaluated (value 1).
    Degenerate,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::SupError => "sup_error",
            Metric::Coverage => "coverage",
            Metric::Length => "length",
            Metric::TimeSeconds => "time_seconds",
            Metric::Power => "power",
            Metric::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub method: String,
    pub graphon: String,
    pub motif: String,
    pub n: usize,
    pub rho: f64,
    pub rep: usize,
    pub metric: Metric,
    pub value: f64,
}

impl ExperimentRecord {
    /// Checks the metric's value range.
    pub fn validate(&self) -> Result<()> {
        let v = self.value;
        let ok = match self.metric {
            Metric::SupError => (0.0..=1.0).contains(&v),
            Metric::Coverage | Metric::Power => (0.0..=1.0).contains(&v),
            Metric::Length | Metric::TimeSeconds => v >= 0.0 && v.is_finite(),
            Metric::Degenerate => v == 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("record out of range: {self:?}")))
        }
    }
}

pub const CSV_HEADER: &str = "method,graphon,motif,n,rho,rep,metric,value";

pub fn write_csv<W: Write>(mut w: W, records: &[ExperimentRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.method, r.graphon, r.motif, r.n, r.rho, r.rep, r.metric, r.value
        )?;
    }
    Ok(())
}

/// Mean and standard deviation of one metric for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub graphon: String,
    pub motif: String,
    pub n: usize,
    pub rho: f64,
    pub metric: Metric,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
}

/// Groups records by everything except `rep` and summarizes each group, in
/// order of first appearance.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, String, String, usize, u64, Metric)> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in records {
        let key = (
            r.method.clone(),
            r.graphon.clone(),
            r.motif.clone(),
            r.n,
            r.rho.to_bits(),
            r.metric,
        );
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r.value),
            None => {
                keys.push(key);
                groups.push(vec![r.value]);
            }
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|((method, graphon, motif, n, rho, metric), vals)| {
            let c = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / c;
            let sd = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (c - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                method,
                graphon,
                motif,
                n,
                rho: f64::from_bits(rho),
                metric,
                count: vals.len(),
                mean,
                sd,
                median: median(&vals),
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(w, "method,graphon,motif,n,rho,metric,count,mean,sd,median")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method, r.graphon, r.motif, r.n, r.rho, r.metric, r.count, r.mean, r.sd, r.median
        )?;
    }
    Ok(())
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// `max_u |approx(u) − truth(u)|` over aligned grid values.
pub fn sup_grid_error(approx: &[f64], truth: &[f64]) -> Result<f64> {
    if approx.len() != truth.len() {
        return Err(Error::InvalidSize(format!(
            "grid lengths differ: {} vs {}",
            approx.len(),
            truth.len()
        )));
    }
    Ok(approx
        .iter()
        .zip(truth)
        .map(|(a, t)| (a - t).abs())
        .fold(0.0, f64::max))
}

/// Monte-Carlo draws for a non-block population moment: at least
/// `100·√n_mc`, and never fewer than 10⁶.
pub fn mu_draws(n_mc: usize) -> usize {
    ((100.0 * (n_mc as f64).sqrt()).ceil() as usize).max(1_000_000)
}

/// `mu` for the truth and coverage runs: exact for block models, otherwise
/// Monte Carlo, cached under `cache_dir` by a hash of the inputs.
pub fn resolve_mu(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    n_mc: usize,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<Estimate> {
    if g.is_block_model() {
        return population_moment(g, rho, motif, MomentMethod::ExactBlockModel);
    }
    let m = mu_draws(n_mc);
    let mc_seed = derive_seed(seed, "mu", 0);
    let key = format!(
        "{g:?}|{rho:e}|{}|{:?}|{m}|{mc_seed}",
        motif.r(),
        motif.edges()
    );
    let path = cache_dir.map(|dir| {
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
        dir.join(format!("mu-{hex}.json"))
    });
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(est) = serde_json::from_str::<Estimate>(&text) {
                return Ok(est);
            }
        }
    }
    let est = population_moment(g, rho, motif, MomentMethod::MonteCarlo { m, seed: mc_seed })?;
    if let (Some(p), Some(dir)) = (&path, cache_dir) {
        std::fs::create_dir_all(dir)?;
        std::fs::write(p, serde_json::to_string(&est)?)?;
    }
    Ok(est)
}

/// Grid values of the Monte-Carlo CDF of `T̂ = (Û − mu)/Ŝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruthCdf {
    pub values: Vec<f64>,
    /// Replicates skipped because `Ŝ = 0`.
    pub degenerate: usize,
    pub replicates: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Default largest tolerated fraction of degenerate replicates in a
/// Monte-Carlo truth.
pub const MAX_TRUTH_DEGENERATE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthOptions {
    pub studentization: Studentization,
    /// More degenerate (`Ŝ = 0`) replicates than this fraction is an error.
    pub max_degenerate_fraction: f64,
}

impl Default for TruthOptions {
    fn default() -> Self {
        Self {
            studentization: Studentization::Plugin,
            max_degenerate_fraction: MAX_TRUTH_DEGENERATE,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_true_cdf(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    n: usize,
    n_mc: usize,
    seed: u64,
    grid: &[f64],
    mu: f64,
    opts: &TruthOptions,
) -> Result<TruthCdf> {
    if n_mc == 0 {
        return Err(Error::Parameter("n_mc must be positive".into()));
    }
    let label = format!("truth-n{n}");
    let limits = CostLimits::default();
    let ts: Vec<Option<f64>> = (0..n_mc)
        .into_par_iter()
        .map(|k| {
            let a = sample_network(g, rho, n, derive_seed(seed, &label, k as u64))?;
            let (u, s) = moment_and_scale(&a, motif, opts.studentization, &limits)?;
            Ok((s > 0.0).then(|| (u - mu) / s))
        })
        .collect::<Result<_>>()?;
    let mut kept: Vec<f64> = ts.into_iter().flatten().collect();
    let degenerate = n_mc - kept.len();
    if degenerate as f64 > opts.max_degenerate_fraction * n_mc as f64 {
        return Err(Error::Degenerate(format!(
            "{degenerate} of {n_mc} Monte-Carlo replicates have S_hat = 0"
        )));
    }
    kept.sort_by(f64::total_cmp);
    let k = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / k;
    let sd = (kept.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0)).sqrt();
    let values = grid
        .iter()
        .map(|&u| kept.partition_point(|&t| t <= u) as f64 / k)
        .collect();
    Ok(TruthCdf {
        values,
        degenerate,
        replicates: n_mc,
        mean,
        sd,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

struct Context {
    graphon: Graphon,
    graphon_name: String,
    motif: Motif,
    motif_name: String,
    grid: Vec<f64>,
}

impl Context {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let graphon = cfg.graphon.build()?;
        let motif = cfg.motif.build()?;
        Ok(Self {
            graphon_name: graphon.name(),
            graphon,
            motif_name: motif.label(),
            motif,
            grid: cfg.grid(),
        })
    }

    fn record(
        &self,
        method: Method,
        n: usize,
        rho: f64,
        rep: usize,
        metric: Metric,
        value: f64,
    ) -> ExperimentRecord {
        ExperimentRecord {
            method: method.as_str().into(),
            graphon: self.graphon_name.clone(),
            motif: self.motif_name.clone(),
            n,
            rho,
            rep,
            metric,
            value,
        }
    }
}

fn bootstrap_for(
    method: Method,
    a: &crate::graph::AdjacencyMatrix,
    motif: &Motif,
    cfg: &ExperimentConfig,
    n: usize,
    rep: usize,
) -> Result<BootstrapDistribution> {
    let seed = derive_seed(cfg.seed, &format!("boot-n{n}"), rep as u64);
    let opts = BootstrapOptions::default();
    match method {
        Method::Subsample => {
            let n_star = cfg.n_star.unwrap_or(n / 2);
            subsample_distribution(a, motif, n_star, cfg.n_boot, seed, &opts)
        }
        Method::Resample => resample_distribution(a, motif, cfg.n_boot, seed, &opts),
        _ => unreachable!("not a bootstrap method"),
    }
}

fn sample_seed(cfg: &ExperimentConfig, n: usize, rep: usize) -> u64 {
    derive_seed(cfg.seed, &format!("rep-n{n}"), rep as u64)
}

/// Grid CDF approximations for one observed network, one per method.
fn accuracy_rep(
    ctx: &Context,
    cfg: &ExperimentConfig,
    n: usize,
    rho: f64,
    rep: usize,
    truth: &[f64],
) -> Result<Vec<ExperimentRecord>> {
    let a = sample_network(&ctx.graphon, rho, n, sample_seed(cfg, n, rep))?;
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let approx: Option<Vec<f64>> = match method {
            Method::Normal => Some(ctx.grid.iter().map(|&u| normal::cdf(u)).collect()),
            Method::EdgeworthEmpirical => {
                let stats = compute_stats(&a, &ctx.motif)?;
                match EdgeworthCoefficients::empirical(&stats) {
                    Ok(c) => Some(ctx.grid.iter().map(|&u| expansion_cdf(&c, u)).collect()),
                    Err(Error::Degenerate(_)) => None,
                    Err(e) => return Err(e),
                }
            }
            Method::Subsample | Method::Resample => {
                match bootstrap_for(method, &a, &ctx.motif, cfg, n, rep) {
                    Ok(d) => Some(ctx.grid.iter().map(|&u| d.cdf.eval(u)).collect()),
                    Err(Error::TooManyDegenerate { .. }) => None,
                    Err(e) => return Err(e),
                }
            }
        };
        let elapsed = start.elapsed().as_secs_f64();
        match approx {
            Some(values) => {
                let err = sup_grid_error(&values, truth)?;
                out.push(ctx.record(method, n, rho, rep, Metric::SupError, err));
                if cfg.record_time {
                    out.push(ctx.record(method, n, rho, rep, Metric::TimeSeconds, elapsed));
                }
            }
            None => out.push(ctx.record(method, n, rho, rep, Metric::Degenerate, 1.0)),
        }
    }
    Ok(out)
}

/// Accuracy runs over every `(n, rho)` in the config. With `tolerate_degenerate`,
/// configurations that cannot be evaluated yield `degenerate` records.
fn accuracy_runs(
    cfg: &ExperimentConfig,
    tolerate_degenerate: bool,
) -> Result<Vec<ExperimentRecord>> {
    let ctx = Context::new(cfg)?;
    with_threads(cfg.threads, || {
        let mut records = Vec::new();
        for &n in &cfg.n {
            for rho_spec in &cfg.rho {
                let rho = rho_spec.resolve(n);
                let degenerate = |ctx: &Context| -> Vec<ExperimentRecord> {
                    cfg.methods
                        .iter()
                        .map(|&m| ctx.record(m, n, rho, 0, Metric::Degenerate, 1.0))
                        .collect()
                };
                let mu = resolve_mu(
                    &ctx.graphon,
                    rho,
                    &ctx.motif,
                    cfg.n_mc,
                    cfg.seed,
                    cfg.cache_dir.as_deref(),
                )?
                .value;
                if tolerate_degenerate && binom(n, ctx.motif.r()) as f64 * mu < 1.0 {
                    records.extend(degenerate(&ctx));
                    continue;
                }
                let truth = match monte_carlo_true_cdf(
                    &ctx.graphon,
                    rho,
                    &ctx.motif,
                    n,
                    cfg.n_mc,
                    cfg.seed,
                    &ctx.grid,
                    mu,
                    &cfg.truth_options(),
                ) {
                    Ok(t) => t,
                    Err(Error::Degenerate(_)) if tolerate_degenerate => {
                        records.extend(degenerate(&ctx));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let reps: Vec<Vec<ExperimentRecord>> = (0..cfg.repetitions)
                    .into_par_iter()
                    .map(|rep| accuracy_rep(&ctx, cfg, n, rho, rep, &truth.values))
                    .collect::<Result<_>>()?;
                records.extend(reps.into_iter().flatten());
            }
        }
        Ok(records)
    })?
}

/// CDF-approximation accuracy against the Monte-Carlo truth.
pub fn run_accuracy_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    accuracy_runs(cfg, false)
}

/// The accuracy experiment across `cfg.rho`; configurations with fewer than
/// one expected motif occurrence, or a degenerate Monte-Carlo truth, are
/// recorded as `degenerate`.
pub fn run_sparsity_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    accuracy_runs(cfg, true)
}

fn coverage_rep(
    ctx: &Context,
    cfg: &ExperimentConfig,
    n: usize,
    rho: f64,
    rep: usize,
    mu: f64,
) -> Result<Vec<ExperimentRecord>> {
    let a = sample_network(&ctx.graphon, rho, n, sample_seed(cfg, n, rep))?;
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let stats = compute_stats(&a, &ctx.motif)?;
        let interval: Option<(f64, f64)> = if stats.degenerate {
            None
        } else {
            match method {
                Method::EdgeworthEmpirical => {
                    let ci = confidence_interval(&stats, cfg.alpha, CiMethod::EdgeworthCF)?;
                    Some((ci.lo, ci.hi))
                }
                Method::Normal => {
                    let ci = confidence_interval(&stats, cfg.alpha, CiMethod::Normal)?;
                    Some((ci.lo, ci.hi))
                }
                Method::Subsample | Method::Resample => {
                    match bootstrap_for(method, &a, &ctx.motif, cfg, n, rep) {
                        Ok(d) => {
                            let s = stats.s_hat();
                            let q_lo = d.cdf.quantile(cfg.alpha / 2.0);
                            let q_hi = d.cdf.quantile(1.0 - cfg.alpha / 2.0);
                            Some((stats.u_hat - q_hi * s, stats.u_hat - q_lo * s))
                        }
                        Err(Error::TooManyDegenerate { .. }) => None,
                        Err(e) => return Err(e),
                    }
                }
            }
        };
        let elapsed = start.elapsed().as_secs_f64();
        match interval {
            Some((lo, hi)) => {
                let cover = if lo <= mu && mu <= hi { 1.0 } else { 0.0 };
                out.push(ctx.record(method, n, rho, rep, Metric::Coverage, cover));
                out.push(ctx.record(method, n, rho, rep, Metric::Length, hi - lo));
                if cfg.record_time {
                    out.push(ctx.record(method, n, rho, rep, Metric::TimeSeconds, elapsed));
                }
            }
            None => out.push(ctx.record(method, n, rho, rep, Metric::Degenerate, 1.0)),
        }
    }
    Ok(out)
}

/// Two-sided `1 − alpha` interval coverage of the population moment.
/// Bootstrap intervals are percentile-t: `(Û − q*_{1−α/2} Ŝ, Û − q*_{α/2} Ŝ)`.
pub fn run_coverage_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let ctx = Context::new(cfg)?;
    with_threads(cfg.threads, || {
        let mut records = Vec::new();
        for &n in &cfg.n {
            for rho_spec in &cfg.rho {
                let rho = rho_spec.resolve(n);
                let mu = resolve_mu(
                    &ctx.graphon,
                    rho,
                    &ctx.motif,
                    cfg.n_mc,
                    cfg.seed,
                    cfg.cache_dir.as_deref(),
                )?
                .value;
                let reps: Vec<Vec<ExperimentRecord>> = (0..cfg.repetitions)
                    .into_par_iter()
                    .map(|rep| coverage_rep(&ctx, cfg, n, rho, rep, mu))
                    .collect::<Result<_>>()?;
                records.extend(reps.into_iter().flatten());
            }
        }
        Ok(records)
    })?
}

/// Outcome of comparing the sub-sampling bootstrap with the Monte-Carlo
/// distributions of `T̂_m`, `m = n*(1 − n*/n)`, and of `T̂_{n*}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveSizeReport {
    pub n: usize,
    pub n_star: usize,
    pub m: usize,
    pub repetitions: usize,
    /// Repetitions where the bootstrap CDF is closer to the `T̂_m` truth.
    pub closer_to_effective: usize,
    pub median_distance_effective: f64,
    pub median_distance_nstar: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn effective_sample_size_check(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    n: usize,
    n_mc: usize,
    n_boot: usize,
    repetitions: usize,
    seed: u64,
) -> Result<EffectiveSizeReport> {
    let n_star = n / 2;
    let m = (n_star as f64 * (1.0 - n_star as f64 / n as f64)).round() as usize;
    let grid = default_grid();
    let mu = resolve_mu(g, rho, motif, n_mc, seed, None)?.value;
    let truth_m = monte_carlo_true_cdf(
        g,
        rho,
        motif,
        m,
        n_mc,
        seed,
        &grid,
        mu,
        &TruthOptions::default(),
    )?;
    let truth_star = monte_carlo_true_cdf(
        g,
        rho,
        motif,
        n_star,
        n_mc,
        seed,
        &grid,
        mu,
        &TruthOptions::default(),
    )?;
    let dists: Vec<(f64, f64)> = (0..repetitions)
        .into_par_iter()
        .map(|rep| {
            let a = sample_network(
                g,
                rho,
                n,
                derive_seed(seed, &format!("rep-n{n}"), rep as u64),
            )?;
            let d = subsample_distribution(
                &a,
                motif,
                n_star,
                n_boot,
                derive_seed(seed, &format!("boot-n{n}"), rep as u64),
                &BootstrapOptions::default(),
            )?;
            let vals: Vec<f64> = grid.iter().map(|&u| d.cdf.eval(u)).collect();
            Ok((
                sup_grid_error(&vals, &truth_m.values)?,
                sup_grid_error(&vals, &truth_star.values)?,
            ))
        })
        .collect::<Result<_>>()?;
    let closer = dists.iter().filter(|(e, s)| e < s).count();
    let (de, ds): (Vec<f64>, Vec<f64>) = dists.into_iter().unzip();
    Ok(EffectiveSizeReport {
        n,
        n_star,
        m,
        repetitions,
        closer_to_effective: closer,
        median_distance_effective: median(&de),
        median_distance_nstar: median(&ds),
    })
}
