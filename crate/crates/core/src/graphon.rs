//! Graphon models, network sampling, and population quantities.
//!
//! A network on `n` nodes is generated as
//!
//! ```text
//! X_1, ..., X_n ~ Uniform[0, 1]            (latent positions)
//! W_ij = W_ji = rho * f(X_i, X_j), i != j  (edge probabilities)
//! A_ij = A_ji | W ~ Bernoulli(W_ij)        (observed graph)
//! ```
//!
//! Population moments `mu = E[h(A_{1..r})]` and the Hoeffding projection
//! moments used by the population Edgeworth expansion are computed exactly
//! for block models (by enumerating block assignments) and by Monte Carlo
//! for everything else.

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::motif::Motif;
use crate::rng::{self, Stream};
use serde::{Deserialize, Deserializer, Serialize};
use std::fmt;
use std::sync::Arc;

pub type GraphonFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Graphon {
    /// Stochastic block model: latent `u` falls in block `k` when the
    /// cumulative membership probabilities bracket it.
    BlockModel {
        pi: Vec<f64>,
        b: Vec<Vec<f64>>,
    },
    /// `f(u,v) = (u²+v²)/3 · cos(1/(u²+v²)) + 0.15`, with `f(0,0) = 0.15`.
    Smooth,
    /// `f(u,v) = 0.5 cos{0.1 / ((u-½)²+(v-½)²)^{-1} + 0.01} · max(u,v)^{2/3} + 0.4`.
    NonSmooth,
    Custom {
        name: String,
        f: GraphonFn,
    },
}

impl fmt::Debug for Graphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Graphon::BlockModel { pi, b } => f
                .debug_struct("BlockModel")
                .field("pi", pi)
                .field("b", b)
                .finish(),
            Graphon::Smooth => f.write_str("SmoothGraphon"),
            Graphon::NonSmooth => f.write_str("NonSmoothGraphon"),
            Graphon::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Graphon {
    pub fn block_model(pi: Vec<f64>, b: Vec<Vec<f64>>) -> Result<Self> {
        let k = pi.len();
        if k == 0 {
            return Err(Error::Parameter(
                "block model needs at least one block".into(),
            ));
        }
        if pi.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Parameter(
                "membership probabilities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "membership probabilities sum to {total}, not 1"
            )));
        }
        if b.len() != k || b.iter().any(|row| row.len() != k) {
            return Err(Error::Parameter(format!("B must be {k} x {k}")));
        }
        for i in 0..k {
            for j in 0..k {
                if !(0.0..=1.0).contains(&b[i][j]) {
                    return Err(Error::Parameter(format!("B[{i}][{j}] outside [0, 1]")));
                }
                if b[i][j] != b[j][i] {
                    return Err(Error::Parameter(format!("B is asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Graphon::BlockModel { pi, b })
    }

    /// Two equal-sized blocks with `B = (0.6, 0.2; 0.2, 0.2)`.
    pub fn two_block() -> Self {
        Graphon::BlockModel {
            pi: vec![0.5, 0.5],
            b: vec![vec![0.6, 0.2], vec![0.2, 0.2]],
        }
    }

    /// `f ≡ c`, represented as a one-block model so exact enumeration applies.
    pub fn constant(c: f64) -> Result<Self> {
        Self::block_model(vec![1.0], vec![vec![c]])
    }

    /// Wraps a user function after checking symmetry and range on random pairs.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let mut s = rng::stream(0, "custom-graphon-check", 0);
        for _ in 0..1000 {
            let (u, v) = (rng::uniform(&mut s), rng::uniform(&mut s));
            let (a, b) = (f(u, v), f(v, u));
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Parameter(format!(
                    "f({u}, {v}) = {a} outside [0, 1]"
                )));
            }
            if (a - b).abs() > 1e-12 {
                return Err(Error::Parameter(format!(
                    "f is not symmetric at ({u}, {v})"
                )));
            }
        }
        Ok(Graphon::Custom {
            name: name.into(),
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Graphon::BlockModel { pi, b } if pi.len() == 1 => format!("Constant({})", b[0][0]),
            Graphon::BlockModel { .. } => "BlockModel".into(),
            Graphon::Smooth => "SmoothGraphon".into(),
            Graphon::NonSmooth => "NonSmoothGraphon".into(),
            Graphon::Custom { name, .. } => name.clone(),
        }
    }

    pub fn is_block_model(&self) -> bool {
        matches!(self, Graphon::BlockModel { .. })
    }

    /// Block index of latent position `u` (block models only).
    pub fn block_of(&self, u: f64) -> Option<usize> {
        let Graphon::BlockModel { pi, .. } = self else {
            return None;
        };
        let mut acc = 0.0;
        for (k, &p) in pi.iter().enumerate() {
            acc += p;
            if u < acc {
                return Some(k);
            }
        }
        Some(pi.len() - 1)
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            Graphon::BlockModel { b, .. } => {
                b[self.block_of(u).unwrap()][self.block_of(v).unwrap()]
            }
            Graphon::Smooth => {
                let s = u * u + v * v;
                if s == 0.0 {
                    // (u²+v²)·cos(1/(u²+v²)) → 0 at the origin
                    0.15
                } else {
                    s / 3.0 * (1.0 / s).cos() + 0.15
                }
            }
            Graphon::NonSmooth => {
                // Transcribed as printed: `0.1 / d^{-1}` equals `0.1 * d`. The
                // reading `0.1 / d` can be supplied through `Graphon::custom`.
                let d = (u - 0.5).powi(2) + (v - 0.5).powi(2);
                0.5 * (0.1 / d.powi(-1) + 0.01).cos() * u.max(v).powf(2.0 / 3.0) + 0.4
            }
            Graphon::Custom { f, .. } => f(u, v),
        }
    }
}

/// JSON form of a graphon: `{"kind": "BlockModel", "pi": [..], "B": [[..]]}`,
/// `{"kind": "SmoothGraphon"}`, `{"kind": "NonSmoothGraphon"}` or
/// `{"kind": "Constant", "c": 0.3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum GraphonSpec {
    BlockModel {
        pi: Vec<f64>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
    },
    SmoothGraphon {},
    NonSmoothGraphon {},
    Constant {
        c: f64,
    },
}

impl GraphonSpec {
    pub fn build(&self) -> Result<Graphon> {
        match self {
            GraphonSpec::BlockModel { pi, b } => Graphon::block_model(pi.clone(), b.clone()),
            GraphonSpec::SmoothGraphon {} => Ok(Graphon::Smooth),
            GraphonSpec::NonSmoothGraphon {} => Ok(Graphon::NonSmooth),
            GraphonSpec::Constant { c } => Graphon::constant(*c),
        }
    }

    /// Accepts a built-in name (`BlockModel`, `SmoothGraphon`,
    /// `NonSmoothGraphon`) or inline JSON.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "BlockModel" | "blockmodel" | "two-block" => Ok(GraphonSpec::BlockModel {
                pi: vec![0.5, 0.5],
                b: vec![vec![0.6, 0.2], vec![0.2, 0.2]],
            }),
            "SmoothGraphon" | "smooth" => Ok(GraphonSpec::SmoothGraphon {}),
            "NonSmoothGraphon" | "nonsmooth" => Ok(GraphonSpec::NonSmoothGraphon {}),
            other => Ok(serde_json::from_str(other)?),
        }
    }
}

/// Sparsity parameter: a literal in (0, 1] or a power of `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RhoSpec {
    Literal(f64),
    /// `n^{-exponent}`
    PowerOfN(f64),
}

impl RhoSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "1" | "dense" => return Ok(RhoSpec::Literal(1.0)),
            "n^-1/4" | "n^(-1/4)" => return Ok(RhoSpec::PowerOfN(0.25)),
            "n^-1/2" | "n^(-1/2)" => return Ok(RhoSpec::PowerOfN(0.5)),
            "n^-1" | "n^(-1)" => return Ok(RhoSpec::PowerOfN(1.0)),
            _ => {}
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Parameter(format!("unrecognized rho {text:?}")))?;
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Parameter(format!("rho = {v} outside (0, 1]")));
        }
        Ok(RhoSpec::Literal(v))
    }

    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            RhoSpec::Literal(v) => v,
            RhoSpec::PowerOfN(e) => (n as f64).powf(-e),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            RhoSpec::Literal(v) => format!("{v}"),
            RhoSpec::PowerOfN(0.25) => "n^-1/4".into(),
            RhoSpec::PowerOfN(0.5) => "n^-1/2".into(),
            RhoSpec::PowerOfN(1.0) => "n^-1".into(),
            RhoSpec::PowerOfN(e) => format!("n^-{e}"),
        }
    }
}

impl<'de> Deserialize<'de> for RhoSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => RhoSpec::parse(&v.to_string()),
            Raw::Text(s) => RhoSpec::parse(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl Serialize for RhoSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            RhoSpec::Literal(v) => s.serialize_f64(v),
            _ => s.serialize_str(&self.label()),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("rho = {rho} outside (0, 1]")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatentSample {
    pub positions: Vec<f64>,
    pub seed: u64,
}

/// `n` i.i.d. Uniform[0,1) draws from the `"latent"` stream of `seed`.
pub fn sample_latent(n: usize, seed: u64) -> Result<LatentSample> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "need at least 2 nodes, got {n}"
        )));
    }
    let mut s = rng::stream(seed, "latent", 0);
    let positions = (0..n).map(|_| rng::uniform(&mut s)).collect();
    Ok(LatentSample { positions, seed })
}

/// Symmetric edge-probability matrix with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    w: Vec<f64>,
    rho: f64,
}

impl ProbabilityMatrix {
    /// Validates a dense matrix given row by row.
    pub fn from_rows(rows: &[Vec<f64>], rho: f64) -> Result<Self> {
        let n = rows.len();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            if rows[i].len() != n {
                return Err(Error::InvalidMatrix("matrix is not square".into()));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !(0.0..=1.0).contains(&v) || v != rows[j][i] || (i == j && v != 0.0) {
                    return Err(Error::InvalidMatrix(format!("bad entry at ({i}, {j})")));
                }
                w[i * n + j] = v;
            }
        }
        Ok(Self { n, w, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }
}

/// `W_ij = rho · f(x_i, x_j)` off the diagonal.
pub fn probability_matrix(g: &Graphon, x: &LatentSample, rho: f64) -> Result<ProbabilityMatrix> {
    check_rho(rho)?;
    let n = x.positions.len();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rho * g.eval(x.positions[i], x.positions[j]);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    Ok(ProbabilityMatrix { n, w, rho })
}

/// Independent Bernoulli edges for `i < j` from the `"adjacency"` stream of `seed`.
pub fn sample_adjacency(w: &ProbabilityMatrix, seed: u64) -> AdjacencyMatrix {
    let mut s = rng::stream(seed, "adjacency", 0);
    AdjacencyMatrix::from_upper_fn(w.n, |i, j| rng::uniform(&mut s) < w.get(i, j))
}

/// Latent positions, probabilities and edges in one pass. Produces exactly
/// `sample_adjacency(&probability_matrix(g, &sample_latent(n, seed)?, rho)?, seed)`
/// without materializing `W`.
pub fn sample_network(g: &Graphon, rho: f64, n: usize, seed: u64) -> Result<AdjacencyMatrix> {
    check_rho(rho)?;
    let x = sample_latent(n, seed)?;
    let mut s = rng::stream(seed, "adjacency", 0);
    let adj = match g {
        Graphon::BlockModel { b, .. } => {
            let z: Vec<usize> = x
                .positions
                .iter()
                .map(|&u| g.block_of(u).unwrap())
                .collect();
            let p: Vec<Vec<f64>> = b
                .iter()
                .map(|row| row.iter().map(|&v| rho * v).collect())
                .collect();
            AdjacencyMatrix::from_upper_fn(n, |i, j| rng::uniform(&mut s) < p[z[i]][z[j]])
        }
        _ => AdjacencyMatrix::from_upper_fn(n, |i, j| {
            rng::uniform(&mut s) < rho * g.eval(x.positions[i], x.positions[j])
        }),
    };
    Ok(adj)
}

/// How to compute a population quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentMethod {
    /// Enumerate all block assignments (block models only).
    ExactBlockModel,
    /// Average over `m ≥ 10⁴` i.i.d. latent draws.
    MonteCarlo { m: usize, seed: u64 },
}

/// A value with its standard error (zero for exact computations).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

const MIN_MC_DRAWS: usize = 10_000;

/// Inner draws per conditional expectation in the nested Monte Carlo for
/// Hoeffding projections.
pub const INNER_DRAWS: usize = 64;

fn h_at(g: &Graphon, rho: f64, motif: &Motif, xs: &[f64], p: &mut [f64]) -> f64 {
    for (k, &(a, b)) in motif.pairs().iter().enumerate() {
        p[k] = rho * g.eval(xs[a], xs[b]);
    }
    motif.h_prob(p)
}

fn mean_and_se(sum: f64, sum_sq: f64, m: usize) -> Estimate {
    let mf = m as f64;
    let mean = sum / mf;
    let var = ((sum_sq - mf * mean * mean) / (mf - 1.0)).max(0.0);
    Estimate {
        value: mean,
        std_error: (var / mf).sqrt(),
    }
}

fn check_mc(m: usize) -> Result<()> {
    if m < MIN_MC_DRAWS {
        return Err(Error::Parameter(format!(
            "Monte Carlo needs at least {MIN_MC_DRAWS} draws, got {m}"
        )));
    }
    Ok(())
}

/// Block-assignment sums `S1[k] = Σ w(z)·h(z)` over `z` with `z_1 = k` and
/// `S2[k][l]` likewise with `(z_1, z_2) = (k, l)`.
struct BlockSums {
    mu: f64,
    cond1: Vec<f64>,
    cond2: Vec<Vec<f64>>,
}

fn block_sums(pi: &[f64], b: &[Vec<f64>], rho: f64, motif: &Motif) -> BlockSums {
    let k = pi.len();
    let r = motif.r();
    let mut z = vec![0usize; r];
    let mut p = vec![0.0; motif.pairs().len()];
    let mut mu = 0.0;
    let mut s1 = vec![0.0; k];
    let mut s2 = vec![vec![0.0; k]; k];
    loop {
        let weight: f64 = z.iter().map(|&zi| pi[zi]).product();
        if weight > 0.0 {
            for (idx, &(a, c)) in motif.pairs().iter().enumerate() {
                p[idx] = rho * b[z[a]][z[c]];
            }
            let h = weight * motif.h_prob(&p);
            mu += h;
            s1[z[0]] += h;
            s2[z[0]][z[1]] += h;
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == r {
                let cond1 = (0..k)
                    .map(|a| if pi[a] > 0.0 { s1[a] / pi[a] } else { 0.0 })
                    .collect();
                let cond2 = (0..k)
                    .map(|a| {
                        (0..k)
                            .map(|c| {
                                let w = pi[a] * pi[c];
                                if w > 0.0 {
                                    s2[a][c] / w
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect();
                return BlockSums { mu, cond1, cond2 };
            }
            z[pos] += 1;
            if z[pos] < k {
                break;
            }
            z[pos] = 0;
            pos += 1;
        }
    }
}

/// `mu = E[h(A_{1..r})]`.
pub fn population_moment(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    method: MomentMethod,
) -> Result<Estimate> {
    check_rho(rho)?;
    match method {
        MomentMethod::ExactBlockModel => {
            let Graphon::BlockModel { pi, b } = g else {
                return Err(Error::Parameter(
                    "exact enumeration requires a block model".into(),
                ));
            };
            Ok(Estimate {
                value: block_sums(pi, b, rho, motif).mu,
                std_error: 0.0,
            })
        }
        MomentMethod::MonteCarlo { m, seed } => {
            check_mc(m)?;
            let mut s = rng::stream(seed, "population-moment", 0);
            let r = motif.r();
            let mut xs = vec![0.0; r];
            let mut p = vec![0.0; motif.pairs().len()];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..m {
                for x in xs.iter_mut() {
                    *x = rng::uniform(&mut s);
                }
                let h = h_at(g, rho, motif, &xs, &mut p);
                sum += h;
                sum_sq += h * h;
            }
            Ok(mean_and_se(sum, sum_sq, m))
        }
    }
}

/// Population quantities entering the one-term Edgeworth expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PopulationCoefficients {
    pub mu: f64,
    /// `ξ₁ = sd(g₁(X₁))`
    pub xi1: f64,
    /// `E[g₁(X₁)³]`
    pub e_g1_cubed: f64,
    /// `E[g₁(X₁) g₁(X₂) g₂(X₁, X₂)]`
    pub e_g1g1g2: f64,
    /// Standard errors of `(ξ₁², E[g₁³], E[g₁g₁g₂])`; zero when exact.
    pub std_errors: [f64; 3],
    /// Monte-Carlo mean of `g₁` with its standard error (exact: `(0, 0)`).
    pub mean_g1: Estimate,
}

/// Computes `ξ₁`, `E[g₁³]` and `E[g₁g₁g₂]` where
/// `g₁(x) = E[h | X₁ = x] − mu` and
/// `g₂(x, y) = E[h | X₁ = x, X₂ = y] − mu − g₁(x) − g₁(y)`.
///
/// Block models are enumerated exactly: `g₁` takes one value per block.
/// Otherwise a nested Monte Carlo runs `m` outer draws; every conditional
/// expectation is an average of [`INNER_DRAWS`] inner draws, and each product
/// of projections is formed from independent inner averages (the centering
/// `mu` included), so the products are unbiased given the outer draws.
pub fn population_edgeworth_coefficients(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    method: MomentMethod,
) -> Result<PopulationCoefficients> {
    check_rho(rho)?;
    let out = match method {
        MomentMethod::ExactBlockModel => {
            let Graphon::BlockModel { pi, b } = g else {
                return Err(Error::Parameter(
                    "exact enumeration requires a block model".into(),
                ));
            };
            exact_block_coefficients(pi, b, rho, motif)
        }
        MomentMethod::MonteCarlo { m, seed } => {
            check_mc(m)?;
            nested_mc_coefficients(g, rho, motif, m, seed)
        }
    };
    let floor = 1e-10 * rho.powi(motif.s() as i32);
    if !(out.xi1 > floor) {
        return Err(Error::Degenerate(format!(
            "xi1 = {} is below {floor:e}; g1 is degenerate",
            out.xi1
        )));
    }
    Ok(out)
}

fn exact_block_coefficients(
    pi: &[f64],
    b: &[Vec<f64>],
    rho: f64,
    motif: &Motif,
) -> PopulationCoefficients {
    let sums = block_sums(pi, b, rho, motif);
    let k = pi.len();
    let g1: Vec<f64> = sums.cond1.iter().map(|c| c - sums.mu).collect();
    let mut xi_sq = 0.0;
    let mut e3 = 0.0;
    let mut e112 = 0.0;
    for a in 0..k {
        xi_sq += pi[a] * g1[a] * g1[a];
        e3 += pi[a] * g1[a].powi(3);
        for c in 0..k {
            let g2 = sums.cond2[a][c] - sums.mu - g1[a] - g1[c];
            e112 += pi[a] * pi[c] * g1[a] * g1[c] * g2;
        }
    }
    PopulationCoefficients {
        mu: sums.mu,
        xi1: xi_sq.max(0.0).sqrt(),
        e_g1_cubed: e3,
        e_g1g1g2: e112,
        std_errors: [0.0; 3],
        mean_g1: Estimate {
            value: pi.iter().zip(&g1).map(|(p, v)| p * v).sum(),
            std_error: 0.0,
        },
    }
}

fn nested_mc_coefficients(
    g: &Graphon,
    rho: f64,
    motif: &Motif,
    m: usize,
    seed: u64,
) -> PopulationCoefficients {
    let mu = population_moment(g, rho, motif, MomentMethod::MonteCarlo { m, seed })
        .expect("validated above")
        .value;
    let r = motif.r();
    let mut s = rng::stream(seed, "population-coefficients", 0);
    let mut xs = vec![0.0; r];
    let mut p = vec![0.0; motif.pairs().len()];

    // Average of h with the first `fixed.len()` latent positions pinned.
    let mut cond = |s: &mut Stream, fixed: &[f64]| -> f64 {
        let mut acc = 0.0;
        for _ in 0..INNER_DRAWS {
            xs[..fixed.len()].copy_from_slice(fixed);
            for x in xs[fixed.len()..].iter_mut() {
                *x = rng::uniform(s);
            }
            acc += h_at(g, rho, motif, &xs, &mut p);
        }
        acc / INNER_DRAWS as f64
    };

    let mut acc = [[0.0f64; 2]; 4];
    let push = |acc: &mut [f64; 2], v: f64| {
        acc[0] += v;
        acc[1] += v * v;
    };
    for _ in 0..m {
        let x = rng::uniform(&mut s);
        let y = rng::uniform(&mut s);
        // Each factor is centered by its own unpinned inner average, so no
        // shared estimate of mu leaks bias into the products.
        let gx: [f64; 3] = std::array::from_fn(|_| cond(&mut s, &[x]) - cond(&mut s, &[]));
        let gy: [f64; 2] = std::array::from_fn(|_| cond(&mut s, &[y]) - cond(&mut s, &[]));
        let g2 = if r >= 2 {
            cond(&mut s, &[x, y]) - cond(&mut s, &[]) - gx[1] - gy[1]
        } else {
            0.0
        };
        push(&mut acc[0], gx[0] * gx[1]);
        push(&mut acc[1], gx[0] * gx[1] * gx[2]);
        push(&mut acc[2], gx[0] * gy[0] * g2);
        push(&mut acc[3], gx[2]);
    }
    let xi_sq = mean_and_se(acc[0][0], acc[0][1], m);
    let e3 = mean_and_se(acc[1][0], acc[1][1], m);
    let e112 = mean_and_se(acc[2][0], acc[2][1], m);
    PopulationCoefficients {
        mu,
        xi1: xi_sq.value.max(0.0).sqrt(),
        e_g1_cubed: e3.value,
        e_g1g1g2: e112.value,
        std_errors: [xi_sq.std_error, e3.std_error, e112.std_error],
        mean_g1: mean_and_se(acc[3][0], acc[3][1], m),
    }
}
