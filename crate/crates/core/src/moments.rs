//! Sample network moments as U-statistics, and their Hoeffding projection
//! estimates.
//!
//! Everything here starts from integer motif counts:
//!
//! * `N`: number of `r`-subsets whose induced subgraph contains the motif,
//! * `N_i`: how many of those subsets include node `i`,
//! * `N_ij`: how many include both `i` and `j`.
//!
//! Then `Û = N / C(n,r)`, `ĝ₁(i) = N_i / C(n-1,r-1) − Û`, and
//! `ĝ₂(i,j) = N_ij / C(n-2,r-2) − Û − ĝ₁(i) − ĝ₁(j)`. Counts are exact
//! 64-bit integers and are divided once at the end.

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::motif::{FastKind, Motif, MAX_NODES};
use serde::Serialize;

/// `C(n, k)`, exact.
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Work limits for the enumeration paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostLimits {
    /// Largest `C(n, r)` the generic subset enumeration will visit.
    pub max_subsets: u64,
    /// Largest `n` for pair projections of motifs without a closed form.
    pub max_pair_nodes: usize,
}

impl Default for CostLimits {
    fn default() -> Self {
        Self {
            max_subsets: 100_000_000,
            max_pair_nodes: 256,
        }
    }
}

impl CostLimits {
    pub fn unlimited() -> Self {
        Self {
            max_subsets: u64::MAX,
            max_pair_nodes: usize::MAX,
        }
    }
}

/// Symmetric `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }
}

/// Integer motif counts on a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotifCounts {
    pub n: usize,
    pub r: usize,
    pub total: u64,
    pub per_node: Vec<u64>,
    /// `n × n`, symmetric, zero diagonal. Present when requested.
    pub per_pair: Option<Vec<u64>>,
}

fn check_size(a: &AdjacencyMatrix, motif: &Motif) -> Result<()> {
    if a.n() < motif.r() {
        return Err(Error::InvalidSize(format!(
            "graph has {} nodes, motif needs {}",
            a.n(),
            motif.r()
        )));
    }
    Ok(())
}

/// Counts motif-containing subsets, per node and optionally per pair.
pub fn count_motif(
    a: &AdjacencyMatrix,
    motif: &Motif,
    with_pairs: bool,
    limits: &CostLimits,
) -> Result<MotifCounts> {
    check_size(a, motif)?;
    let counts = match motif.fast_kind() {
        Some(FastKind::Edge) => count_edges(a, with_pairs),
        Some(FastKind::Triangle) => count_triangles(a, with_pairs),
        Some(FastKind::Vshape) => count_vshapes(a, with_pairs),
        None => {
            let subsets = binom(a.n(), motif.r());
            if subsets > limits.max_subsets {
                return Err(Error::CostCap(format!(
                    "C({}, {}) = {subsets} subsets exceeds the limit {}",
                    a.n(),
                    motif.r(),
                    limits.max_subsets
                )));
            }
            if with_pairs && a.n() > limits.max_pair_nodes {
                return Err(Error::CostCap(format!(
                    "pair projection for this motif is limited to {} nodes, got {}",
                    limits.max_pair_nodes,
                    a.n()
                )));
            }
            count_generic(a, motif, with_pairs)
        }
    };
    Ok(counts)
}

fn count_edges(a: &AdjacencyMatrix, with_pairs: bool) -> MotifCounts {
    let n = a.n();
    let per_node: Vec<u64> = (0..n).map(|i| a.degree(i) as u64).collect();
    let per_pair = with_pairs.then(|| {
        let mut p = vec![0u64; n * n];
        for (i, j) in a.edges() {
            p[i * n + j] = 1;
            p[j * n + i] = 1;
        }
        p
    });
    MotifCounts {
        n,
        r: 2,
        total: a.edge_count() as u64,
        per_node,
        per_pair,
    }
}

/// Common-neighbor counts over edges: `(c_ij for each edge, t_i per node, T)`.
fn triangle_parts(a: &AdjacencyMatrix) -> (Vec<(usize, usize, u64)>, Vec<u64>, u64) {
    let n = a.n();
    let mut per_edge = Vec::with_capacity(a.edge_count());
    let mut twice_t = vec![0u64; n];
    let mut thrice_total = 0u64;
    for (i, j) in a.edges() {
        let c = a.common_neighbors(i, j) as u64;
        per_edge.push((i, j, c));
        twice_t[i] += c;
        twice_t[j] += c;
        thrice_total += c;
    }
    let t = twice_t.into_iter().map(|x| x / 2).collect();
    (per_edge, t, thrice_total / 3)
}

fn count_triangles(a: &AdjacencyMatrix, with_pairs: bool) -> MotifCounts {
    let n = a.n();
    let (per_edge, per_node, total) = triangle_parts(a);
    let per_pair = with_pairs.then(|| {
        let mut p = vec![0u64; n * n];
        for &(i, j, c) in &per_edge {
            p[i * n + j] = c;
            p[j * n + i] = c;
        }
        p
    });
    MotifCounts {
        n,
        r: 3,
        total,
        per_node,
        per_pair,
    }
}

fn count_vshapes(a: &AdjacencyMatrix, with_pairs: bool) -> MotifCounts {
    // A 3-subset contains a 2-star iff it spans at least two edges. Counting
    // 2-paths by their centre visits each 2-edge subset once and each
    // triangle three times.
    let n = a.n();
    let (_, t, triangles) = triangle_parts(a);
    let d: Vec<u64> = a.degrees().into_iter().map(|x| x as u64).collect();
    let choose2 = |x: u64| x * x.saturating_sub(1) / 2;
    let total = d.iter().map(|&x| choose2(x)).sum::<u64>() - 2 * triangles;
    let per_node = (0..n)
        .map(|i| {
            let as_leaf: u64 = a.neighbors(i).iter().map(|&j| d[j as usize] - 1).sum();
            choose2(d[i]) + as_leaf - 2 * t[i]
        })
        .collect();
    let per_pair = with_pairs.then(|| {
        let mut p = vec![0u64; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = a.common_neighbors(i, j) as u64;
                let v = if a.has_edge(i, j) {
                    d[i] + d[j] - c - 2
                } else {
                    c
                };
                p[i * n + j] = v;
                p[j * n + i] = v;
            }
        }
        p
    });
    MotifCounts {
        n,
        r: 3,
        total,
        per_node,
        per_pair,
    }
}

struct Enumerator<'a> {
    a: &'a AdjacencyMatrix,
    motif: &'a Motif,
    pair_bit: [[u16; MAX_NODES]; MAX_NODES],
    chosen: [usize; MAX_NODES],
    total: u64,
    per_node: Vec<u64>,
    per_pair: Option<Vec<u64>>,
}

impl Enumerator<'_> {
    fn visit(&mut self, level: usize, start: usize, mask: u16) {
        let r = self.motif.r();
        let n = self.a.n();
        if level == r {
            if self.motif.contains_mask(mask) {
                self.total += 1;
                for &v in &self.chosen[..r] {
                    self.per_node[v] += 1;
                }
                if let Some(p) = self.per_pair.as_mut() {
                    for x in 0..r {
                        for y in (x + 1)..r {
                            p[self.chosen[x] * n + self.chosen[y]] += 1;
                        }
                    }
                }
            }
            return;
        }
        for v in start..=(n - (r - level)) {
            let mut m = mask;
            for b in 0..level {
                if self.a.has_edge(self.chosen[b], v) {
                    m |= self.pair_bit[b][level];
                }
            }
            self.chosen[level] = v;
            self.visit(level + 1, v + 1, m);
        }
    }
}

fn count_generic(a: &AdjacencyMatrix, motif: &Motif, with_pairs: bool) -> MotifCounts {
    let n = a.n();
    let mut pair_bit = [[0u16; MAX_NODES]; MAX_NODES];
    for (k, &(x, y)) in motif.pairs().iter().enumerate() {
        pair_bit[x][y] = 1 << k;
    }
    let mut e = Enumerator {
        a,
        motif,
        pair_bit,
        chosen: [0; MAX_NODES],
        total: 0,
        per_node: vec![0; n],
        per_pair: with_pairs.then(|| vec![0; n * n]),
    };
    e.visit(0, 0, 0);
    let mut per_pair = e.per_pair;
    if let Some(p) = per_pair.as_mut() {
        for i in 0..n {
            for j in (i + 1)..n {
                p[j * n + i] = p[i * n + j];
            }
        }
    }
    MotifCounts {
        n,
        r: motif.r(),
        total: e.total,
        per_node: e.per_node,
        per_pair,
    }
}

impl MotifCounts {
    pub fn u_hat(&self) -> f64 {
        self.total as f64 / binom(self.n, self.r) as f64
    }

    /// `ĝ₁(i) = (n·N_i − r·N) / (n·C(n−1, r−1))`; the numerators sum to zero
    /// exactly.
    pub fn g1(&self) -> Vec<f64> {
        let n = self.n as i128;
        let rn = self.r as i128 * self.total as i128;
        let denom = self.n as f64 * binom(self.n - 1, self.r - 1) as f64;
        self.per_node
            .iter()
            .map(|&c| (n * c as i128 - rn) as f64 / denom)
            .collect()
    }

    /// Leave-one-out moments `Û^{(−i)} = (N − N_i) / C(n−1, r)`.
    pub fn leave_one_out(&self) -> Vec<f64> {
        let d = binom(self.n - 1, self.r) as f64;
        self.per_node
            .iter()
            .map(|&c| (self.total - c) as f64 / d)
            .collect()
    }
}

pub fn sample_moment(a: &AdjacencyMatrix, motif: &Motif) -> Result<f64> {
    Ok(count_motif(a, motif, false, &CostLimits::default())?.u_hat())
}

/// `ĝ₁(X_i)` for every node.
pub fn local_projection(a: &AdjacencyMatrix, motif: &Motif) -> Result<Vec<f64>> {
    Ok(count_motif(a, motif, false, &CostLimits::default())?.g1())
}

/// `ĝ₂(X_i, X_j)` given `ĝ₁` and `Û`.
pub fn pair_projection(
    a: &AdjacencyMatrix,
    motif: &Motif,
    g1: &[f64],
    u_hat: f64,
) -> Result<SymMatrix> {
    pair_projection_with(a, motif, g1, u_hat, &CostLimits::default())
}

pub fn pair_projection_with(
    a: &AdjacencyMatrix,
    motif: &Motif,
    g1: &[f64],
    u_hat: f64,
    limits: &CostLimits,
) -> Result<SymMatrix> {
    let counts = count_motif(a, motif, true, limits)?;
    if g1.len() != a.n() {
        return Err(Error::InvalidSize(format!(
            "g1 has {} entries for {} nodes",
            g1.len(),
            a.n()
        )));
    }
    Ok(g2_from_counts(&counts, g1, u_hat))
}

fn g2_from_counts(counts: &MotifCounts, g1: &[f64], u_hat: f64) -> SymMatrix {
    let n = counts.n;
    let pairs = counts.per_pair.as_ref().expect("pair counts requested");
    let d = binom(n - 2, counts.r - 2) as f64;
    let mut g2 = SymMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            g2.set(i, j, pairs[i * n + j] as f64 / d - u_hat - g1[i] - g1[j]);
        }
    }
    g2
}

/// `Ŝ² = (r²/n²) Σ ĝ₁(i)²`.
pub fn variance_estimator(g1: &[f64], r: usize) -> f64 {
    let n = g1.len() as f64;
    let ss: f64 = g1.iter().map(|x| x * x).sum();
    (r * r) as f64 / (n * n) * ss
}

/// Jackknife variance: `n·Ŝ²_jack = (n−1) Σ (Û^{(−i)} − Û)²`.
///
/// The leave-one-out moments come from the same integer counts:
/// the subsets avoiding `i` number `N − N_i` out of `C(n−1, r)`.
pub fn jackknife_variance(a: &AdjacencyMatrix, motif: &Motif) -> Result<f64> {
    jackknife_variance_with(a, motif, &CostLimits::default())
}

pub fn jackknife_variance_with(
    a: &AdjacencyMatrix,
    motif: &Motif,
    limits: &CostLimits,
) -> Result<f64> {
    if a.n() < motif.r() + 1 {
        return Err(Error::InvalidSize(format!(
            "jackknife needs at least {} nodes, got {}",
            motif.r() + 1,
            a.n()
        )));
    }
    let counts = count_motif(a, motif, false, limits)?;
    Ok(jackknife_from_counts(&counts))
}

fn jackknife_from_counts(counts: &MotifCounts) -> f64 {
    let n = counts.n as f64;
    let u = counts.u_hat();
    let ss: f64 = counts
        .leave_one_out()
        .iter()
        .map(|v| (v - u) * (v - u))
        .sum();
    (n - 1.0) / n * ss
}

/// Plug-in Edgeworth moments `(ξ̂₁², Ê[g₁³], Ê[g₁g₁g₂])`.
pub fn edgeworth_coefficients(g1: &[f64], g2: &SymMatrix) -> (f64, f64, f64) {
    let n = g1.len();
    let nf = n as f64;
    let xi_sq = g1.iter().map(|x| x * x).sum::<f64>() / nf;
    let e3 = g1.iter().map(|x| x * x * x).sum::<f64>() / nf;
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += g1[j] * g2.get(i, j);
        }
        acc += g1[i] * row;
    }
    let e112 = if n >= 2 {
        acc / binom(n, 2) as f64
    } else {
        0.0
    };
    (xi_sq, e3, e112)
}

/// Everything the empirical Edgeworth expansion needs from one graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentStats {
    pub n: usize,
    pub r: usize,
    pub motif: String,
    pub u_hat: f64,
    /// `Ŝ²`, with `n·Ŝ² = r²·ξ̂₁²`.
    pub s_hat_sq: f64,
    pub g1_hat: Vec<f64>,
    #[serde(skip)]
    pub g2_hat: SymMatrix,
    pub xi1_hat_sq: f64,
    pub e_g1_cubed: f64,
    pub e_g1g1g2: f64,
    /// Set when `Ŝ = 0`, e.g. on empty or complete graphs.
    pub degenerate: bool,
}

impl MomentStats {
    pub fn s_hat(&self) -> f64 {
        self.s_hat_sq.sqrt()
    }
}

pub fn compute_stats(a: &AdjacencyMatrix, motif: &Motif) -> Result<MomentStats> {
    compute_stats_with(a, motif, &CostLimits::default())
}

pub fn compute_stats_with(
    a: &AdjacencyMatrix,
    motif: &Motif,
    limits: &CostLimits,
) -> Result<MomentStats> {
    let counts = count_motif(a, motif, true, limits)?;
    let u_hat = counts.u_hat();
    let g1 = counts.g1();
    let g2 = g2_from_counts(&counts, &g1, u_hat);
    let (xi1_hat_sq, e_g1_cubed, e_g1g1g2) = edgeworth_coefficients(&g1, &g2);
    let s_hat_sq = variance_estimator(&g1, motif.r());
    Ok(MomentStats {
        n: a.n(),
        r: motif.r(),
        motif: motif.label(),
        u_hat,
        s_hat_sq,
        g1_hat: g1,
        g2_hat: g2,
        xi1_hat_sq,
        e_g1_cubed,
        e_g1g1g2,
        degenerate: s_hat_sq == 0.0,
    })
}

/// How a replicate's variance is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum Studentization {
    #[default]
    Plugin,
    Jackknife,
}

/// `(Û, Ŝ)` without the pair projection; `Ŝ` per `studentization`.
pub fn moment_and_scale(
    a: &AdjacencyMatrix,
    motif: &Motif,
    studentization: Studentization,
    limits: &CostLimits,
) -> Result<(f64, f64)> {
    let counts = count_motif(a, motif, false, limits)?;
    let var = match studentization {
        Studentization::Plugin => variance_estimator(&counts.g1(), motif.r()),
        Studentization::Jackknife => {
            if a.n() < motif.r() + 1 {
                return Err(Error::InvalidSize("jackknife needs n > r".into()));
            }
            jackknife_from_counts(&counts)
        }
    };
    Ok((counts.u_hat(), var.sqrt()))
}
