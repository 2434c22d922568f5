//! Motifs, the containment indicator `h`, and its conditional expectation
//! given edge probabilities.
//!
//! A motif on `r ≤ 5` nodes is stored with a lookup table over all
//! `2^C(r,2)` edge patterns of an `r`-node graph: `table[mask]` says whether
//! the pattern contains the motif up to relabeling. The table is built once
//! with the permutation search in [`contains`] and then makes `h` a single
//! lookup in the counting loops.

use crate::error::{Error, Result};
use std::fmt;

pub const MAX_NODES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ShapeClass {
    /// The edge set is a forest; for a connected motif, a tree.
    Acyclic,
    /// Connected and contains at least one cycle.
    Cyclic,
}

/// Motifs with closed-form counting routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastKind {
    Edge,
    Triangle,
    Vshape,
}

type Square = [[bool; MAX_NODES]; MAX_NODES];

#[derive(Clone)]
pub struct Motif {
    name: Option<String>,
    r: usize,
    s: usize,
    adj: Square,
    shape: ShapeClass,
    pairs: Vec<(usize, usize)>,
    table: Vec<bool>,
    containing: Vec<u16>,
}

impl fmt::Debug for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Motif")
            .field("name", &self.name)
            .field("r", &self.r)
            .field("s", &self.s)
            .field("shape", &self.shape)
            .field("edges", &self.edges())
            .finish()
    }
}

impl PartialEq for Motif {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.adj == other.adj
    }
}

/// Unordered node pairs `(a, b)`, `a < b`, in lexicographic order. The
/// position of a pair in this list is its bit in a pattern mask.
pub fn pair_list(r: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(r * (r - 1) / 2);
    for a in 0..r {
        for b in (a + 1)..r {
            out.push((a, b));
        }
    }
    out
}

impl Motif {
    /// Validates a square 0/1 matrix and classifies it.
    pub fn new(adjacency: &[Vec<u8>]) -> Result<Self> {
        let r = adjacency.len();
        if r > MAX_NODES {
            return Err(Error::SizeCap(r));
        }
        if r < 2 {
            return Err(Error::InvalidMatrix(
                "a motif needs at least 2 nodes".into(),
            ));
        }
        let adj = square_from_rows(adjacency, r)?;
        if !is_connected(&adj, r) {
            return Err(Error::NotConnected);
        }
        let s = (0..r)
            .flat_map(|a| ((a + 1)..r).map(move |b| (a, b)))
            .filter(|&(a, b)| adj[a][b])
            .count();
        let shape = if s == r - 1 {
            ShapeClass::Acyclic
        } else {
            ShapeClass::Cyclic
        };
        let pairs = pair_list(r);
        let mut motif = Self {
            name: None,
            r,
            s,
            adj,
            shape,
            pairs,
            table: Vec::new(),
            containing: Vec::new(),
        };
        let patterns = 1usize << motif.pairs.len();
        let mut table = vec![false; patterns];
        for (mask, slot) in table.iter_mut().enumerate() {
            let sub = motif.square_from_mask(mask as u16);
            *slot = embeds(&sub, &motif);
        }
        motif.containing = (0..patterns)
            .filter(|&m| table[m])
            .map(|m| m as u16)
            .collect();
        motif.table = table;
        Ok(motif)
    }

    /// Builds a motif from 1-based edges on `nodes` nodes.
    pub fn from_edge_list(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if nodes > MAX_NODES {
            return Err(Error::SizeCap(nodes));
        }
        let mut rows = vec![vec![0u8; nodes]; nodes];
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > nodes || b > nodes {
                return Err(Error::InvalidMatrix(format!(
                    "motif edge ({a}, {b}) out of range 1..={nodes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidMatrix(format!("self-loop at motif node {a}")));
            }
            rows[a - 1][b - 1] = 1;
            rows[b - 1][a - 1] = 1;
        }
        Self::new(&rows)
    }

    pub fn edge() -> Self {
        Self::from_edge_list(2, &[(1, 2)]).unwrap().named("edge")
    }

    pub fn triangle() -> Self {
        Self::from_edge_list(3, &[(1, 2), (1, 3), (2, 3)])
            .unwrap()
            .named("triangle")
    }

    /// The 2-star: a triangle with one edge removed.
    pub fn vshape() -> Self {
        Self::from_edge_list(3, &[(1, 2), (1, 3)])
            .unwrap()
            .named("vshape")
    }

    pub fn three_star() -> Self {
        Self::from_edge_list(4, &[(1, 2), (1, 3), (1, 4)])
            .unwrap()
            .named("threestar")
    }

    /// Looks up a built-in motif: `edge`, `triangle`, `vshape`, `threestar`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "edge" => Ok(Self::edge()),
            "triangle" => Ok(Self::triangle()),
            "vshape" | "v-shape" | "2-star" => Ok(Self::vshape()),
            "threestar" | "three-star" | "3-star" => Ok(Self::three_star()),
            other => Err(Error::Parameter(format!("unknown motif {other:?}"))),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// A display label: the name if set, else the edge list.
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => {
                let e: Vec<String> = self
                    .edges()
                    .iter()
                    .map(|(a, b)| format!("{}-{}", a + 1, b + 1))
                    .collect();
                format!("r{}:{}", self.r, e.join("_"))
            }
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn shape(&self) -> ShapeClass {
        self.shape
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    /// 0-based edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .copied()
            .filter(|&(a, b)| self.adj[a][b])
            .collect()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn fast_kind(&self) -> Option<FastKind> {
        match (self.r, self.s) {
            (2, 1) => Some(FastKind::Edge),
            (3, 3) => Some(FastKind::Triangle),
            (3, 2) => Some(FastKind::Vshape),
            _ => None,
        }
    }

    /// `h` on an edge pattern given as a mask over [`Motif::pairs`].
    #[inline]
    pub fn contains_mask(&self, mask: u16) -> bool {
        self.table[mask as usize]
    }

    /// `E[h(A_sub) | W_sub]` for independent edges with probabilities `p`
    /// listed in [`Motif::pairs`] order. No range checks.
    pub fn h_prob(&self, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.pairs.len());
        let mut total = 0.0;
        for &mask in &self.containing {
            let mut term = 1.0;
            for (k, &pk) in p.iter().enumerate() {
                term *= if mask >> k & 1 == 1 { pk } else { 1.0 - pk };
            }
            total += term;
        }
        total
    }

    fn square_from_mask(&self, mask: u16) -> Square {
        let mut sub = [[false; MAX_NODES]; MAX_NODES];
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                sub[a][b] = true;
                sub[b][a] = true;
            }
        }
        sub
    }
}

fn square_from_rows(rows: &[Vec<u8>], r: usize) -> Result<Square> {
    let mut sq = [[false; MAX_NODES]; MAX_NODES];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != r {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        for (j, &v) in row.iter().enumerate() {
            if v > 1 {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) is not binary"
                )));
            }
            if v != rows[j][i] {
                return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
            }
            if i == j && v != 0 {
                return Err(Error::InvalidMatrix(format!("self-loop at node {i}")));
            }
            sq[i][j] = v == 1;
        }
    }
    Ok(sq)
}

fn is_connected(adj: &Square, r: usize) -> bool {
    let mut seen = [false; MAX_NODES];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..r {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen[..r].iter().all(|&x| x)
}

fn degrees(adj: &Square, r: usize) -> [usize; MAX_NODES] {
    let mut d = [0; MAX_NODES];
    for a in 0..r {
        d[a] = (0..r).filter(|&b| adj[a][b]).count();
    }
    d
}

/// Whether some relabeling `π` of the motif satisfies `sub[π(a)][π(b)] ≥ R[a][b]`.
fn embeds(sub: &Square, motif: &Motif) -> bool {
    let r = motif.r;
    let dsub = degrees(sub, r);
    let dmot = degrees(&motif.adj, r);

    // The sorted degree sequence of `sub` must dominate the motif's.
    let mut ds = dsub[..r].to_vec();
    let mut dm = dmot[..r].to_vec();
    ds.sort_unstable_by(|a, b| b.cmp(a));
    dm.sort_unstable_by(|a, b| b.cmp(a));
    if ds.iter().zip(&dm).any(|(s, m)| s < m) {
        return false;
    }

    let mut image = [usize::MAX; MAX_NODES];
    let mut used = [false; MAX_NODES];
    assign(0, sub, motif, &dsub, &dmot, &mut image, &mut used)
}

fn assign(
    a: usize,
    sub: &Square,
    motif: &Motif,
    dsub: &[usize; MAX_NODES],
    dmot: &[usize; MAX_NODES],
    image: &mut [usize; MAX_NODES],
    used: &mut [bool; MAX_NODES],
) -> bool {
    let r = motif.r;
    if a == r {
        return true;
    }
    for v in 0..r {
        if used[v] || dsub[v] < dmot[a] {
            continue;
        }
        let ok = (0..a).all(|b| !motif.adj[a][b] || sub[v][image[b]]);
        if !ok {
            continue;
        }
        image[a] = v;
        used[v] = true;
        if assign(a + 1, sub, motif, dsub, dmot, image, used) {
            return true;
        }
        used[v] = false;
    }
    false
}

/// `h(sub)`: 1 iff the `r × r` binary matrix contains the motif up to relabeling.
pub fn contains(sub: &[Vec<u8>], motif: &Motif) -> Result<bool> {
    if sub.len() != motif.r {
        return Err(Error::InvalidSize(format!(
            "subgraph has {} nodes, motif has {}",
            sub.len(),
            motif.r
        )));
    }
    let sq = square_from_rows(sub, motif.r)?;
    Ok(embeds(&sq, motif))
}

/// `E[h(A_sub) | W_sub]` for an `r × r` symmetric probability matrix with
/// zero diagonal, summing over every edge pattern.
pub fn conditional_expectation_h(wsub: &[Vec<f64>], motif: &Motif) -> Result<f64> {
    let r = motif.r;
    if wsub.len() != r || wsub.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidSize(format!("expected a {r} x {r} matrix")));
    }
    for i in 0..r {
        for j in 0..r {
            let v = wsub[i][j];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) = {v} outside [0, 1]"
                )));
            }
            if v != wsub[j][i] {
                return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
            }
        }
        if wsub[i][i] != 0.0 {
            return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
        }
    }
    let p: Vec<f64> = motif.pairs.iter().map(|&(a, b)| wsub[a][b]).collect();
    Ok(motif.h_prob(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: usize, edges: &[(usize, usize)]) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; r]; r];
        for &(a, b) in edges {
            m[a][b] = 1;
            m[b][a] = 1;
        }
        m
    }

    #[test]
    fn shape_classification() {
        assert_eq!(Motif::triangle().shape(), ShapeClass::Cyclic);
        assert_eq!(Motif::three_star().shape(), ShapeClass::Acyclic);
        assert_eq!(Motif::vshape().shape(), ShapeClass::Acyclic);
        assert_eq!(Motif::edge().shape(), ShapeClass::Acyclic);
        let square = Motif::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(square.shape(), ShapeClass::Cyclic);
        assert_eq!(Motif::three_star().s(), 3);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Motif::new(&rows(4, &[(0, 1), (2, 3)])),
            Err(Error::NotConnected)
        ));
        assert!(matches!(
            Motif::new(&[vec![0, 1], vec![0, 0]]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            Motif::new(&[vec![1, 1], vec![1, 0]]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(Motif::new(&rows(6, &[])), Err(Error::SizeCap(6))));
        assert!(Motif::builtin("pentagon").is_err());
    }

    #[test]
    fn contains_examples() {
        let tri = rows(3, &[(0, 1), (0, 2), (1, 2)]);
        let path = rows(3, &[(0, 1), (1, 2)]);
        assert!(contains(&tri, &Motif::vshape()).unwrap());
        assert!(!contains(&path, &Motif::triangle()).unwrap());
        assert!(contains(&path, &Motif::vshape()).unwrap());
        assert!(!contains(&rows(2, &[]), &Motif::edge()).unwrap());
        assert!(contains(&rows(2, &[]), &Motif::triangle()).is_err());
    }

    #[test]
    fn vshape_needs_two_edges() {
        let m = Motif::vshape();
        for mask in 0u16..8 {
            assert_eq!(
                m.contains_mask(mask),
                mask.count_ones() >= 2,
                "mask {mask:b}"
            );
        }
    }

    #[test]
    fn three_star_patterns() {
        let m = Motif::three_star();
        // a path on 4 nodes has no node of degree 3
        let path = rows(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(!contains(&path, &m).unwrap());
        let star = rows(4, &[(3, 0), (3, 1), (3, 2)]);
        assert!(contains(&star, &m).unwrap());
        // patterns containing a degree-3 node among 4 nodes
        let expected = (0u16..64)
            .filter(|&mask| {
                let mut d = [0; 4];
                for (k, &(a, b)) in m.pairs().iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        d[a] += 1;
                        d[b] += 1;
                    }
                }
                d.contains(&3)
            })
            .count();
        assert_eq!(m.containing.len(), expected);
    }

    #[test]
    fn conditional_expectation_examples() {
        let (p, q, t) = (0.3, 0.7, 0.45);
        let w = vec![vec![0.0, p, q], vec![p, 0.0, t], vec![q, t, 0.0]];
        let h = conditional_expectation_h(&w, &Motif::triangle()).unwrap();
        assert!((h - p * q * t).abs() < 1e-15);

        let half = vec![
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ];
        let h = conditional_expectation_h(&half, &Motif::vshape()).unwrap();
        assert!((h - 0.5).abs() < 1e-15);

        let bad = vec![vec![0.0, 1.2], vec![1.2, 0.0]];
        assert!(conditional_expectation_h(&bad, &Motif::edge()).is_err());
    }

    #[test]
    fn binary_probabilities_reduce_to_contains() {
        let m = Motif::three_star();
        for mask in 0u16..64 {
            let p: Vec<f64> = (0..6).map(|k| f64::from(mask >> k & 1)).collect();
            assert_eq!(m.h_prob(&p), if m.contains_mask(mask) { 1.0 } else { 0.0 });
        }
    }
}
