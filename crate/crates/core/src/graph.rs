//! Simple undirected graphs and edge-list I/O.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// A simple undirected graph on `n` nodes, stored both as a dense bit matrix
/// and as sorted neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<u32>>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.set(i, j);
            }
        }
        g.finish();
        g
    }

    /// Builds a graph from 0-based edges. Duplicate edges are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidMatrix(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidMatrix(format!("self-loop at node {i}")));
            }
            g.set(i, j);
        }
        g.finish();
        Ok(g)
    }

    /// Builds a graph from a dense 0/1 matrix, checking symmetry and the diagonal.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix("matrix is not square".into()));
            }
            for (j, &a) in row.iter().enumerate() {
                if a > 1 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) is not binary"
                    )));
                }
                if a != rows[j][i] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
                if i == j && a != 0 {
                    return Err(Error::InvalidMatrix(format!("self-loop at node {i}")));
                }
                if i < j && a == 1 {
                    g.set(i, j);
                }
            }
        }
        g.finish();
        Ok(g)
    }

    /// Builds the graph from the strict upper triangle given as a predicate.
    pub(crate) fn from_upper_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if edge(i, j) {
                    g.set(i, j);
                }
            }
        }
        g.finish();
        g
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    fn finish(&mut self) {
        for i in 0..self.n {
            let row = &self.bits[i * self.words..(i + 1) * self.words];
            let list = &mut self.neighbors[i];
            list.clear();
            for (w, &word) in row.iter().enumerate() {
                let mut x = word;
                while x != 0 {
                    let b = x.trailing_zeros() as usize;
                    list.push((w * 64 + b) as u32);
                    x &= x - 1;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Sorted neighbors of `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `|N(i) ∩ N(j)|` by popcount over the bit rows.
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        let a = &self.bits[i * self.words..(i + 1) * self.words];
        let b = &self.bits[j * self.words..(j + 1) * self.words];
        a.iter()
            .zip(b)
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    /// 0-based edge list with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n {
            for &j in &self.neighbors[i] {
                if (j as usize) > i {
                    out.push((i, j as usize));
                }
            }
        }
        out
    }

    /// The graph on the index list `idx`: entry `(a, b)` is `A[idx[a], idx[b]]`.
    ///
    /// Indices may repeat; a pair of positions holding the same node gets no
    /// edge.
    pub fn induced(&self, idx: &[usize]) -> Self {
        Self::from_upper_fn(idx.len(), |a, b| self.has_edge(idx[a], idx[b]))
    }

    /// The graph with node `v` removed (remaining nodes keep their order).
    pub fn without_node(&self, v: usize) -> Self {
        let idx: Vec<usize> = (0..self.n).filter(|&i| i != v).collect();
        self.induced(&idx)
    }

    /// The same graph with an extra edge.
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        let mut edges = self.edges();
        edges.push((i, j));
        Self::from_edges(self.n, &edges)
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        Self::from_upper_fn(self.n, |a, b| self.has_edge(inv[a], inv[b]))
    }

    /// Writes a 1-based whitespace-separated edge list, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# nodes {}", self.n);
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{} {}", i + 1, j + 1);
        }
        s
    }
}

/// Parses an edge list with 1-based node ids separated by whitespace or commas.
///
/// Blank lines and lines starting with `#` are skipped, except for a
/// `# nodes N` header which fixes the node count. Without a header (or
/// `nodes` override) the node count is the largest id seen.
pub fn parse_edge_list(text: &str, nodes: Option<usize>) -> Result<AdjacencyMatrix> {
    let mut edges = Vec::new();
    let mut header_nodes = None;
    let mut max_id = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            if it.next() == Some("nodes") {
                if let Some(v) = it.next() {
                    header_nodes = Some(v.parse::<usize>().map_err(|_| {
                        Error::Parse(format!("line {}: bad node count {v:?}", lineno + 1))
                    })?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() < 2 {
            return Err(Error::Parse(format!(
                "line {}: expected two node ids",
                lineno + 1
            )));
        }
        let parse = |f: &str| -> Result<usize> {
            let v: usize = f
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad node id {f:?}", lineno + 1)))?;
            if v == 0 {
                return Err(Error::Parse(format!(
                    "line {}: node ids are 1-based",
                    lineno + 1
                )));
            }
            Ok(v)
        };
        let (i, j) = (parse(fields[0])?, parse(fields[1])?);
        if i == j {
            return Err(Error::Parse(format!(
                "line {}: self-loop at node {i}",
                lineno + 1
            )));
        }
        max_id = max_id.max(i).max(j);
        edges.push((i - 1, j - 1));
    }
    let n = nodes.or(header_nodes).unwrap_or(max_id);
    if max_id > n {
        return Err(Error::Parse(format!(
            "node id {max_id} exceeds node count {n}"
        )));
    }
    AdjacencyMatrix::from_edges(n, &edges)
}
