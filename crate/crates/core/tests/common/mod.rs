//! Brute-force reference implementations shared by the integration tests.
//! Nothing here uses the library's counting code: containment is checked by
//! trying every node bijection, and every projection is averaged over the
//! explicit list of subsets.

#![allow(dead_code)]

use netmoment::rng;
use netmoment::{AdjacencyMatrix, Motif};

pub fn random_graph(n: usize, density: f64, seed: u64) -> AdjacencyMatrix {
    let mut s = rng::stream(seed, "test-graph", 0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng::uniform(&mut s) < density {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, &edges).unwrap()
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(r - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, r - 1);
            out.push(q);
        }
    }
    out
}

/// True when some bijection maps every motif edge onto an edge of `a`
/// restricted to `nodes`.
pub fn contains_brute(a: &AdjacencyMatrix, nodes: &[usize], motif: &Motif) -> bool {
    let edges = motif.edges();
    permutations(nodes.len()).iter().any(|p| {
        edges
            .iter()
            .all(|&(x, y)| a.has_edge(nodes[p[x]], nodes[p[y]]))
    })
}

/// Integer counts `N`, `N_i`, `N_ij` by enumeration.
pub struct BruteCounts {
    pub total: u64,
    pub per_node: Vec<u64>,
    pub per_pair: Vec<Vec<u64>>,
}

pub fn brute_counts(a: &AdjacencyMatrix, motif: &Motif) -> BruteCounts {
    let n = a.n();
    let mut c = BruteCounts {
        total: 0,
        per_node: vec![0; n],
        per_pair: vec![vec![0; n]; n],
    };
    for s in combinations(n, motif.r()) {
        if contains_brute(a, &s, motif) {
            c.total += 1;
            for &i in &s {
                c.per_node[i] += 1;
                for &j in &s {
                    if i != j {
                        c.per_pair[i][j] += 1;
                    }
                }
            }
        }
    }
    c
}

pub fn choose(n: usize, k: usize) -> f64 {
    combinations(n, k).len() as f64
}

pub struct BruteStats {
    pub u_hat: f64,
    pub g1: Vec<f64>,
    pub g2: Vec<Vec<f64>>,
    pub s_hat_sq: f64,
    pub s_jack_sq: f64,
}

/// Moments straight from the definitions. The jackknife recounts the graph
/// with each node deleted.
pub fn brute_stats(a: &AdjacencyMatrix, motif: &Motif) -> BruteStats {
    let n = a.n();
    let r = motif.r();
    let c = brute_counts(a, motif);
    let u_hat = c.total as f64 / choose(n, r);
    let g1: Vec<f64> = (0..n)
        .map(|i| c.per_node[i] as f64 / choose(n - 1, r - 1) - u_hat)
        .collect();
    let mut g2 = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g2[i][j] = c.per_pair[i][j] as f64 / choose(n - 2, r - 2) - u_hat - g1[i] - g1[j];
            }
        }
    }
    let s_hat_sq = (r * r) as f64 / (n * n) as f64 * g1.iter().map(|x| x * x).sum::<f64>();
    let s_jack_sq = if n > r {
        let loo: Vec<f64> = (0..n)
            .map(|i| {
                let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
                let sub = a.induced(&keep);
                brute_counts(&sub, motif).total as f64 / choose(n - 1, r)
            })
            .collect();
        (n as f64 - 1.0) / n as f64 * loo.iter().map(|v| (v - u_hat).powi(2)).sum::<f64>()
    } else {
        f64::NAN
    };
    BruteStats {
        u_hat,
        g1,
        g2,
        s_hat_sq,
        s_jack_sq,
    }
}

pub fn builtin_motifs() -> Vec<Motif> {
    vec![
        Motif::edge(),
        Motif::triangle(),
        Motif::vshape(),
        Motif::three_star(),
    ]
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Standard normal CDF by Simpson's rule on `[-12, x]`, independent of the
/// library's `erfc` route.
pub fn phi_quadrature(x: f64) -> f64 {
    let lo = -12.0;
    if x <= lo {
        return 0.0;
    }
    let m = 20_000;
    let h = (x - lo) / m as f64;
    let f = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(lo) + f(x);
    for k in 1..m {
        let t = lo + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(t);
    }
    s * h / 3.0
}
