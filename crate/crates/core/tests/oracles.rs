mod common;

use common::*;
use netmoment::moments::{
    compute_stats, count_motif, jackknife_variance, local_projection, pair_projection,
    sample_moment, CostLimits,
};
use netmoment::motif::{conditional_expectation_h, contains};
use netmoment::{AdjacencyMatrix, Motif};

#[test]
fn counts_match_enumeration() {
    for seed in 0..40u64 {
        let n = 5 + (seed as usize % 8);
        let density = 0.15 + 0.7 * ((seed * 37) % 100) as f64 / 100.0;
        let a = random_graph(n, density, seed);
        for m in builtin_motifs() {
            let want = brute_counts(&a, &m);
            let got = count_motif(&a, &m, true, &CostLimits::default()).unwrap();
            assert_eq!(got.total, want.total, "{} seed {seed}", m.label());
            assert_eq!(got.per_node, want.per_node);
            let pairs = got.per_pair.unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert_eq!(pairs[i * n + j], want.per_pair[i][j]);
                    }
                }
            }
        }
    }
}

#[test]
fn moments_match_definitions() {
    for seed in 100..130u64 {
        let n = 5 + (seed as usize % 8);
        let a = random_graph(n, 0.5, seed);
        for m in builtin_motifs() {
            let want = brute_stats(&a, &m);
            let s = compute_stats(&a, &m).unwrap();
            assert!(close(s.u_hat, want.u_hat, 1e-12));
            for i in 0..n {
                assert!(close(s.g1_hat[i], want.g1[i], 1e-12));
                for j in 0..n {
                    if i != j {
                        assert!(close(s.g2_hat.get(i, j), want.g2[i][j], 1e-12));
                    }
                }
            }
            assert!(close(s.s_hat_sq, want.s_hat_sq, 1e-12));
            let jack = jackknife_variance(&a, &m).unwrap();
            assert!(
                close(jack, want.s_jack_sq, 1e-12),
                "{jack} vs {}",
                want.s_jack_sq
            );
        }
    }
}

#[test]
fn convenience_functions_agree_with_compute_stats() {
    let a = random_graph(11, 0.4, 9);
    let m = Motif::vshape();
    let s = compute_stats(&a, &m).unwrap();
    assert_eq!(sample_moment(&a, &m).unwrap(), s.u_hat);
    let g1 = local_projection(&a, &m).unwrap();
    assert_eq!(g1, s.g1_hat);
    assert_eq!(pair_projection(&a, &m, &g1, s.u_hat).unwrap(), s.g2_hat);
}

#[test]
fn containment_matches_bijection_search() {
    for seed in 0..60u64 {
        let a = random_graph(5, 0.5, 1000 + seed);
        for m in builtin_motifs() {
            let r = m.r();
            let nodes: Vec<usize> = (0..r).collect();
            let sub: Vec<Vec<u8>> = (0..r)
                .map(|i| (0..r).map(|j| a.has_edge(i, j) as u8).collect())
                .collect();
            assert_eq!(contains(&sub, &m).unwrap(), contains_brute(&a, &nodes, &m));
        }
    }
}

#[test]
fn conditional_expectation_matches_enumeration_over_outcomes() {
    // E[h] over independent edges, by summing over every edge outcome
    let m = Motif::vshape();
    let w = [[0.0, 0.3, 0.8], [0.3, 0.0, 0.5], [0.8, 0.5, 0.0]];
    let rows: Vec<Vec<f64>> = w.iter().map(|r| r.to_vec()).collect();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut want = 0.0;
    for mask in 0..8u32 {
        let mut p = 1.0;
        let mut edges = Vec::new();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                p *= w[i][j];
                edges.push((i, j));
            } else {
                p *= 1.0 - w[i][j];
            }
        }
        let a = AdjacencyMatrix::from_edges(3, &edges).unwrap();
        if contains_brute(&a, &[0, 1, 2], &m) {
            want += p;
        }
    }
    let got = conditional_expectation_h(&rows, &m).unwrap();
    assert!(close(got, want, 1e-15));
    // at least two of three edges present
    let direct = 0.3 * 0.8 * 0.5 + 0.3 * 0.8 * 0.5 + 0.3 * 0.2 * 0.5 + 0.7 * 0.8 * 0.5;
    assert!(close(got, direct, 1e-15));
}

#[test]
fn closed_forms_on_larger_graphs() {
    for (seed, n) in [(1u64, 30usize), (2, 45)] {
        let a = random_graph(n, 0.3, seed);
        for m in [Motif::triangle(), Motif::vshape(), Motif::edge()] {
            let fast = count_motif(&a, &m, true, &CostLimits::default()).unwrap();
            let slow = brute_counts(&a, &m);
            assert_eq!(fast.total, slow.total);
            assert_eq!(fast.per_node, slow.per_node);
        }
    }
}
