//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release --test acceptance`.

mod common;

use common::*;
use netmoment::edgeworth::{
    cornish_fisher_quantile, expansion_cdf, EdgeworthCoefficients, Provenance,
};
use netmoment::graphon::{sample_network, Graphon};
use netmoment::harness::{
    median, run_accuracy_experiment, run_coverage_experiment, run_sparsity_sweep, ExperimentConfig,
    ExperimentRecord, Metric,
};
use netmoment::moments::{compute_stats, count_motif, jackknife_variance, CostLimits};
use netmoment::{normal, AdjacencyMatrix, Motif};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use std::time::Instant;

const BLOCK: &str = r#"{"kind": "BlockModel", "pi": [0.5, 0.5], "B": [[0.6, 0.2], [0.2, 0.2]]}"#;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let limits = CostLimits::default();
    let mut compared = 0;
    for k in 0..200u64 {
        let n = 5 + (k as usize % 8);
        let density = 0.1 + 0.8 * ((k * 53) % 97) as f64 / 96.0;
        let a = random_graph(n, density, 7000 + k);
        for m in builtin_motifs() {
            let want = brute_counts(&a, &m);
            let got = count_motif(&a, &m, true, &limits).map_err(|e| e.to_string())?;
            let pairs = got.per_pair.as_ref().unwrap();
            let pairs_equal =
                (0..n).all(|i| (0..n).all(|j| i == j || pairs[i * n + j] == want.per_pair[i][j]));
            if got.total != want.total || got.per_node != want.per_node || !pairs_equal {
                return Err(format!("integer counts differ: graph {k}, {}", m.label()));
            }
            let b = brute_stats(&a, &m);
            let s = compute_stats(&a, &m).map_err(|e| e.to_string())?;
            let jack = jackknife_variance(&a, &m).map_err(|e| e.to_string())?;
            let tol = 1e-12;
            let mut ok = close(s.u_hat, b.u_hat, tol)
                && close(s.s_hat_sq, b.s_hat_sq, tol)
                && close(jack, b.s_jack_sq, tol);
            for i in 0..n {
                ok &= close(s.g1_hat[i], b.g1[i], tol);
                for j in 0..n {
                    ok &= i == j || close(s.g2_hat.get(i, j), b.g2[i][j], tol);
                }
            }
            if !ok {
                return Err(format!("ratios differ: graph {k}, {}", m.label()));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} graph/motif pairs agree with subset enumeration"
    ))
}

fn graph_strategy() -> impl Strategy<Value = AdjacencyMatrix> {
    (4usize..=16).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            AdjacencyMatrix::from_edges(n, &edges).unwrap()
        })
    })
}

fn algebraic_invariants() -> Outcome {
    let cases = 1000;
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = (
        graph_strategy(),
        0usize..4,
        Just((0..16).collect::<Vec<usize>>()).prop_shuffle(),
        0usize..16,
        0usize..16,
    );
    runner
        .run(&strategy, |(a, which, perm, i, j)| {
            let m = builtin_motifs().swap_remove(which);
            let n = a.n();
            let s = compute_stats(&a, &m).unwrap();
            prop_assert!(s.g1_hat.iter().sum::<f64>().abs() <= 1e-9, "sum of g1");
            for x in 0..n {
                for y in 0..n {
                    prop_assert_eq!(s.g2_hat.get(x, y), s.g2_hat.get(y, x));
                }
            }
            let perm: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
            let t = compute_stats(&a.permuted(&perm), &m).unwrap();
            prop_assert_eq!(s.u_hat, t.u_hat);
            for (x, &p) in perm.iter().enumerate() {
                prop_assert_eq!(s.g1_hat[x], t.g1_hat[p]);
            }
            prop_assert!((s.s_hat_sq - t.s_hat_sq).abs() <= 1e-12 * s.s_hat_sq.max(1e-300));
            let (i, j) = (i % n, j % n);
            if i != j {
                let more = compute_stats(&a.with_edge(i, j).unwrap(), &m).unwrap();
                prop_assert!(more.u_hat >= s.u_hat, "edge addition lowered the moment");
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{cases} random cases: sum g1 = 0, g2 symmetric, relabeling, monotonicity"
    ))
}

/// The bracketed correction written out independently of the library.
fn correction(x: f64, xi: f64, e3: f64, e112: f64, r: usize, n: usize) -> f64 {
    ((2.0 * x * x + 1.0) / 6.0 * e3 + (r as f64 - 1.0) / 2.0 * (x * x + 1.0) * e112)
        / ((n as f64).sqrt() * xi.powi(3))
}

fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn formula_fidelity() -> Outcome {
    let tol = 1e-9;
    let coeffs = |xi, e3, e112, r, n| {
        EdgeworthCoefficients::new(xi, e3, e112, r, n, Provenance::Empirical).unwrap()
    };

    // hand-computed: 0.5 + φ(0) · (1/10) · (0.6/6) = 0.5039894228...
    let c = coeffs(1.0, 0.6, 0.0, 3, 100);
    let hand = 0.5 + 0.1 * 0.1 / (2.0 * std::f64::consts::PI).sqrt();
    let v = expansion_cdf(&c, 0.0);
    if (v - hand).abs() > tol || (v - 0.503_989).abs() > 1e-6 {
        return Err(format!("G(0) = {v}, want {hand}"));
    }

    let cases = [
        (0.3, 0.002, -0.001, 3, 40),
        (1.0, 0.5, 0.25, 2, 200),
        (0.1, 1e-4, 3e-4, 4, 80),
        (0.7, -0.2, 0.1, 3, 15),
    ];
    for &(xi, e3, e112, r, n) in &cases {
        let c = coeffs(xi, e3, e112, r, n);
        for k in -20..=20 {
            let x = f64::from(k) / 10.0;
            let want = phi_quadrature(x) + density(x) * correction(x, xi, e3, e112, r, n);
            if (expansion_cdf(&c, x) - want).abs() > tol {
                return Err(format!("G({x}) differs for {:?}", (xi, e3, e112, r, n)));
            }
        }
        for (alpha, z) in [
            (0.9, 1.281_551_565_544_600_5),
            (0.025, -1.959_963_984_540_054_5),
        ] {
            let want = z - correction(z, xi, e3, e112, r, n);
            if (cornish_fisher_quantile(&c, alpha).unwrap() - want).abs() > tol {
                return Err(format!("q_{alpha} differs for {:?}", (xi, e3, e112, r, n)));
            }
        }
    }

    // zero correction collapses exactly
    let flat = coeffs(0.4, 0.0, 0.0, 3, 50);
    for k in -20..=20 {
        let x = f64::from(k) / 10.0;
        if expansion_cdf(&flat, x) != normal::cdf(x) {
            return Err(format!("zero correction: G({x}) != Phi({x})"));
        }
    }
    for alpha in [0.01, 0.1, 0.5, 0.9, 0.975] {
        if cornish_fisher_quantile(&flat, alpha).unwrap() != normal::quantile(alpha) {
            return Err(format!("zero correction: q_{alpha} != z_{alpha}"));
        }
    }

    // |G(q) - alpha| against the bisection root x* of G(x) = alpha:
    // |G(q) - G(x*)| <= sup|G'| · |q - x*| on the segment between them.
    let mut worst: f64 = 0.0;
    for &(xi, e3, e112, r, n) in &cases {
        let c = coeffs(xi, e3, e112, r, n);
        for alpha in [0.05, 0.1, 0.5, 0.9, 0.95] {
            let q = cornish_fisher_quantile(&c, alpha).unwrap();
            let (mut lo, mut hi) = (q - 1.0, q + 1.0);
            let g = |x: f64| expansion_cdf(&c, x) - alpha;
            if g(lo) > 0.0 || g(hi) < 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            let (a, b) = if q < root { (q, root) } else { (root, q) };
            let h = 1e-6;
            let slope = (0..=100)
                .map(|k| a + (b - a) * f64::from(k) / 100.0)
                .map(|x| ((expansion_cdf(&c, x + h) - expansion_cdf(&c, x - h)) / (2.0 * h)).abs())
                .fold(0.0, f64::max);
            let bound = slope * (b - a);
            let err = (expansion_cdf(&c, q) - alpha).abs();
            if err > bound + 1e-9 {
                return Err(format!(
                    "|G(q) - {alpha}| = {err} exceeds bisection bound {bound}"
                ));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!(
        "hand values, zero-correction identities, worst |G(q)-alpha| = {worst:.2e}"
    ))
}

fn medians(records: &[ExperimentRecord], method: &str, n: usize, rho: f64) -> f64 {
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.n == n && r.rho == rho && r.metric == Metric::SupError)
        .map(|r| r.value)
        .collect();
    median(&v)
}

/// Least-squares slope of `ln y` on `ln x`.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn simulation_accuracy_once(seed: u64) -> Outcome {
    // Triangle-free graphs are common at n = 10 (about 12% of draws), so
    // the truth tolerates more degenerate replicates than the 1% default.
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"graphon": {BLOCK}, "motif": "triangle", "n": [10, 20, 40], "rho": 1,
            "n_mc": 100000, "repetitions": 30, "seed": {seed}, "record_time": false,
            "max_degenerate_fraction": 0.2}}"#
    ))
    .map_err(|e| e.to_string())?;
    let recs = run_accuracy_experiment(&cfg).map_err(|e| e.to_string())?;
    let ns = [10.0, 20.0, 40.0];
    let edge: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| medians(&recs, "edgeworth_empirical", n, 1.0))
        .collect();
    let norm = medians(&recs, "normal", 40, 1.0);
    let slope = log_slope(&ns, &edge);
    check(
        edge[2] < norm && slope <= -0.5,
        format!(
            "seed {seed}: median sup error at n=40 Edgeworth {:.4} vs normal {norm:.4}; \
             Edgeworth medians {:.4}/{:.4}/{:.4}, log-log slope {slope:.3}",
            edge[2], edge[0], edge[1], edge[2]
        ),
    )
}

fn simulation_accuracy() -> Outcome {
    match simulation_accuracy_once(1) {
        Ok(d) => Ok(d),
        Err(first) => {
            simulation_accuracy_once(2).map_err(|second| format!("{first}; retry {second}"))
        }
    }
}

fn simulation_coverage() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for motif in ["edge", "triangle"] {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"graphon": {BLOCK}, "motif": "{motif}", "n": [80], "rho": 1, "alpha": 0.2,
                "repetitions": 2000, "seed": 1, "record_time": false,
                "methods": ["edgeworth_empirical", "normal"]}}"#
        ))
        .map_err(|e| e.to_string())?;
        let recs = run_coverage_experiment(&cfg).map_err(|e| e.to_string())?;
        let pick = |method: &str, metric: Metric| -> Vec<f64> {
            recs.iter()
                .filter(|r| r.method == method && r.metric == metric)
                .map(|r| r.value)
                .collect()
        };
        let cover = pick("edgeworth_empirical", Metric::Coverage);
        let rate = cover.iter().sum::<f64>() / cover.len() as f64;
        let le = pick("edgeworth_empirical", Metric::Length);
        let ln = pick("normal", Metric::Length);
        let equal = le.len() == 2000
            && ln.len() == 2000
            && le
                .iter()
                .zip(&ln)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        ok &= cover.len() == 2000 && (rate - 0.8).abs() <= 0.03 && equal;
        details.push(format!(
            "{motif}: coverage {rate:.4}, lengths equal {equal}"
        ));
    }
    check(ok, details.join("; "))
}

fn jackknife_trend() -> Outcome {
    let g = Graphon::two_block();
    let m = Motif::triangle();
    let mut meds = Vec::new();
    for n in [20usize, 40, 80] {
        let mut gaps = Vec::new();
        for k in 0..50u64 {
            let a =
                sample_network(&g, 1.0, n, 9000 + 100 * n as u64 + k).map_err(|e| e.to_string())?;
            let s = compute_stats(&a, &m).map_err(|e| e.to_string())?.s_hat();
            let jack = jackknife_variance(&a, &m)
                .map_err(|e| e.to_string())?
                .sqrt();
            if s > 0.0 {
                gaps.push((s - jack).abs() / s);
            }
        }
        meds.push(median(&gaps));
    }
    check(
        meds[2] < meds[0],
        format!(
            "median |S - S_jack| / S: n=20 {:.4}, n=40 {:.4}, n=80 {:.4}",
            meds[0], meds[1], meds[2]
        ),
    )
}

fn sparsity_regression() -> Outcome {
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"graphon": {BLOCK}, "motif": "edge", "n": [80], "rho": ["1", "n^-1/4", "n^-1/2"],
            "n_mc": 100000, "repetitions": 30, "seed": 1, "record_time": false}}"#
    ))
    .map_err(|e| e.to_string())?;
    let recs = run_sparsity_sweep(&cfg).map_err(|e| e.to_string())?;
    let gap = |rho: f64| {
        medians(&recs, "edgeworth_empirical", 80, rho) - medians(&recs, "normal", 80, rho)
    };
    let rhos = [1.0, 80f64.powf(-0.25), 80f64.powf(-0.5)];
    let gaps: Vec<f64> = rhos.iter().map(|&r| gap(r)).collect();
    if gaps.iter().any(|g| g.is_nan()) {
        return Err(format!("missing records: gaps {gaps:?}"));
    }
    check(
        gaps[2].abs() < gaps[0].abs(),
        format!(
            "Edgeworth - normal median gap: rho=1 {:.4}, n^-1/4 {:.4}, n^-1/2 {:.4}",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 algebraic invariants", algebraic_invariants),
        ("3 formula fidelity", formula_fidelity),
        ("4 simulation accuracy", simulation_accuracy),
        ("5 simulation coverage", simulation_coverage),
        ("6 jackknife trend", jackknife_trend),
        ("7 sparsity regression", sparsity_regression),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {name}: {d} ({secs:.1}s)"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
