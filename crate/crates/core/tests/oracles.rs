//! Implicit tensor products and clique search checked against dense and
//! brute-force constructions that only use the edge list.

use std::collections::HashSet;

use hpc_core::detectors::max_clique_exhaustive;
use hpc_core::tensor::{power_iteration, top_singular_value, unfold_matvec, Side};
use hpc_core::{
    derive_stream, generate, AdjacencyTensorView, DUniformHypergraph, ModelParams, SeedSpec, Unfolding, UnfoldingView,
};
use nalgebra::DMatrix;
use rand::Rng;

struct Dense {
    rows: usize,
    cols: usize,
    m: DMatrix<f64>,
}

/// Centered unfolding, one entry at a time, from a set of sorted edges.
fn dense_unfolding(g: &DUniformHypergraph, row_modes: usize) -> Dense {
    let (n, d) = (g.n(), g.d());
    let edges: HashSet<Vec<usize>> = g.edges().into_iter().collect();
    let rows = n.pow(row_modes as u32);
    let cols = n.pow((d - row_modes) as u32);
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut idx = Vec::new();
            let (mut rr, mut cc) = (r, c);
            for _ in 0..row_modes {
                idx.push(rr % n);
                rr /= n;
            }
            for _ in row_modes..d {
                idx.push(cc % n);
                cc /= n;
            }
            let mut s = idx.clone();
            s.sort();
            s.dedup();
            m[(r, c)] = if s.len() < d {
                0.0
            } else if edges.contains(&s) {
                1.0
            } else {
                -1.0
            };
        }
    }
    Dense { rows, cols, m }
}

fn dense_sigma(dense: &Dense) -> f64 {
    let gram = &dense.m * dense.m.transpose();
    gram.symmetric_eigen().eigenvalues.iter().cloned().fold(0.0, f64::max).sqrt()
}

fn instances() -> Vec<DUniformHypergraph> {
    let mut out = Vec::new();
    for d in 2..=4usize {
        for i in 0..20u64 {
            let n = d + (i as usize % (9 - d));
            let p = if i % 3 == 0 {
                ModelParams::planted(n, d, n / 2).unwrap()
            } else {
                ModelParams::null(n, d).unwrap()
            };
            out.push(generate(&p, 2024, "oracle", i + 100 * d as u64).unwrap().graph);
        }
    }
    out
}

#[test]
fn matvec_matches_dense_exactly() {
    let mut rng = derive_stream(&SeedSpec::new(1, "oracle-vec", 0));
    for g in instances() {
        for layout in [Unfolding::ModeOne, Unfolding::Balanced] {
            let u = UnfoldingView::new(AdjacencyTensorView::centered(&g), layout).unwrap();
            let dense = dense_unfolding(&g, layout.row_modes(g.d()));
            assert_eq!((u.rows(), u.cols()), (dense.rows, dense.cols));
            let v: Vec<f64> = (0..dense.cols).map(|_| rng.gen_range(-5i32..=5) as f64).collect();
            let w: Vec<f64> = (0..dense.rows).map(|_| rng.gen_range(-5i32..=5) as f64).collect();
            let mv = unfold_matvec(&u, &v, Side::Right).unwrap();
            let mtw = unfold_matvec(&u, &w, Side::Left).unwrap();
            let want_mv = &dense.m * DMatrix::from_column_slice(dense.cols, 1, &v);
            let want_mtw = dense.m.transpose() * DMatrix::from_column_slice(dense.rows, 1, &w);
            assert_eq!(mv, want_mv.as_slice());
            assert_eq!(mtw, want_mtw.as_slice());
        }
    }
}

#[test]
fn entry_view_matches_dense() {
    for g in instances().into_iter().step_by(7) {
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let dense = dense_unfolding(&g, 1);
        for r in 0..dense.rows {
            for c in 0..dense.cols {
                assert_eq!(u.entry(r, c).unwrap() as f64, dense.m[(r, c)]);
            }
        }
    }
}

#[test]
fn adjointness_with_real_vectors() {
    let mut rng = derive_stream(&SeedSpec::new(2, "oracle-adj", 0));
    for g in instances() {
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let v: Vec<f64> = (0..u.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..u.rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mv = unfold_matvec(&u, &v, Side::Right).unwrap();
        let mtw = unfold_matvec(&u, &w, Side::Left).unwrap();
        let a: f64 = mv.iter().zip(&w).map(|(x, y)| x * y).sum();
        let b: f64 = v.iter().zip(&mtw).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }
}

#[test]
fn top_singular_value_matches_dense_eigensolve() {
    for (i, g) in instances().into_iter().enumerate() {
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let want = dense_sigma(&dense_unfolding(&g, 1));
        let mut rng = derive_stream(&SeedSpec::new(3, "oracle-sigma", i as u64));
        let got = top_singular_value::<f64, _>(&u, 1e-15, 200_000, &mut rng).unwrap();
        assert!(
            (got.sigma - want).abs() <= 1e-6 * want.max(1e-12),
            "instance {i} (N={}, d={}): {} vs {want}",
            g.n(),
            g.d(),
            got.sigma
        );
    }
}

#[test]
fn complete_hypergraph_gram_closed_form() {
    // Gram of the complete N=4, d=3 centered unfolding is 4I + 2J
    let g = DUniformHypergraph::complete(4, 3).unwrap();
    let dense = dense_unfolding(&g, 1);
    let gram = &dense.m * dense.m.transpose();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(gram[(i, j)], if i == j { 6.0 } else { 2.0 });
        }
    }
    assert!((dense_sigma(&dense) - 12f64.sqrt()).abs() < 1e-12);
    let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
    let est = power_iteration(&u, vec![1.0, -1.0, 1.0, 1.0], 1e-14, 1000).unwrap();
    assert!((est.sigma - 12f64.sqrt()).abs() < 1e-9);
}

fn brute_force_max_clique(g: &DUniformHypergraph) -> usize {
    let n = g.n();
    let edges: HashSet<Vec<usize>> = g.edges().into_iter().collect();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if set.len() <= best {
            continue;
        }
        let mut ok = true;
        let d = g.d();
        // all d-subsets by nested masks over set positions
        let k = set.len();
        if k >= d {
            for sub in 0u32..(1 << k) {
                if sub.count_ones() as usize != d {
                    continue;
                }
                let e: Vec<usize> = (0..k).filter(|&p| sub >> p & 1 == 1).map(|p| set[p]).collect();
                if !edges.contains(&e) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best = set.len();
        }
    }
    best
}

#[test]
fn exhaustive_search_matches_brute_force() {
    for n in 3..=12usize {
        for t in 0..6u64 {
            let p = if t % 2 == 0 {
                ModelParams::null(n, 3).unwrap()
            } else {
                ModelParams::planted(n, 3, n / 2 + 1).unwrap()
            };
            let g = generate(&p, 77, "bf", t + 10 * n as u64).unwrap().graph;
            let r = max_clique_exhaustive(&g, None);
            assert_eq!(r.size, brute_force_max_clique(&g), "N={n} t={t}");
            assert!(hpc_core::is_clique(&g, &r.best_clique).unwrap());
        }
    }
}
