use proptest::prelude::*;

use treecut::cutting::{ordered_cut, planted_cut, reorder, Edge};
use treecut::dynamics::{forest_to_tree, modified_dynamics, tree_to_forest};
use treecut::excursion::{bridge_transform, canonical_shape, decode, encode, PathKind};
use treecut::fragmentation::{build_that_tree, fragment};
use treecut::oracle::exact_records_law;
use treecut::samplers::{sample_cayley, sample_conditioned_gw, sample_ordered_forest, OffspringLaw};
use treecut::stats::{ks_distance, ks_distance_with, EmpiricalDistribution, ReferenceLaw};
use treecut::{OrderedForest, RngStream, RootedTree};

fn tree(n: usize, seed: u64) -> RootedTree {
    sample_cayley(n, &mut RngStream::new(seed, 0)).unwrap()
}

fn targets(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = RngStream::new(seed, 1);
    (0..k).map(|_| rng.below(n)).collect()
}

/// Number of components of `t` after deleting the tree edges in `e`.
fn component_count(t: &RootedTree, e: &[Edge]) -> usize {
    let cut: std::collections::BTreeSet<usize> = e
        .iter()
        .filter_map(|x| match x {
            Edge::Tree { child } => Some(*child),
            Edge::Plant { .. } => None,
        })
        .collect();
    // one component per vertex that is a root or hangs from a cut edge
    (0..t.n()).filter(|&v| v == t.root() || cut.contains(&v)).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reroot_is_an_involution(n in 1usize..60, seed: u64, pick: usize) {
        let t = tree(n, seed);
        let v = pick % n;
        let s = t.reroot(v).unwrap();
        prop_assert_eq!(s.root(), v);
        prop_assert_eq!(s.edges(), t.edges());
        prop_assert_eq!(s.reroot(t.root()).unwrap(), t);
    }

    #[test]
    fn tree_line_round_trip(n in 1usize..80, seed: u64) {
        let t = tree(n, seed);
        prop_assert_eq!(RootedTree::from_line(&t.to_line()).unwrap(), t.clone());
        prop_assert_eq!(RootedTree::from_parents(t.parents().to_vec()).unwrap(), t);
    }

    #[test]
    fn forest_text_round_trip(n in 1usize..50, seed: u64) {
        let f = sample_ordered_forest(n, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(OrderedForest::from_text(&f.to_text()).unwrap(), f.clone());
        prop_assert_eq!(f.sizes().iter().sum::<usize>(), n);
    }

    #[test]
    fn spanned_subtree_edges(n in 1usize..40, seed: u64, k in 1usize..6) {
        let t = tree(n, seed);
        let sel = targets(n, k, seed);
        let s = t.spanned_subtree(&sel).unwrap();
        prop_assert!(s.edge_count() <= n - 1);
        prop_assert_eq!(s.edge_count() == n - 1, s.vertex_count() == n);
        for v in &sel {
            prop_assert!(s.contains(*v));
        }
        let p = t.plant(&sel).unwrap();
        prop_assert_eq!(p.node_count(), n);
        prop_assert_eq!(p.edge_count(), n - 1 + k);
    }

    #[test]
    fn tree_forest_bijection(n in 1usize..50, seed: u64, pick: usize) {
        let t = tree(n, seed);
        let v = pick % n;
        let f = tree_to_forest(&t, v).unwrap();
        prop_assert_eq!(forest_to_tree(&f), (t, v));
    }

    #[test]
    fn planted_cut_invariants(n in 1usize..60, seed: u64, k in 1usize..4) {
        let t = tree(n, seed);
        let attach = targets(n, k, seed);
        let trace = planted_cut(&t, &attach, &mut RngStream::new(seed, 2)).unwrap();
        let m = trace.m();
        prop_assert_eq!(trace.block.len(), m);
        prop_assert_eq!(trace.isolation.len(), k);
        prop_assert!(trace.isolation.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(trace.isolation.last().copied(), Some(m));
        // every planted edge is cut, and the tree edges cut leave M + 1 pieces
        // of t<S> once the k planted leaves are counted
        let planted = trace.removed.iter().filter(|e| matches!(e, Edge::Plant { .. })).count();
        prop_assert_eq!(planted, k);
        prop_assert_eq!(component_count(&t, &trace.removed) + k, m + 1);
        let (plan, e_star) = reorder(&t, &attach, &trace.removed).unwrap();
        prop_assert_eq!(&e_star, &trace.reordered());
        prop_assert_eq!(&plan.b, &trace.isolation);
        prop_assert_eq!(plan.a[0], 1);
        for i in 1..k {
            prop_assert_eq!(plan.a[i], plan.b[i - 1] + 1);
        }
    }

    #[test]
    fn ordered_cut_is_already_reordered(n in 1usize..60, seed: u64, k in 1usize..4) {
        let t = tree(n, seed);
        let attach = targets(n, k, seed);
        let trace = ordered_cut(&t, &attach, &mut RngStream::new(seed, 2)).unwrap();
        prop_assert!(trace.isolation.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(trace.isolation.last().copied(), Some(trace.m()));
        let (plan, e_star) = reorder(&t, &attach, &trace.removed).unwrap();
        prop_assert_eq!(&e_star, &trace.removed);
        prop_assert_eq!(&plan.b, &trace.isolation);
    }

    #[test]
    fn reorder_is_idempotent(n in 1usize..40, seed: u64, k in 1usize..4) {
        let t = tree(n, seed);
        let attach = targets(n, k, seed);
        let trace = planted_cut(&t, &attach, &mut RngStream::new(seed, 3)).unwrap();
        let (p1, once) = reorder(&t, &attach, &trace.removed).unwrap();
        let (p2, twice) = reorder(&t, &attach, &once).unwrap();
        prop_assert_eq!(once, twice);
        prop_assert_eq!(p1.b, p2.b);
    }

    #[test]
    fn modified_dynamics_kappa_is_a_path_length(n in 1usize..80, seed: u64) {
        let t = tree(n, seed);
        let trace = modified_dynamics(&t, &mut RngStream::new(seed, 4));
        prop_assert_eq!(trace.effective.last().copied(), Some(t.root()));
        prop_assert_eq!(trace.sigma.first().copied(), Some(1));
        prop_assert!(trace.sigma.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(trace.that.root(), trace.effective[0]);
        prop_assert_eq!(trace.that.edge_count(), n - 1);
        prop_assert_eq!(trace.kappa(), trace.that.path_to_root(t.root()).len());
        prop_assert_eq!(trace.forest.roots(), &trace.effective[..]);
    }

    #[test]
    fn fragmentation_invariants(n in 1usize..80, seed: u64, sigma in 0.2f64..3.0) {
        let t = tree(n, seed);
        let trace = fragment(&t, sigma, &mut RngStream::new(seed, 5), None).unwrap();
        prop_assert!(trace.complete);
        let s = sigma * (n as f64).sqrt();
        let mut prev = (0.0, n, 0usize);
        for (e, lam) in trace.events.iter().zip(trace.lambda_path()) {
            prop_assert!(e.tau > prev.0);
            prop_assert_eq!((e.mu_after * n as f64).round() as usize, e.alive_after);
            prop_assert_eq!(e.l, prev.2 + e.effective as usize);
            if !e.effective {
                prop_assert_eq!(e.alive_after, prev.1);
            }
            prop_assert!(lam <= e.i as f64 / s + 1e-12);
            prev = (e.tau, e.alive_after, e.l);
        }
        let (that, u, v) = build_that_tree(&trace, &t).unwrap();
        prop_assert_eq!((that.root(), v), (u, t.root()));
        prop_assert_eq!(trace.kappa(), that.path_to_root(v).len());
    }

    #[test]
    fn lattice_codes_round_trip(n in 1usize..60, seed: u64) {
        let t = tree(n, seed);
        let shape = canonical_shape(&t);
        for kind in [PathKind::Lukasiewicz, PathKind::Contour] {
            let p = encode(&t, kind);
            prop_assert_eq!(decode(&p).unwrap(), shape.clone());
        }
        let l = encode(&t, PathKind::Lukasiewicz).heights();
        prop_assert_eq!(l.len(), n + 1);
        prop_assert!(l[..n].iter().all(|&h| h >= 0));
        prop_assert_eq!(l[n], -1);
    }

    #[test]
    fn bridge_segments_are_piece_contours(n in 1usize..60, seed: u64) {
        let t = tree(n, seed);
        let trace = fragment(&t, 1.0, &mut RngStream::new(seed, 6), None).unwrap();
        let b = bridge_transform(&t, &trace).unwrap();
        prop_assert!(b.check().is_ok());
        prop_assert_eq!(b.excursion_count(), trace.kappa());
        prop_assert_eq!(b.path.len(), 2 * (n - trace.kappa()));
        for (j, w) in b.boundaries.windows(2).enumerate() {
            let seg = treecut::excursion::LatticePath {
                kind: PathKind::Contour,
                steps: b.path.steps[w[0]..w[1]].to_vec(),
            };
            prop_assert_eq!(decode(&seg).unwrap().n(), b.sizes[j]);
        }
    }

    #[test]
    fn gw_samples_have_the_requested_size(n in 1usize..200, seed: u64, which in 0usize..3) {
        let law: OffspringLaw = ["poisson1", "geom:1/2", "binary:1/2"][which].parse().unwrap();
        let mut rng = RngStream::new(seed, 0);
        match sample_conditioned_gw(&law, n, &mut rng) {
            Ok(t) => {
                prop_assert_eq!(t.n(), n);
                if which == 2 {
                    let ch = t.children();
                    prop_assert!((0..n).all(|v| ch.degree(v) == 0 || ch.degree(v) == 2));
                }
            }
            Err(_) => prop_assert!(which == 2 && n % 2 == 0),
        }
    }

    #[test]
    fn runs_are_deterministic(n in 1usize..60, seed: u64, stream: u64) {
        let run = || {
            let mut rng = RngStream::new(seed, stream);
            let t = sample_cayley(n, &mut rng).unwrap();
            let f = fragment(&t, 1.0, &mut rng, None).unwrap();
            let c = planted_cut(&t, &[0], &mut rng).unwrap();
            (t, f, c)
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn records_law_is_normalized(n in 1usize..7, seed: u64) {
        let t = tree(n, seed);
        let law = exact_records_law(&t).unwrap();
        prop_assert!(law.is_normalized());
        prop_assert_eq!(law.mean(), treecut::cutting::expected_records(&t));
    }

    #[test]
    fn ks_is_invariant_under_monotone_maps(seed: u64, len in 5usize..300) {
        let mut rng = RngStream::new(seed, 0);
        let xs: Vec<f64> = (0..len).map(|_| rng.exp(1.0).sqrt() * 1.3).collect();
        let law = ReferenceLaw::rayleigh();
        let a = ks_distance(&EmpiricalDistribution::new(xs.clone()).unwrap(), &law);
        let ys = EmpiricalDistribution::new(xs.iter().map(|x| x.exp()).collect()).unwrap();
        let b = ks_distance_with(&ys, |y| law.cdf(y.ln()));
        prop_assert!((a - b).abs() < 1e-12);
    }
}
