//! Monte Carlo samplers against exact laws from the enumeration oracle.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use treecut::cutting::records_count;
use treecut::dynamics::reverse_transform;
use treecut::fragmentation::{build_that_tree, fragment};
use treecut::oracle::{enumerate_trees, exact_forest_law, exact_records_law, ExactDistribution};
use treecut::samplers::{sample_cayley, sample_conditioned_gw, sample_ordered_forest, OffspringLaw};
use treecut::stats::{chi_square_test, ChiSquare, CHI_SQUARE_ALPHA};
use treecut::{RngStream, RootedTree};

fn draw<K: Send, F: Fn(&mut RngStream) -> K + Sync>(seed: u64, reps: u64, f: F) -> Vec<K> {
    (0..reps).into_par_iter().map(|r| f(&mut RngStream::new(seed, r))).collect()
}

fn against_exact<K: Ord + Clone>(law: &ExactDistribution<K>, samples: &[K]) -> ChiSquare {
    let mut counts: BTreeMap<&K, u64> = BTreeMap::new();
    for s in samples {
        *counts.entry(s).or_default() += 1;
    }
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for (k, p) in law.iter() {
        observed.push(counts.remove(k).unwrap_or(0));
        expected.push(p.to_f64().unwrap());
    }
    // anything left over has zero mass under the law
    let stray: u64 = counts.values().sum();
    observed.push(stray);
    expected.push(0.0);
    chi_square_test(&observed, &expected).unwrap()
}

/// Two-sample chi-square test of homogeneity for equal sample sizes.
fn homogeneity<K: Ord>(a: &[K], b: &[K]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut cells: BTreeMap<&K, (u64, u64)> = BTreeMap::new();
    for x in a {
        cells.entry(x).or_default().0 += 1;
    }
    for x in b {
        cells.entry(x).or_default().1 += 1;
    }
    let stat: f64 = cells
        .values()
        .map(|&(x, y)| (x as f64 - y as f64).powi(2) / (x + y) as f64)
        .sum();
    let df = cells.len().max(2) - 1;
    let law = statrs::distribution::ChiSquared::new(df as f64).unwrap();
    1.0 - statrs::distribution::ContinuousCDF::cdf(&law, stat)
}

fn uniform_over<K: Ord + Clone>(items: Vec<K>) -> ExactDistribution<K> {
    ExactDistribution::uniform(items)
}

#[test]
fn cayley_is_uniform_small_n() {
    for n in 1..=4 {
        let law = uniform_over(enumerate_trees(n).unwrap());
        let xs = draw(100 + n as u64, 200_000, |r| sample_cayley(n, r).unwrap());
        let chi = against_exact(&law, &xs);
        assert!(chi.passes(CHI_SQUARE_ALPHA), "n={n} {chi:?}");
    }
}

#[test]
fn ordered_forest_first_size() {
    for n in 1..=4 {
        let law = exact_forest_law(n).unwrap().pushforward(|f| f.sizes()[0]);
        let xs = draw(200 + n as u64, 200_000, |r| sample_ordered_forest(n, r).unwrap().sizes()[0]);
        let chi = against_exact(&law, &xs);
        assert!(chi.passes(CHI_SQUARE_ALPHA), "n={n} {chi:?}");
    }
}

fn root_degree(t: &RootedTree) -> usize {
    t.children().degree(t.root())
}

#[test]
fn poisson_gw_matches_cayley_statistics() {
    let law = OffspringLaw::Poisson1;
    for n in 2..=6 {
        let trees = enumerate_trees(n).unwrap();
        let all = uniform_over(trees.clone());
        let degree = all.pushforward(root_degree);
        // height of a uniform vertex: average the depth law over vertices
        let mut height = ExactDistribution::new();
        let w = treecut::oracle::uniform_weight(n);
        for (t, p) in all.iter() {
            for d in t.depths() {
                height.add(d, p * &w);
            }
        }
        let xs = draw(300 + n as u64, 1_000_000, |r| {
            let t = sample_conditioned_gw(&law, n, r).unwrap();
            let v = r.below(n);
            (root_degree(&t), t.depth(v))
        });
        let degs: Vec<usize> = xs.iter().map(|x| x.0).collect();
        let hs: Vec<usize> = xs.iter().map(|x| x.1).collect();
        let a = against_exact(&degree, &degs);
        let b = against_exact(&height, &hs);
        assert!(a.passes(CHI_SQUARE_ALPHA), "n={n} degree {a:?}");
        assert!(b.passes(CHI_SQUARE_ALPHA), "n={n} height {b:?}");
    }
}

#[test]
fn reverse_transform_of_uniform_forest_is_uniform() {
    let n = 4;
    let law = uniform_over(enumerate_trees(n).unwrap());
    let xs = draw(400, 200_000, |r| {
        let f = sample_ordered_forest(n, r).unwrap();
        reverse_transform(&f, r)
    });
    let chi = against_exact(&law, &xs);
    assert!(chi.passes(CHI_SQUARE_ALPHA), "{chi:?}");

    let n = 200;
    let stat = |t: &RootedTree| (root_degree(t), t.depth(0));
    let a = draw(401, 20_000, |r| {
        let f = sample_ordered_forest(n, r).unwrap();
        root_degree(&reverse_transform(&f, r))
    });
    let b = draw(402, 20_000, |r| root_degree(&sample_cayley(n, r).unwrap()));
    let p = homogeneity(&a, &b);
    assert!(p > CHI_SQUARE_ALPHA, "root degree p={p}");
    let a = draw(403, 20_000, |r| {
        let f = sample_ordered_forest(n, r).unwrap();
        stat(&reverse_transform(&f, r)).1
    });
    let b = draw(404, 20_000, |r| stat(&sample_cayley(n, r).unwrap()).1);
    let p = homogeneity(&a, &b);
    assert!(p > CHI_SQUARE_ALPHA, "depth of vertex 0 p={p}");
}

#[test]
fn fragmentation_kappa_matches_records() {
    for (n, seed) in [(3, 1u64), (5, 2), (5, 3)] {
        let t = sample_cayley(n, &mut RngStream::new(seed, 999)).unwrap();
        let law = exact_records_law(&t).unwrap();
        let xs = draw(500 + seed, 200_000, |r| fragment(&t, 1.0, r, None).unwrap().kappa());
        let chi = against_exact(&law, &xs);
        assert!(chi.passes(CHI_SQUARE_ALPHA), "{t} {chi:?}");
    }
    let n = 1000;
    let t = sample_cayley(n, &mut RngStream::new(7, 999)).unwrap();
    let a = draw(510, 20_000, |r| fragment(&t, 1.0, r, None).unwrap().kappa());
    let b = draw(511, 20_000, |r| records_count(&t, r));
    // pool the tail so every cell has a useful count
    let cap = |xs: Vec<usize>| xs.into_iter().map(|x| x.min(90) / 5).collect::<Vec<_>>();
    let p = homogeneity(&cap(a), &cap(b));
    assert!(p > CHI_SQUARE_ALPHA, "p={p}");
}

#[test]
fn that_tree_and_root_are_uniform() {
    for n in 1..=3 {
        let mut pairs = Vec::new();
        for t in enumerate_trees(n).unwrap() {
            for v in 0..n {
                pairs.push((t.clone(), v));
            }
        }
        let law = uniform_over(pairs);
        let xs = draw(600 + n as u64, 200_000, |r| {
            let t = sample_cayley(n, r).unwrap();
            let trace = fragment(&t, 1.0, r, None).unwrap();
            let (that, _, v) = build_that_tree(&trace, &t).unwrap();
            (that, v)
        });
        let chi = against_exact(&law, &xs);
        assert!(chi.passes(CHI_SQUARE_ALPHA), "n={n} {chi:?}");
    }
}
