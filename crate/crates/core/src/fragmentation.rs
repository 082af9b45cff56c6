//! Poisson cutting of a tree in continuous time.
//!
//! Cuts arrive at total rate `sigma * sqrt(n)`, each at a uniform vertex. A
//! cut is effective when its vertex is still in the root component, and it
//! then removes the whole subtree below it. Each vertex carries mass `1/n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{assemble, PruningState};
use crate::oracle::enumerate_trees;
use crate::samplers::{sample_cayley, RngStream};
use crate::stats::{blocks_chi_square, ChiSquare};
use crate::tree::RootedTree;
use crate::{Error, Result};

/// One arrival of the cut process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragEvent {
    /// 1-based arrival index.
    pub i: usize,
    pub tau: f64,
    pub vertex: usize,
    pub effective: bool,
    /// Root-component mass right after this arrival.
    pub mu_after: f64,
    /// Root-component vertex count right after this arrival.
    pub alive_after: usize,
    /// Number of effective cuts so far, this one included.
    #[serde(rename = "L")]
    pub l: usize,
}

/// Every arrival of one run, in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentationTrace {
    pub n: usize,
    pub sigma: f64,
    pub horizon: Option<f64>,
    pub events: Vec<FragEvent>,
    /// True when the run continued until the root itself was cut.
    pub complete: bool,
}

impl FragmentationTrace {
    fn scale(&self) -> f64 {
        self.sigma * (self.n as f64).sqrt()
    }

    /// Effective cuts so far; equals `kappa` on a complete trace.
    pub fn kappa(&self) -> usize {
        self.events.last().map_or(0, |e| e.l)
    }

    pub fn effective_events(&self) -> impl Iterator<Item = &FragEvent> {
        self.events.iter().filter(|e| e.effective)
    }

    /// Effective cut vertices in time order.
    pub fn effective_vertices(&self) -> Vec<usize> {
        self.effective_events().map(|e| e.vertex).collect()
    }

    /// First effective cut vertex.
    pub fn u(&self) -> Option<usize> {
        self.effective_events().next().map(|e| e.vertex)
    }

    /// Last effective cut vertex (the root on a complete trace).
    pub fn v(&self) -> Option<usize> {
        self.effective_events().last().map(|e| e.vertex)
    }

    /// Root mass at time `t` (right-continuous).
    pub fn mu_at(&self, t: f64) -> f64 {
        let k = self.events.partition_point(|e| e.tau <= t);
        if k == 0 {
            1.0
        } else {
            self.events[k - 1].mu_after
        }
    }

    /// `Lambda(tau_j) = (1/(sigma sqrt n)) sum_{i <= j} mu(after i)` for every
    /// arrival `j`.
    pub fn lambda_path(&self) -> Vec<f64> {
        let s = self.scale();
        let mut acc = 0.0;
        self.events
            .iter()
            .map(|e| {
                acc += e.mu_after;
                acc / s
            })
            .collect()
    }

    /// `Lambda` at time `t`.
    pub fn lambda_at(&self, t: f64) -> f64 {
        let k = self.events.partition_point(|e| e.tau <= t);
        self.events[..k].iter().map(|e| e.mu_after).sum::<f64>() / self.scale()
    }

    /// `sup_t |L(t) / (sigma sqrt n) - Lambda(t)|`. Both processes are
    /// constant between arrivals, so the supremum is over arrival times.
    pub fn sup_gap(&self) -> f64 {
        let s = self.scale();
        self.events
            .iter()
            .zip(self.lambda_path())
            .map(|(e, lam)| (e.l as f64 / s - lam).abs())
            .fold(0.0, f64::max)
    }
}

/// Stepwise generator of arrivals for one run.
pub struct Fragmenter<'a> {
    tree: &'a RootedTree,
    state: PruningState,
    rate: f64,
    tau: f64,
    i: usize,
    l: usize,
    done: bool,
}

impl<'a> Fragmenter<'a> {
    pub fn new(tree: &'a RootedTree, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Fragmenter {
            tree,
            state: PruningState::new(tree),
            rate: sigma * (tree.n() as f64).sqrt(),
            tau: 0.0,
            i: 0,
            l: 0,
            done: false,
        })
    }

    pub fn state(&self) -> &PruningState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Next arrival, or `None` once the root has been cut.
    pub fn next_event(&mut self, rng: &mut RngStream) -> Option<FragEvent> {
        if self.done {
            return None;
        }
        self.tau += rng.exp(self.rate);
        self.i += 1;
        let n = self.tree.n();
        let vertex = rng.below(n);
        let effective = self.state.is_alive(vertex);
        if effective {
            self.state.prune(vertex);
            self.l += 1;
            self.done = vertex == self.tree.root();
        }
        let alive = self.state.alive_count();
        Some(FragEvent {
            i: self.i,
            tau: self.tau,
            vertex,
            effective,
            mu_after: alive as f64 / n as f64,
            alive_after: alive,
            l: self.l,
        })
    }
}

/// Simulates the cut process on `t` until the root is cut, or until
/// `horizon` when one is given.
pub fn fragment(
    t: &RootedTree,
    sigma: f64,
    rng: &mut RngStream,
    horizon: Option<f64>,
) -> Result<FragmentationTrace> {
    if let Some(h) = horizon {
        if !(h >= 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be nonnegative, got {h}")));
        }
    }
    let mut f = Fragmenter::new(t, sigma)?;
    let mut events = Vec::new();
    while let Some(e) = f.next_event(rng) {
        if horizon.is_some_and(|h| e.tau > h) {
            break;
        }
        events.push(e);
    }
    let complete = events.last().is_some_and(|e| e.effective && e.vertex == t.root());
    Ok(FragmentationTrace {
        n: t.n(),
        sigma,
        horizon,
        events,
        complete,
    })
}

/// `(Lambda(inf), integral of mu dt)` for a complete trace. The integral is
/// exact: mass is constant between arrivals.
pub fn mass_integral(trace: &FragmentationTrace) -> Result<(f64, f64)> {
    if !trace.complete {
        return Err(Error::RequiresInfiniteHorizon);
    }
    let lambda = trace.lambda_path().last().copied().unwrap_or(0.0);
    let mut integral = 0.0;
    let mut prev_tau = 0.0;
    let mut mu = 1.0;
    for e in &trace.events {
        integral += mu * (e.tau - prev_tau);
        prev_tau = e.tau;
        mu = e.mu_after;
    }
    Ok((lambda, integral))
}

/// The tree obtained by removing the effective cut edges and chaining the
/// cut vertices in time order, rooted at the first one. Returns it with
/// `u` (first effective cut) and `v` (the root of `t`).
pub fn build_that_tree(trace: &FragmentationTrace, t: &RootedTree) -> Result<(RootedTree, usize, usize)> {
    if !trace.complete {
        return Err(Error::RequiresInfiniteHorizon);
    }
    if trace.n != t.n() {
        return Err(Error::InvalidParameter(format!(
            "trace is for n = {}, tree has n = {}",
            trace.n,
            t.n()
        )));
    }
    let effective = trace.effective_vertices();
    let u = effective[0];
    let v = *effective.last().unwrap();
    let that = assemble(t, effective, Vec::new()).that;
    Ok((that, u, v))
}

/// Outcome of the first-cut-on-the-span check.
#[derive(Debug, Clone)]
pub struct SpanCutCheck {
    pub replicates: u64,
    /// Runs in which the first effective cut on the span hit the root,
    /// leaving an empty root component; these carry no `(tree, y)` pair.
    pub root_first: u64,
    /// Counts of `(vertex set, tree line, y)`; the tree is the root component
    /// right after the cut, relabelled onto `0..|S|` in increasing order.
    pub counts: BTreeMap<(Vec<usize>, String, usize), u64>,
    pub chi: ChiSquare,
}

/// For a uniform tree on `[n]` and `k` uniform vertices, finds the first
/// effective cut inside the subtree spanned by the root and those vertices,
/// and records the root component `S` right after it together with the
/// parent `y` of the cut vertex. Given `S`, each `(tree on S, y)` pair should
/// have probability `|S|^-|S|`; the frequencies are tested by chi-square.
pub fn first_span_cut_check(n: usize, k: usize, seed: u64, replicates: u64) -> Result<SpanCutCheck> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    let mut counts: BTreeMap<(Vec<usize>, String, usize), u64> = BTreeMap::new();
    let mut root_first = 0;
    for r in 0..replicates {
        let mut rng = RngStream::new(seed, r);
        let t = sample_cayley(n, &mut rng)?;
        let mut sel: Vec<usize> = (0..k).map(|_| rng.below(n)).collect();
        sel.push(t.root());
        let span = t.spanned_subtree(&sel)?;
        let mut f = Fragmenter::new(&t, 1.0)?;
        let cut = loop {
            let e = f.next_event(&mut rng).expect("the root is in the span");
            if e.effective && span.contains(e.vertex) {
                break e.vertex;
            }
        };
        if cut == t.root() {
            root_first += 1;
            continue;
        }
        let mut set: Vec<usize> = f.state().alive().to_vec();
        set.sort_unstable();
        let key = (set.clone(), restricted_line(&t, &set), t.parent(cut));
        *counts.entry(key).or_default() += 1;
    }

    // one block of |S|^|S| equiprobable cells per observed vertex set
    let sets: std::collections::BTreeSet<Vec<usize>> = counts.keys().map(|k| k.0.clone()).collect();
    let mut blocks = Vec::new();
    for set in sets {
        let mut block = Vec::new();
        for tree in enumerate_trees(set.len())? {
            let line = tree.to_line();
            for &y in &set {
                let key = (set.clone(), line.clone(), y);
                block.push(counts.get(&key).copied().unwrap_or(0));
            }
        }
        blocks.push(block);
    }
    let chi = blocks_chi_square(&blocks)?;
    Ok(SpanCutCheck {
        replicates,
        root_first,
        counts,
        chi,
    })
}

/// Canonical line of `t` restricted to the vertex set `set` (which must be a
/// subtree containing the root), relabelled by rank in `set`.
fn restricted_line(t: &RootedTree, set: &[usize]) -> String {
    let rank = |v: usize| set.binary_search(&v).expect("parent lies in the component");
    let parent: Vec<usize> = set.iter().map(|&v| rank(t.parent(v))).collect();
    RootedTree::from_parents(parent)
        .expect("root component is a subtree")
        .to_line()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_run() {
        let t = RootedTree::singleton();
        let tr = fragment(&t, 2.0, &mut RngStream::new(0, 0), None).unwrap();
        assert_eq!(tr.events.len(), 1);
        assert!(tr.complete);
        assert_eq!(tr.kappa(), 1);
        assert_eq!(tr.events[0].mu_after, 0.0);
        let (lam, integral) = mass_integral(&tr).unwrap();
        assert!((integral - tr.events[0].tau).abs() < 1e-15);
        assert_eq!(lam, 0.0);
        let (that, u, v) = build_that_tree(&tr, &t).unwrap();
        assert_eq!((that, u, v), (t, 0, 0));
    }

    #[test]
    fn rejects_bad_sigma_and_short_horizon() {
        let t = RootedTree::singleton();
        assert!(fragment(&t, 0.0, &mut RngStream::new(0, 0), None).is_err());
        let tr = fragment(&t, 1.0, &mut RngStream::new(0, 0), Some(0.0)).unwrap();
        assert!(!tr.complete);
        assert_eq!(mass_integral(&tr), Err(Error::RequiresInfiniteHorizon));
    }

    #[test]
    fn two_vertex_path_needs_two_cuts_or_one() {
        // the root is cut first with probability 1/2, isolating it at once
        let t = RootedTree::from_parents(vec![0, 0]).unwrap();
        let mut two = 0;
        for r in 0..4000 {
            let tr = fragment(&t, 1.0, &mut RngStream::new(1, r), None).unwrap();
            assert!(tr.kappa() == 1 || tr.kappa() == 2);
            two += (tr.kappa() == 2) as u32;
        }
        assert!((two as f64 / 4000.0 - 0.5).abs() < 0.04);
    }

    #[test]
    fn trace_invariants() {
        let mut rng = RngStream::new(2, 0);
        for n in [3usize, 40, 500] {
            let t = sample_cayley(n, &mut rng).unwrap();
            let tr = fragment(&t, 1.3, &mut rng, None).unwrap();
            assert!(tr.complete);
            let mut prev_mu = 1.0;
            let mut prev_l = 0;
            let mut prev_tau = 0.0;
            for e in &tr.events {
                assert!(e.tau > prev_tau);
                assert!(e.mu_after <= prev_mu);
                assert_eq!(e.mu_after < prev_mu, e.effective);
                assert_eq!(e.l, prev_l + e.effective as usize);
                (prev_mu, prev_l, prev_tau) = (e.mu_after, e.l, e.tau);
            }
            assert_eq!(prev_mu, 0.0);
            assert_eq!(tr.v(), Some(t.root()));
            let (that, u, v) = build_that_tree(&tr, &t).unwrap();
            assert_eq!(that.root(), u);
            assert_eq!(that.distance(u, v), tr.kappa() - 1);
            let lam = tr.lambda_path();
            assert!(lam.windows(2).all(|w| w[0] <= w[1]));
            let s = 1.3 * (n as f64).sqrt();
            for (j, l) in lam.iter().enumerate() {
                assert!(*l <= (j + 1) as f64 / s + 1e-12);
            }
        }
    }

    #[test]
    fn horizon_truncates() {
        let t = sample_cayley(200, &mut RngStream::new(3, 0)).unwrap();
        let full = fragment(&t, 1.0, &mut RngStream::new(3, 1), None).unwrap();
        let cut = fragment(&t, 1.0, &mut RngStream::new(3, 1), Some(0.5)).unwrap();
        assert!(cut.events.iter().all(|e| e.tau <= 0.5));
        assert_eq!(cut.events[..], full.events[..cut.events.len()]);
    }

    #[test]
    fn span_check_runs_and_passes_small() {
        let out = first_span_cut_check(3, 1, 5, 20_000).unwrap();
        assert!(out.root_first > 0);
        assert!(out.chi.p_value > 1e-3, "{:?}", out.chi);
    }
}
