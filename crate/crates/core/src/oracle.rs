//! Exact laws by brute-force enumeration with big rationals.
//!
//! Nothing in this module uses floating point. Every law is a finite map from
//! outcomes to rational probabilities, and comparisons are exact total
//! variation distances.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cutting::{records_of, reorder, Edge};
use crate::dynamics::{assemble, reverse_transform_choices};
use crate::tree::{OrderedForest, RootedTree};
use crate::{Error, Result};

/// Largest tree size accepted by [`enumerate_trees`] and record laws.
pub const MAX_ENUMERATION_N: usize = 7;
/// Largest tree size for the exact dynamics recursion.
pub const MAX_DYNAMICS_N: usize = 5;
/// Largest forest ground set for [`enumerate_ordered_forests`].
pub const MAX_FOREST_N: usize = 6;
/// Largest edge count of `t<S>` for exact cutting laws.
pub const MAX_CUT_EDGES: usize = 9;

/// A finitely supported law with exact rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution<K: Ord> {
    probs: BTreeMap<K, BigRational>,
}

impl<K: Ord> Default for ExactDistribution<K> {
    fn default() -> Self {
        ExactDistribution {
            probs: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> ExactDistribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(k: K) -> Self {
        let mut d = Self::new();
        d.add(k, BigRational::one());
        d
    }

    /// Uniform law over the given outcomes (repeats add up).
    pub fn uniform<I: IntoIterator<Item = K>>(outcomes: I) -> Self {
        let items: Vec<K> = outcomes.into_iter().collect();
        let w = uniform_weight(items.len());
        let mut d = Self::new();
        for k in items {
            d.add(k, w.clone());
        }
        d
    }

    /// Adds mass `p` to outcome `k`.
    pub fn add(&mut self, k: K, p: BigRational) {
        if p.is_zero() {
            return;
        }
        let slot = self.probs.entry(k).or_insert_with(BigRational::zero);
        *slot += p;
    }

    /// Adds `weight` times every mass of `other`.
    pub fn add_scaled(&mut self, other: &ExactDistribution<K>, weight: &BigRational) {
        for (k, p) in &other.probs {
            self.add(k.clone(), p * weight);
        }
    }

    pub fn get(&self, k: &K) -> BigRational {
        self.probs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn total(&self) -> BigRational {
        self.probs.values().sum()
    }

    /// Masses are nonnegative and sum to exactly one.
    pub fn is_normalized(&self) -> bool {
        self.probs.values().all(|p| !p.is_negative()) && self.total().is_one()
    }

    /// Rescales to total mass one, e.g. after conditioning.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if !total.is_positive() {
            return Err(Error::InvalidParameter(
                "cannot normalize a law with no mass".into(),
            ));
        }
        Ok(ExactDistribution {
            probs: self
                .probs
                .iter()
                .map(|(k, p)| (k.clone(), p / &total))
                .collect(),
        })
    }

    /// Half the l1 distance between the two mass functions.
    pub fn tv(&self, other: &Self) -> BigRational {
        let mut sum = BigRational::zero();
        for (k, p) in &self.probs {
            sum += (p - other.get(k)).abs();
        }
        for (k, q) in &other.probs {
            if !self.probs.contains_key(k) {
                sum += q.abs();
            }
        }
        sum / BigRational::from_integer(2.into())
    }

    /// Image law under `f`.
    pub fn pushforward<J: Ord + Clone, F: FnMut(&K) -> J>(&self, mut f: F) -> ExactDistribution<J> {
        let mut d = ExactDistribution::new();
        for (k, p) in &self.probs {
            d.add(f(k), p.clone());
        }
        d
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.probs.iter()
    }
}

impl ExactDistribution<usize> {
    /// Image under `x -> x - shift`; every outcome must be at least `shift`.
    pub fn shifted_down(&self, shift: usize) -> Self {
        self.pushforward(|&x| x - shift)
    }

    pub fn mean(&self) -> BigRational {
        self.probs
            .iter()
            .map(|(k, p)| p * BigRational::from_integer(BigInt::from(*k)))
            .sum()
    }
}

impl<K: Ord + fmt::Debug> fmt::Display for ExactDistribution<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in &self.probs {
            writeln!(f, "{k:?}\t{p}")?;
        }
        Ok(())
    }
}

/// `1 / count` as a rational.
pub fn uniform_weight(count: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(count))
}

fn budget(what: &str, n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    if n > max {
        return Err(Error::BudgetExceeded(format!(
            "{what} is limited to n <= {max}, got {n}"
        )));
    }
    Ok(())
}

/// Calls `f` on every function `[n] -> [n]` as a parent array.
fn for_each_array(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a = vec![0usize; n];
    loop {
        f(&a);
        let mut i = 0;
        while i < n {
            a[i] += 1;
            if a[i] < n {
                break;
            }
            a[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

/// All permutations of `items` in lexicographic order of positions.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Every rooted labelled tree on `[n]`, found by filtering all `n^n` parent
/// arrays through validation.
pub fn enumerate_trees(n: usize) -> Result<Vec<RootedTree>> {
    budget("tree enumeration", n, MAX_ENUMERATION_N)?;
    let mut out = Vec::new();
    for_each_array(n, |a| {
        if let Ok(t) = RootedTree::from_parents(a.to_vec()) {
            out.push(t);
        }
    });
    Ok(out)
}

/// Every ordered forest on `[n]`: each rooted forest with each ordering of
/// its roots.
pub fn enumerate_ordered_forests(n: usize) -> Result<Vec<OrderedForest>> {
    budget("forest enumeration", n, MAX_FOREST_N)?;
    let mut out = Vec::new();
    for_each_array(n, |a| {
        let roots: Vec<usize> = (0..n).filter(|&v| a[v] == v).collect();
        if roots.is_empty() || OrderedForest::new(a.to_vec(), roots.clone()).is_err() {
            return;
        }
        for order in permutations(&roots) {
            out.push(OrderedForest::new(a.to_vec(), order).expect("validated above"));
        }
    });
    Ok(out)
}

fn subtree_masks(t: &RootedTree) -> Vec<u32> {
    let n = t.n();
    let mut sub = vec![0u32; n];
    for u in 0..n {
        for a in t.path_to_root(u) {
            sub[a] |= 1 << u;
        }
    }
    sub
}

/// Exact law of the effective sequence `(r_1, .., r_kappa)` of the pruning
/// dynamics on `t`: each effective vertex is uniform on the vertices not yet
/// pruned. The forest, the chained tree, `kappa` and the attachments are all
/// functions of this sequence (see [`modified_outcome`]).
pub fn exact_modified_dynamics_law(t: &RootedTree) -> Result<ExactDistribution<Vec<usize>>> {
    budget("exact dynamics", t.n(), MAX_DYNAMICS_N)?;
    let sub = subtree_masks(t);
    let mut out = ExactDistribution::new();
    let mut seq = Vec::new();
    fn rec(
        sub: &[u32],
        root: usize,
        alive: u32,
        p: BigRational,
        seq: &mut Vec<usize>,
        out: &mut ExactDistribution<Vec<usize>>,
    ) {
        let w = &p / BigRational::from_integer(alive.count_ones().into());
        for v in 0..sub.len() {
            if alive & (1 << v) == 0 {
                continue;
            }
            seq.push(v);
            if v == root {
                out.add(seq.clone(), w.clone());
            } else {
                rec(sub, root, alive & !sub[v], w.clone(), seq, out);
            }
            seq.pop();
        }
    }
    let all = if t.n() == 32 { u32::MAX } else { (1u32 << t.n()) - 1 };
    rec(&sub, t.root(), all, BigRational::one(), &mut seq, &mut out);
    Ok(out)
}

/// Forest, chained tree and `kappa` for a given effective sequence.
pub fn modified_outcome(t: &RootedTree, effective: &[usize]) -> (OrderedForest, RootedTree, usize) {
    let tr = assemble(t, effective.to_vec(), Vec::new());
    let k = tr.kappa();
    (tr.forest, tr.that, k)
}

/// Joint law of `(T_hat, r(T))` for a uniform tree `T` on `[n]`.
pub fn exact_that_root_law(n: usize) -> Result<ExactDistribution<(RootedTree, usize)>> {
    let trees = enumerate_trees(n)?;
    let w = uniform_weight(trees.len());
    let mut law = ExactDistribution::new();
    for t in &trees {
        let d = exact_modified_dynamics_law(t)?;
        law.add_scaled(&d.pushforward(|seq| (modified_outcome(t, seq).1, t.root())), &w);
    }
    Ok(law)
}

/// Law of the forest `F(T, X)` for a uniform tree `T` on `[n]`.
pub fn exact_forest_law(n: usize) -> Result<ExactDistribution<OrderedForest>> {
    let trees = enumerate_trees(n)?;
    let w = uniform_weight(trees.len());
    let mut law = ExactDistribution::new();
    for t in &trees {
        let d = exact_modified_dynamics_law(t)?;
        law.add_scaled(&d.pushforward(|seq| modified_outcome(t, seq).0), &w);
    }
    Ok(law)
}

/// Law of the tree built by attaching each root to a uniform later vertex.
pub fn exact_reverse_transform_law(f: &OrderedForest) -> ExactDistribution<RootedTree> {
    let choices = reverse_transform_choices(f);
    let mut law = ExactDistribution::new();
    for (attach, p) in attachment_vectors(&choices) {
        let mut parent = f.parents().to_vec();
        for (i, &a) in attach.iter().enumerate() {
            parent[f.roots()[i]] = a;
        }
        let t = RootedTree::from_parents(parent).expect("attachments point to later trees");
        law.add(t, p);
    }
    law
}

/// Product of uniform laws: the parent of the `i`-th root is uniform on the
/// vertices of the later trees.
pub fn product_uniform_attachment_law(f: &OrderedForest) -> ExactDistribution<Vec<usize>> {
    let mut law = ExactDistribution::new();
    for (v, p) in attachment_vectors(&reverse_transform_choices(f)) {
        law.add(v, p);
    }
    law
}

fn attachment_vectors(choices: &[Vec<usize>]) -> Vec<(Vec<usize>, BigRational)> {
    let mut out = vec![(Vec::new(), BigRational::one())];
    for c in choices {
        let w = uniform_weight(c.len());
        let mut next = Vec::with_capacity(out.len() * c.len());
        for (v, p) in &out {
            for &x in c {
                let mut v = v.clone();
                v.push(x);
                next.push((v, p * &w));
            }
        }
        out = next;
    }
    out
}

/// Exact law of the record count over all `n!` labellings.
pub fn exact_records_law(t: &RootedTree) -> Result<ExactDistribution<usize>> {
    budget("record enumeration", t.n(), MAX_ENUMERATION_N)?;
    let ids: Vec<usize> = (0..t.n()).collect();
    let perms = permutations(&ids);
    Ok(ExactDistribution::uniform(perms.iter().map(|p| records_of(t, p))))
}

/// Which cutting procedure an exact law refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMode {
    Planted,
    Ordered,
}

/// Explicit graph for `t<S>`, used to evaluate cutting rules straight from
/// their definitions.
struct PlantedGraph {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
}

impl PlantedGraph {
    fn new(t: &RootedTree, attach: &[usize]) -> Result<Self> {
        if attach.is_empty() {
            return Err(Error::EmptySelection);
        }
        for &v in attach {
            t.check_vertex(v)?;
        }
        let n = t.n();
        let k = attach.len();
        let mut edges: Vec<Edge> = (0..n)
            .filter(|&v| v != t.root())
            .map(|child| Edge::Tree { child })
            .collect();
        edges.extend((0..k).map(|index| Edge::Plant { index }));
        if edges.len() > MAX_CUT_EDGES {
            return Err(Error::BudgetExceeded(format!(
                "exact cutting laws are limited to {MAX_CUT_EDGES} edges, got {}",
                edges.len()
            )));
        }
        let ends = edges.iter().map(|e| e.endpoints(t, attach)).collect();
        Ok(PlantedGraph { n, k, edges, ends })
    }

    /// Component label of every vertex with the edges in `removed` deleted.
    fn components(&self, removed: u32) -> Vec<usize> {
        let total = self.n + self.k;
        let mut lab: Vec<usize> = (0..total).collect();
        // naive relabelling until stable; the graphs here are tiny
        let mut changed = true;
        while changed {
            changed = false;
            for (j, &(x, y)) in self.ends.iter().enumerate() {
                if removed & (1 << j) != 0 {
                    continue;
                }
                let m = lab[x].min(lab[y]);
                if lab[x] != m || lab[y] != m {
                    let (ox, oy) = (lab[x], lab[y]);
                    for l in lab.iter_mut() {
                        if *l == ox || *l == oy {
                            *l = m;
                        }
                    }
                    changed = true;
                }
            }
        }
        lab
    }

    fn real_size(&self, lab: &[usize], c: usize) -> usize {
        (0..self.n).filter(|&v| lab[v] == c).count()
    }

    /// Present edges whose both ends lie in a component holding some `w_i`.
    fn planted_eligible(&self, removed: u32) -> Vec<usize> {
        let lab = self.components(removed);
        (0..self.edges.len())
            .filter(|&j| removed & (1 << j) == 0)
            .filter(|&j| (0..self.k).any(|i| lab[self.n + i] == lab[self.ends[j].0]))
            .collect()
    }

    /// First target not yet isolated, and the present edges whose removal
    /// lowers the real vertex count of its component.
    fn ordered_eligible(&self, removed: u32) -> Option<Vec<usize>> {
        let plant = self.edges.len() - self.k;
        let i = (0..self.k).find(|&i| removed & (1 << (plant + i)) == 0)?;
        let lab = self.components(removed);
        let c = lab[self.n + i];
        let before = self.real_size(&lab, c);
        Some(
            (0..self.edges.len())
                .filter(|&j| removed & (1 << j) == 0 && lab[self.ends[j].0] == c)
                .filter(|&j| {
                    let after = self.components(removed | (1 << j));
                    self.real_size(&after, after[self.n + i]) < before
                })
                .collect(),
        )
    }

    fn eligible(&self, mode: CutMode, removed: u32) -> Vec<usize> {
        match mode {
            CutMode::Planted => self.planted_eligible(removed),
            CutMode::Ordered => self.ordered_eligible(removed).unwrap_or_default(),
        }
    }
}

/// Exact law of the whole sequence of removed edges.
pub fn exact_cut_sequence_law(
    t: &RootedTree,
    attach: &[usize],
    mode: CutMode,
) -> Result<ExactDistribution<Vec<Edge>>> {
    let g = PlantedGraph::new(t, attach)?;
    let mut out = ExactDistribution::new();
    fn rec(
        g: &PlantedGraph,
        mode: CutMode,
        removed: u32,
        p: BigRational,
        seq: &mut Vec<Edge>,
        out: &mut ExactDistribution<Vec<Edge>>,
    ) {
        let el = g.eligible(mode, removed);
        if el.is_empty() {
            out.add(seq.clone(), p);
            return;
        }
        let w = &p / BigRational::from_integer(el.len().into());
        for j in el {
            seq.push(g.edges[j]);
            rec(g, mode, removed | (1 << j), w.clone(), seq, out);
            seq.pop();
        }
    }
    rec(&g, mode, 0, BigRational::one(), &mut Vec::new(), &mut out);
    Ok(out)
}

/// Summary statistics of a cutting run: `M` and `M_1 < .. < M_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutSummary {
    pub m: usize,
    pub isolation: Vec<usize>,
}

/// Exact law of `(M, M_1, .., M_k)`. In planted mode the `M_i` are the block
/// ends of the reordered sequence.
pub fn exact_cut_law(
    t: &RootedTree,
    attach: &[usize],
    mode: CutMode,
) -> Result<ExactDistribution<CutSummary>> {
    let seqs = exact_cut_sequence_law(t, attach, mode)?;
    let mut law = ExactDistribution::new();
    for (seq, p) in seqs.iter() {
        let isolation = match mode {
            CutMode::Planted => reorder(t, attach, seq)?.0.b,
            CutMode::Ordered => {
                let mut ends = Vec::new();
                for (j, e) in seq.iter().enumerate() {
                    if let Edge::Plant { .. } = e {
                        ends.push(j + 1);
                    }
                }
                ends
            }
        };
        law.add(
            CutSummary {
                m: seq.len(),
                isolation,
            },
            p.clone(),
        );
    }
    Ok(law)
}

/// Exact law of `M` alone, memoized on the set of removed edges.
pub fn exact_cut_count_law(t: &RootedTree, attach: &[usize], mode: CutMode) -> Result<ExactDistribution<usize>> {
    let g = PlantedGraph::new(t, attach)?;
    let mut memo: HashMap<u32, Vec<BigRational>> = HashMap::new();
    fn rec(
        g: &PlantedGraph,
        mode: CutMode,
        removed: u32,
        memo: &mut HashMap<u32, Vec<BigRational>>,
    ) -> Vec<BigRational> {
        if let Some(v) = memo.get(&removed) {
            return v.clone();
        }
        let el = g.eligible(mode, removed);
        let law = if el.is_empty() {
            vec![BigRational::one()]
        } else {
            let w = uniform_weight(el.len());
            let mut acc: Vec<BigRational> = Vec::new();
            for j in el {
                let sub = rec(g, mode, removed | (1 << j), memo);
                if acc.len() < sub.len() + 1 {
                    acc.resize(sub.len() + 1, BigRational::zero());
                }
                for (m, p) in sub.iter().enumerate() {
                    acc[m + 1] += p * &w;
                }
            }
            acc
        };
        memo.insert(removed, law.clone());
        law
    }
    let law = rec(&g, mode, 0, &mut memo);
    let mut d = ExactDistribution::new();
    for (m, p) in law.into_iter().enumerate() {
        d.add(m, p);
    }
    Ok(d)
}

/// Law of `M(T, S) - k` for a uniform tree on `[n]` and `k` i.i.d. uniform
/// targets.
pub fn exact_cut_minus_k_law(n: usize, k: usize, mode: CutMode) -> Result<ExactDistribution<usize>> {
    budget("exact cutting", n, MAX_DYNAMICS_N)?;
    let trees = enumerate_trees(n)?;
    let targets = all_sequences(n, k);
    let w = uniform_weight(trees.len() * targets.len());
    let mut law = ExactDistribution::new();
    for t in &trees {
        for s in &targets {
            law.add_scaled(&exact_cut_count_law(t, s, mode)?.shifted_down(k), &w);
        }
    }
    Ok(law)
}

/// Every sequence in `[n]^k`.
pub fn all_sequences(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..n).map(move |v| {
                    let mut s = s.clone();
                    s.push(v);
                    s
                })
            })
            .collect();
    }
    out
}

/// Law of the edge count of the subtree spanned by the root and `k` i.i.d.
/// uniform vertices of a uniform tree on `[n]`.
pub fn exact_spanned_edges_law(n: usize, k: usize) -> Result<ExactDistribution<usize>> {
    budget("spanned-edge enumeration", n, MAX_DYNAMICS_N)?;
    let trees = enumerate_trees(n)?;
    let targets = all_sequences(n, k);
    let w = uniform_weight(trees.len() * targets.len());
    let mut law = ExactDistribution::new();
    for t in &trees {
        for s in &targets {
            let mut sel = s.clone();
            sel.push(t.root());
            law.add(t.spanned_subtree(&sel)?.edge_count(), w.clone());
        }
    }
    Ok(law)
}

/// Outcome of a named exact check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    /// Largest total variation distance found; zero means the claim holds.
    pub tv: BigRational,
    /// Number of individual law comparisons performed.
    pub comparisons: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.tv.is_zero()
    }
}

/// Names accepted by [`run_check`].
pub const CHECKS: [&str; 6] = ["key", "forest", "reverse", "kcoup", "records", "reorder"];

/// Runs one of the exact identity checks at size `n` (and `k` targets where
/// relevant).
pub fn run_check(name: &str, n: usize, k: usize) -> Result<CheckOutcome> {
    let mut worst = BigRational::zero();
    let mut comparisons = 0;
    let mut record = |tv: BigRational| {
        comparisons += 1;
        if tv > worst {
            worst = tv;
        }
    };
    match name {
        "key" => {
            let law = exact_that_root_law(n)?;
            let trees = enumerate_trees(n)?;
            let uniform =
                ExactDistribution::uniform(trees.iter().flat_map(|t| (0..n).map(move |v| (t.clone(), v))));
            record(law.tv(&uniform));
        }
        "forest" => {
            let forests = enumerate_ordered_forests(n)?;
            let uniform_forests = ExactDistribution::uniform(forests.iter().cloned());
            record(exact_forest_law(n)?.tv(&uniform_forests));
            let w = uniform_weight(forests.len());
            let mut pushed = ExactDistribution::new();
            for f in &forests {
                pushed.add_scaled(&exact_reverse_transform_law(f), &w);
            }
            record(pushed.tv(&ExactDistribution::uniform(enumerate_trees(n)?)));
        }
        "reverse" => {
            for f in enumerate_ordered_forests(n)? {
                record(crate::dynamics::reverse_parent_law_check(&f)?.tv());
            }
        }
        "kcoup" => {
            check_k(k)?;
            let spanned = exact_spanned_edges_law(n, k)?;
            record(exact_cut_minus_k_law(n, k, CutMode::Planted)?.tv(&spanned));
            record(exact_cut_minus_k_law(n, k, CutMode::Ordered)?.tv(&spanned));
        }
        "records" => {
            for t in enumerate_trees(n)? {
                budget("exact dynamics", n, MAX_DYNAMICS_N)?;
                let kappa = exact_modified_dynamics_law(&t)?.pushforward(|s| s.len());
                record(exact_records_law(&t)?.tv(&kappa));
            }
        }
        "reorder" => {
            check_k(k)?;
            for t in enumerate_trees(n)? {
                for s in all_sequences(n, k) {
                    let planted = exact_cut_sequence_law(&t, &s, CutMode::Planted)?;
                    let mut pushed = ExactDistribution::new();
                    for (seq, p) in planted.iter() {
                        pushed.add(reorder(&t, &s, seq)?.1, p.clone());
                    }
                    let ordered = exact_cut_sequence_law(&t, &s, CutMode::Ordered)?;
                    record(pushed.tv(&ordered));
                }
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown check `{other}`; expected one of {}",
                CHECKS.join(", ")
            )))
        }
    }
    Ok(CheckOutcome {
        name: name.to_string(),
        tv: worst,
        comparisons,
    })
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter("k must be at least 1".into()))
    } else {
        Ok(())
    }
}
