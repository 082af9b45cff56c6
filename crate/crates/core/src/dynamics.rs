//! Aldous-Broder rewiring, its pruning variant, and the forest/tree maps
//! attached to it.

use rand_distr::{Distribution, Geometric};

use crate::oracle::{self, ExactDistribution};
use crate::samplers::RngStream;
use crate::tree::{Children, OrderedForest, RootedTree};
use crate::{Error, Result};

/// State of the plain dynamics: the current tree `T^m`. Its root is the last
/// selected vertex `x_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsState {
    parent: Vec<usize>,
    root: usize,
}

impl DynamicsState {
    pub fn new(t: &RootedTree) -> Self {
        DynamicsState {
            parent: t.parents().to_vec(),
            root: t.root(),
        }
    }

    /// Last selected vertex, which is also the current root.
    pub fn last(&self) -> usize {
        self.root
    }

    pub fn tree(&self) -> RootedTree {
        RootedTree::from_parents_unchecked(self.parent.clone(), self.root)
    }
}

/// One step of the dynamics. Selecting the current root changes nothing;
/// otherwise `x_next` loses its parent edge, the old root becomes a child of
/// `x_next`, and `x_next` becomes the root.
pub fn ab_step(mut state: DynamicsState, x_next: usize) -> Result<DynamicsState> {
    let n = state.parent.len();
    if x_next >= n {
        return Err(Error::InvalidVertex { vertex: x_next, n });
    }
    if x_next != state.root {
        state.parent[x_next] = x_next;
        state.parent[state.root] = x_next;
        state.root = x_next;
    }
    Ok(state)
}

/// Bookkeeping for pruning whole subtrees out of the root component.
///
/// `alive` lists the vertices of the root component in arbitrary order and
/// `slot[v]` is the index of `v` in `alive` (or `usize::MAX` once pruned).
#[derive(Debug, Clone)]
pub struct PruningState {
    children: Children,
    alive: Vec<usize>,
    slot: Vec<usize>,
    root: usize,
}

impl PruningState {
    pub fn new(t: &RootedTree) -> Self {
        PruningState {
            children: t.children(),
            alive: (0..t.n()).collect(),
            slot: (0..t.n()).collect(),
            root: t.root(),
        }
    }

    pub fn alive_count(&self) -> usize {
        self.alive.len()
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.slot[v] != usize::MAX
    }

    pub fn alive(&self) -> &[usize] {
        &self.alive
    }

    /// The `i`-th alive vertex in the internal order.
    pub fn alive_at(&self, i: usize) -> usize {
        self.alive[i]
    }

    pub fn root_isolated(&self) -> bool {
        !self.is_alive(self.root)
    }

    /// Removes the alive part of `t(v)` and returns the removed vertices.
    /// Every vertex is visited once over the lifetime of the state.
    pub fn prune(&mut self, v: usize) -> Vec<usize> {
        debug_assert!(self.is_alive(v));
        let mut removed = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let i = self.slot[u];
            let last = *self.alive.last().expect("alive list is nonempty");
            self.alive.swap_remove(i);
            if last != u {
                self.slot[last] = i;
            }
            self.slot[u] = usize::MAX;
            removed.push(u);
            for &c in self.children.of(u) {
                if self.slot[c] != usize::MAX {
                    stack.push(c);
                }
            }
        }
        removed
    }
}

/// Output of the pruning dynamics on a tree `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifiedTrace {
    /// Times `sigma_1 < .. < sigma_kappa` of the effective selections.
    pub sigma: Vec<u64>,
    /// Effective vertices `r_1, .., r_kappa`; the last one is `r(t)`.
    pub effective: Vec<usize>,
    /// `(T_1, .., T_kappa)` with `T_i` rooted at `r_i`.
    pub forest: OrderedForest,
    /// The forest chained by edges `r_{i+1} -> r_i`, rooted at `r_1`.
    pub that: RootedTree,
}

impl ModifiedTrace {
    pub fn kappa(&self) -> usize {
        self.effective.len()
    }

    /// Attachment parents `a(r_i)` in the original tree, for `i < kappa`.
    pub fn attachments(&self, t: &RootedTree) -> Vec<usize> {
        let k = self.effective.len();
        self.effective[..k - 1].iter().map(|&r| t.parent(r)).collect()
    }
}

/// Builds the forest and chained tree from an effective sequence.
pub(crate) fn assemble(t: &RootedTree, effective: Vec<usize>, sigma: Vec<u64>) -> ModifiedTrace {
    let mut parent = t.parents().to_vec();
    for &r in &effective {
        parent[r] = r;
    }
    let forest = OrderedForest::new_unchecked(parent.clone(), effective.clone());
    for w in effective.windows(2) {
        parent[w[1]] = w[0];
    }
    let that = RootedTree::from_parents_unchecked(parent, effective[0]);
    ModifiedTrace {
        sigma,
        effective,
        forest,
        that,
    }
}

/// Runs the pruning dynamics driven by i.i.d. uniform selections.
///
/// Only effective selections are simulated: the gap to the next effective
/// time is geometric with success probability `alive / n`, and the selected
/// vertex is uniform on the alive list.
pub fn modified_dynamics(t: &RootedTree, rng: &mut RngStream) -> ModifiedTrace {
    let n = t.n();
    let mut state = PruningState::new(t);
    let mut effective = Vec::new();
    let mut sigma = Vec::new();
    let mut time = 0u64;
    loop {
        let alive = state.alive_count();
        time += if alive == n {
            1
        } else {
            let geo = Geometric::new(alive as f64 / n as f64).expect("probability in (0, 1]");
            geo.sample(rng) + 1
        };
        let x = state.alive_at(rng.below(alive));
        state.prune(x);
        effective.push(x);
        sigma.push(time);
        if x == t.root() {
            break;
        }
    }
    assemble(t, effective, sigma)
}

/// Runs the pruning dynamics on an explicit selection sequence. Fails if the
/// sequence never selects an alive root.
pub fn modified_from_sequence(t: &RootedTree, xs: &[usize]) -> Result<ModifiedTrace> {
    let mut state = PruningState::new(t);
    let mut effective = Vec::new();
    let mut sigma = Vec::new();
    for (m, &x) in xs.iter().enumerate() {
        t.check_vertex(x)?;
        if !state.is_alive(x) {
            continue;
        }
        state.prune(x);
        effective.push(x);
        sigma.push(m as u64 + 1);
        if x == t.root() {
            return Ok(assemble(t, effective, sigma));
        }
    }
    Err(Error::InvalidParameter(
        "selection sequence never isolates the root".into(),
    ))
}

/// Cuts the edges on the path from `v` up to `r(t)`. The component of `v`
/// comes first and the component of the root comes last.
pub fn tree_to_forest(t: &RootedTree, v: usize) -> Result<OrderedForest> {
    t.check_vertex(v)?;
    let path = t.path_to_root(v);
    let mut parent = t.parents().to_vec();
    for &p in &path {
        parent[p] = p;
    }
    Ok(OrderedForest::new_unchecked(parent, path))
}

/// Inverse of [`tree_to_forest`]: joins the root of each tree to the root of
/// the next one and returns the tree with the distinguished vertex.
pub fn forest_to_tree(f: &OrderedForest) -> (RootedTree, usize) {
    let roots = f.roots();
    let mut parent = f.parents().to_vec();
    for w in roots.windows(2) {
        parent[w[0]] = w[1];
    }
    let root = *roots.last().expect("forest is nonempty");
    (RootedTree::from_parents_unchecked(parent, root), roots[0])
}

/// Attaches the root of each `T_i`, `i < k`, to a uniform vertex of
/// `T_{i+1}, .., T_k`. The result is rooted at the root of `T_k`.
pub fn reverse_transform(f: &OrderedForest, rng: &mut RngStream) -> RootedTree {
    let sets = f.vertex_sets();
    let by_tree: Vec<usize> = sets.iter().flatten().copied().collect();
    let mut start = Vec::with_capacity(sets.len());
    let mut acc = 0;
    for s in &sets {
        start.push(acc);
        acc += s.len();
    }
    let n = f.n();
    let mut parent = f.parents().to_vec();
    let roots = f.roots();
    for i in 0..roots.len() - 1 {
        let lo = start[i + 1];
        parent[roots[i]] = by_tree[lo + rng.below(n - lo)];
    }
    RootedTree::from_parents_unchecked(parent, *roots.last().unwrap())
}

/// For each `i < k`, the vertices of `T_{i+1}, .., T_k` (sorted), i.e. the
/// possible parents of the root of `T_i`.
pub fn reverse_transform_choices(f: &OrderedForest) -> Vec<Vec<usize>> {
    let sets = f.vertex_sets();
    let k = sets.len();
    let mut out = Vec::with_capacity(k.saturating_sub(1));
    for i in 0..k.saturating_sub(1) {
        let mut later: Vec<usize> = sets[i + 1..].iter().flatten().copied().collect();
        later.sort_unstable();
        out.push(later);
    }
    out
}

/// Exact conditional law of the attachment vector given `F = f`, alongside
/// the product of uniform laws it should equal.
#[derive(Debug, Clone)]
pub struct ReverseParentCheck {
    pub observed: ExactDistribution<Vec<usize>>,
    pub expected: ExactDistribution<Vec<usize>>,
}

impl ReverseParentCheck {
    pub fn tv(&self) -> num_rational::BigRational {
        self.observed.tv(&self.expected)
    }
}

/// Computes, by enumerating all trees on `[n]` and the exact law of the
/// pruning dynamics on each, the law of `(a(r(t_i), T))_{i<k}` given `F = f`.
pub fn reverse_parent_law_check(f: &OrderedForest) -> Result<ReverseParentCheck> {
    let n = f.n();
    let trees = oracle::enumerate_trees(n)?;
    let weight = oracle::uniform_weight(trees.len());
    let mut joint = ExactDistribution::new();
    for t in &trees {
        let law = oracle::exact_modified_dynamics_law(t)?;
        for (effective, p) in law.iter() {
            if effective != f.roots() {
                continue;
            }
            let trace = assemble(t, effective.clone(), Vec::new());
            if trace.forest != *f {
                continue;
            }
            joint.add(trace.attachments(t), p * &weight);
        }
    }
    let observed = joint.normalized()?;
    let expected = oracle::product_uniform_attachment_law(f);
    Ok(ReverseParentCheck { observed, expected })
}
