//! Edge cutting of planted trees, the canonical block reordering of a cut
//! sequence, and the record count used for vertex cutting at large sizes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::samplers::RngStream;
use crate::tree::RootedTree;
use crate::{Error, Result};

/// An edge of the planted tree `t<S>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Edge {
    /// The tree edge between `child` and its parent in the base tree.
    Tree { child: usize },
    /// The planted edge `{v_index, w_index}`.
    Plant { index: usize },
}

impl Edge {
    /// Endpoints as labels of `t<S>`: planted vertex `w_i` is `n + i`.
    pub fn endpoints(&self, t: &RootedTree, attach: &[usize]) -> (usize, usize) {
        match *self {
            Edge::Tree { child } => (child, t.parent(child)),
            Edge::Plant { index } => (attach[index], t.n() + index),
        }
    }
}

/// Record of one run of a cutting procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutTrace {
    /// Removed edges in the order they were cut.
    pub removed: Vec<Edge>,
    /// For each cut, the index `i` of the block `U_i*` it belongs to.
    pub block: Vec<usize>,
    /// `M_1 < .. < M_k`. For ordered cutting these are the times at which
    /// each `w_i` is isolated. For planted cutting they are the block ends of
    /// the reordered sequence, i.e. the isolation times of the coupled
    /// ordered run.
    pub isolation: Vec<usize>,
    /// Real vertex count after each cut: of all components still holding a
    /// planted vertex (planted cutting), or of the component of the current
    /// target (ordered cutting).
    pub live_mass: Vec<usize>,
}

impl CutTrace {
    pub fn m(&self) -> usize {
        self.removed.len()
    }

    /// The reordered sequence `e*`: cuts listed block by block, keeping their
    /// original order inside a block.
    pub fn reordered(&self) -> Vec<Edge> {
        let mut idx: Vec<usize> = (0..self.removed.len()).collect();
        idx.sort_by_key(|&j| self.block[j]);
        idx.into_iter().map(|j| self.removed[j]).collect()
    }
}

fn check_targets(t: &RootedTree, attach: &[usize]) -> Result<()> {
    if attach.is_empty() {
        return Err(Error::EmptySelection);
    }
    attach.iter().try_for_each(|&v| t.check_vertex(v))
}

/// A forest obtained from a tree by deleting edges, with live children lists
/// so that exploring a component costs time proportional to its size.
struct CutForest {
    parent: Vec<usize>,
    root: usize,
    kids: Vec<Vec<usize>>,
    kid_pos: Vec<usize>,
    cut: Vec<bool>,
}

enum Side {
    First,
    Second,
}

impl CutForest {
    fn new(t: &RootedTree) -> Self {
        let n = t.n();
        let mut kids = vec![Vec::new(); n];
        let mut kid_pos = vec![0; n];
        for v in 0..n {
            if v != t.root() {
                let p = t.parent(v);
                kid_pos[v] = kids[p].len();
                kids[p].push(v);
            }
        }
        CutForest {
            parent: t.parents().to_vec(),
            root: t.root(),
            kids,
            kid_pos,
            cut: vec![false; n],
        }
    }

    fn has_up_edge(&self, v: usize) -> bool {
        v != self.root && !self.cut[v]
    }

    fn remove(&mut self, c: usize) {
        debug_assert!(self.has_up_edge(c));
        self.cut[c] = true;
        let p = self.parent[c];
        let i = self.kid_pos[c];
        self.kids[p].swap_remove(i);
        if let Some(&moved) = self.kids[p].get(i) {
            self.kid_pos[moved] = i;
        }
    }

    /// `k`-th neighbour of `u` in the forest: children first, then the parent.
    fn neighbour(&self, u: usize, k: usize) -> Option<usize> {
        let kids = &self.kids[u];
        if k < kids.len() {
            Some(kids[k])
        } else if k == kids.len() && self.has_up_edge(u) {
            Some(self.parent[u])
        } else {
            None
        }
    }

    fn component(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(v, usize::MAX)];
        while let Some((u, from)) = stack.pop() {
            out.push(u);
            let mut k = 0;
            while let Some(w) = self.neighbour(u, k) {
                if w != from {
                    stack.push((w, u));
                }
                k += 1;
            }
        }
        out
    }

    /// After removing an edge between `a` and `b`, explores both sides one
    /// neighbour at a time and returns the side that is exhausted first.
    fn smaller_side(&self, a: usize, b: usize) -> (Side, Vec<usize>) {
        let mut walks = [Walk::new(a), Walk::new(b)];
        loop {
            for (s, walk) in walks.iter_mut().enumerate() {
                if walk.advance(self) {
                    let side = if s == 0 { Side::First } else { Side::Second };
                    return (side, std::mem::take(&mut walk.seen));
                }
            }
        }
    }
}

struct Walk {
    // (vertex, vertex we came from, next neighbour index)
    stack: Vec<(usize, usize, usize)>,
    seen: Vec<usize>,
}

impl Walk {
    fn new(v: usize) -> Self {
        Walk {
            stack: vec![(v, usize::MAX, 0)],
            seen: vec![v],
        }
    }

    /// Examines one neighbour; returns true once the component is exhausted.
    fn advance(&mut self, f: &CutForest) -> bool {
        let Some(top) = self.stack.last_mut() else {
            return true;
        };
        let (u, from, k) = *top;
        match f.neighbour(u, k) {
            Some(w) => {
                top.2 += 1;
                if w != from {
                    self.seen.push(w);
                    self.stack.push((w, u, 0));
                }
            }
            None => {
                self.stack.pop();
            }
        }
        self.stack.is_empty()
    }
}

/// Uniformly samplable set of edges with O(1) insertion and removal.
struct EdgeBag {
    edges: Vec<Edge>,
    tree_pos: Vec<usize>,
    plant_pos: Vec<usize>,
}

impl EdgeBag {
    const ABSENT: usize = usize::MAX;

    fn new(n: usize, k: usize) -> Self {
        EdgeBag {
            edges: Vec::new(),
            tree_pos: vec![Self::ABSENT; n],
            plant_pos: vec![Self::ABSENT; k],
        }
    }

    fn slot(&mut self, e: Edge) -> &mut usize {
        match e {
            Edge::Tree { child } => &mut self.tree_pos[child],
            Edge::Plant { index } => &mut self.plant_pos[index],
        }
    }

    fn insert(&mut self, e: Edge) {
        let i = self.edges.len();
        debug_assert_eq!(*self.slot(e), Self::ABSENT);
        *self.slot(e) = i;
        self.edges.push(e);
    }

    fn remove(&mut self, e: Edge) {
        let i = std::mem::replace(self.slot(e), Self::ABSENT);
        if i == Self::ABSENT {
            return;
        }
        self.edges.swap_remove(i);
        if let Some(&moved) = self.edges.get(i) {
            *self.slot(moved) = i;
        }
    }

    fn clear(&mut self) {
        for e in std::mem::take(&mut self.edges) {
            *self.slot(e) = Self::ABSENT;
        }
    }

    fn len(&self) -> usize {
        self.edges.len()
    }

    fn pick(&self, rng: &mut RngStream) -> Edge {
        self.edges[rng.below(self.edges.len())]
    }
}

/// Planted cutting of `S` in `t`: repeatedly removes a uniform edge among
/// all edges of the components that still contain a planted vertex.
pub fn planted_cut(t: &RootedTree, attach: &[usize], rng: &mut RngStream) -> Result<CutTrace> {
    check_targets(t, attach)?;
    let n = t.n();
    let k = attach.len();
    let mut forest = CutForest::new(t);
    let mut targets_at = vec![Vec::new(); n];
    for (i, &v) in attach.iter().enumerate() {
        targets_at[v].push(i);
    }
    let mut target_live = vec![true; k];
    let mut comp = vec![0usize; n];
    let mut comp_live: Vec<BTreeSet<usize>> = vec![(0..k).collect()];
    let mut comp_size = vec![n];
    let mut mass = n;

    let mut bag = EdgeBag::new(n, k);
    for v in 0..n {
        if v != t.root() {
            bag.insert(Edge::Tree { child: v });
        }
    }
    for i in 0..k {
        bag.insert(Edge::Plant { index: i });
    }

    let mut trace = CutTrace {
        removed: Vec::new(),
        block: Vec::new(),
        isolation: Vec::new(),
        live_mass: Vec::new(),
    };

    // removes the edges of a component with no live planted vertex
    let retire = |vertices: &[usize], forest: &CutForest, bag: &mut EdgeBag| {
        for &u in vertices {
            if forest.has_up_edge(u) {
                bag.remove(Edge::Tree { child: u });
            }
        }
    };

    while bag.len() > 0 {
        let e = bag.pick(rng);
        bag.remove(e);
        match e {
            Edge::Tree { child } => {
                let x = comp[child];
                let block = *comp_live[x].first().expect("eligible edges lie in live components");
                forest.remove(child);
                let parent = t.parent(child);
                let (side, small) = forest.smaller_side(child, parent);
                let y = comp_live.len();
                comp_live.push(BTreeSet::new());
                comp_size.push(small.len());
                comp_size[x] -= small.len();
                for &u in &small {
                    comp[u] = y;
                    for &i in &targets_at[u] {
                        if target_live[i] {
                            comp_live[x].remove(&i);
                            comp_live[y].insert(i);
                        }
                    }
                }
                if comp_live[y].is_empty() {
                    retire(&small, &forest, &mut bag);
                    mass -= comp_size[y];
                }
                if comp_live[x].is_empty() {
                    let other = match side {
                        Side::First => parent,
                        Side::Second => child,
                    };
                    let big = forest.component(other);
                    retire(&big, &forest, &mut bag);
                    mass -= comp_size[x];
                }
                trace.block.push(block);
            }
            Edge::Plant { index } => {
                let v = attach[index];
                let x = comp[v];
                target_live[index] = false;
                comp_live[x].remove(&index);
                if comp_live[x].is_empty() {
                    let vertices = forest.component(v);
                    retire(&vertices, &forest, &mut bag);
                    mass -= comp_size[x];
                }
                trace.block.push(index);
            }
        }
        trace.removed.push(e);
        trace.live_mass.push(mass);
    }
    let mut ends = vec![0usize; k];
    for &b in &trace.block {
        ends[b] += 1;
    }
    let mut acc = 0;
    for end in ends.iter_mut() {
        acc += *end;
        *end = acc;
    }
    trace.isolation = ends;
    Ok(trace)
}

/// Ordered cutting: for `i = 1, .., k` in turn, removes uniform edges among
/// those whose removal shrinks the component of `w_i`, until `w_i` is
/// isolated. These are the tree edges of that component and `{v_i, w_i}`;
/// planted edges of other targets do not shrink it.
pub fn ordered_cut(t: &RootedTree, attach: &[usize], rng: &mut RngStream) -> Result<CutTrace> {
    check_targets(t, attach)?;
    let n = t.n();
    let k = attach.len();
    let mut forest = CutForest::new(t);
    let mut trace = CutTrace {
        removed: Vec::new(),
        block: Vec::new(),
        isolation: Vec::new(),
        live_mass: Vec::new(),
    };
    for i in 0..k {
        let target = attach[i];
        let start = forest.component(target);
        let mut size = start.len();
        let mut bag = EdgeBag::new(n, k);
        for &u in &start {
            if forest.has_up_edge(u) {
                bag.insert(Edge::Tree { child: u });
            }
        }
        bag.insert(Edge::Plant { index: i });
        loop {
            let e = bag.pick(rng);
            bag.remove(e);
            trace.removed.push(e);
            trace.block.push(i);
            let Edge::Tree { child } = e else {
                trace.live_mass.push(0);
                break;
            };
            forest.remove(child);
            let (_, small) = forest.smaller_side(child, t.parent(child));
            if small.contains(&target) {
                // the kept side is at most half the component, so the
                // clearing cost sums to O(n) per target
                bag.clear();
                for &u in &small {
                    if forest.has_up_edge(u) {
                        bag.insert(Edge::Tree { child: u });
                    }
                }
                bag.insert(Edge::Plant { index: i });
                size = small.len();
            } else {
                for &u in &small {
                    if forest.has_up_edge(u) {
                        bag.remove(Edge::Tree { child: u });
                    }
                }
                size -= small.len();
            }
            trace.live_mass.push(size);
        }
        trace.isolation.push(trace.removed.len());
    }
    Ok(trace)
}

/// The index sets and block boundaries of the canonical reordering.
///
/// Positions in `u`, `u_star`, `s`, `a`, `b` are 1-based as cut times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReorderPlan {
    /// `Z_i`: sorted times at which the cut shrinks the component of `w_i`.
    pub u: Vec<Vec<usize>>,
    /// `Z_i*`: the times in `U_i` not in any earlier `U_l`.
    pub u_star: Vec<Vec<usize>>,
    /// `s(i)`: position in `Z_i` where `Z_i*` starts.
    pub s: Vec<usize>,
    /// `m(i) = |U_i|`.
    pub m: Vec<usize>,
    /// Block `i` occupies positions `a[i] ..= b[i]` of `e*`.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Computes `e*` from the definitions, replaying the sequence on an explicit
/// copy of `t<S>`. Fails with the first index at which `e` stops being a
/// possible cutting sequence.
pub fn reorder(t: &RootedTree, attach: &[usize], e: &[Edge]) -> Result<(ReorderPlan, Vec<Edge>)> {
    check_targets(t, attach)?;
    let n = t.n();
    let k = attach.len();
    let total = n + k;
    let endpoints = |edge: &Edge| edge.endpoints(t, attach);
    let mut present: BTreeSet<Edge> = (0..n)
        .filter(|&v| v != t.root())
        .map(|child| Edge::Tree { child })
        .chain((0..k).map(|index| Edge::Plant { index }))
        .collect();
    let label = |present: &BTreeSet<Edge>| -> Vec<usize> {
        let mut adj = vec![Vec::new(); total];
        for edge in present {
            let (x, y) = endpoints(edge);
            adj[x].push(y);
            adj[y].push(x);
        }
        let mut lab = vec![usize::MAX; total];
        for s in 0..total {
            if lab[s] != usize::MAX {
                continue;
            }
            lab[s] = s;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if lab[w] == usize::MAX {
                        lab[w] = s;
                        stack.push(w);
                    }
                }
            }
        }
        lab
    };
    let real_count = |lab: &[usize], c: usize| (0..n).filter(|&v| lab[v] == c).count();

    let mut u = vec![Vec::new(); k];
    for (j, edge) in e.iter().enumerate() {
        if let Edge::Tree { child } = *edge {
            if child >= n || child == t.root() {
                return Err(Error::InvalidSequence {
                    index: j,
                    reason: "is not an edge of the planted tree".into(),
                });
            }
        }
        if let Edge::Plant { index } = *edge {
            if index >= k {
                return Err(Error::InvalidSequence {
                    index: j,
                    reason: "is not an edge of the planted tree".into(),
                });
            }
        }
        if !present.contains(edge) {
            return Err(Error::InvalidSequence {
                index: j,
                reason: "was already removed".into(),
            });
        }
        let before = label(&present);
        let (x, _) = endpoints(edge);
        let c = before[x];
        if !(0..k).any(|i| before[n + i] == c) {
            return Err(Error::InvalidSequence {
                index: j,
                reason: "lies outside every component holding a planted vertex".into(),
            });
        }
        present.remove(edge);
        let after = label(&present);
        for i in 0..k {
            let w = n + i;
            if before[w] == c && real_count(&after, after[w]) < real_count(&before, c) {
                u[i].push(j + 1);
            }
        }
    }
    if let Some(i) = (0..k).find(|&i| present.contains(&Edge::Plant { index: i })) {
        return Err(Error::InvalidSequence {
            index: e.len(),
            reason: format!("is past the end but planted edge {} was never cut", i + 1),
        });
    }

    let mut taken = BTreeSet::new();
    let mut plan = ReorderPlan {
        u: u.clone(),
        u_star: Vec::with_capacity(k),
        s: Vec::with_capacity(k),
        m: Vec::with_capacity(k),
        a: Vec::with_capacity(k),
        b: Vec::with_capacity(k),
    };
    let mut out = Vec::with_capacity(e.len());
    for zi in &u {
        let star: Vec<usize> = zi.iter().copied().filter(|j| !taken.contains(j)).collect();
        let s = zi.iter().position(|j| !taken.contains(j)).map_or(zi.len() + 1, |p| p + 1);
        debug_assert_eq!(star, zi[s.min(zi.len() + 1) - 1..].to_vec());
        plan.a.push(out.len() + 1);
        out.extend(star.iter().map(|&j| e[j - 1]));
        plan.b.push(out.len());
        plan.s.push(s);
        plan.m.push(zi.len());
        taken.extend(star.iter().copied());
        plan.u_star.push(star);
    }
    Ok((plan, out))
}

/// Number of records of a uniform labelling: vertices whose label is the
/// smallest on their path to the root.
pub fn records_count(t: &RootedTree, rng: &mut RngStream) -> usize {
    let labels = rng.permutation(t.n());
    records_of(t, &labels)
}

/// Record count for a fixed labelling.
pub fn records_of(t: &RootedTree, labels: &[usize]) -> usize {
    let children = t.children();
    let mut count = 0;
    let mut stack = vec![(t.root(), usize::MAX)];
    while let Some((v, min_above)) = stack.pop() {
        let here = if labels[v] < min_above {
            count += 1;
            labels[v]
        } else {
            min_above
        };
        for &c in children.of(v) {
            stack.push((c, here));
        }
    }
    count
}

/// `1 / (h_t(u) + 1)`, the chance that `u` is a record.
pub fn expected_cut_probability(t: &RootedTree, u: usize) -> Result<BigRational> {
    t.check_vertex(u)?;
    Ok(BigRational::new(BigInt::from(1), BigInt::from(t.depth(u) + 1)))
}

/// Exact mean record count `sum_u 1 / (h_t(u) + 1)`.
pub fn expected_records(t: &RootedTree) -> BigRational {
    t.depths()
        .into_iter()
        .map(|h| BigRational::new(BigInt::from(1), BigInt::from(h + 1)))
        .sum()
}
