//! Rooted labelled trees stored as parent arrays, ordered forests, and the
//! planted trees used by the edge-cutting procedures.
//!
//! A tree on `n` vertices is a vector `parent` of length `n` with exactly one
//! fixed point, the root (`parent[root] == root`). Every other vertex reaches
//! the root by following parent pointers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Children lists in compressed form. Children of each vertex are sorted by
/// label.
#[derive(Debug, Clone)]
pub struct Children {
    offsets: Vec<usize>,
    list: Vec<usize>,
}

impl Children {
    fn from_parents(parent: &[usize], root: usize) -> Self {
        let n = parent.len();
        let mut offsets = vec![0usize; n + 1];
        for (v, &p) in parent.iter().enumerate() {
            if v != root {
                offsets[p + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut list = vec![0usize; n.saturating_sub(1)];
        for (v, &p) in parent.iter().enumerate() {
            if v != root {
                list[fill[p]] = v;
                fill[p] += 1;
            }
        }
        Children { offsets, list }
    }

    pub fn of(&self, v: usize) -> &[usize] {
        &self.list[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// A rooted labelled tree on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootedTree {
    parent: Vec<usize>,
    root: usize,
}

impl RootedTree {
    /// Validates a parent array: exactly one fixed point and no cycles.
    pub fn from_parents(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let mut root = None;
        for (v, &p) in parent.iter().enumerate() {
            if p >= n {
                return Err(Error::MalformedTree(format!(
                    "parent {p} of vertex {v} is out of range"
                )));
            }
            if p == v {
                if root.is_some() {
                    return Err(Error::MalformedTree("more than one root".into()));
                }
                root = Some(v);
            }
        }
        let root = root.ok_or_else(|| Error::MalformedTree("no root".into()))?;
        check_acyclic(&parent)?;
        Ok(RootedTree { parent, root })
    }

    /// The single-vertex tree.
    pub fn singleton() -> Self {
        RootedTree {
            parent: vec![0],
            root: 0,
        }
    }

    /// Builds an unchecked tree. Callers guarantee the parent-array invariants.
    pub(crate) fn from_parents_unchecked(parent: Vec<usize>, root: usize) -> Self {
        debug_assert_eq!(parent[root], root);
        debug_assert!(check_acyclic(&parent).is_ok());
        RootedTree { parent, root }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Parent of `v`, with the convention that the root is its own parent.
    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn into_parents(self) -> Vec<usize> {
        self.parent
    }

    pub fn edge_count(&self) -> usize {
        self.n() - 1
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                n: self.n(),
            })
        }
    }

    pub fn children(&self) -> Children {
        Children::from_parents(&self.parent, self.root)
    }

    /// Vertices in depth-first preorder, children visited by increasing label.
    pub fn preorder(&self) -> Vec<usize> {
        self.preorder_with(&self.children())
    }

    pub(crate) fn preorder_with(&self, children: &Children) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children.of(v).iter().rev());
        }
        order
    }

    /// Number of edges between the root and each vertex.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.n()];
        for v in self.preorder() {
            if v != self.root {
                depth[v] = depth[self.parent[v]] + 1;
            }
        }
        depth
    }

    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut u = v;
        while u != self.root {
            u = self.parent[u];
            d += 1;
        }
        d
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Sizes of all subtrees `t(v)`.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.n()];
        for &v in self.preorder().iter().rev() {
            if v != self.root {
                size[self.parent[v]] += size[v];
            }
        }
        size
    }

    /// Vertices from `v` up to and including the root.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut u = v;
        while u != self.root {
            u = self.parent[u];
            path.push(u);
        }
        path
    }

    /// Graph distance between two vertices.
    pub fn distance(&self, u: usize, v: usize) -> usize {
        let pu = self.path_to_root(u);
        let pv = self.path_to_root(v);
        let mut common = 0;
        while common < pu.len()
            && common < pv.len()
            && pu[pu.len() - 1 - common] == pv[pv.len() - 1 - common]
        {
            common += 1;
        }
        (pu.len() - common) + (pv.len() - common)
    }

    /// Edge set as unordered pairs `(min, max)`.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(v, &p)| v != p)
            .map(|(v, &p)| (v.min(p), v.max(p)))
            .collect()
    }

    /// The same edge set rooted at `v`. Parent pointers flip along the path
    /// from `v` to the old root.
    pub fn reroot(&self, v: usize) -> Result<RootedTree> {
        self.check_vertex(v)?;
        let mut parent = self.parent.clone();
        let mut prev = v;
        let mut cur = v;
        loop {
            let next = self.parent[cur];
            parent[cur] = prev;
            if cur == self.root {
                break;
            }
            prev = cur;
            cur = next;
        }
        Ok(RootedTree { parent, root: v })
    }

    /// Vertex set of the subtree `t(v)`, sorted.
    pub fn subtree(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let children = self.children();
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend_from_slice(children.of(u));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The union of all shortest paths between elements of `selection`.
    pub fn spanned_subtree(&self, selection: &[usize]) -> Result<SpannedSubtree> {
        if selection.is_empty() {
            return Err(Error::EmptySelection);
        }
        let n = self.n();
        let mut marked = vec![false; n];
        for &s in selection {
            self.check_vertex(s)?;
            marked[s] = true;
        }
        let total = marked.iter().filter(|&&m| m).count();
        let order = self.preorder();
        let mut count = vec![0usize; n];
        for &v in order.iter().rev() {
            if marked[v] {
                count[v] += 1;
            }
            if v != self.root {
                count[self.parent[v]] += count[v];
            }
        }
        let depth = self.depths();
        let apex = (0..n)
            .filter(|&v| count[v] == total)
            .max_by_key(|&v| depth[v])
            .expect("the root always holds every selected vertex");
        let mut parent = BTreeMap::new();
        for v in 0..n {
            if count[v] > 0 && depth[v] >= depth[apex] {
                parent.insert(v, if v == apex { v } else { self.parent[v] });
            }
        }
        Ok(SpannedSubtree { root: apex, parent })
    }

    /// Plants a new leaf `w_i` on each `attach[i]`.
    pub fn plant(&self, attach: &[usize]) -> Result<PlantedTree> {
        for &v in attach {
            self.check_vertex(v)?;
        }
        Ok(PlantedTree {
            base: self.clone(),
            attach: attach.to_vec(),
        })
    }

    /// Applies a relabelling: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> RootedTree {
        let mut parent = vec![0; self.n()];
        for v in 0..self.n() {
            parent[perm[v]] = perm[self.parent[v]];
        }
        RootedTree {
            parent,
            root: perm[self.root],
        }
    }

    /// Canonical line `n root p(1) .. p(n)` with 1-based labels.
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {}", self.n(), self.root + 1);
        for &p in &self.parent {
            s.push(' ');
            s.push_str(&(p + 1).to_string());
        }
        s
    }

    pub fn from_line(line: &str) -> Result<RootedTree> {
        let nums = parse_numbers(line)?;
        if nums.len() < 2 {
            return Err(Error::Parse("tree line needs `n root p(1) .. p(n)`".into()));
        }
        let n = nums[0];
        if nums.len() != n + 2 {
            return Err(Error::Parse(format!(
                "expected {} parent entries, found {}",
                n,
                nums.len() - 2
            )));
        }
        if nums[1..].contains(&0) {
            return Err(Error::Parse("labels are 1-based".into()));
        }
        let parent: Vec<usize> = nums[2..].iter().map(|&p| p - 1).collect();
        let tree = RootedTree::from_parents(parent)?;
        if tree.root != nums[1] - 1 {
            return Err(Error::Parse("declared root disagrees with parent array".into()));
        }
        Ok(tree)
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

fn parse_numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|e| Error::Parse(format!("`{tok}`: {e}")))
        })
        .collect()
}

/// Checks that following parents from every vertex reaches a fixed point.
fn check_acyclic(parent: &[usize]) -> Result<()> {
    // 0 = unvisited, 1 = on current walk, 2 = known to reach a fixed point
    let mut state = vec![0u8; parent.len()];
    let mut walk = Vec::new();
    for start in 0..parent.len() {
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            if parent[v] == v {
                break;
            }
            v = parent[v];
        }
        if state[v] == 1 && parent[v] != v {
            return Err(Error::MalformedTree(format!(
                "cycle through vertex {v}"
            )));
        }
        for u in walk.drain(..) {
            state[u] = 2;
        }
    }
    Ok(())
}

/// The spanned subtree `t[[S]]`, rooted at its vertex closest to `r(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedSubtree {
    pub root: usize,
    /// Parent of each spanned vertex inside the spanned subtree.
    pub parent: BTreeMap<usize, usize>,
}

impl SpannedSubtree {
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.parent.contains_key(&v)
    }
}

/// `t<S>`: the base tree with one extra leaf `w_i` hanging from each
/// `attach[i]`. Planted vertices get labels `n + i` and never count as nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedTree {
    pub base: RootedTree,
    pub attach: Vec<usize>,
}

impl PlantedTree {
    pub fn k(&self) -> usize {
        self.attach.len()
    }

    /// Number of real vertices; planted leaves are excluded.
    pub fn node_count(&self) -> usize {
        self.base.n()
    }

    pub fn edge_count(&self) -> usize {
        self.base.n() - 1 + self.attach.len()
    }

    pub fn planted_label(&self, i: usize) -> usize {
        self.base.n() + i
    }

    pub fn is_planted(&self, v: usize) -> bool {
        v >= self.base.n()
    }

    /// All edges as unordered label pairs, tree edges first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.base.edges().into_iter().collect();
        out.extend(
            self.attach
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, self.planted_label(i))),
        );
        out
    }
}

/// A sequence of rooted trees whose vertex sets partition `{0, .., n-1}`.
///
/// Stored as one parent array in which each tree root is a fixed point, plus
/// the order of the roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedForest {
    parent: Vec<usize>,
    roots: Vec<usize>,
}

impl OrderedForest {
    pub fn new(parent: Vec<usize>, roots: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        if parent.iter().any(|&p| p >= n) {
            return Err(Error::MalformedForest("parent out of range".into()));
        }
        let fixed: BTreeSet<usize> = (0..n).filter(|&v| parent[v] == v).collect();
        let listed: BTreeSet<usize> = roots.iter().copied().collect();
        if listed.len() != roots.len() || fixed != listed {
            return Err(Error::MalformedForest(
                "roots must be exactly the fixed points of the parent array, each listed once"
                    .into(),
            ));
        }
        check_acyclic(&parent).map_err(|e| Error::MalformedForest(e.to_string()))?;
        Ok(OrderedForest { parent, roots })
    }

    pub(crate) fn new_unchecked(parent: Vec<usize>, roots: Vec<usize>) -> Self {
        debug_assert!(OrderedForest::new(parent.clone(), roots.clone()).is_ok());
        OrderedForest { parent, roots }
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Number of trees.
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Index (in forest order) of the tree holding each vertex.
    pub fn tree_index(&self) -> Vec<usize> {
        let n = self.n();
        let mut root_pos = vec![usize::MAX; n];
        for (i, &r) in self.roots.iter().enumerate() {
            root_pos[r] = i;
        }
        let mut index = vec![usize::MAX; n];
        let mut walk = Vec::new();
        for start in 0..n {
            let mut v = start;
            while index[v] == usize::MAX && self.parent[v] != v {
                walk.push(v);
                v = self.parent[v];
            }
            let i = if index[v] == usize::MAX {
                root_pos[v]
            } else {
                index[v]
            };
            index[v] = i;
            for u in walk.drain(..) {
                index[u] = i;
            }
        }
        index
    }

    /// Vertex sets of the trees, in forest order, each sorted.
    pub fn vertex_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.len()];
        for (v, i) in self.tree_index().into_iter().enumerate() {
            sets[i].push(v);
        }
        sets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.vertex_sets().iter().map(Vec::len).collect()
    }

    /// Tree line for the `i`-th tree: `n root p(1) .. p(n)` over the ground
    /// set, with `0` for vertices outside the tree.
    pub fn tree_line(&self, i: usize) -> String {
        let index = self.tree_index();
        let mut s = format!("{} {}", self.n(), self.roots[i] + 1);
        for v in 0..self.n() {
            s.push(' ');
            if index[v] == i {
                s.push_str(&(self.parent[v] + 1).to_string());
            } else {
                s.push('0');
            }
        }
        s
    }

    /// `k` on the first line followed by one tree line per tree.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.len());
        for i in 0..self.len() {
            s.push_str(&self.tree_line(i));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<OrderedForest> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty forest text".into()))?;
        let k: usize = header
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("forest size: {e}")))?;
        let mut parent: Option<Vec<usize>> = None;
        let mut roots = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing tree line".into()))?;
            let nums = parse_numbers(line)?;
            if nums.len() < 2 || nums.len() != nums[0] + 2 || nums[1] == 0 {
                return Err(Error::Parse(format!("bad forest tree line `{line}`")));
            }
            let n = nums[0];
            let parent = parent.get_or_insert_with(|| vec![usize::MAX; n]);
            if parent.len() != n {
                return Err(Error::Parse("tree lines disagree on n".into()));
            }
            for v in 0..n {
                let p = nums[2 + v];
                if p == 0 {
                    continue;
                }
                if parent[v] != usize::MAX {
                    return Err(Error::MalformedForest(format!(
                        "vertex {} appears in two trees",
                        v + 1
                    )));
                }
                parent[v] = p - 1;
            }
            roots.push(nums[1] - 1);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after forest".into()));
        }
        let parent = parent.ok_or_else(|| Error::Parse("forest with no trees".into()))?;
        if parent.contains(&usize::MAX) {
            return Err(Error::MalformedForest("trees do not cover the ground set".into()));
        }
        let forest = OrderedForest::new(parent, roots)?;
        // every tree line must describe exactly one component
        for (i, set) in forest.vertex_sets().iter().enumerate() {
            if set.is_empty() {
                return Err(Error::MalformedForest(format!("tree {} is empty", i + 1)));
            }
        }
        Ok(forest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> RootedTree {
        // 0 <- 1 <- 2, rooted at 0
        RootedTree::from_parents(vec![0, 0, 1]).unwrap()
    }

    #[test]
    fn rejects_bad_parent_arrays() {
        assert!(RootedTree::from_parents(vec![]).is_err());
        assert!(RootedTree::from_parents(vec![1, 0]).is_err());
        assert!(RootedTree::from_parents(vec![0, 1]).is_err());
        assert!(RootedTree::from_parents(vec![0, 3]).is_err());
        assert!(RootedTree::from_parents(vec![0, 2, 1]).is_err());
    }

    #[test]
    fn validation_accepts_exactly_cayley_count() {
        for n in 1..=4usize {
            let total = n.pow(n as u32);
            let mut valid = 0;
            for code in 0..total {
                let mut c = code;
                let parent: Vec<usize> = (0..n)
                    .map(|_| {
                        let p = c % n;
                        c /= n;
                        p
                    })
                    .collect();
                if RootedTree::from_parents(parent).is_ok() {
                    valid += 1;
                }
            }
            assert_eq!(valid, n.pow(n as u32 - 1), "n = {n}");
        }
    }

    #[test]
    fn reroot_at_root_is_identity() {
        let t = path3();
        assert_eq!(t.reroot(0).unwrap(), t);
    }

    #[test]
    fn reroot_two_vertex_path() {
        let t = RootedTree::from_parents(vec![0, 0]).unwrap();
        let r = t.reroot(1).unwrap();
        assert_eq!(r.root(), 1);
        assert_eq!(r.parents(), &[1, 1]);
        assert_eq!(r.edges(), t.edges());
    }

    #[test]
    fn reroot_rejects_out_of_range() {
        assert_eq!(
            path3().reroot(3),
            Err(Error::InvalidVertex { vertex: 3, n: 3 })
        );
    }

    #[test]
    fn spanned_subtree_examples() {
        let t = path3();
        let s = t.spanned_subtree(&[0]).unwrap();
        assert_eq!(s.edge_count(), 0);
        let s = t.spanned_subtree(&[0, 2]).unwrap();
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.root, 0);
        let s = t.spanned_subtree(&[2, 1]).unwrap();
        assert_eq!(s.root, 1);
        assert_eq!(s.edge_count(), 1);
        assert_eq!(t.spanned_subtree(&[]), Err(Error::EmptySelection));
    }

    #[test]
    fn spanned_subtree_of_star() {
        // centre 0 with leaves 1..=5
        let t = RootedTree::from_parents(vec![0; 6]).unwrap();
        for k in 0..=5usize {
            let mut sel = vec![0];
            sel.extend(1..=k);
            // brute-force path union: each leaf contributes its own edge
            let expected: BTreeSet<(usize, usize)> = (1..=k).map(|l| (0, l)).collect();
            let s = t.spanned_subtree(&sel).unwrap();
            assert_eq!(s.edge_count(), expected.len());
        }
        // two leaves without the centre still route through it
        assert_eq!(t.spanned_subtree(&[3, 4]).unwrap().edge_count(), 2);
    }

    #[test]
    fn plant_counts() {
        let t = RootedTree::singleton();
        let p = t.plant(&[0]).unwrap();
        assert_eq!((p.node_count(), p.edge_count(), p.k()), (1, 1, 1));
        let p = path3().plant(&[1, 1]).unwrap();
        assert_eq!(p.edge_count(), 4);
        assert_eq!(p.edges()[2..], [(1, 3), (1, 4)]);
        let p = path3().plant(&[0, 2, 1]).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.node_count(), 3);
        assert!(path3().plant(&[5]).is_err());
    }

    #[test]
    fn subtree_membership_matches_bfs() {
        // 0 root; 1,2 children of 0; 3 child of 1; 4 child of 3
        let t = RootedTree::from_parents(vec![0, 0, 0, 1, 3]).unwrap();
        assert_eq!(t.subtree(0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(t.subtree(2).unwrap(), vec![2]);
        // independent oracle: v is in t(u) iff u lies on the path from v to the root
        for u in 0..5 {
            let expected: Vec<usize> = (0..5).filter(|&v| t.path_to_root(v).contains(&u)).collect();
            assert_eq!(t.subtree(u).unwrap(), expected);
        }
        let sizes = t.subtree_sizes();
        assert_eq!(sizes, vec![5, 3, 1, 2, 1]);
    }

    #[test]
    fn distance_and_depth() {
        let t = RootedTree::from_parents(vec![0, 0, 0, 1, 3]).unwrap();
        assert_eq!(t.depths(), vec![0, 1, 1, 2, 3]);
        assert_eq!(t.distance(4, 2), 4);
        assert_eq!(t.distance(4, 4), 0);
        assert_eq!(t.height(), 3);
    }

    #[test]
    fn tree_line_format() {
        let t = path3();
        assert_eq!(t.to_line(), "3 1 1 1 2");
        assert_eq!(RootedTree::from_line("3 1 1 1 2").unwrap(), t);
        assert!(RootedTree::from_line("3 2 1 1 2").is_err());
        assert!(RootedTree::from_line("3 1 1 1").is_err());
    }

    #[test]
    fn forest_text_format() {
        // trees {1} and {0, 2} with 2 -> 0, ordered ({1}, {0,2})
        let f = OrderedForest::new(vec![0, 1, 0], vec![1, 0]).unwrap();
        let text = f.to_text();
        assert_eq!(text, "2\n3 2 0 2 0\n3 1 1 0 1\n");
        assert_eq!(OrderedForest::from_text(&text).unwrap(), f);
        assert_eq!(f.vertex_sets(), vec![vec![1], vec![0, 2]]);
        assert!(OrderedForest::new(vec![0, 1, 0], vec![0]).is_err());
        assert!(OrderedForest::new(vec![0, 1, 0], vec![0, 1, 1]).is_err());
    }
}
