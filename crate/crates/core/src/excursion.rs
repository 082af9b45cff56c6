//! Lattice-path codings of trees and the concatenation of the contours of
//! the pieces removed by the cut process.
//!
//! Children are always visited in increasing label order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::assemble;
use crate::fragmentation::{fragment, FragmentationTrace};
use crate::samplers::{sample_cayley, tree_from_lukasiewicz, RngStream};
use crate::stats::{blocks_chi_square, ChiSquare};
use crate::tree::{OrderedForest, RootedTree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// One step `c(v) - 1` per vertex in preorder.
    Lukasiewicz,
    /// `+1` down an edge, `-1` back up.
    Contour,
}

impl std::str::FromStr for PathKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lukasiewicz" => Ok(PathKind::Lukasiewicz),
            "contour" => Ok(PathKind::Contour),
            _ => Err(Error::Parse(format!("unknown path kind {s:?}"))),
        }
    }
}

/// A walk on the integers started at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub kind: PathKind,
    pub steps: Vec<i64>,
}

impl LatticePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Heights `h_0 = 0, h_1, .., h_len`.
    pub fn heights(&self) -> Vec<i64> {
        let mut h = Vec::with_capacity(self.steps.len() + 1);
        let mut acc = 0;
        h.push(0);
        for &s in &self.steps {
            acc += s;
            h.push(acc);
        }
        h
    }
}

fn children_lists(parent: &[usize]) -> Vec<Vec<usize>> {
    let mut kids = vec![Vec::new(); parent.len()];
    for (v, &p) in parent.iter().enumerate() {
        if p != v {
            kids[p].push(v);
        }
    }
    kids
}

fn contour_into(kids: &[Vec<usize>], root: usize, out: &mut Vec<i64>) {
    // (vertex, next child index)
    let mut stack = vec![(root, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, i) = *top;
        if i < kids[v].len() {
            top.1 += 1;
            out.push(1);
            stack.push((kids[v][i], 0));
        } else {
            stack.pop();
            if !stack.is_empty() {
                out.push(-1);
            }
        }
    }
}

/// Codes `t` as a lattice path.
pub fn encode(t: &RootedTree, kind: PathKind) -> LatticePath {
    let steps = match kind {
        PathKind::Lukasiewicz => {
            let ch = t.children();
            t.preorder().into_iter().map(|v| ch.degree(v) as i64 - 1).collect()
        }
        PathKind::Contour => {
            let kids = children_lists(t.parents());
            let mut out = Vec::with_capacity(2 * t.n().saturating_sub(1));
            contour_into(&kids, t.root(), &mut out);
            out
        }
    };
    LatticePath { kind, steps }
}

/// Rebuilds the ordered tree coded by `path`, labelled by preorder rank
/// (root 0).
pub fn decode(path: &LatticePath) -> Result<RootedTree> {
    let bad = |index: usize, reason: &str| Error::InvalidSequence {
        index,
        reason: reason.into(),
    };
    match path.kind {
        PathKind::Lukasiewicz => {
            if path.steps.is_empty() {
                return Err(bad(0, "empty Lukasiewicz path"));
            }
            let mut h = 0i64;
            let last = path.steps.len() - 1;
            let mut counts = Vec::with_capacity(path.steps.len());
            for (i, &s) in path.steps.iter().enumerate() {
                if s < -1 {
                    return Err(bad(i, "step below -1"));
                }
                h += s;
                if (i < last && h < 0) || (i == last && h != -1) {
                    return Err(bad(i, "path must stay nonnegative and end at -1"));
                }
                counts.push((s + 1) as usize);
            }
            Ok(tree_from_lukasiewicz(&counts))
        }
        PathKind::Contour => {
            let mut parent = vec![0usize];
            let mut cur = 0usize;
            for (i, &s) in path.steps.iter().enumerate() {
                match s {
                    1 => {
                        parent.push(cur);
                        cur = parent.len() - 1;
                    }
                    -1 if cur != 0 => cur = parent[cur],
                    -1 => return Err(bad(i, "contour goes below 0")),
                    _ => return Err(bad(i, "contour steps are +1 or -1")),
                }
            }
            if cur != 0 {
                return Err(bad(path.steps.len(), "contour does not return to 0"));
            }
            RootedTree::from_parents(parent)
        }
    }
}

/// `t` relabelled by preorder rank, children visited by label.
pub fn canonical_shape(t: &RootedTree) -> RootedTree {
    let order = t.preorder();
    let mut rank = vec![0usize; t.n()];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    t.relabel(&rank)
}

/// Concatenated contours of the pieces removed by a complete cut run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgePath {
    pub path: LatticePath,
    /// Start of each excursion, then the total length; `kappa + 1` entries.
    pub boundaries: Vec<usize>,
    /// Vertex count of each piece, in cut order.
    pub sizes: Vec<usize>,
}

impl BridgePath {
    pub fn excursion_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn excursion_lengths(&self) -> Vec<usize> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Each excursion is a contour path of length `2 (size - 1)`: it starts
    /// and ends at 0 and stays nonnegative. A contour may return to 0 inside
    /// an excursion when its root has several children.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.boundaries.len() != self.sizes.len() + 1 {
            return Err("boundary count does not match piece count".into());
        }
        if self.boundaries.first() != Some(&0) || self.boundaries.last() != Some(&self.path.len()) {
            return Err("boundaries do not span the path".into());
        }
        let h = self.path.heights();
        if let Some(i) = h.iter().position(|&x| x < 0) {
            return Err(format!("negative height at step {i}"));
        }
        for (j, w) in self.boundaries.windows(2).enumerate() {
            let m = self.sizes[j];
            if w[1] < w[0] || w[1] - w[0] != 2 * (m - 1) {
                return Err(format!("excursion {j} has the wrong length for a piece of size {m}"));
            }
            if h[w[0]] != 0 || h[w[1]] != 0 {
                return Err(format!("excursion {j} does not start and end at 0"));
            }
        }
        Ok(())
    }
}

fn pieces(trace: &FragmentationTrace, t: &RootedTree) -> Result<OrderedForest> {
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
    Ok(assemble(t, trace.effective_vertices(), Vec::new()).forest)
}

/// Contours of the removed pieces, earliest cut first.
pub fn bridge_transform(t: &RootedTree, trace: &FragmentationTrace) -> Result<BridgePath> {
    let forest = pieces(trace, t)?;
    let kids = children_lists(forest.parents());
    let mut steps = Vec::with_capacity(2 * t.n());
    let mut boundaries = vec![0];
    for &r in forest.roots() {
        contour_into(&kids, r, &mut steps);
        boundaries.push(steps.len());
    }
    Ok(BridgePath {
        path: LatticePath {
            kind: PathKind::Contour,
            steps,
        },
        boundaries,
        sizes: forest.sizes(),
    })
}

/// Where the parent of a non-root cut vertex sits among the pieces cut
/// after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentMark {
    /// 1-based index of the effective cut.
    pub cut: usize,
    pub vertex: usize,
    pub parent: usize,
    /// 1-based index of the piece holding `parent`.
    pub piece: usize,
    /// Rank of `parent` among the vertices of the later pieces, listed piece
    /// by piece in preorder.
    pub offset: usize,
    /// Total size of the later pieces.
    pub later_mass: usize,
}

/// One mark per effective cut except the last (the root).
pub fn attachment_marks(trace: &FragmentationTrace, t: &RootedTree) -> Result<Vec<AttachmentMark>> {
    let forest = pieces(trace, t)?;
    let kids = children_lists(forest.parents());
    let k = forest.len();
    // position of each vertex: (piece, preorder rank inside the piece)
    let mut piece_of = vec![0usize; t.n()];
    let mut rank = vec![0usize; t.n()];
    for (j, &r) in forest.roots().iter().enumerate() {
        let mut stack = vec![r];
        let mut i = 0;
        while let Some(v) = stack.pop() {
            piece_of[v] = j;
            rank[v] = i;
            i += 1;
            stack.extend(kids[v].iter().rev());
        }
    }
    let sizes = forest.sizes();
    // after[j] = total size of pieces j.. (0-based)
    let mut after = vec![0usize; k + 1];
    for j in (0..k).rev() {
        after[j] = after[j + 1] + sizes[j];
    }
    let mut marks = Vec::with_capacity(k.saturating_sub(1));
    for (i, &x) in forest.roots()[..k.saturating_sub(1)].iter().enumerate() {
        let y = t.parent(x);
        let j = piece_of[y];
        debug_assert!(j > i);
        marks.push(AttachmentMark {
            cut: i + 1,
            vertex: x,
            parent: y,
            piece: j + 1,
            offset: after[i + 1] - after[j] + rank[y],
            later_mass: after[i + 1],
        });
    }
    Ok(marks)
}

/// Monte Carlo check that, given the removed pieces, each mark is uniform
/// over the later vertices. Runs on uniform trees with `sigma = 1`.
pub fn attachment_uniformity_check(n: usize, seed: u64, replicates: u64) -> Result<ChiSquare> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    // (forest text, cut index) -> counts per offset
    let mut blocks: BTreeMap<(String, usize), Vec<u64>> = BTreeMap::new();
    for r in 0..replicates {
        let mut rng = RngStream::new(seed, r);
        let t = sample_cayley(n, &mut rng)?;
        let trace = fragment(&t, 1.0, &mut rng, None)?;
        let text = pieces(&trace, &t)?.to_text();
        for m in attachment_marks(&trace, &t)? {
            let block = blocks
                .entry((text.clone(), m.cut))
                .or_insert_with(|| vec![0; m.later_mass]);
            block[m.offset] += 1;
        }
    }
    let blocks: Vec<Vec<u64>> = blocks.into_values().collect();
    blocks_chi_square(&blocks)
}
