use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::chain::{ChainKind, QuotientChain};
use super::{degree_stats, Edge, WeightedGraph};
use crate::error::{Error, Result};

/// Default cap on the number of vertices a construction may allocate.
pub const DEFAULT_MAX_VERTICES: u64 = 1 << 24;

/// Largest supported tree height; keeps `2^(h+1)` inside a `u64`.
pub const MAX_HEIGHT: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Tree,
    Path,
}

/// Sequence of left/right turns taken at branch vertices on the way down
/// from the root. Bit `len - 1 - i` holds the `i`-th turn, with `L = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BranchWord {
    bits: u64,
    len: u8,
}

impl BranchWord {
    pub fn new(bits: u64, len: u8) -> Self {
        debug_assert!(len < 64 && (len == 0 || bits >> len == 0));
        BranchWord { bits, len }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    fn prefix(&self, l: u8) -> u64 {
        if l == 0 {
            0
        } else {
            self.bits >> (self.len - l)
        }
    }
}

impl Ord for BranchWord {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.len.min(other.len);
        self.prefix(l)
            .cmp(&other.prefix(l))
            .then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BranchWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BranchWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.bits >> i) & 1 == 0 { "L" } else { "R" })?;
        }
        Ok(())
    }
}

/// The `k`-subdivided complete binary tree of height `h`, optionally with a
/// path threaded through every level set in left-to-right order.
///
/// Vertex ids run level by level and, inside a level, in branch-word order,
/// so the level set `V_l` is the contiguous id range [`HatTree::level_range`].
#[derive(Debug, Clone, PartialEq)]
pub struct HatTree {
    graph: WeightedGraph,
    h: u32,
    k: u32,
    level: Vec<u32>,
    level_offsets: Vec<usize>,
    edge_kind: Vec<EdgeKind>,
    branch_word: Vec<BranchWord>,
    level_paths: bool,
}

fn level_size(level: u64, k: u64) -> u64 {
    1u64 << level.div_ceil(k)
}

/// `1 + k (2^(h+1) - 2)`, or `None` on overflow.
fn vertex_count(h: u32, k: u32) -> Option<u64> {
    let tree_edges = (1u64 << (h + 1)) - 2;
    tree_edges.checked_mul(k as u64)?.checked_add(1)
}

/// The complete rooted binary tree `T_h` with unit weights.
pub fn build_binary_tree(h: u32) -> Result<HatTree> {
    build(h, 1, false, DEFAULT_MAX_VERTICES)
}

/// `T_{h,k}` with the level paths added.
pub fn build_hat_tree(h: u32, k: u32) -> Result<HatTree> {
    build(h, k, true, DEFAULT_MAX_VERTICES)
}

pub fn build_hat_tree_with_capacity(h: u32, k: u32, max_vertices: u64) -> Result<HatTree> {
    build(h, k, true, max_vertices)
}

fn build(h: u32, k: u32, level_paths: bool, max_vertices: u64) -> Result<HatTree> {
    if h < 1 {
        return Err(Error::invalid("tree height h must be at least 1"));
    }
    if k < 1 {
        return Err(Error::invalid("subdivision count k must be at least 1"));
    }
    if h > MAX_HEIGHT {
        return Err(Error::CapacityExceeded {
            what: format!("tree height {h}"),
            limit: MAX_HEIGHT as u64,
        });
    }
    let n = match vertex_count(h, k) {
        Some(n) if n <= max_vertices => n as usize,
        _ => {
            return Err(Error::CapacityExceeded {
                what: format!("vertex count of the (h={h}, k={k}) tree"),
                limit: max_vertices,
            })
        }
    };

    let depth = (h as usize) * (k as usize);
    let mut level_offsets = Vec::with_capacity(depth + 2);
    level_offsets.push(0);
    level_offsets.push(1);
    for l in 1..=depth {
        let size = level_size(l as u64, k as u64) as usize;
        level_offsets.push(level_offsets[l] + size);
    }
    debug_assert_eq!(level_offsets[depth + 1], n);

    let mut level = Vec::with_capacity(n);
    let mut branch_word = Vec::with_capacity(n);
    for l in 0..=depth {
        let len = (l as u64).div_ceil(k as u64) as u8;
        for i in 0..(level_offsets[l + 1] - level_offsets[l]) {
            level.push(l as u32);
            branch_word.push(BranchWord::new(i as u64, len));
        }
    }

    let mut edges = Vec::new();
    let mut edge_kind = Vec::new();
    for l in 1..=depth {
        let below = level_offsets[l - 1];
        let here = level_offsets[l];
        let size = level_offsets[l + 1] - here;
        let branching = size != here - below;
        for i in 0..size {
            let parent = below + if branching { i / 2 } else { i };
            edges.push(Edge {
                u: parent,
                v: here + i,
                w: 1.0,
            });
            edge_kind.push(EdgeKind::Tree);
        }
        if level_paths {
            for i in 1..size {
                edges.push(Edge {
                    u: here + i - 1,
                    v: here + i,
                    w: 1.0,
                });
                edge_kind.push(EdgeKind::Path);
            }
        }
    }

    Ok(HatTree {
        graph: WeightedGraph::from_parts(vec![1.0; n], edges),
        h,
        k,
        level,
        level_offsets,
        edge_kind,
        branch_word,
        level_paths,
    })
}

impl HatTree {
    /// Reattaches hat-tree structure to a graph laid out with canonical ids,
    /// then checks every structural invariant.
    pub fn from_graph(graph: WeightedGraph, h: u32, k: u32, root: usize) -> Result<Self> {
        if root != 0 {
            return Err(Error::InvalidInput(format!(
                "hat tree root must be 0, got {root}"
            )));
        }
        let reference = build(h, k, true, graph.n() as u64).map_err(|e| {
            Error::InvalidInput(format!("metadata does not describe a hat tree: {e}"))
        })?;
        if reference.graph.n() != graph.n() {
            return Err(Error::InvalidInput(format!(
                "expected {} vertices for h={h}, k={k}, found {}",
                reference.graph.n(),
                graph.n()
            )));
        }
        let edge_kind = graph
            .edges()
            .iter()
            .map(|e| {
                if reference.level[e.u] == reference.level[e.v] {
                    EdgeKind::Path
                } else {
                    EdgeKind::Tree
                }
            })
            .collect();
        let tree = HatTree {
            graph,
            edge_kind,
            ..reference
        };
        tree.validate()?;
        Ok(tree)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.graph
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Depth of the deepest level, `h * k`.
    pub fn depth(&self) -> usize {
        self.level_offsets.len() - 2
    }

    pub fn has_level_paths(&self) -> bool {
        self.level_paths
    }

    pub fn level(&self, x: usize) -> usize {
        self.level[x] as usize
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    pub fn level_range(&self, l: usize) -> Range<usize> {
        self.level_offsets[l]..self.level_offsets[l + 1]
    }

    pub fn level_len(&self, l: usize) -> usize {
        self.level_offsets[l + 1] - self.level_offsets[l]
    }

    pub fn edge_kind(&self, edge: usize) -> EdgeKind {
        self.edge_kind[edge]
    }

    pub fn edge_kinds(&self) -> &[EdgeKind] {
        &self.edge_kind
    }

    pub fn branch_word(&self, x: usize) -> BranchWord {
        self.branch_word[x]
    }

    /// Edges of the given kind.
    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> + '_ {
        self.graph
            .edges()
            .iter()
            .zip(&self.edge_kind)
            .filter(move |(_, &k)| k == kind)
            .map(|(e, _)| e)
    }

    /// Tree-edge neighbors one level further from the root.
    pub fn children(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let l = self.level[x];
        self.graph
            .incident(x)
            .iter()
            .filter(move |&&(y, idx)| {
                self.edge_kind[idx] == EdgeKind::Tree && self.level[y] == l + 1
            })
            .map(|&(y, _)| y)
    }

    /// The leftmost vertex of the deepest level.
    pub fn leftmost_deepest(&self) -> usize {
        self.level_offsets[self.depth()]
    }

    /// Checks every structural invariant of the construction.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        let g = &self.graph;
        let n = g.n();
        let (h, k) = (self.h as u64, self.k as u64);
        let depth = self.depth();

        if !g.is_unweighted() {
            return fail("hat tree must carry unit weights".into());
        }
        let expect_n = 1 + k * ((1u64 << (h + 1)) - 2);
        if n as u64 != expect_n {
            return fail(format!("vertex count {n}, expected {expect_n}"));
        }
        let tree_edges = k * ((1u64 << (h + 1)) - 2);
        let expect_m = if self.level_paths {
            2 * tree_edges - h * k
        } else {
            tree_edges
        };
        if g.m() as u64 != expect_m {
            return fail(format!("edge count {}, expected {expect_m}", g.m()));
        }

        for l in 0..=depth {
            let expect = if l == 0 { 1 } else { level_size(l as u64, k) };
            if self.level_len(l) as u64 != expect {
                return fail(format!(
                    "level {l} has {} vertices, expected {expect}",
                    self.level_len(l)
                ));
            }
            let range = self.level_range(l);
            if self.level[range.clone()].iter().any(|&x| x as usize != l) {
                return fail(format!("level labels disagree with layout at level {l}"));
            }
            if self.branch_word[range.clone()]
                .windows(2)
                .any(|p| p[0] >= p[1])
            {
                return fail(format!("level {l} is not in branch-word order"));
            }
        }

        // Levels are BFS distances from the root.
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::from([0usize]);
        dist[0] = 0;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.incident(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| dist[x] != self.level[x] as usize) {
            return fail(format!(
                "vertex {x} has level {} but distance {}",
                self.level[x], dist[x]
            ));
        }

        let mut parents = vec![0usize; n];
        let mut path_edges = vec![0usize; depth + 1];
        for (e, kind) in g.edges().iter().zip(&self.edge_kind) {
            let (lu, lv) = (self.level[e.u], self.level[e.v]);
            match kind {
                EdgeKind::Tree => {
                    if lv != lu + 1 {
                        return fail(format!(
                            "tree edge {{{}, {}}} does not descend one level",
                            e.u, e.v
                        ));
                    }
                    parents[e.v] += 1;
                }
                EdgeKind::Path => {
                    if !self.level_paths || lu != lv || e.v != e.u + 1 {
                        return fail(format!(
                            "path edge {{{}, {}}} does not join consecutive vertices of a level",
                            e.u, e.v
                        ));
                    }
                    path_edges[lu as usize] += 1;
                }
            }
        }
        if let Some(x) = (1..n).find(|&x| parents[x] != 1) {
            return fail(format!("vertex {x} has {} parents", parents[x]));
        }
        if self.level_paths {
            for (l, &count) in path_edges.iter().enumerate() {
                if count != self.level_len(l) - 1 {
                    return fail(format!("level {l} carries {count} path edges"));
                }
            }
        }

        let stats = degree_stats(g);
        if stats.max_degree > 5 {
            return fail(format!("maximum degree {} exceeds 5", stats.max_degree));
        }
        if n >= 3 && g.m() > 3 * n - 6 {
            return fail(format!(
                "{} edges on {n} vertices violates |E| <= 3|V| - 6",
                g.m()
            ));
        }
        Ok(())
    }
}

/// Collapses each level set to one vertex of mass `|V_l|`; tree edges between
/// consecutive levels aggregate into one edge, path edges vanish.
pub fn quotient_by_levels(tree: &HatTree) -> QuotientChain {
    let depth = tree.depth();
    let weights: Vec<f64> = (0..=depth).map(|l| tree.level_len(l) as f64).collect();
    let mut crossing = vec![0.0; depth];
    for e in tree.edges_of(EdgeKind::Tree) {
        crossing[tree.level(e.u).min(tree.level(e.v))] += e.w;
    }
    let edges = crossing
        .into_iter()
        .enumerate()
        .map(|(l, w)| Edge { u: l, v: l + 1, w })
        .collect();
    QuotientChain::from_parts(
        WeightedGraph::from_parts(weights, edges),
        ChainKind::Subdivided {
            h: tree.h(),
            k: tree.k(),
        },
    )
}
