//! Weighted graphs and the constructions built on them.
//!
//! A [`WeightedGraph`] carries a positive mass `pi(x)` on every vertex and a
//! positive conductance `w(x, y)` on every undirected edge. Vertices are the
//! integers `0..n`; edges keep their insertion order, which is what the
//! serializers and the hat-tree edge tags index into.

mod chain;
mod hat;
pub mod io;
pub mod planarity;
pub mod random;

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use chain::{build_weighted_chain, ChainKind, QuotientChain};
pub use hat::{
    build_binary_tree, build_hat_tree, build_hat_tree_with_capacity, quotient_by_levels,
    BranchWord, EdgeKind, HatTree, DEFAULT_MAX_VERTICES,
};
pub use planarity::{check_planarity, Embedding, KuratowskiKind, KuratowskiWitness, Planarity};

/// An undirected edge `{u, v}` with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// The endpoint of this edge that is not `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A finite undirected graph with vertex masses and edge conductances.
///
/// Immutable once built. Neighbor iteration uses a compressed adjacency
/// index, so every incident edge of `x` is seen exactly once.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_weight: Vec<f64>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    incidence: Vec<(usize, usize)>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_weight == other.vertex_weight && self.edges == other.edges
    }
}

impl WeightedGraph {
    /// Builds a graph from vertex masses and `(u, v, w)` triples.
    ///
    /// Parallel edges are merged by summing their weights; the merged edge
    /// keeps the position of its first occurrence.
    pub fn new(
        vertex_weight: Vec<f64>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = vertex_weight.len();
        for (x, &p) in vertex_weight.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "vertex {x} has non-positive weight {p}"
                )));
            }
        }
        let mut merged: Vec<Edge> = Vec::new();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge {{{a}, {b}}} references a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "edge {{{a}, {b}}} has non-positive weight {w}"
                )));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            match seen.get(&(u, v)) {
                Some(&idx) => merged[idx].w += w,
                None => {
                    seen.insert((u, v), merged.len());
                    merged.push(Edge { u, v, w });
                }
            }
        }
        Ok(Self::from_parts(vertex_weight, merged))
    }

    /// Unit masses and unit conductances.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(vec![1.0; n], edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    // Callers guarantee the edge list is already valid and merged.
    pub(crate) fn from_parts(vertex_weight: Vec<f64>, edges: Vec<Edge>) -> Self {
        let n = vertex_weight.len();
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut incidence = vec![(0, 0); offsets[n]];
        for (idx, e) in edges.iter().enumerate() {
            incidence[cursor[e.u]] = (e.v, idx);
            cursor[e.u] += 1;
            incidence[cursor[e.v]] = (e.u, idx);
            cursor[e.v] += 1;
        }
        WeightedGraph {
            vertex_weight,
            edges,
            offsets,
            incidence,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vertex_weight.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    #[inline]
    pub fn pi(&self, x: usize) -> f64 {
        self.vertex_weight[x]
    }

    /// `(neighbor, edge index)` pairs incident to `x`.
    #[inline]
    pub fn incident(&self, x: usize) -> &[(usize, usize)] {
        &self.incidence[self.offsets[x]..self.offsets[x + 1]]
    }

    /// `(neighbor, weight)` pairs incident to `x`.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.incident(x)
            .iter()
            .map(move |&(y, idx)| (y, self.edges[idx].w))
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Sum of conductances at `x`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.neighbors(x).map(|(_, w)| w).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.vertex_weight.iter().sum()
    }

    /// True when every mass and every conductance equals one.
    pub fn is_unweighted(&self) -> bool {
        self.vertex_weight.iter().all(|&p| p == 1.0) && self.edges.iter().all(|e| e.w == 1.0)
    }

    /// Same edges, new vertex masses.
    pub fn with_vertex_weights(&self, vertex_weight: Vec<f64>) -> Result<Self> {
        if vertex_weight.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: vertex_weight.len(),
            });
        }
        if let Some(x) = vertex_weight
            .iter()
            .position(|&p| !(p > 0.0 && p.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "vertex {x} has non-positive weight {}",
                vertex_weight[x]
            )));
        }
        Ok(Self::from_parts(vertex_weight, self.edges.clone()))
    }

    /// Same edges with every conductance multiplied by `factor`.
    pub fn scale_edge_weights(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.vertex_weight.clone(),
            self.edges.iter().map(|e| (e.u, e.v, e.w * factor)),
        )
    }

    /// Relabels vertex `x` as `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        let mut hit = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut hit[p], true) {
                return Err(Error::invalid("relabeling is not a permutation"));
            }
        }
        let mut weights = vec![0.0; n];
        for (x, &p) in perm.iter().enumerate() {
            weights[p] = self.vertex_weight[x];
        }
        Self::new(
            weights,
            self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.w)),
        )
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            label[s] = id;
            queue.push_back(s);
            let mut members = vec![s];
            while let Some(x) = queue.pop_front() {
                for &(y, _) in self.incident(x) {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }
}

/// Maximum combinatorial degree and the weighted maximum "degree"
/// `max_x pi(x)^-1 * sum_y w(x, y)` that enters the Cheeger inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub max_degree: usize,
    pub d_max: f64,
}

pub fn degree_stats(g: &WeightedGraph) -> DegreeStats {
    let mut max_degree = 0;
    let mut d_max: f64 = 0.0;
    for x in 0..g.n() {
        max_degree = max_degree.max(g.degree(x));
        d_max = d_max.max(g.weighted_degree(x) / g.pi(x));
    }
    DegreeStats { max_degree, d_max }
}

/// Replaces every edge by a path of `k` edges through `k - 1` new vertices.
///
/// New vertices are appended after the original ones, edge by edge. A fresh
/// vertex on an edge of weight `w` gets mass `w` and each sub-edge keeps
/// weight `w`; on unit-weight graphs this is the plain subdivision.
pub fn subdivide_edges(g: &WeightedGraph, k: usize) -> Result<WeightedGraph> {
    if k == 0 {
        return Err(Error::invalid("subdivision count k must be at least 1"));
    }
    if k == 1 {
        return Ok(g.clone());
    }
    let fresh = g
        .m()
        .checked_mul(k - 1)
        .ok_or_else(|| Error::invalid("subdivision overflows usize"))?;
    let mut weights = g.vertex_weight.clone();
    weights.reserve(fresh);
    let mut edges = Vec::with_capacity(g.m() * k);
    for e in g.edges() {
        let mut prev = e.u;
        for _ in 1..k {
            let x = weights.len();
            weights.push(e.w);
            edges.push(Edge {
                u: prev.min(x),
                v: prev.max(x),
                w: e.w,
            });
            prev = x;
        }
        edges.push(Edge {
            u: prev.min(e.v),
            v: prev.max(e.v),
            w: e.w,
        });
    }
    Ok(WeightedGraph::from_parts(weights, edges))
}

/// Complete graph on `n` vertices with unit weights.
pub fn complete_graph(n: usize) -> WeightedGraph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    WeightedGraph::unweighted(n, edges).expect("complete graph is valid")
}

/// Complete bipartite graph `K_{a,b}`; the first side is `0..a`.
pub fn complete_bipartite(a: usize, b: usize) -> WeightedGraph {
    let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
    WeightedGraph::unweighted(a + b, edges).expect("complete bipartite graph is valid")
}

/// Path `0 - 1 - ... - (n-1)` with unit weights.
pub fn path_graph(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (1..n).map(|v| (v - 1, v))).expect("path graph is valid")
}

/// Cycle on `n >= 3` vertices with unit weights.
pub fn cycle_graph(n: usize) -> WeightedGraph {
    WeightedGraph::unweighted(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_edges_merge_by_summing() {
        let g = WeightedGraph::new(vec![1.0; 3], [(0, 1, 1.0), (1, 0, 2.5), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 3.5 });
        assert_eq!(g.weighted_degree(1), 4.5);
    }

    #[test]
    fn rejects_loops_and_nonpositive_weights() {
        assert!(WeightedGraph::new(vec![1.0; 2], [(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], [(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0, -1.0], [(0, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn neighbor_iteration_sees_each_incident_edge_once() {
        let g = complete_graph(5);
        for x in 0..5 {
            let mut nb: Vec<usize> = g.neighbors(x).map(|(y, _)| y).collect();
            nb.sort_unstable();
            let expect: Vec<usize> = (0..5).filter(|&y| y != x).collect();
            assert_eq!(nb, expect);
        }
    }

    #[test]
    fn degree_stats_examples() {
        let k2 = path_graph(2);
        assert_eq!(degree_stats(&k2).d_max, 1.0);
        let q2 = build_weighted_chain(2).unwrap();
        // max(2/1, 6/2, 4/4)
        assert_eq!(degree_stats(q2.graph()).d_max, 3.0);
    }

    #[test]
    fn subdivide_single_edge() {
        let g = subdivide_edges(&path_graph(2), 3).unwrap();
        assert_eq!((g.n(), g.m()), (4, 3));
        assert_eq!(degree_stats(&g).max_degree, 2);
        assert!(g.is_connected());
    }

    #[test]
    fn subdivide_binary_tree_counts() {
        let t2 = build_binary_tree(2).unwrap();
        let g = subdivide_edges(t2.graph(), 2).unwrap();
        assert_eq!((g.n(), g.m()), (13, 12));
    }

    #[test]
    fn subdivide_weighted_chain() {
        let q1 = build_weighted_chain(1).unwrap();
        let g = subdivide_edges(q1.graph(), 2).unwrap();
        assert_eq!(g.vertex_weights(), &[1.0, 2.0, 2.0]);
        let w: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
        assert_eq!(w, vec![2.0, 2.0]);
    }

    #[test]
    fn subdivide_identity_at_k1() {
        let g = complete_graph(4);
        assert_eq!(subdivide_edges(&g, 1).unwrap(), g);
        assert!(subdivide_edges(&g, 0).is_err());
    }

    #[test]
    fn components_and_relabel() {
        let g = WeightedGraph::unweighted(5, [(0, 3), (1, 2)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 3], vec![1, 2], vec![4]]);
        assert!(!g.is_connected());
        let p = path_graph(3).relabel(&[2, 0, 1]).unwrap();
        assert_eq!(p.degree(0), 2);
        assert!(path_graph(3).relabel(&[0, 0, 1]).is_err());
    }
}
