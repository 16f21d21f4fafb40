//! Exact planarity testing with the left-right criterion.
//!
//! Planar inputs come back with a combinatorial embedding (a clockwise
//! rotation of neighbors around every vertex) that can be re-checked with
//! Euler's formula. Non-planar inputs come back with an edge-minimal
//! non-planar subgraph, which is a subdivision of `K_5` or `K_{3,3}`.
//!
//! The three depth-first passes (orientation, testing, embedding) keep
//! explicit stacks so deep graphs do not exhaust the call stack.

use std::collections::HashMap;

use super::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Planarity {
    Planar(Embedding),
    NonPlanar(KuratowskiWitness),
}

impl Planarity {
    pub fn is_planar(&self) -> bool {
        matches!(self, Planarity::Planar(_))
    }
}

/// Clockwise neighbor order around every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    rotation: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    /// Vertices of degree at least three in the witness subgraph.
    pub branch_vertices: Vec<usize>,
    /// Edges `(u, v)` of the witness subgraph, `u < v`.
    pub edges: Vec<(usize, usize)>,
}

/// Decides planarity of a connected graph.
pub fn check_planarity(g: &WeightedGraph) -> Result<Planarity> {
    if g.n() == 0 {
        return Err(Error::InvalidInput(
            "planarity of the empty graph is undefined".into(),
        ));
    }
    let components = g.components();
    if components.len() > 1 {
        return Err(Error::InvalidInput(format!(
            "graph has {} connected components; test each separately",
            components.len()
        )));
    }
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    match LrState::new(g.n(), &edges).run(true) {
        Some(rotation) => Ok(Planarity::Planar(Embedding { rotation })),
        None => Ok(Planarity::NonPlanar(kuratowski_subgraph(g.n(), &edges))),
    }
}

/// Planarity of an arbitrary (possibly disconnected) edge list.
pub fn is_planar_edges(n: usize, edges: &[(usize, usize)]) -> bool {
    LrState::new(n, edges).run(false).is_some()
}

impl Embedding {
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    /// Number of faces traced by the rotation system.
    pub fn face_count(&self) -> usize {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for (v, rot) in self.rotation.iter().enumerate() {
            for (i, &w) in rot.iter().enumerate() {
                index.insert((v, w), i);
            }
        }
        let mut seen: HashMap<(usize, usize), bool> = index.keys().map(|&k| (k, false)).collect();
        let mut faces = 0;
        for (v, rot) in self.rotation.iter().enumerate() {
            for &w in rot {
                if seen[&(v, w)] {
                    continue;
                }
                faces += 1;
                let (mut a, mut b) = (v, w);
                while !seen[&(a, b)] {
                    seen.insert((a, b), true);
                    // next half-edge leaves b counter-clockwise from a
                    let rb = &self.rotation[b];
                    let i = index[&(b, a)];
                    let c = rb[(i + rb.len() - 1) % rb.len()];
                    (a, b) = (b, c);
                }
            }
        }
        faces
    }

    /// True when the rotation system lists exactly the neighbors of every
    /// vertex of connected `g` and satisfies `V - E + F = 2`.
    pub fn is_valid_for(&self, g: &WeightedGraph) -> bool {
        if self.rotation.len() != g.n() {
            return false;
        }
        for v in 0..g.n() {
            let mut a: Vec<usize> = self.rotation[v].clone();
            let mut b: Vec<usize> = g.neighbors(v).map(|(y, _)| y).collect();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        if g.m() == 0 {
            return g.n() == 1;
        }
        g.n() as i64 - g.m() as i64 + self.face_count() as i64 == 2
    }
}

fn kuratowski_subgraph(n: usize, edges: &[(usize, usize)]) -> KuratowskiWitness {
    let mut keep: Vec<usize> = (0..edges.len()).collect();
    let mut chunk = (keep.len() / 2).max(1);
    loop {
        let mut i = 0;
        while i < keep.len() {
            let end = (i + chunk).min(keep.len());
            let trial: Vec<(usize, usize)> = keep[..i]
                .iter()
                .chain(&keep[end..])
                .map(|&e| edges[e])
                .collect();
            if is_planar_edges(n, &trial) {
                i = end;
            } else {
                keep.drain(i..end);
            }
        }
        if chunk == 1 {
            break;
        }
        chunk = (chunk / 2).max(1);
    }
    let mut witness: Vec<(usize, usize)> = keep
        .iter()
        .map(|&e| (edges[e].0.min(edges[e].1), edges[e].0.max(edges[e].1)))
        .collect();
    witness.sort_unstable();
    let mut degree = vec![0usize; n];
    for &(u, v) in &witness {
        degree[u] += 1;
        degree[v] += 1;
    }
    let branch_vertices: Vec<usize> = (0..n).filter(|&v| degree[v] >= 3).collect();
    let kind = if branch_vertices.len() == 5 {
        KuratowskiKind::K5
    } else {
        KuratowskiKind::K33
    };
    KuratowskiWitness {
        kind,
        branch_vertices,
        edges: witness,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

const UNSET: usize = usize::MAX;

/// State of one left-right test. Edges are indexed by their position in the
/// input list; `src`/`dst` hold the DFS orientation.
struct LrState {
    n: usize,
    adj: Vec<Vec<(usize, usize)>>,
    src: Vec<usize>,
    dst: Vec<usize>,
    oriented: Vec<bool>,
    height: Vec<usize>,
    parent_edge: Vec<Option<usize>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    out_edges: Vec<Vec<usize>>,
    roots: Vec<usize>,
    reference: Vec<Option<usize>>,
    side: Vec<i8>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<usize>,
}

impl LrState {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let m = edges.len();
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        LrState {
            n,
            adj,
            src: vec![UNSET; m],
            dst: vec![UNSET; m],
            oriented: vec![false; m],
            height: vec![UNSET; n],
            parent_edge: vec![None; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            out_edges: vec![Vec::new(); n],
            roots: Vec::new(),
            reference: vec![None; m],
            side: vec![1; m],
            stack: Vec::new(),
            stack_bottom: vec![0; m],
            lowpt_edge: vec![UNSET; m],
        }
    }

    /// Returns the clockwise rotation system when planar. With
    /// `embed == false` a planar result carries an empty rotation.
    fn run(mut self, embed: bool) -> Option<Vec<Vec<usize>>> {
        let m = self.src.len();
        if self.n > 2 && m > 3 * self.n - 6 {
            return None;
        }
        for v in 0..self.n {
            if self.height[v] == UNSET {
                self.height[v] = 0;
                self.roots.push(v);
                self.orient(v);
            }
        }
        for v in 0..self.n {
            let nd = &self.nesting_depth;
            self.out_edges[v].sort_by_key(|&e| nd[e]);
        }
        for i in 0..self.roots.len() {
            if !self.test(self.roots[i]) {
                return None;
            }
        }
        if !embed {
            return Some(Vec::new());
        }
        Some(self.embed())
    }

    fn orient(&mut self, root: usize) {
        let mut stack = vec![(root, 0usize)];
        while let Some(&(v, i)) = stack.last() {
            if i == self.adj[v].len() {
                stack.pop();
                if let Some(e) = self.parent_edge[v] {
                    self.finish_orientation(self.src[e], e);
                }
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let (w, e) = self.adj[v][i];
            if self.oriented[e] {
                continue;
            }
            self.oriented[e] = true;
            self.src[e] = v;
            self.dst[e] = w;
            self.out_edges[v].push(e);
            self.lowpt[e] = self.height[v];
            self.lowpt2[e] = self.height[v];
            if self.height[w] == UNSET {
                self.parent_edge[w] = Some(e);
                self.height[w] = self.height[v] + 1;
                stack.push((w, 0));
            } else {
                self.lowpt[e] = self.height[w];
                self.finish_orientation(v, e);
            }
        }
    }

    fn finish_orientation(&mut self, v: usize, e: usize) {
        self.nesting_depth[e] = 2 * self.lowpt[e] as i64;
        if self.lowpt2[e] < self.height[v] {
            // chordal
            self.nesting_depth[e] += 1;
        }
        if let Some(p) = self.parent_edge[v] {
            if self.lowpt[e] < self.lowpt[p] {
                self.lowpt2[p] = self.lowpt[p].min(self.lowpt2[e]);
                self.lowpt[p] = self.lowpt[e];
            } else if self.lowpt[e] > self.lowpt[p] {
                self.lowpt2[p] = self.lowpt2[p].min(self.lowpt[e]);
            } else {
                self.lowpt2[p] = self.lowpt2[p].min(self.lowpt2[e]);
            }
        }
    }

    fn test(&mut self, root: usize) -> bool {
        let mut stack = vec![(root, 0usize)];
        while let Some(&(v, i)) = stack.last() {
            if i == self.out_edges[v].len() {
                stack.pop();
                if let Some(e) = self.parent_edge[v] {
                    self.remove_back_edges(e);
                    if !self.integrate(self.src[e], e) {
                        return false;
                    }
                }
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let ei = self.out_edges[v][i];
            let w = self.dst[ei];
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_edge[w] == Some(ei) {
                stack.push((w, 0));
                continue;
            }
            self.lowpt_edge[ei] = ei;
            self.stack.push(ConflictPair {
                left: Interval::default(),
                right: Interval {
                    low: Some(ei),
                    high: Some(ei),
                },
            });
            if !self.integrate(v, ei) {
                return false;
            }
        }
        true
    }

    /// Folds the return edges of `ei`, an outgoing edge of `v`, into the
    /// constraints of `v`'s parent edge.
    fn integrate(&mut self, v: usize, ei: usize) -> bool {
        if self.lowpt[ei] < self.height[v] {
            let e = self.parent_edge[v].expect("non-root vertex has a parent edge");
            if ei == self.out_edges[v][0] {
                self.lowpt_edge[e] = self.lowpt_edge[ei];
            } else {
                return self.add_constraints(ei, e);
            }
        }
        true
    }

    fn conflicting(&self, iv: &Interval, b: usize) -> bool {
        match iv.high {
            Some(h) => self.lowpt[h] > self.lowpt[b],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.left.low, p.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => unreachable!("empty conflict pair on the stack"),
        }
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair::default();
        // merge return edges of ei into p.right
        loop {
            let mut q = self
                .stack
                .pop()
                .expect("return edges of ei are on the stack");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let q_low = q.right.low.expect("non-empty interval");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    let low = p.right.low.expect("non-empty interval");
                    self.reference[low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[q_low] = Some(self.lowpt_edge[e]);
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(low) = p.right.low {
                self.reference[low] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(low) = p.left.low {
                self.reference[low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.src[e];
        // drop entire conflict pairs that return to u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(low) = p.left.low {
                self.side[low] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(high) = p.left.high {
                if self.dst[high] != u {
                    break;
                }
                p.left.high = self.reference[high];
            }
            if p.left.high.is_none() {
                if let Some(low) = p.left.low {
                    self.reference[low] = p.right.low;
                    self.side[low] = -1;
                    p.left.low = None;
                }
            }
            while let Some(high) = p.right.high {
                if self.dst[high] != u {
                    break;
                }
                p.right.high = self.reference[high];
            }
            if p.right.high.is_none() {
                if let Some(low) = p.right.low {
                    self.reference[low] = p.left.low;
                    self.side[low] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        // side of e follows a highest return edge
        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("e has return edges");
            let (hl, hr) = (top.left.high, top.right.high);
            self.reference[e] = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
        }
    }

    fn sign(&mut self, e: usize) -> i8 {
        let mut chain = vec![e];
        while let Some(next) = self.reference[*chain.last().unwrap()] {
            chain.push(next);
        }
        for i in (0..chain.len() - 1).rev() {
            let (a, b) = (chain[i], chain[i + 1]);
            self.side[a] *= self.side[b];
            self.reference[a] = None;
        }
        self.side[e]
    }

    fn embed(&mut self) -> Vec<Vec<usize>> {
        for e in 0..self.src.len() {
            let s = self.sign(e) as i64;
            self.nesting_depth[e] *= s;
        }
        for v in 0..self.n {
            let nd = &self.nesting_depth;
            self.out_edges[v].sort_by_key(|&e| nd[e]);
        }
        let mut rot = Rotation::new(self.n);
        for v in 0..self.n {
            let mut prev = None;
            for &e in &self.out_edges[v] {
                let w = self.dst[e];
                rot.add_cw(v, w, prev);
                prev = Some(w);
            }
        }
        let mut left_ref = vec![UNSET; self.n];
        let mut right_ref = vec![UNSET; self.n];
        for &root in &self.roots {
            let mut stack = vec![(root, 0usize)];
            while let Some(&(v, i)) = stack.last() {
                if i == self.out_edges[v].len() {
                    stack.pop();
                    continue;
                }
                stack.last_mut().unwrap().1 += 1;
                let ei = self.out_edges[v][i];
                let w = self.dst[ei];
                if self.parent_edge[w] == Some(ei) {
                    rot.add_first(w, v);
                    left_ref[v] = w;
                    right_ref[v] = w;
                    stack.push((w, 0));
                } else if self.side[ei] == 1 {
                    rot.add_cw(w, v, Some(right_ref[w]));
                } else {
                    rot.add_ccw(w, v, Some(left_ref[w]));
                    left_ref[w] = v;
                }
            }
        }
        rot.into_lists()
    }
}

/// Cyclic neighbor lists under construction.
struct Rotation {
    cw: HashMap<(usize, usize), usize>,
    ccw: HashMap<(usize, usize), usize>,
    first: Vec<Option<usize>>,
}

impl Rotation {
    fn new(n: usize) -> Self {
        Rotation {
            cw: HashMap::new(),
            ccw: HashMap::new(),
            first: vec![None; n],
        }
    }

    fn add_cw(&mut self, start: usize, end: usize, reference: Option<usize>) {
        match reference {
            None => {
                self.cw.insert((start, end), end);
                self.ccw.insert((start, end), end);
                self.first[start] = Some(end);
            }
            Some(r) => {
                let after = self.cw[&(start, r)];
                self.cw.insert((start, r), end);
                self.cw.insert((start, end), after);
                self.ccw.insert((start, after), end);
                self.ccw.insert((start, end), r);
            }
        }
    }

    fn add_ccw(&mut self, start: usize, end: usize, reference: Option<usize>) {
        match reference {
            None => self.add_cw(start, end, None),
            Some(r) => {
                let before = self.ccw[&(start, r)];
                self.add_cw(start, end, Some(before));
                if self.first[start] == Some(r) {
                    self.first[start] = Some(end);
                }
            }
        }
    }

    fn add_first(&mut self, start: usize, end: usize) {
        let r = self.first[start];
        self.add_ccw(start, end, r);
    }

    fn into_lists(self) -> Vec<Vec<usize>> {
        self.first
            .iter()
            .enumerate()
            .map(|(v, f)| {
                let mut out = Vec::new();
                if let Some(f) = *f {
                    let mut cur = f;
                    loop {
                        out.push(cur);
                        cur = self.cw[&(v, cur)];
                        if cur == f {
                            break;
                        }
                    }
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        build_hat_tree, complete_bipartite, complete_graph, cycle_graph, path_graph,
    };

    fn assert_planar(g: &WeightedGraph) {
        match check_planarity(g).unwrap() {
            Planarity::Planar(emb) => assert!(emb.is_valid_for(g)),
            Planarity::NonPlanar(w) => panic!("expected planar, got witness {w:?}"),
        }
    }

    #[test]
    fn small_planar_graphs() {
        assert_planar(&complete_graph(1));
        assert_planar(&complete_graph(2));
        assert_planar(&complete_graph(4));
        assert_planar(&path_graph(10));
        assert_planar(&cycle_graph(7));
        assert_planar(&complete_bipartite(2, 5));
    }

    #[test]
    fn k5_and_k33_have_witnesses() {
        match check_planarity(&complete_graph(5)).unwrap() {
            Planarity::NonPlanar(w) => {
                assert_eq!(w.kind, KuratowskiKind::K5);
                assert_eq!(w.edges.len(), 10);
            }
            _ => panic!("K5 reported planar"),
        }
        match check_planarity(&complete_bipartite(3, 3)).unwrap() {
            Planarity::NonPlanar(w) => {
                assert_eq!(w.kind, KuratowskiKind::K33);
                assert_eq!(w.branch_vertices.len(), 6);
                assert_eq!(w.edges.len(), 9);
            }
            _ => panic!("K33 reported planar"),
        }
    }

    #[test]
    fn witness_inside_larger_graph_is_minimal() {
        // K5 with one edge subdivided, plus a pendant path
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                if (u, v) != (0, 1) {
                    edges.push((u, v));
                }
            }
        }
        edges.extend([(0, 5), (5, 1), (4, 6), (6, 7)]);
        let g = WeightedGraph::unweighted(8, edges).unwrap();
        let Planarity::NonPlanar(w) = check_planarity(&g).unwrap() else {
            panic!("subdivided K5 reported planar")
        };
        assert_eq!(w.kind, KuratowskiKind::K5);
        assert_eq!(w.branch_vertices, vec![0, 1, 2, 3, 4]);
        assert_eq!(w.edges.len(), 11);
        assert!(!is_planar_edges(8, &w.edges));
    }

    #[test]
    fn hat_trees_are_planar() {
        for h in 1..=4 {
            for k in [1, 2, 3, 8] {
                assert_planar(build_hat_tree(h, k).unwrap().graph());
            }
        }
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let g = WeightedGraph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(check_planarity(&g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn dense_planar_triangulation() {
        // wheel: hub 0 joined to a cycle 1..=9, a maximal planar graph
        let mut edges: Vec<(usize, usize)> = (1..=9).map(|v| (0, v)).collect();
        edges.extend((1..=9).map(|v| (v, v % 9 + 1)));
        let g = WeightedGraph::unweighted(10, edges).unwrap();
        assert_planar(&g);
        // interleaving chords must both run outside the rim and cross
        let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        edges.push((1, 5));
        edges.push((2, 7));
        edges.push((3, 8));
        let g = WeightedGraph::unweighted(10, edges).unwrap();
        assert!(!check_planarity(&g).unwrap().is_planar());
    }
}
