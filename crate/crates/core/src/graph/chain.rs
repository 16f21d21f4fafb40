use super::{subdivide_edges, Edge, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// `Q_h`: masses `2^j`, conductances `2^(j+1)`.
    Weighted { h: u32 },
    /// `Q_{h,k}`: the level quotient of the `(h, k)` hat tree.
    Subdivided { h: u32, k: u32 },
}

/// A weighted path on positions `0..=len`, vertex `j` adjacent to `j +- 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientChain {
    graph: WeightedGraph,
    kind: ChainKind,
}

/// Builds `Q_h` with exact power-of-two weights.
pub fn build_weighted_chain(h: u32) -> Result<QuotientChain> {
    if h < 1 {
        return Err(Error::invalid("chain height h must be at least 1"));
    }
    if h >= 63 {
        return Err(Error::CapacityExceeded {
            what: format!("chain weights 2^(j+1) for h={h}"),
            limit: 62,
        });
    }
    let weights = (0..=h).map(|j| (1u64 << j) as f64).collect();
    let edges = (0..h as usize)
        .map(|j| Edge {
            u: j,
            v: j + 1,
            w: (1u64 << (j + 1)) as f64,
        })
        .collect();
    Ok(QuotientChain {
        graph: WeightedGraph::from_parts(weights, edges),
        kind: ChainKind::Weighted { h },
    })
}

impl QuotientChain {
    pub(crate) fn from_parts(graph: WeightedGraph, kind: ChainKind) -> Self {
        QuotientChain { graph, kind }
    }

    /// Relabels a path-shaped graph so positions run from its lowest-numbered
    /// end, with edges listed in order.
    pub fn from_path(graph: &WeightedGraph, kind: ChainKind) -> Result<Self> {
        let n = graph.n();
        if n == 0
            || graph.m() + 1 != n
            || !graph.is_connected()
            || (0..n).any(|x| graph.degree(x) > 2)
        {
            return Err(Error::InvalidInput("graph is not a path".into()));
        }
        let start = (0..n).find(|&x| graph.degree(x) <= 1).unwrap_or(0);
        let mut order = Vec::with_capacity(n);
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            order.push(cur);
            match graph
                .incident(cur)
                .iter()
                .map(|&(y, _)| y)
                .find(|&y| y != prev)
            {
                Some(y) if order.len() < n => {
                    prev = cur;
                    cur = y;
                }
                _ => break,
            }
        }
        let mut pos = vec![0; n];
        for (p, &x) in order.iter().enumerate() {
            pos[x] = p;
        }
        let weights = order.iter().map(|&x| graph.pi(x)).collect();
        let mut edges: Vec<Edge> = graph
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (pos[e.u], pos[e.v]);
                Edge {
                    u: a.min(b),
                    v: a.max(b),
                    w: e.w,
                }
            })
            .collect();
        edges.sort_by_key(|e| e.u);
        Ok(QuotientChain {
            graph: WeightedGraph::from_parts(weights, edges),
            kind,
        })
    }

    /// `k`-subdivision of this chain, renumbered along the path.
    pub fn subdivide(&self, k: u32) -> Result<QuotientChain> {
        let kind = match self.kind {
            ChainKind::Weighted { h } => ChainKind::Subdivided { h, k },
            ChainKind::Subdivided { h, k: k0 } => ChainKind::Subdivided { h, k: k0 * k },
        };
        let g = subdivide_edges(&self.graph, k as usize)?;
        QuotientChain::from_path(&g, kind)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.graph.m()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.m() == 0
    }
}
