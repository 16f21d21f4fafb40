//! Seeded random graph families used by the property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::WeightedGraph;
use crate::rng::seeded;

/// Random connected graph: a random recursive spanning tree plus every other
/// pair independently with probability `extra`. With `weighted`, masses and
/// conductances are drawn uniformly from `[0.5, 2]`.
pub fn random_connected_graph(n: usize, extra: f64, weighted: bool, seed: u64) -> WeightedGraph {
    let mut rng = seeded(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        if weighted {
            rng.random_range(0.5..2.0)
        } else {
            1.0
        }
    };
    let mut pairs = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
        pairs.insert((u, v));
        edges.push((u, v, draw(&mut rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !pairs.contains(&(u, v)) && rng.random_bool(extra) {
                edges.push((u, v, draw(&mut rng)));
            }
        }
    }
    let weights = (0..n).map(|_| draw(&mut rng)).collect();
    WeightedGraph::new(weights, edges).expect("generated graph is valid")
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Connected planar graph on a `rows x cols` grid: each cell gets one random
/// diagonal, a random spanning tree of that triangulation is kept, and every
/// other edge survives with probability `keep`. Unit weights.
pub fn random_planar_graph(rows: usize, cols: usize, keep: f64, seed: u64) -> WeightedGraph {
    let mut rng = seeded(seed);
    let id = |r: usize, c: usize| r * cols + c;
    let mut candidates = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                candidates.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                candidates.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < rows && c + 1 < cols {
                if rng.random_bool(0.5) {
                    candidates.push((id(r, c), id(r + 1, c + 1)));
                } else {
                    candidates.push((id(r, c + 1), id(r + 1, c)));
                }
            }
        }
    }
    candidates.shuffle(&mut rng);
    let mut dsu = Dsu((0..rows * cols).collect());
    let mut edges = Vec::new();
    for (u, v) in candidates {
        if dsu.union(u, v) || rng.random_bool(keep) {
            edges.push((u, v));
        }
    }
    WeightedGraph::unweighted(rows * cols, edges).expect("generated graph is valid")
}
