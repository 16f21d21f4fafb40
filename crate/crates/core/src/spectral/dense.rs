use nalgebra::{DMatrix, SymmetricEigen};

use super::{finish, SolverKind, SpectralReport};
use crate::graph::WeightedGraph;

/// Full symmetric eigendecomposition of `Pi^{-1/2} K Pi^{-1/2}`.
pub(super) fn solve(g: &WeightedGraph, tolerance: f64) -> SpectralReport {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g
        .vertex_weights()
        .iter()
        .map(|p| p.sqrt().recip())
        .collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        let (u, v) = (e.u, e.v);
        let off = e.w * inv_sqrt[u] * inv_sqrt[v];
        m[(u, v)] -= off;
        m[(v, u)] -= off;
        m[(u, u)] += e.w * inv_sqrt[u] * inv_sqrt[u];
        m[(v, v)] += e.w * inv_sqrt[v] * inv_sqrt[v];
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // The smallest eigenvalue belongs to sqrt(pi); the graph is connected.
    let col = eig.eigenvectors.column(order[1]);
    let f = (0..n).map(|x| col[x] * inv_sqrt[x]).collect();
    finish(g, f, SolverKind::Dense, 1, tolerance)
}
