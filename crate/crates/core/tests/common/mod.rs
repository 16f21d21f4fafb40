//! Reference computations that avoid the library's own code paths.
#![allow(dead_code)]

use nalgebra::DMatrix;
use planar_gap::graph::WeightedGraph;

/// The (non-symmetric) matrix `Pi^-1 K` of the Laplacian.
pub fn laplacian_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut m = DMatrix::zeros(n, n);
    for e in g.edges() {
        m[(e.u, e.u)] += e.w / g.pi(e.u);
        m[(e.v, e.v)] += e.w / g.pi(e.v);
        m[(e.u, e.v)] -= e.w / g.pi(e.u);
        m[(e.v, e.u)] -= e.w / g.pi(e.v);
    }
    m
}

/// Second smallest eigenvalue of `Pi^-1 K` via a general (Schur) eigensolve.
pub fn lambda1_oracle(g: &WeightedGraph) -> f64 {
    let eig = laplacian_matrix(g).complex_eigenvalues();
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    re[1]
}

/// Minimum of `cut(S) / pi(S)` over all `S` with `pi(S) <= pi(V) / 2`,
/// recomputed from scratch for every subset.
pub fn cheeger_oracle(g: &WeightedGraph) -> f64 {
    let n = g.n();
    let total: f64 = (0..n).map(|x| g.pi(x)).sum();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let inside = |x: usize| mask >> x & 1 == 1;
        let mass: f64 = (0..n).filter(|&x| inside(x)).map(|x| g.pi(x)).sum();
        if mass > total / 2.0 {
            continue;
        }
        let cut: f64 = g
            .edges()
            .iter()
            .filter(|e| inside(e.u) != inside(e.v))
            .map(|e| e.w)
            .sum();
        best = best.min(cut / mass);
    }
    best
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn floyd_warshall(g: &WeightedGraph) -> Vec<Vec<u64>> {
    let n = g.n();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (x, row) in d.iter_mut().enumerate() {
        row[x] = 0;
    }
    for e in g.edges() {
        d[e.u][e.v] = 1;
        d[e.v][e.u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Dense lazy transition matrix `(I + D^-1 W) / 2`, rows summing to one.
pub fn lazy_transition_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut p = DMatrix::identity(n, n) * 0.5;
    for x in 0..n {
        let deg: f64 = g.neighbors(x).map(|(_, w)| w).sum();
        for (y, w) in g.neighbors(x) {
            p[(x, y)] += 0.5 * w / deg;
        }
    }
    p
}

/// Least `t` with `max_s TV(delta_s P^t, pi) <= eps` by dense matrix powers.
pub fn mixing_time_oracle(g: &WeightedGraph, starts: &[usize], eps: f64) -> u64 {
    let p = lazy_transition_matrix(g);
    let deg: Vec<f64> = (0..g.n())
        .map(|x| g.neighbors(x).map(|(_, w)| w).sum())
        .collect();
    let total: f64 = deg.iter().sum();
    let pi: Vec<f64> = deg.iter().map(|d| d / total).collect();
    let mut power: DMatrix<f64> = DMatrix::identity(g.n(), g.n());
    let mut t = 0;
    loop {
        let worst = starts
            .iter()
            .map(|&s| {
                0.5 * (0..g.n())
                    .map(|y| (power[(s, y)] - pi[y]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if worst <= eps {
            return t;
        }
        power = &power * &p;
        t += 1;
    }
}

pub fn assert_close(a: f64, b: f64, rel: f64, what: &str) {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    assert!(
        (a - b).abs() <= rel * scale,
        "{what}: {a} vs {b} (relative difference {})",
        (a - b).abs() / scale
    );
}
