//! Path-metric distances and the lazy random walk.
//!
//! The walk moves along an edge with probability proportional to its weight
//! and stays put with probability 1/2: `P = (I + D^-1 W) / 2`. Its stationary
//! distribution is proportional to weighted degree.

mod distance;
mod mixing;

pub use distance::{
    bfs_distances, distance_stats, DistanceMode, DistanceStats, Distances, EXACT_DISTANCE_LIMIT,
    UNREACHABLE,
};
pub use mixing::{
    hat_tree_step_cap, mixing_time, trajectory_csv, MixingMethod, MixingOptions, MixingReport,
    StartPolicy, EXACT_MIXING_LIMIT,
};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::spectral::{lambda1, LambdaOptions};

/// `deg_w(x) / sum deg_w`.
pub fn stationary_distribution(g: &WeightedGraph) -> Result<Vec<f64>> {
    let deg: Vec<f64> = (0..g.n()).map(|x| g.weighted_degree(x)).collect();
    if let Some(x) = deg.iter().position(|&d| d <= 0.0) {
        return Err(Error::InvalidInput(format!(
            "vertex {x} is isolated; the walk has no stationary distribution on it"
        )));
    }
    let total: f64 = deg.iter().sum();
    Ok(deg.into_iter().map(|d| d / total).collect())
}

fn check_distribution(g: &WeightedGraph, p: &[f64]) -> Result<()> {
    if p.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.len(),
        });
    }
    if let Some(x) = p.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidDistribution(format!("entry {x} is {}", p[x])));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// One-step lazy transition operator acting on distributions.
pub(crate) struct LazyWalk<'a> {
    g: &'a WeightedGraph,
    inv_deg: Vec<f64>,
}

impl<'a> LazyWalk<'a> {
    pub(crate) fn new(g: &'a WeightedGraph) -> Result<Self> {
        let inv_deg = (0..g.n())
            .map(|x| {
                let d = g.weighted_degree(x);
                if d > 0.0 {
                    Ok(1.0 / d)
                } else {
                    Err(Error::InvalidInput(format!("vertex {x} is isolated")))
                }
            })
            .collect::<Result<_>>()?;
        Ok(LazyWalk { g, inv_deg })
    }

    /// `out = p P`.
    pub(crate) fn step(&self, p: &[f64], out: &mut [f64]) {
        for (y, slot) in out.iter_mut().enumerate() {
            let inflow: f64 = self
                .g
                .neighbors(y)
                .map(|(x, w)| p[x] * w * self.inv_deg[x])
                .sum();
            *slot = 0.5 * (p[y] + inflow);
        }
    }
}

/// `p P^t` for the lazy walk.
pub fn evolve_distribution(g: &WeightedGraph, p: &[f64], t: u64) -> Result<Vec<f64>> {
    check_distribution(g, p)?;
    let walk = LazyWalk::new(g)?;
    let mut cur = p.to_vec();
    let mut next = vec![0.0; g.n()];
    for _ in 0..t {
        walk.step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// `sum |p - q| / 2`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Inverse spectral gap of the normalized Laplacian `I - D^-1/2 W D^-1/2`
/// (the non-lazy walk; the lazy walk's gap is half of it).
pub fn relaxation_time(g: &WeightedGraph, opts: &LambdaOptions) -> Result<f64> {
    let degrees: Vec<f64> = (0..g.n()).map(|x| g.weighted_degree(x)).collect();
    if degrees.iter().any(|&d| d <= 0.0) || !g.is_connected() {
        return Err(Error::InvalidInput(
            "relaxation time needs a connected graph".into(),
        ));
    }
    let report = lambda1(&g.with_vertex_weights(degrees)?, opts)?;
    Ok(1.0 / report.lambda1)
}
