use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stationary_distribution;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::seeded;

/// Marker for vertices not reachable from the source.
pub const UNREACHABLE: u32 = u32::MAX;

/// Largest graph accepted by exact all-pairs distance statistics.
pub const EXACT_DISTANCE_LIMIT: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    /// Hop distance per vertex, [`UNREACHABLE`] when there is no path.
    pub dist: Vec<u32>,
    pub unreachable: usize,
}

impl Distances {
    pub fn all_reachable(&self) -> bool {
        self.unreachable == 0
    }

    /// Largest finite distance.
    pub fn eccentricity(&self) -> u32 {
        self.dist
            .iter()
            .copied()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0)
    }
}

fn bfs_into(g: &WeightedGraph, src: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
    dist.fill(UNREACHABLE);
    queue.clear();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for &(y, _) in g.incident(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
}

/// Hop distances from `src`, ignoring edge weights.
pub fn bfs_distances(g: &WeightedGraph, src: usize) -> Result<Distances> {
    if src >= g.n() {
        return Err(Error::InvalidInput(format!(
            "source vertex {src} out of range for {} vertices",
            g.n()
        )));
    }
    let mut dist = vec![0; g.n()];
    bfs_into(g, src, &mut dist, &mut VecDeque::new());
    let unreachable = dist.iter().filter(|&&d| d == UNREACHABLE).count();
    Ok(Distances { dist, unreachable })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    /// Exact diameter, or the largest eccentricity among sampled sources.
    pub diameter: u32,
    /// `|V|^-2 sum_{x,y} d(x,y)^2` over ordered pairs, `x = y` included.
    pub avg_sq_distance: f64,
    /// `sum_{x,y} pi(x) pi(y) d(x,y)^2` with the stationary distribution.
    pub stationary_sq_distance: f64,
    pub mode: DistanceMode,
    pub sample_pairs: usize,
    pub seed: u64,
    /// Standard error of `avg_sq_distance` in sampled mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

struct SourceSums {
    ecc: u32,
    sq: f64,
    pi_sq: f64,
}

/// Diameter and mean squared distances, exactly by BFS from every vertex or
/// from `sample_pairs` uniformly drawn ordered pairs.
pub fn distance_stats(
    g: &WeightedGraph,
    mode: DistanceMode,
    sample_pairs: usize,
    seed: u64,
) -> Result<DistanceStats> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidInput("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::InvalidInput(
            "distance statistics need a connected graph".into(),
        ));
    }
    let pi = stationary_distribution(g)?;
    match mode {
        DistanceMode::Exact => {
            if n > EXACT_DISTANCE_LIMIT {
                return Err(Error::SizeLimit {
                    what: "exact all-pairs distances",
                    size: n,
                    limit: EXACT_DISTANCE_LIMIT,
                });
            }
            let sums: Vec<SourceSums> = (0..n)
                .into_par_iter()
                .map_init(
                    || (vec![0u32; n], VecDeque::new()),
                    |(dist, queue), x| {
                        bfs_into(g, x, dist, queue);
                        let mut ecc = 0;
                        let mut sq = 0u64;
                        let mut pi_sq = 0.0;
                        for (y, &d) in dist.iter().enumerate() {
                            ecc = ecc.max(d);
                            let d2 = u64::from(d) * u64::from(d);
                            sq += d2;
                            pi_sq += pi[y] * d2 as f64;
                        }
                        SourceSums {
                            ecc,
                            sq: sq as f64,
                            pi_sq: pi[x] * pi_sq,
                        }
                    },
                )
                .collect();
            let nn = (n as f64) * (n as f64);
            Ok(DistanceStats {
                diameter: sums.iter().map(|s| s.ecc).max().unwrap_or(0),
                avg_sq_distance: sums.iter().map(|s| s.sq).sum::<f64>() / nn,
                stationary_sq_distance: sums.iter().map(|s| s.pi_sq).sum(),
                mode,
                sample_pairs: n * n,
                seed,
                std_error: None,
            })
        }
        DistanceMode::Sampled => {
            if sample_pairs < 2 {
                return Err(Error::invalid("sampled mode needs at least two pairs"));
            }
            let mut rng = seeded(seed);
            let mut pairs: Vec<(usize, usize)> = (0..sample_pairs)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect();
            pairs.sort_unstable();
            let groups: Vec<&[(usize, usize)]> = pairs.chunk_by(|a, b| a.0 == b.0).collect();
            let per_group: Vec<(u32, Vec<(f64, f64)>)> = groups
                .par_iter()
                .map_init(
                    || (vec![0u32; n], VecDeque::new()),
                    |(dist, queue), group| {
                        let x = group[0].0;
                        bfs_into(g, x, dist, queue);
                        let ecc = dist.iter().copied().max().unwrap_or(0);
                        let vals = group
                            .iter()
                            .map(|&(_, y)| {
                                let d2 = f64::from(dist[y]).powi(2);
                                (d2, (n as f64).powi(2) * pi[x] * pi[y] * d2)
                            })
                            .collect();
                        (ecc, vals)
                    },
                )
                .collect();
            let samples: Vec<(f64, f64)> = per_group
                .iter()
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            let count = samples.len() as f64;
            let mean = samples.iter().map(|s| s.0).sum::<f64>() / count;
            let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (count - 1.0);
            Ok(DistanceStats {
                diameter: per_group.iter().map(|p| p.0).max().unwrap_or(0),
                avg_sq_distance: mean,
                stationary_sq_distance: samples.iter().map(|s| s.1).sum::<f64>() / count,
                mode,
                sample_pairs,
                seed,
                std_error: Some((var / count).sqrt()),
            })
        }
    }
}
