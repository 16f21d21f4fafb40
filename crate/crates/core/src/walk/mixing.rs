use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bfs_distances, relaxation_time, stationary_distribution, tv_distance, LazyWalk};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::{seeded, stream};
use crate::spectral::LambdaOptions;

/// Largest graph for which distributions are evolved exactly.
pub const EXACT_MIXING_LIMIT: usize = 2000;

const RANDOM_STARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    /// Vertex 0.
    Root,
    /// Worst of vertex 0 and the lowest-numbered vertex farthest from it,
    /// plus seeded random starts on graphs above the exact limit.
    #[default]
    WorstSampled,
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingOptions {
    pub epsilon: f64,
    /// `None` picks exact evolution when the graph is small enough.
    pub method: Option<MixingMethod>,
    pub start: StartPolicy,
    pub seed: u64,
    /// Step cap; defaults to `16 n^2`.
    pub t_max: Option<u64>,
    /// Walkers per start for the Monte Carlo estimate.
    pub walkers: usize,
    /// Solver settings for the relaxation time.
    pub lambda: LambdaOptions,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions {
            epsilon: 0.25,
            method: None,
            start: StartPolicy::WorstSampled,
            seed: 0,
            t_max: None,
            walkers: 100_000,
            lambda: LambdaOptions::default(),
        }
    }
}

/// Step cap used for hat trees: `64 h k^2`.
pub fn hat_tree_step_cap(h: u32, k: u32) -> u64 {
    64u64
        .saturating_mul(u64::from(h))
        .saturating_mul(u64::from(k).saturating_pow(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub epsilon: f64,
    /// Least `t` with TV at most `epsilon`, or `t_max` when the cap is hit.
    pub t_mix: u64,
    pub method: MixingMethod,
    pub start_policy: StartPolicy,
    pub starts: Vec<usize>,
    pub worst_start: usize,
    /// `(t, TV)` for `t = 0..=t_mix`. Exact runs give the maximum over all
    /// starts; Monte Carlo runs give the worst start's estimates.
    pub tv_trajectory: Vec<(u64, f64)>,
    /// `1 / lambda1` of the normalized Laplacian of the non-lazy walk.
    pub relaxation_time: f64,
    pub cap_reached: bool,
    pub t_max: u64,
    pub kernel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walkers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Two-column `t,tv` CSV of the trajectory.
pub fn trajectory_csv(report: &MixingReport) -> String {
    let mut out = String::from("t,tv\n");
    for (t, tv) in &report.tv_trajectory {
        writeln!(out, "{t},{tv}").expect("writing to a String cannot fail");
    }
    out
}

fn resolve_starts(g: &WeightedGraph, policy: StartPolicy, seed: u64) -> Result<Vec<usize>> {
    let n = g.n();
    match policy {
        StartPolicy::Root => Ok(vec![0]),
        StartPolicy::Vertex(x) if x < n => Ok(vec![x]),
        StartPolicy::Vertex(x) => Err(Error::InvalidInput(format!(
            "start vertex {x} out of range for {n} vertices"
        ))),
        StartPolicy::WorstSampled => {
            let d = bfs_distances(g, 0)?;
            let ecc = d.eccentricity();
            let far = d.dist.iter().position(|&v| v == ecc).unwrap_or(0);
            let mut starts = vec![0, far];
            if n > EXACT_MIXING_LIMIT {
                let mut rng = seeded(seed);
                starts.extend((0..RANDOM_STARTS).map(|_| rng.random_range(0..n)));
            }
            let mut seen = vec![false; n];
            starts.retain(|&x| !std::mem::replace(&mut seen[x], true));
            Ok(starts)
        }
    }
}

/// Mixing time of the lazy walk in total variation.
///
/// Exact evolution runs all starts together and stops once the largest TV
/// distance drops to `epsilon`. The Monte Carlo estimate compares empirical
/// occupancy of independent walkers with the stationary distribution, which
/// overestimates TV by sampling noise. Hitting the step cap is reported, not
/// treated as an error.
pub fn mixing_time(g: &WeightedGraph, opts: &MixingOptions) -> Result<MixingReport> {
    let n = g.n();
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    if n < 2 || !g.is_connected() {
        return Err(Error::InvalidInput(
            "mixing time needs a connected graph with at least two vertices".into(),
        ));
    }
    let method = opts.method.unwrap_or(if n <= EXACT_MIXING_LIMIT {
        MixingMethod::Exact
    } else {
        MixingMethod::MonteCarlo
    });
    if method == MixingMethod::Exact && n > EXACT_MIXING_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact distribution evolution",
            size: n,
            limit: EXACT_MIXING_LIMIT,
        });
    }
    if method == MixingMethod::MonteCarlo && opts.walkers == 0 {
        return Err(Error::invalid(
            "Monte Carlo estimation needs at least one walker",
        ));
    }
    let t_max = opts.t_max.unwrap_or(16 * (n as u64).pow(2));
    let starts = resolve_starts(g, opts.start, opts.seed)?;
    let pi = stationary_distribution(g)?;
    let run = match method {
        MixingMethod::Exact => exact(g, &pi, &starts, opts.epsilon, t_max)?,
        MixingMethod::MonteCarlo => monte_carlo(g, &pi, &starts, opts, t_max),
    };
    Ok(MixingReport {
        epsilon: opts.epsilon,
        t_mix: run.t_mix,
        method,
        start_policy: opts.start,
        worst_start: run.worst_start,
        starts,
        tv_trajectory: run.trajectory,
        relaxation_time: relaxation_time(g, &opts.lambda)?,
        cap_reached: run.cap_reached,
        t_max,
        kernel: "lazy: P = (I + D^-1 W) / 2".into(),
        walkers: (method == MixingMethod::MonteCarlo).then_some(opts.walkers),
        note: (method == MixingMethod::MonteCarlo).then(|| {
            "TV estimated from walker occupancy; sampling noise biases it upward".to_string()
        }),
    })
}

struct Run {
    t_mix: u64,
    worst_start: usize,
    trajectory: Vec<(u64, f64)>,
    cap_reached: bool,
}

fn exact(g: &WeightedGraph, pi: &[f64], starts: &[usize], eps: f64, t_max: u64) -> Result<Run> {
    let n = g.n();
    let walk = LazyWalk::new(g)?;
    let mut dists: Vec<Vec<f64>> = starts
        .iter()
        .map(|&s| {
            let mut p = vec![0.0; n];
            p[s] = 1.0;
            p
        })
        .collect();
    let mut scratch = vec![0.0; n];
    let mut trajectory = Vec::new();
    let mut t = 0;
    loop {
        let mut worst = (0.0, starts[0]);
        for (p, &s) in dists.iter().zip(starts) {
            let tv = tv_distance(p, pi)?;
            if tv > worst.0 {
                worst = (tv, s);
            }
        }
        trajectory.push((t, worst.0));
        if worst.0 <= eps || t >= t_max {
            return Ok(Run {
                t_mix: t,
                worst_start: worst.1,
                trajectory,
                cap_reached: worst.0 > eps,
            });
        }
        for p in dists.iter_mut() {
            walk.step(p, &mut scratch);
            std::mem::swap(p, &mut scratch);
        }
        t += 1;
    }
}

/// Per-vertex cumulative transition weights for sampling a neighbor.
struct Sampler {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(g: &WeightedGraph) -> Self {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        let mut cumulative = Vec::new();
        for x in 0..g.n() {
            let mut acc = 0.0;
            for (y, w) in g.neighbors(x) {
                acc += w;
                targets.push(y as u32);
                cumulative.push(acc);
            }
            offsets.push(targets.len());
        }
        Sampler {
            offsets,
            targets,
            cumulative,
        }
    }

    fn step(&self, x: u32, rng: &mut ChaCha8Rng) -> u32 {
        let r: f64 = rng.random();
        if r < 0.5 {
            return x;
        }
        let (lo, hi) = (self.offsets[x as usize], self.offsets[x as usize + 1]);
        let cum = &self.cumulative[lo..hi];
        let target = (2.0 * r - 1.0) * cum[cum.len() - 1];
        let i = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
        self.targets[lo + i]
    }
}

fn monte_carlo(
    g: &WeightedGraph,
    pi: &[f64],
    starts: &[usize],
    opts: &MixingOptions,
    t_max: u64,
) -> Run {
    let sampler = Sampler::new(g);
    let w = opts.walkers;
    let mut worst: Option<Run> = None;
    for (si, &s) in starts.iter().enumerate() {
        let mut rngs: Vec<ChaCha8Rng> = (0..w)
            .map(|i| stream(opts.seed, (si * w + i) as u64))
            .collect();
        let mut pos = vec![s as u32; w];
        let mut counts = vec![0u64; g.n()];
        let mut trajectory = Vec::new();
        let mut t = 0;
        let tv = loop {
            counts.fill(0);
            for &x in &pos {
                counts[x as usize] += 1;
            }
            let tv = 0.5
                * counts
                    .iter()
                    .zip(pi)
                    .map(|(&c, p)| (c as f64 / w as f64 - p).abs())
                    .sum::<f64>();
            trajectory.push((t, tv));
            if tv <= opts.epsilon || t >= t_max {
                break tv;
            }
            pos.par_iter_mut()
                .zip(rngs.par_iter_mut())
                .for_each(|(x, rng)| *x = sampler.step(*x, rng));
            t += 1;
        };
        let run = Run {
            t_mix: t,
            worst_start: s,
            trajectory,
            cap_reached: tv > opts.epsilon,
        };
        if worst.as_ref().is_none_or(|b| run.t_mix > b.t_mix) {
            worst = Some(run);
        }
    }
    worst.expect("at least one start")
}
