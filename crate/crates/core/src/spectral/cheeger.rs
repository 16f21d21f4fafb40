use serde::{Deserialize, Serialize};

use super::{lambda1, LambdaOptions};
use crate::error::{Error, Result};
use crate::graph::{degree_stats, WeightedGraph};

/// Largest vertex count accepted by [`cheeger_exact`].
pub const EXACT_CHEEGER_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerMethod {
    Exact,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    /// `cut_weight / pi(witness)`.
    pub value: f64,
    /// Sorted vertex set with at most half of the total mass.
    pub witness: Vec<usize>,
    pub method: CheegerMethod,
    pub cut_weight: f64,
}

impl CheegerReport {
    fn from_set(g: &WeightedGraph, mut witness: Vec<usize>, method: CheegerMethod) -> Self {
        witness.sort_unstable();
        let (cut_weight, mass) = cut_and_mass(g, &witness);
        CheegerReport {
            value: cut_weight / mass,
            witness,
            method,
            cut_weight,
        }
    }
}

/// Weight of edges leaving `set` and its mass, summed in a fixed order.
pub fn cut_and_mass(g: &WeightedGraph, set: &[usize]) -> (f64, f64) {
    let mut inside = vec![false; g.n()];
    for &x in set {
        inside[x] = true;
    }
    let cut = g
        .edges()
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| e.w)
        .sum();
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    (cut, sorted.iter().map(|&x| g.pi(x)).sum())
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&x| mask >> x & 1 == 1).collect()
}

/// Exact Cheeger constant by enumerating all vertex subsets in Gray-code
/// order. Ratios are tracked incrementally and every near-optimal candidate
/// is recomputed from scratch, so the result does not depend on rounding
/// drift. Ties go to the lexicographically smallest set.
pub fn cheeger_exact(g: &WeightedGraph) -> Result<CheegerReport> {
    let n = g.n();
    if n > EXACT_CHEEGER_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact Cheeger enumeration",
            size: n,
            limit: EXACT_CHEEGER_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput(
            "the Cheeger constant needs at least two vertices".into(),
        ));
    }
    let total = g.total_mass();
    let half = total / 2.0;
    let slack = 1e-9;
    let mut mask = 0u32;
    let mut cut = 0.0f64;
    let mut mass = 0.0f64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for i in 1u64..(1u64 << n) {
        let x = i.trailing_zeros() as usize;
        let adding = mask >> x & 1 == 0;
        let mut inward = 0.0;
        let mut outward = 0.0;
        for (y, w) in g.neighbors(x) {
            if mask >> y & 1 == 1 {
                inward += w;
            } else {
                outward += w;
            }
        }
        if adding {
            cut += outward - inward;
            mass += g.pi(x);
        } else {
            cut += inward - outward;
            mass -= g.pi(x);
        }
        mask ^= 1 << x;
        if mass > half * (1.0 + slack) || mass <= 0.0 {
            continue;
        }
        let approx = cut / mass;
        let promising = match &best {
            None => true,
            Some((b, _)) => approx <= b * (1.0 + slack) + slack * f64::EPSILON,
        };
        if !promising {
            continue;
        }
        let set = members(mask, n);
        let (c, m) = cut_and_mass(g, &set);
        if m > half {
            continue;
        }
        let value = c / m;
        let better = match &best {
            None => true,
            Some((b, s)) => value < *b || (value == *b && set < *s),
        };
        if better {
            best = Some((value, set));
        }
    }
    let (_, set) = best.expect("some singleton has at most half the mass");
    Ok(CheegerReport::from_set(g, set, CheegerMethod::Exact))
}

/// Best threshold cut along `f`: vertices sorted by value (ties by id), every
/// prefix and its complement considered. An upper bound on `h(G)`.
pub fn cheeger_sweep(g: &WeightedGraph, f: &[f64]) -> Result<CheegerReport> {
    let n = g.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.len(),
        });
    }
    if f.iter().all(|&v| v == f[0]) {
        return Err(Error::ConstantVector);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let total = g.total_mass();
    let half = total / 2.0;
    let mut inside = vec![false; n];
    let mut cut = 0.0;
    let mut mass = 0.0;
    let mut best: Option<(f64, usize, bool)> = None;
    for (i, &x) in order.iter().enumerate().take(n - 1) {
        for (y, w) in g.neighbors(x) {
            if inside[y] {
                cut -= w;
            } else {
                cut += w;
            }
        }
        inside[x] = true;
        mass += g.pi(x);
        // Only cut between distinct values.
        if f[x] == f[order[i + 1]] {
            continue;
        }
        let (m, prefix) = if mass <= half {
            (mass, true)
        } else {
            (total - mass, false)
        };
        let ratio = cut / m;
        if best.is_none_or(|(b, _, _)| ratio < b) {
            best = Some((ratio, i + 1, prefix));
        }
    }
    let (_, len, prefix) = best.expect("f takes at least two values");
    let set = if prefix {
        order[..len].to_vec()
    } else {
        order[len..].to_vec()
    };
    Ok(CheegerReport::from_set(g, set, CheegerMethod::Sweep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerMargin {
    pub lambda1: f64,
    pub cheeger: f64,
    pub d_max: f64,
    /// `h^2 / (2 d_max)`.
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `lambda1 - h^2 / (2 d_max)` with the exact Cheeger constant and a dense
/// eigensolve.
pub fn verify_cheeger_inequality(g: &WeightedGraph) -> Result<CheegerMargin> {
    let cheeger = cheeger_exact(g)?.value;
    let lambda1 = lambda1(g, &LambdaOptions::dense().with_tolerance(1e-10))?.lambda1;
    let d_max = degree_stats(g).d_max;
    let bound = cheeger * cheeger / (2.0 * d_max);
    let margin = lambda1 - bound;
    Ok(CheegerMargin {
        lambda1,
        cheeger,
        d_max,
        bound,
        margin,
        pass: margin >= -1e-9,
    })
}
