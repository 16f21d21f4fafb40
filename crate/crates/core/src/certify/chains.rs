use serde::{Deserialize, Serialize};

use super::{CertificateReport, Claim, Context};
use crate::error::{Error, Result};
use crate::graph::{build_hat_tree, build_weighted_chain, HatTree, WeightedGraph};
use crate::spectral::{
    center, cheeger_exact, dirichlet_form, lambda1, pi_inner, verify_cheeger_inequality,
    LambdaOptions,
};
use crate::walk::{
    bfs_distances, distance_stats, relaxation_time, DistanceMode, EXACT_DISTANCE_LIMIT,
};

/// Largest chain height whose Cheeger constant is enumerated exactly.
pub const EXACT_CHAIN_CHEEGER_MAX_H: u32 = 20;

fn chain_options() -> LambdaOptions {
    LambdaOptions::dense().with_tolerance(1e-10)
}

/// Gap of the weighted chain against `1/6` and, up to height 20, its exact
/// Cheeger constant against `1`.
pub fn check_qh_gap(h: u32) -> Result<Vec<CertificateReport>> {
    let chain = build_weighted_chain(h)?;
    let gap = lambda1(chain.graph(), &chain_options())?.lambda1;
    let mut out = vec![CertificateReport::new(
        Claim::ChainGap,
        gap,
        1.0 / 6.0,
        Context::chain(h),
    )];
    if h <= EXACT_CHAIN_CHEEGER_MAX_H {
        let cheeger = cheeger_exact(chain.graph())?.value;
        out.push(CertificateReport::new(
            Claim::ChainCheeger,
            cheeger,
            1.0,
            Context::chain(h),
        ));
    }
    Ok(out)
}

/// `rho = lambda1(Q_{h,k}) k^2 / lambda1(Q_h)` against `1 - 1e-6`.
pub fn check_subdivision_scaling(h: u32, k: u32) -> Result<CertificateReport> {
    let chain = build_weighted_chain(h)?;
    let base = lambda1(chain.graph(), &chain_options())?.lambda1;
    let sub = if k == 1 {
        base
    } else {
        let subdivided = chain.subdivide(k)?;
        lambda1(
            subdivided.graph(),
            &LambdaOptions::default().with_tolerance(1e-10),
        )?
        .lambda1
    };
    let rho = sub * f64::from(k).powi(2) / base;
    Ok(CertificateReport::new(
        Claim::SubdivisionScaling,
        rho,
        1.0 - 1e-6,
        Context::hk(h, k),
    ))
}

/// Gap of the subdivided chain against `1 / (6 k^2)`.
pub fn quotient_gap(h: u32, k: u32) -> Result<CertificateReport> {
    let chain = build_weighted_chain(h)?.subdivide(k)?;
    let gap = lambda1(
        chain.graph(),
        &LambdaOptions::default().with_tolerance(1e-10),
    )?
    .lambda1;
    let kf = f64::from(k);
    Ok(CertificateReport::new(
        Claim::QuotientGap,
        gap,
        1.0 / (6.0 * kf * kf),
        Context::hk(h, k),
    ))
}

pub(super) fn tree_diameter(t: &HatTree) -> Result<u32> {
    if t.n() <= EXACT_DISTANCE_LIMIT {
        Ok(distance_stats(t.graph(), DistanceMode::Exact, 0, 0)?.diameter)
    } else {
        Err(Error::SizeLimit {
            what: "exact diameter",
            size: t.n(),
            limit: EXACT_DISTANCE_LIMIT,
        })
    }
}

/// Diameter against `hk`, gap against `1 / (7 k^2)`, and `1 / (7 k^2)`
/// against `(log2(diam) / (6 diam))^2`.
pub fn tree_gap_certificate(
    h: u32,
    k: u32,
    opts: &LambdaOptions,
) -> Result<Vec<CertificateReport>> {
    let t = build_hat_tree(h, k)?;
    let diam = tree_diameter(&t)?;
    let gap = lambda1(t.graph(), opts)?.lambda1;
    Ok(tree_gap_reports(&t, diam, gap))
}

pub(super) fn tree_gap_reports(t: &HatTree, diam: u32, gap: f64) -> Vec<CertificateReport> {
    let ctx = Context::tree(t);
    let diam = f64::from(diam);
    let kf = f64::from(t.k());
    let bound = 1.0 / (7.0 * kf * kf);
    let log_term = (diam.log2() / (6.0 * diam)).powi(2);
    vec![
        CertificateReport::new(Claim::Diameter, diam, f64::from(t.h()) * kf, ctx),
        CertificateReport::new(Claim::TreeGap, gap, bound, ctx),
        CertificateReport::new(Claim::TreeLogDiameter, bound, log_term, ctx),
    ]
}

/// Hop distance from `src` as a function on vertices.
pub fn distance_map(g: &WeightedGraph, src: usize) -> Result<Vec<f64>> {
    let d = bfs_distances(g, src)?;
    if !d.all_reachable() {
        return Err(Error::InvalidInput(
            "distance map needs a connected graph".into(),
        ));
    }
    Ok(d.dist.into_iter().map(f64::from).collect())
}

/// Upper bound on the gap from a map that moves by at most 1 along every
/// edge: `sum_E w (f(x) - f(y))^2` over the `pi`-variance of `f`, which is
/// `(2 pi(V))^-1 sum_{x,y} pi(x) pi(y) (f(x) - f(y))^2`. The report compares
/// it with the computed gap.
pub fn lipschitz_upper_bound(
    g: &WeightedGraph,
    f: &[f64],
    opts: &LambdaOptions,
) -> Result<(f64, CertificateReport)> {
    let bound = lipschitz_bound(g, f)?;
    let gap = lambda1(g, opts)?.lambda1;
    Ok((bound, lipschitz_report(bound, gap)))
}

pub(super) fn lipschitz_report(bound: f64, gap: f64) -> CertificateReport {
    CertificateReport::new(Claim::LipschitzBound, bound, gap, Context::default())
}

/// The bound alone, without solving for the gap.
pub fn lipschitz_bound(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    if f.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: f.len(),
        });
    }
    if f.iter().all(|&v| v == f[0]) {
        return Err(Error::ConstantVector);
    }
    for e in g.edges() {
        let gap = (f[e.u] - f[e.v]).abs();
        if gap > 1.0 + 1e-12 {
            return Err(Error::InvalidMap {
                u: e.u,
                v: e.v,
                gap,
            });
        }
    }
    let mut centered = f.to_vec();
    center(g, &mut centered);
    Ok(dirichlet_form(g, f) / pi_inner(g, &centered, &centered))
}

/// Gap times mean squared distance, uniform and stationary versions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapDistanceProduct {
    /// `lambda1(L) * |V|^-2 sum_{x,y} d(x,y)^2`.
    pub product_u: f64,
    /// `lambda1(normalized) * sum_{x,y} pi(x) pi(y) d(x,y)^2`.
    pub product_pi: f64,
    pub lambda1: f64,
    pub normalized_lambda1: f64,
    pub avg_sq_distance: f64,
    pub stationary_sq_distance: f64,
    pub mode: DistanceMode,
}

/// Products of the gap with mean squared distance. Distances are exact up to
/// the all-pairs limit and sampled from `sample_pairs` pairs beyond it.
pub fn gap_distance_product(
    g: &WeightedGraph,
    opts: &LambdaOptions,
    sample_pairs: usize,
    seed: u64,
) -> Result<GapDistanceProduct> {
    let mode = if g.n() <= EXACT_DISTANCE_LIMIT {
        DistanceMode::Exact
    } else {
        DistanceMode::Sampled
    };
    let stats = distance_stats(g, mode, sample_pairs, seed)?;
    let gap = lambda1(g, opts)?.lambda1;
    let normalized = 1.0 / relaxation_time(g, opts)?;
    Ok(GapDistanceProduct {
        product_u: gap * stats.avg_sq_distance,
        product_pi: normalized * stats.stationary_sq_distance,
        lambda1: gap,
        normalized_lambda1: normalized,
        avg_sq_distance: stats.avg_sq_distance,
        stationary_sq_distance: stats.stationary_sq_distance,
        mode,
    })
}

/// For consecutive `(h, product)` rows: `2` against `next / previous`,
/// reported under the later `h`.
pub fn product_trend(rows: &[(u32, f64)]) -> Vec<CertificateReport> {
    rows.windows(2)
        .map(|w| {
            let (_, prev) = w[0];
            let (h, next) = w[1];
            CertificateReport::new(Claim::ProductTrend, 2.0, next / prev, Context::chain(h))
        })
        .collect()
}

/// Gap against `h(G)^2 / (2 d_max)` with the exact Cheeger constant.
pub fn check_cheeger_inequality(g: &WeightedGraph) -> Result<CertificateReport> {
    let m = verify_cheeger_inequality(g)?;
    Ok(CertificateReport::new(
        Claim::CheegerInequality,
        m.lambda1,
        m.bound,
        Context::default(),
    ))
}
