//! Numerical certificates for the spectral-gap argument on hat trees.
//!
//! The argument splits the Dirichlet form of a mean-zero `f` into the level
//! paths and the tree edges. Along each level path `f` is compared with its
//! level average `f_bar`; along tree edges, `f` is replaced by `f_bar`
//! (Jensen), which reduces to the weighted chain of level masses. Each step
//! is checked here as an inequality `lhs >= rhs` on concrete inputs.

mod chains;
mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, HatTree};

pub use chains::{
    check_cheeger_inequality, check_qh_gap, check_subdivision_scaling, distance_map,
    gap_distance_product, lipschitz_bound, lipschitz_upper_bound, product_trend, quotient_gap,
    tree_gap_certificate, GapDistanceProduct, EXACT_CHAIN_CHEEGER_MAX_H,
};
pub use suite::{random_centered_function, random_suite, verify_all, SuiteOptions};

/// Relative slack used by every pass/fail decision.
pub const RELATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Claim {
    /// Diameter at least `hk`.
    #[serde(rename = "diam_bound")]
    Diameter,
    /// Level-path Dirichlet sum against `4^-h ||f - f_bar||^2`.
    #[serde(rename = "horizontal_eq2")]
    Horizontal,
    /// Tree-edge Dirichlet sum of `f_bar` against `||f_bar||^2 / (6 k^2)`.
    #[serde(rename = "vertical_eq3")]
    Vertical,
    /// Tree-edge Dirichlet sum of `f` against that of `f_bar`.
    #[serde(rename = "jensen_eq4")]
    Jensen,
    /// Both parts together against `min(4^-h, k^-2) ||f||^2 / 7`.
    #[serde(rename = "combined_bound")]
    Combined,
    /// Gap of the weighted chain against `1/6`.
    #[serde(rename = "qh_gap")]
    ChainGap,
    /// Cheeger constant of the weighted chain against `1`.
    #[serde(rename = "qh_cheeger")]
    ChainCheeger,
    /// `lambda1(subdivided chain) k^2 / lambda1(chain)` against `1`.
    #[serde(rename = "subdivision_scaling")]
    SubdivisionScaling,
    /// Gap of the level quotient against `1 / (6 k^2)`.
    #[serde(rename = "quotient_gap")]
    QuotientGap,
    /// Gap of the hat tree against `1 / (7 k^2)`.
    #[serde(rename = "theorem1_gap")]
    TreeGap,
    /// `1 / (7 k^2)` against `(log2(diam) / (6 diam))^2`.
    #[serde(rename = "theorem1_logdiam")]
    TreeLogDiameter,
    /// Consecutive ratio of `lambda1 * avg d^2` against `2`.
    #[serde(rename = "theorem2_product")]
    ProductTrend,
    /// Lipschitz-map upper bound against the computed gap.
    #[serde(rename = "lipschitz_bound")]
    LipschitzBound,
    /// Gap against `h(G)^2 / (2 d_max)`.
    #[serde(rename = "cheeger_inequality")]
    CheegerInequality,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::Diameter => "diam_bound",
            Claim::Horizontal => "horizontal_eq2",
            Claim::Vertical => "vertical_eq3",
            Claim::Jensen => "jensen_eq4",
            Claim::Combined => "combined_bound",
            Claim::ChainGap => "qh_gap",
            Claim::ChainCheeger => "qh_cheeger",
            Claim::SubdivisionScaling => "subdivision_scaling",
            Claim::QuotientGap => "quotient_gap",
            Claim::TreeGap => "theorem1_gap",
            Claim::TreeLogDiameter => "theorem1_logdiam",
            Claim::ProductTrend => "theorem2_product",
            Claim::LipschitzBound => "lipschitz_bound",
            Claim::CheegerInequality => "cheeger_inequality",
        }
    }
}

impl std::fmt::Display for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Parameters a report was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Context {
    pub h: Option<u32>,
    pub k: Option<u32>,
    pub seed: Option<u64>,
    pub trials: usize,
}

impl Context {
    pub fn tree(t: &HatTree) -> Self {
        Context {
            h: Some(t.h()),
            k: Some(t.k()),
            seed: None,
            trials: 1,
        }
    }

    pub fn hk(h: u32, k: u32) -> Self {
        Context {
            h: Some(h),
            k: Some(k),
            seed: None,
            trials: 1,
        }
    }

    pub fn chain(h: u32) -> Self {
        Context {
            h: Some(h),
            k: None,
            seed: None,
            trials: 1,
        }
    }
}

/// One checked inequality `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub claim: Claim,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub h: Option<u32>,
    pub k: Option<u32>,
    pub seed: Option<u64>,
    pub trials: usize,
}

/// `margin >= -1e-9 max(|lhs|, |rhs|, 1)`.
pub fn passes(lhs: f64, rhs: f64) -> bool {
    let margin = lhs - rhs;
    margin >= -RELATIVE_SLACK * lhs.abs().max(rhs.abs()).max(1.0)
}

impl CertificateReport {
    pub fn new(claim: Claim, lhs: f64, rhs: f64, ctx: Context) -> Self {
        CertificateReport {
            claim,
            lhs,
            rhs,
            margin: lhs - rhs,
            pass: passes(lhs, rhs),
            h: ctx.h,
            k: ctx.k,
            seed: ctx.seed,
            trials: ctx.trials,
        }
    }

    /// Margin divided by `max(|lhs|, |rhs|, 1)`.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }
}

fn check_len(t: &HatTree, f: &[f64]) -> Result<()> {
    if f.len() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: f.len(),
        });
    }
    Ok(())
}

fn norm_sq(f: &[f64]) -> f64 {
    f.iter().map(|v| v * v).sum()
}

fn sum_sq_diff(t: &HatTree, kind: EdgeKind, f: &[f64]) -> f64 {
    t.edges_of(kind)
        .map(|e| {
            let d = f[e.u] - f[e.v];
            d * d
        })
        .sum()
}

/// Per-level means of `f`.
pub fn level_means(t: &HatTree, f: &[f64]) -> Result<Vec<f64>> {
    check_len(t, f)?;
    Ok((0..=t.depth())
        .map(|l| {
            let r = t.level_range(l);
            let len = r.len() as f64;
            f[r].iter().sum::<f64>() / len
        })
        .collect())
}

/// `f_bar`: `f` replaced on each level by the level mean.
pub fn level_average(t: &HatTree, f: &[f64]) -> Result<Vec<f64>> {
    let means = level_means(t, f)?;
    Ok((0..t.n()).map(|x| means[t.level(x)]).collect())
}

/// Subtracts the plain mean, so that `sum f = 0`.
pub fn center_uniform(f: &mut [f64]) {
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    f.iter_mut().for_each(|v| *v -= mean);
}

/// Level-path Dirichlet sum against `4^-h ||f - f_bar||^2`. The factor uses
/// the largest level size `2^h`, which is at most `k` exactly when
/// `k >= 2^h`; only then does the `k^-2` form follow.
pub fn check_horizontal(t: &HatTree, f: &[f64]) -> Result<CertificateReport> {
    let bar = level_average(t, f)?;
    let lhs = sum_sq_diff(t, EdgeKind::Path, f);
    let dev: f64 = f.iter().zip(&bar).map(|(a, b)| (a - b).powi(2)).sum();
    let rhs = 4f64.powi(-(t.h() as i32)) * dev;
    Ok(CertificateReport::new(
        Claim::Horizontal,
        lhs,
        rhs,
        Context::tree(t),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// For each level: path Dirichlet sum against `|V_l|^-2 sum (f - f_bar)^2`.
pub fn check_horizontal_levels(t: &HatTree, f: &[f64]) -> Result<Vec<LevelCheck>> {
    let means = level_means(t, f)?;
    let mut lhs = vec![0.0; t.depth() + 1];
    for e in t.edges_of(EdgeKind::Path) {
        lhs[t.level(e.u)] += (f[e.u] - f[e.v]).powi(2);
    }
    Ok((0..=t.depth())
        .map(|l| {
            let r = t.level_range(l);
            let size = r.len() as f64;
            let dev: f64 = f[r].iter().map(|v| (v - means[l]).powi(2)).sum();
            let rhs = dev / (size * size);
            LevelCheck {
                level: l,
                lhs: lhs[l],
                rhs,
                pass: passes(lhs[l], rhs),
            }
        })
        .collect())
}

/// Tree-edge Dirichlet sum of `f_bar` against `||f_bar||^2 / (6 k^2)`, after
/// centering `f`. The left side is computed both edge by edge and through the
/// level chain; the two must agree.
pub fn check_vertical(t: &HatTree, f: &[f64]) -> Result<CertificateReport> {
    check_len(t, f)?;
    let mut centered = f.to_vec();
    center_uniform(&mut centered);
    let means = level_means(t, &centered)?;
    let bar: Vec<f64> = (0..t.n()).map(|x| means[t.level(x)]).collect();
    let lhs = sum_sq_diff(t, EdgeKind::Tree, &bar);
    let via_chain: f64 = (0..t.depth())
        .map(|l| t.level_len(l + 1) as f64 * (means[l] - means[l + 1]).powi(2))
        .sum();
    if (lhs - via_chain).abs() > RELATIVE_SLACK * lhs.abs().max(via_chain.abs()).max(1.0) {
        return Err(Error::InvalidInput(format!(
            "tree-edge sum {lhs} disagrees with the level-chain sum {via_chain}"
        )));
    }
    let k = f64::from(t.k());
    let rhs = norm_sq(&bar) / (6.0 * k * k);
    Ok(CertificateReport::new(
        Claim::Vertical,
        lhs,
        rhs,
        Context::tree(t),
    ))
}

/// Checks that all vertices on a level have the same number of children.
pub fn check_uniform_children(t: &HatTree) -> Result<()> {
    for l in 0..=t.depth() {
        let r = t.level_range(l);
        let first = t.children(r.start).count();
        if let Some(x) = r.clone().find(|&x| t.children(x).count() != first) {
            return Err(Error::InvalidInput(format!(
                "vertex {x} on level {l} has a different child count than vertex {}",
                r.start
            )));
        }
        if first > 2 {
            return Err(Error::InvalidInput(format!(
                "level {l} vertices have {first} children"
            )));
        }
    }
    Ok(())
}

/// Tree-edge Dirichlet sum of `f` against that of `f_bar`.
pub fn check_jensen(t: &HatTree, f: &[f64]) -> Result<CertificateReport> {
    check_uniform_children(t)?;
    let bar = level_average(t, f)?;
    let lhs = sum_sq_diff(t, EdgeKind::Tree, f);
    let rhs = sum_sq_diff(t, EdgeKind::Tree, &bar);
    Ok(CertificateReport::new(
        Claim::Jensen,
        lhs,
        rhs,
        Context::tree(t),
    ))
}

/// Full Dirichlet form of a centered `f` against
/// `min(4^-h, k^-2) ||f||^2 / 7`.
pub fn check_combined(t: &HatTree, f: &[f64]) -> Result<CertificateReport> {
    check_len(t, f)?;
    let mut centered = f.to_vec();
    center_uniform(&mut centered);
    let lhs = sum_sq_diff(t, EdgeKind::Path, &centered) + sum_sq_diff(t, EdgeKind::Tree, &centered);
    let k = f64::from(t.k());
    let scale = 4f64.powi(-(t.h() as i32)).min(1.0 / (k * k));
    let rhs = scale * norm_sq(&centered) / 7.0;
    Ok(CertificateReport::new(
        Claim::Combined,
        lhs,
        rhs,
        Context::tree(t),
    ))
}
