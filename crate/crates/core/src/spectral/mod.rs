//! The vertex-weighted Laplacian and its spectral gap.
//!
//! For masses `pi` and conductances `w` the Laplacian acts on functions as
//!
//! ```text
//! L f(x) = pi(x)^-1 * sum_{y ~ x} w(x, y) (f(x) - f(y))
//! ```
//!
//! and is self-adjoint for `<f, g>_pi = sum_x pi(x) f(x) g(x)`. Its smallest
//! non-zero eigenvalue is the minimum Rayleigh quotient over functions with
//! `pi`-mean zero. Both solvers work on the conjugated symmetric operator
//! `Pi^{1/2} L Pi^{-1/2}`, whose kernel is spanned by `sqrt(pi)`.

mod cheeger;
mod dense;
mod iterative;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub use cheeger::{
    cheeger_exact, cheeger_sweep, cut_and_mass, verify_cheeger_inequality, CheegerMargin,
    CheegerMethod, CheegerReport, EXACT_CHEEGER_LIMIT,
};

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: f.len(),
        });
    }
    Ok(())
}

pub(crate) fn apply_unchecked(g: &WeightedGraph, f: &[f64], out: &mut [f64]) {
    for (x, slot) in out.iter_mut().enumerate() {
        let fx = f[x];
        let acc: f64 = g.neighbors(x).map(|(y, w)| w * (fx - f[y])).sum();
        *slot = acc / g.pi(x);
    }
}

/// `L f` for the vertex-weighted Laplacian.
pub fn laplacian_apply(g: &WeightedGraph, f: &[f64]) -> Result<Vec<f64>> {
    check_len(g, f)?;
    let mut out = vec![0.0; g.n()];
    apply_unchecked(g, f, &mut out);
    Ok(out)
}

/// Normalized Laplacian `Pi^{-1/2} (D - W) Pi^{-1/2}` for a positive vertex
/// weighting `pi`, where `D` holds weighted degrees:
///
/// ```text
/// N f(x) = d(x) f(x) / pi(x) - sum_{y ~ x} w(x, y) f(y) / sqrt(pi(x) pi(y))
/// ```
///
/// It is symmetric and annihilates `sqrt(pi)`. With `pi = D` this is
/// `I - D^{-1/2} W D^{-1/2}`; rescaling `pi` by `c` rescales the operator by
/// `1 / c`.
pub fn normalized_laplacian_apply(g: &WeightedGraph, pi: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_len(g, f)?;
    check_len(g, pi)?;
    if let Some(x) = pi.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidDistribution(format!(
            "pi({x}) = {} is not positive",
            pi[x]
        )));
    }
    let out = (0..g.n())
        .map(|x| {
            let sx = pi[x].sqrt();
            let off: f64 = g.neighbors(x).map(|(y, w)| w * f[y] / pi[y].sqrt()).sum();
            g.weighted_degree(x) * f[x] / pi[x] - off / sx
        })
        .collect();
    Ok(out)
}

/// `sum_{edges} w (f(x) - f(y))^2`.
pub fn dirichlet_form(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let d = f[e.u] - f[e.v];
            e.w * d * d
        })
        .sum()
}

pub fn pi_inner(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    f.iter()
        .zip(h)
        .zip(g.vertex_weights())
        .map(|((a, b), p)| p * a * b)
        .sum()
}

pub fn pi_norm(g: &WeightedGraph, f: &[f64]) -> f64 {
    pi_inner(g, f, f).sqrt()
}

/// Dirichlet form over squared `pi`-norm.
pub fn rayleigh_quotient(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    check_len(g, f)?;
    let denom = pi_inner(g, f, f);
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dirichlet_form(g, f) / denom)
}

/// Subtracts the `pi`-weighted mean.
pub fn center(g: &WeightedGraph, f: &mut [f64]) {
    let mean = pi_inner(g, f, &vec![1.0; f.len()]) / g.total_mass();
    f.iter_mut().for_each(|v| *v -= mean);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Dense up to `dense_cutoff` vertices, iterative beyond.
    #[default]
    Auto,
    Dense,
    Iterative,
}

pub const DEFAULT_DENSE_CUTOFF: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaOptions {
    pub solver: SolverChoice,
    /// Bound on `||L f - lambda f||_pi` for the unit-norm eigenvector.
    pub tolerance: f64,
    /// Budget of operator applications for the iterative solver.
    pub max_iter: usize,
    pub seed: u64,
    pub dense_cutoff: usize,
    /// Largest search subspace kept by the iterative solver.
    pub subspace: usize,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        LambdaOptions {
            solver: SolverChoice::Auto,
            tolerance: 1e-8,
            max_iter: 200_000,
            seed: 0,
            dense_cutoff: DEFAULT_DENSE_CUTOFF,
            subspace: 120,
        }
    }
}

impl LambdaOptions {
    pub fn dense() -> Self {
        LambdaOptions {
            solver: SolverChoice::Dense,
            ..Default::default()
        }
    }

    pub fn iterative() -> Self {
        LambdaOptions {
            solver: SolverChoice::Iterative,
            ..Default::default()
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Smallest non-zero eigenvalue of `L` with its eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda1: f64,
    /// `pi`-orthogonal to constants, unit `pi`-norm.
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub solver: SolverKind,
    pub iterations: usize,
    pub tolerance: f64,
    /// For disconnected inputs, the component containing vertex 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<Vec<usize>>,
}

impl SpectralReport {
    /// Re-checks residual, orthogonality and normalization against `g`.
    pub fn is_consistent(&self, g: &WeightedGraph) -> bool {
        let f = &self.eigenvector;
        if f.len() != g.n() {
            return false;
        }
        let norm = pi_norm(g, f);
        let ones = vec![1.0; g.n()];
        let mean = pi_inner(g, f, &ones).abs();
        let lf = laplacian_apply(g, f).expect("length checked");
        let r: Vec<f64> = lf
            .iter()
            .zip(f)
            .map(|(a, b)| a - self.lambda1 * b)
            .collect();
        let slack = 1e-12;
        pi_norm(g, &r) <= self.tolerance + slack
            && (self.residual - pi_norm(g, &r)).abs() <= 1e-9 * (1.0 + self.residual)
            && mean <= self.tolerance * norm * g.total_mass().sqrt() + slack
            && (norm - 1.0).abs() <= self.tolerance.max(1e-12)
    }
}

/// Centers, normalizes and certifies a candidate eigenvector.
fn finish(
    g: &WeightedGraph,
    mut f: Vec<f64>,
    solver: SolverKind,
    iterations: usize,
    tolerance: f64,
) -> SpectralReport {
    center(g, &mut f);
    let norm = pi_norm(g, &f);
    f.iter_mut().for_each(|v| *v /= norm);
    let lambda1 = dirichlet_form(g, &f);
    let lf = laplacian_apply(g, &f).expect("length matches");
    let r: Vec<f64> = lf.iter().zip(&f).map(|(a, b)| a - lambda1 * b).collect();
    SpectralReport {
        lambda1,
        residual: pi_norm(g, &r),
        eigenvector: f,
        solver,
        iterations,
        tolerance,
        component: None,
    }
}

fn disconnected_report(
    g: &WeightedGraph,
    component: Vec<usize>,
    solver: SolverKind,
    tolerance: f64,
) -> SpectralReport {
    let mut f = vec![0.0; g.n()];
    for &x in &component {
        f[x] = 1.0;
    }
    center(g, &mut f);
    let norm = pi_norm(g, &f);
    f.iter_mut().for_each(|v| *v /= norm);
    let residual = pi_norm(g, &laplacian_apply(g, &f).expect("length matches"));
    SpectralReport {
        lambda1: 0.0,
        eigenvector: f,
        residual,
        solver,
        iterations: 0,
        tolerance,
        component: Some(component),
    }
}

/// Smallest non-zero eigenvalue of the Laplacian of `g`.
///
/// Disconnected graphs give `lambda1 = 0` with the component of vertex 0 as
/// witness. The iterative solver fails with [`Error::ConvergenceFailure`]
/// carrying its best iterate when the residual bound is not met in budget.
pub fn lambda1(g: &WeightedGraph, opts: &LambdaOptions) -> Result<SpectralReport> {
    if g.n() < 2 {
        return Err(Error::InvalidInput(
            "the spectral gap needs at least two vertices".into(),
        ));
    }
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let solver = match opts.solver {
        SolverChoice::Dense => SolverKind::Dense,
        SolverChoice::Iterative => SolverKind::Iterative,
        SolverChoice::Auto if g.n() <= opts.dense_cutoff => SolverKind::Dense,
        SolverChoice::Auto => SolverKind::Iterative,
    };
    let mut components = g.components();
    if components.len() > 1 {
        return Ok(disconnected_report(
            g,
            components.swap_remove(0),
            solver,
            opts.tolerance,
        ));
    }
    let report = match solver {
        SolverKind::Dense => dense::solve(g, opts.tolerance),
        SolverKind::Iterative => iterative::solve(g, opts)?,
    };
    if report.residual > opts.tolerance {
        return Err(Error::ConvergenceFailure {
            best: Box::new(report),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hat_tree, build_weighted_chain, complete_graph, path_graph};
    use approx::assert_abs_diff_eq;

    #[test]
    fn laplacian_examples() {
        let k2 = path_graph(2);
        assert_eq!(laplacian_apply(&k2, &[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        let q1 = build_weighted_chain(1).unwrap();
        assert_eq!(
            laplacian_apply(q1.graph(), &[1.0, 0.0]).unwrap(),
            vec![2.0, -1.0]
        );
        let k4 = complete_graph(4);
        assert_eq!(laplacian_apply(&k4, &[3.0; 4]).unwrap(), vec![0.0; 4]);
        assert!(matches!(
            laplacian_apply(&k4, &[1.0]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 1
            })
        ));
    }

    #[test]
    fn normalized_laplacian_examples() {
        let k2 = path_graph(2);
        let out = normalized_laplacian_apply(&k2, &[0.5, 0.5], &[1.0, -1.0]).unwrap();
        assert_eq!(out, vec![4.0, -4.0]);
        let p3 = path_graph(3);
        let pi = [0.25, 0.5, 0.25];
        let root: Vec<f64> = pi.iter().map(|p: &f64| p.sqrt()).collect();
        for v in normalized_laplacian_apply(&p3, &pi, &root).unwrap() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
        assert!(normalized_laplacian_apply(&p3, &[0.5, 0.5, 0.0], &root).is_err());
        assert!(normalized_laplacian_apply(&p3, &[0.5, 0.5], &root).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        assert_eq!(
            rayleigh_quotient(&path_graph(2), &[1.0, -1.0]).unwrap(),
            2.0
        );
        let q1 = build_weighted_chain(1).unwrap();
        assert_eq!(rayleigh_quotient(q1.graph(), &[2.0, -1.0]).unwrap(), 3.0);
        assert!(matches!(
            rayleigh_quotient(&path_graph(2), &[0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn lambda1_small_cases() {
        let r = lambda1(&path_graph(2), &LambdaOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 2.0, epsilon = 1e-12);
        assert!(r.is_consistent(&path_graph(2)));
        let tri = build_hat_tree(1, 1).unwrap();
        let r = lambda1(tri.graph(), &LambdaOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 3.0, epsilon = 1e-12);
        let q1 = build_weighted_chain(1).unwrap();
        let r = lambda1(q1.graph(), &LambdaOptions::dense()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn disconnected_graph_has_zero_gap() {
        let g = WeightedGraph::unweighted(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let r = lambda1(&g, &LambdaOptions::default()).unwrap();
        assert_eq!(r.lambda1, 0.0);
        assert_eq!(r.component, Some(vec![0, 1, 2]));
        assert!(r.residual < 1e-15);
        assert!(r.is_consistent(&g));
    }

    #[test]
    fn single_vertex_is_rejected() {
        let g = WeightedGraph::unweighted(1, []).unwrap();
        assert!(lambda1(&g, &LambdaOptions::default()).is_err());
    }

    #[test]
    fn iterative_solver_small_graphs() {
        for n in [2, 3, 5, 17] {
            let g = path_graph(n);
            let r = lambda1(&g, &LambdaOptions::iterative()).unwrap();
            let exact = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
            assert_abs_diff_eq!(r.lambda1, exact, epsilon = 1e-9);
            assert_eq!(r.solver, SolverKind::Iterative);
            assert!(r.is_consistent(&g));
        }
    }

    #[test]
    fn report_json_field_names() {
        let r = lambda1(&path_graph(3), &LambdaOptions::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["iterations", "lambda1", "residual", "solver", "tolerance"]
        );
        assert_eq!(v["solver"], "dense");
    }
}
