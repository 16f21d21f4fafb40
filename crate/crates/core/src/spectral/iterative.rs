//! Thick-restart Rayleigh-Ritz on the Krylov space of the symmetrized
//! Laplacian, restricted to the complement of `sqrt(pi)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use super::{apply_unchecked, finish, LambdaOptions, SolverKind, SpectralReport};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::seeded;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Two passes of modified Gram-Schmidt against `null` and `basis`. Returns
/// `None` when `v` lies (numerically) in their span.
fn orthonormalize(mut v: Vec<f64>, null: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let start = dot(&v, &v).sqrt();
    if !start.is_finite() || start <= 0.0 {
        return None;
    }
    for _ in 0..2 {
        let c = dot(&v, null);
        axpy(-c, null, &mut v);
        for b in basis {
            let c = dot(&v, b);
            axpy(-c, b, &mut v);
        }
    }
    let norm = dot(&v, &v).sqrt();
    if norm <= 1e-10 * start {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

struct Operator<'a> {
    g: &'a WeightedGraph,
    sqrt_pi: Vec<f64>,
    inv_sqrt: Vec<f64>,
    scratch: Vec<f64>,
    out: Vec<f64>,
}

impl Operator<'_> {
    /// `Pi^{1/2} L Pi^{-1/2} x`.
    fn apply(&mut self, x: &[f64]) -> Vec<f64> {
        for (s, (xi, is)) in self.scratch.iter_mut().zip(x.iter().zip(&self.inv_sqrt)) {
            *s = xi * is;
        }
        apply_unchecked(self.g, &self.scratch, &mut self.out);
        self.out
            .iter()
            .zip(&self.sqrt_pi)
            .map(|(a, s)| a * s)
            .collect()
    }
}

pub(super) fn solve(g: &WeightedGraph, opts: &LambdaOptions) -> Result<SpectralReport> {
    let n = g.n();
    let sqrt_pi: Vec<f64> = g.vertex_weights().iter().map(|p| p.sqrt()).collect();
    let inv_sqrt = sqrt_pi.iter().map(|s| s.recip()).collect();
    let mut null = sqrt_pi.clone();
    let nn = dot(&null, &null).sqrt();
    null.iter_mut().for_each(|x| *x /= nn);
    let mut op = Operator {
        g,
        sqrt_pi,
        inv_sqrt,
        scratch: vec![0.0; n],
        out: vec![0.0; n],
    };

    let dim = opts.subspace.max(4).min(n - 1);
    let keep = (dim / 3).max(1);
    let mut rng = seeded(opts.seed);
    let random = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut next = random(&mut rng);
    let mut matvecs = 0usize;
    let threshold = 0.5 * opts.tolerance;

    loop {
        let mut refills = 0;
        while basis.len() < dim && matvecs < opts.max_iter {
            match orthonormalize(std::mem::take(&mut next), &null, &basis) {
                Some(v) => {
                    let w = op.apply(&v);
                    matvecs += 1;
                    next = w.clone();
                    basis.push(v);
                    images.push(w);
                }
                None => {
                    // Invariant subspace reached; continue from a fresh direction.
                    refills += 1;
                    if refills > 8 {
                        break;
                    }
                    next = random(&mut rng);
                }
            }
        }
        let size = basis.len();
        if size == 0 {
            return Err(Error::invalid(
                "iterative solver could not build a search space",
            ));
        }
        let h = DMatrix::from_fn(size, size, |i, j| {
            0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]))
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let combine = |vecs: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (i, v) in vecs.iter().enumerate() {
                axpy(eig.eigenvectors[(i, col)], v, &mut out);
            }
            out
        };
        let theta = eig.eigenvalues[order[0]];
        let x = combine(&basis, order[0]);
        let ax = combine(&images, order[0]);
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let res = dot(&r, &r).sqrt();

        let done = res <= threshold || size == n - 1;
        if done || matvecs >= opts.max_iter {
            let f = x.iter().zip(&op.inv_sqrt).map(|(a, s)| a * s).collect();
            let report = finish(g, f, SolverKind::Iterative, matvecs, opts.tolerance);
            if done {
                return Ok(report);
            }
            return Err(Error::ConvergenceFailure {
                best: Box::new(report),
            });
        }

        let kept = keep.min(size);
        let new_basis: Vec<Vec<f64>> = order[..kept].iter().map(|&c| combine(&basis, c)).collect();
        let new_images: Vec<Vec<f64>> =
            order[..kept].iter().map(|&c| combine(&images, c)).collect();
        basis = new_basis;
        images = new_images;
        next = r;
    }
}
