//! Column-block helpers shared by the iterative solvers.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use super::Method;
use crate::sparse::{dot, norm, SparseSymMatrix};

pub(super) type Block = Vec<Vec<f64>>;

pub(super) struct Outcome {
    /// Ritz vectors, ascending by Ritz value.
    pub block: Block,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub stagnated: bool,
    pub method: Method,
}

/// Relative size below which a vector is treated as linearly dependent.
const DROP: f64 = 1e-10;

pub(super) fn apply(a: &SparseSymMatrix, cols: &[Vec<f64>]) -> Block {
    cols.par_iter().map(|c| a.mul_vec(c)).collect()
}

/// `out_j = Σ_i coef[(offset + i, j)] cols[i]` for `j < width`.
pub(super) fn combine(cols: &[Vec<f64>], coef: &DMatrix<f64>, offset: usize, width: usize) -> Block {
    let len = cols.first().map_or(0, Vec::len);
    (0..width)
        .into_par_iter()
        .map(|j| {
            let mut out = vec![0.0; len];
            for (i, c) in cols.iter().enumerate() {
                let w = coef[(offset + i, j)];
                if w != 0.0 {
                    for (o, x) in out.iter_mut().zip(c) {
                        *o += w * x;
                    }
                }
            }
            out
        })
        .collect()
}

/// Appends the candidates to an orthonormal `basis` by modified Gram–Schmidt
/// with one reorthogonalization pass, skipping dependent ones. Returns how
/// many were added.
pub(super) fn extend_orthonormal(basis: &mut Block, candidates: Block) -> usize {
    let mut added = 0;
    for mut c in candidates {
        let start = norm(&c);
        if start == 0.0 || !start.is_finite() {
            continue;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = dot(b, &c);
                for (x, y) in c.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let end = norm(&c);
        if end <= DROP * start {
            continue;
        }
        c.iter_mut().for_each(|x| *x /= end);
        basis.push(c);
        added += 1;
    }
    added
}

/// Eigen-decomposition of `VᵀAV`, ascending.
pub(super) fn rayleigh_ritz(v: &[Vec<f64>], av: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let s = v.len();
    let entries: Vec<f64> = (0..s * s)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / s, idx % s);
            if i > j {
                return 0.0;
            }
            0.5 * (dot(&v[i], &av[j]) + dot(&v[j], &av[i]))
        })
        .collect();
    let h = DMatrix::from_fn(s, s, |i, j| {
        if i <= j {
            entries[i * s + j]
        } else {
            entries[j * s + i]
        }
    });
    sorted_eigen(h)
}

pub(super) fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub(super) fn residual_block(x: &[Vec<f64>], ax: &[Vec<f64>], values: &[f64]) -> Block {
    x.iter()
        .zip(ax)
        .zip(values)
        .map(|((xv, av), lam)| av.iter().zip(xv).map(|(a, b)| a - lam * b).collect())
        .collect()
}

pub(super) fn residual_norm(a: &SparseSymMatrix, v: &[f64], lambda: f64) -> f64 {
    let av = a.mul_vec(v);
    let r: Vec<f64> = av.iter().zip(v).map(|(x, y)| x - lambda * y).collect();
    norm(&r)
}

/// `‖A‖₂` from 20 power iterations on a random start. Returns 1 for the zero
/// matrix so relative residuals stay finite.
pub fn estimate_norm<R: Rng>(a: &SparseSymMatrix, rng: &mut R) -> f64 {
    let mut v: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut est = 0.0;
    for _ in 0..20 {
        let nv = norm(&v);
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let av = a.mul_vec(&v);
        est = norm(&av);
        v = av;
    }
    if est > 0.0 {
        est
    } else {
        1.0
    }
}

/// Column norms divided by `norm_a`.
pub(super) fn relative_residuals(r: &[Vec<f64>], norm_a: f64) -> Vec<f64> {
    r.iter().map(|c| norm(c) / norm_a).collect()
}
