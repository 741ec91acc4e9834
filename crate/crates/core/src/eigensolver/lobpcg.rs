use super::block::{
    apply, combine, extend_orthonormal, rayleigh_ritz, relative_residuals, residual_block, Block,
    Outcome,
};
use super::Method;
use crate::sparse::SparseSymMatrix;

const STAGNATION_WINDOW: usize = 50;
const STAGNATION_RATIO: f64 = 0.99;

/// Block LOBPCG over the span of `[X, W, P]`, rebuilt orthonormally each
/// step. Converged columns stop contributing preconditioned residuals.
pub(super) fn run(
    a: &SparseSymMatrix,
    start: Block,
    k: usize,
    tol: f64,
    max_iter: usize,
    norm_a: f64,
) -> Outcome {
    let m = start.len();
    let precond: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|d| if d.abs() > 0.0 { 1.0 / d.abs() } else { 1.0 })
        .collect();

    let mut basis = Vec::with_capacity(m);
    extend_orthonormal(&mut basis, start);
    let abasis = apply(a, &basis);
    let (mut values, coef) = rayleigh_ritz(&basis, &abasis);
    let width = basis.len();
    let mut x = combine(&basis, &coef, 0, width);
    let mut ax = combine(&abasis, &coef, 0, width);
    values.truncate(width);
    let mut p: Block = Vec::new();
    let mut history: Vec<f64> = Vec::new();

    let mut iterations = 0;
    let mut stagnated = false;
    loop {
        let r = residual_block(&x, &ax, &values);
        let res = relative_residuals(&r, norm_a);
        let worst = res.iter().take(k).fold(0.0f64, |w, v| w.max(*v));
        if worst <= tol || iterations >= max_iter {
            break;
        }
        history.push(worst);
        if history.len() > STAGNATION_WINDOW
            && worst > STAGNATION_RATIO * history[history.len() - 1 - STAGNATION_WINDOW]
        {
            stagnated = true;
            break;
        }
        iterations += 1;

        let w: Block = r
            .iter()
            .zip(&res)
            .filter(|(_, rr)| **rr > tol)
            .map(|(col, _)| col.iter().zip(&precond).map(|(v, d)| v * d).collect())
            .collect();

        let mut s: Block = Vec::with_capacity(3 * m);
        let kept = extend_orthonormal(&mut s, x.clone());
        extend_orthonormal(&mut s, w);
        extend_orthonormal(&mut s, std::mem::take(&mut p));
        let as_ = apply(a, &s);
        let (vals, c) = rayleigh_ritz(&s, &as_);
        let width = m.min(s.len());
        x = combine(&s, &c, 0, width);
        ax = combine(&as_, &c, 0, width);
        values = vals[..width].to_vec();
        if s.len() > kept {
            p = combine(&s[kept..], &c, kept, width);
        }
    }

    Outcome {
        block: x,
        values,
        iterations,
        stagnated,
        method: Method::Lobpcg,
    }
}
