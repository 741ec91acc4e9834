use rand::Rng;

use super::block::{
    apply, combine, extend_orthonormal, rayleigh_ritz, relative_residuals, residual_block, Block,
    Outcome,
};
use super::Method;
use crate::sparse::SparseSymMatrix;

/// Restarted Lanczos with full reorthogonalization.
///
/// Each cycle grows `span{X, r, Ar, A²r, …}` from the current Ritz block `X`
/// and the sum `r` of its unconverged residuals, then restarts on the `m`
/// lowest Ritz vectors.
pub(super) fn run<R: Rng>(
    a: &SparseSymMatrix,
    start: Block,
    k: usize,
    tol: f64,
    max_iter: usize,
    norm_a: f64,
    rng: &mut R,
) -> Outcome {
    let n = a.dim();
    let m = start.len();
    let max_basis = (3 * m).max(2 * m + 30).min(n);

    let mut v: Block = Vec::with_capacity(max_basis);
    extend_orthonormal(&mut v, start);
    let mut av = apply(a, &v);
    let mut iterations = 0;
    loop {
        // Krylov growth from the most recent direction.
        while v.len() < max_basis && iterations < max_iter {
            let next = av.last().cloned().unwrap_or_else(|| random(n, rng));
            if extend_orthonormal(&mut v, vec![next]) == 0
                && extend_orthonormal(&mut v, vec![random(n, rng)]) == 0
            {
                break;
            }
            av.push(a.mul_vec(v.last().expect("just pushed")));
            iterations += 1;
        }

        let (vals, c) = rayleigh_ritz(&v, &av);
        let width = m.min(v.len());
        let x = combine(&v, &c, 0, width);
        let ax = combine(&av, &c, 0, width);
        let values = vals[..width].to_vec();
        let r = residual_block(&x, &ax, &values);
        let res = relative_residuals(&r, norm_a);
        let worst = res.iter().take(k).fold(0.0f64, |w, x| w.max(*x));
        if worst <= tol || iterations >= max_iter || v.len() == n {
            return Outcome {
                block: x,
                values,
                iterations,
                stagnated: false,
                method: Method::Lanczos,
            };
        }

        let mut restart = vec![0.0; n];
        for (col, rr) in r.iter().zip(&res) {
            if *rr > tol {
                let scale = 1.0 / (rr * norm_a);
                restart.iter_mut().zip(col).for_each(|(s, x)| *s += scale * x);
            }
        }
        v = Vec::with_capacity(max_basis);
        extend_orthonormal(&mut v, x);
        av = apply(a, &v);
        if extend_orthonormal(&mut v, vec![restart]) == 1 {
            av.push(a.mul_vec(v.last().expect("just pushed")));
            iterations += 1;
        }
    }
}

fn random<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}
