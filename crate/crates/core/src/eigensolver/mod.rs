//! Smallest eigenpairs of sparse symmetric matrices, and the finite
//! dimensional commutator bound evaluated on them.

mod block;
mod dense;
mod lanczos;
mod lobpcg;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::couples::{MembershipReport, PowerCouple};
use crate::inequalities::{
    BoundReport, EigenSequence, InequalityError, InequalityId, Tolerance,
};
use crate::sparse::{dot, CsrMatrix, SparseSymMatrix};

pub use block::estimate_norm;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Matrices at or below this order go straight to the dense solver under
/// [`Method::Auto`].
pub const DENSE_CUTOFF: usize = 400;

/// Relative slack allowed on the commutator bound.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("need 1 <= k < N, got k = {k} with N = {n}")]
    InvalidK { k: usize, n: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("no convergence after {iterations} iterations (worst residual {worst:e})")]
    NoConvergence {
        iterations: usize,
        worst: f64,
        best: Box<EigenPairs>,
    },
    #[error("eigenvalue gap vanishes at k = {k} (lambda = {value})")]
    DegenerateGap { k: usize, value: f64 },
    #[error("couple membership not verified: {0}")]
    MembershipNotVerified(String),
    #[error("operator lists disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense for small matrices, LOBPCG otherwise.
    #[default]
    Auto,
    Dense,
    Lobpcg,
    Lanczos,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Auto => "auto",
            Self::Dense => "dense",
            Self::Lobpcg => "lobpcg",
            Self::Lanczos => "lanczos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target for `‖Av − λv‖ / ‖A‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub method: Method,
    /// Extra block columns beyond `k`.
    pub guard: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            seed: DEFAULT_SEED,
            method: Method::Auto,
            guard: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `N × k`, one eigenvector per column.
    pub vectors: DMatrix<f64>,
    /// `‖Av − λv‖ / ‖A‖_est` per pair.
    pub residuals: Vec<f64>,
    pub norm_estimate: f64,
    /// The method that produced the pairs (never `Auto`).
    pub method: Method,
    pub iterations: usize,
    pub seed: u64,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sequence(&self) -> Result<EigenSequence, InequalityError> {
        EigenSequence::new(self.values.clone())
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

pub fn rayleigh_quotient(a: &SparseSymMatrix, v: &[f64]) -> Result<f64, SolverError> {
    let vv = dot(v, v);
    if vv == 0.0 {
        return Err(SolverError::ZeroVector);
    }
    Ok(dot(v, &a.mul_vec(v)) / vv)
}

/// The `k` smallest eigenpairs of `a`.
///
/// LOBPCG runs with a Jacobi preconditioner and `k + guard` block columns; if
/// the worst residual improves by less than 1% over 50 iterations the
/// current block seeds a restarted Lanczos run.
pub fn smallest_k_eigenpairs(
    a: &SparseSymMatrix,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenPairs, SolverError> {
    let n = a.dim();
    if k == 0 || k >= n {
        return Err(SolverError::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let norm_a = estimate_norm(a, &mut rng);
    let method = match opts.method {
        Method::Auto if n <= DENSE_CUTOFF => Method::Dense,
        Method::Auto => Method::Lobpcg,
        m => m,
    };
    if method == Method::Dense {
        let (values, vectors) = dense::smallest(a, k);
        return Ok(finish(a, values, vectors, norm_a, method, 0, opts.seed));
    }

    let m = (k + opts.guard).min(n);
    let start: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let outcome = match method {
        Method::Lobpcg => {
            let first = lobpcg::run(a, start, k, opts.tol, opts.max_iter, norm_a);
            if first.stagnated {
                let budget = opts.max_iter.saturating_sub(first.iterations);
                let mut second =
                    lanczos::run(a, first.block, k, opts.tol, budget, norm_a, &mut rng);
                second.iterations += first.iterations;
                second.method = Method::Lanczos;
                second
            } else {
                first
            }
        }
        _ => lanczos::run(a, start, k, opts.tol, opts.max_iter, norm_a, &mut rng),
    };

    let mut vectors = DMatrix::zeros(n, k);
    for (j, col) in outcome.block.iter().take(k).enumerate() {
        vectors.set_column(j, &nalgebra::DVector::from_column_slice(col));
    }
    let values = outcome.values[..k].to_vec();
    let pairs = finish(
        a,
        values,
        vectors,
        norm_a,
        outcome.method,
        outcome.iterations,
        opts.seed,
    );
    let worst = pairs.max_residual();
    if worst > opts.tol {
        return Err(SolverError::NoConvergence {
            iterations: pairs.iterations,
            worst,
            best: Box::new(pairs),
        });
    }
    Ok(pairs)
}

fn finish(
    a: &SparseSymMatrix,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    norm_a: f64,
    method: Method,
    iterations: usize,
    seed: u64,
) -> EigenPairs {
    let residuals = (0..values.len())
        .map(|j| {
            let v: Vec<f64> = vectors.column(j).iter().copied().collect();
            block::residual_norm(a, &v, values[j]) / norm_a
        })
        .collect();
    EigenPairs {
        values,
        vectors,
        residuals,
        norm_estimate: norm_a,
        method,
        iterations,
        seed,
    }
}

/// Eigenpairs of `A²` from those of a positive semidefinite `A`: the same
/// vectors with squared values, residuals recomputed against `a_sq`.
pub fn squared_pairs(pairs: &EigenPairs, a_sq: &SparseSymMatrix) -> EigenPairs {
    let values: Vec<f64> = pairs.values.iter().map(|v| v * v).collect();
    finish(
        a_sq,
        values,
        pairs.vectors.clone(),
        pairs.norm_estimate * pairs.norm_estimate,
        pairs.method,
        pairs.iterations,
        pairs.seed,
    )
}

/// Evaluates `(Σ f(λ_i)⟨[T_p,B_p]u_i,u_i⟩)² ≤ 4 (Σ g(λ_i)⟨[A,B_p]u_i,B_pu_i⟩)
/// (Σ f(λ_i)²/(g(λ_i)(λ_{k+1}−λ_i)) ‖T_pu_i‖²)` over `i ≤ k` and all `p`.
///
/// `membership` must be a grid-verified report for `pc`, with `pc.lambda`
/// equal to `λ_{k+1}`.
pub fn verify_commutator_bound(
    a: &SparseSymMatrix,
    ts: &[CsrMatrix],
    bs: &[SparseSymMatrix],
    pairs: &EigenPairs,
    k: usize,
    pc: &PowerCouple,
    membership: &MembershipReport,
) -> Result<BoundReport, SolverError> {
    if ts.len() != bs.len() {
        return Err(SolverError::Mismatch(format!(
            "{} skew fields vs {} multipliers",
            ts.len(),
            bs.len()
        )));
    }
    if k == 0 || pairs.len() < k + 1 {
        return Err(InequalityError::InsufficientLength {
            needed: k + 1,
            got: pairs.len(),
        }
        .into());
    }
    let lam = &pairs.values;
    let ceiling = lam[k];
    if ceiling == lam[k - 1] {
        return Err(SolverError::DegenerateGap { k, value: ceiling });
    }
    if !membership.accepted() {
        return Err(SolverError::MembershipNotVerified(format!(
            "couple ({}, {}) was {}",
            pc.alpha,
            pc.beta,
            membership.label()
        )));
    }
    if membership.couple != *pc || pc.lambda != ceiling {
        return Err(SolverError::MembershipNotVerified(format!(
            "report covers ({}, {}) at lambda = {}, needed ({}, {}) at lambda = {ceiling}",
            membership.couple.alpha,
            membership.couple.beta,
            membership.couple.lambda,
            pc.alpha,
            pc.beta
        )));
    }

    let mut skew_sum = 0.0;
    let mut comm_sum = 0.0;
    let mut weight_sum = 0.0;
    for (i, &l) in lam.iter().enumerate().take(k) {
        let u = pairs.vector(i);
        let (f, g) = (pc.f(l), pc.g(l));
        let au = a.mul_vec(&u);
        for (t, b) in ts.iter().zip(bs) {
            let bu = b.mul_vec(&u);
            let tu = t.mul_vec(&u);
            let tbu = t.mul_vec(&bu);
            let btu = b.mul_vec(&tu);
            let abu = a.mul_vec(&bu);
            let bau = b.mul_vec(&au);
            let tb_u: f64 = (0..u.len()).map(|r| (tbu[r] - btu[r]) * u[r]).sum();
            let ab_bu: f64 = (0..u.len()).map(|r| (abu[r] - bau[r]) * bu[r]).sum();
            skew_sum += f * tb_u;
            comm_sum += g * ab_bu;
            weight_sum += f * f / (g * (ceiling - lam[i])) * dot(&tu, &tu);
        }
    }
    let lhs = skew_sum * skew_sum;
    let rhs = 4.0 * comm_sum * weight_sum;
    Ok(BoundReport::evaluate(
        InequalityId::CommutatorBound,
        k,
        ts.len() / 2,
        Some(pc.exponents()),
        lhs,
        rhs,
        Tolerance::new(COMMUTATOR_TOLERANCE, 1e-14),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couples::check_membership;
    use crate::discretization::lattice_laplacian_eigenvalue;
    use approx::assert_relative_eq;

    fn laplacian_1d(n: usize, h: f64) -> SparseSymMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 / (h * h)));
            if i + 1 < n {
                t.push((i, i + 1, -1.0 / (h * h)));
                t.push((i + 1, i, -1.0 / (h * h)));
            }
        }
        SparseSymMatrix::new(CsrMatrix::from_triplets(n, n, &t).unwrap()).unwrap()
    }

    /// 5-point Laplacian on an `m × m` interior grid.
    fn laplacian_2d(m: usize, h: f64) -> SparseSymMatrix {
        let id = |i: usize, j: usize| i * m + j;
        let w = 1.0 / (h * h);
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((id(i, j), id(i, j), 4.0 * w));
                if i + 1 < m {
                    t.push((id(i, j), id(i + 1, j), -w));
                    t.push((id(i + 1, j), id(i, j), -w));
                }
                if j + 1 < m {
                    t.push((id(i, j), id(i, j + 1), -w));
                    t.push((id(i, j + 1), id(i, j), -w));
                }
            }
        }
        SparseSymMatrix::new(CsrMatrix::from_triplets(m * m, m * m, &t).unwrap()).unwrap()
    }

    fn grid_spectrum(m: usize, h: f64, count: usize) -> Vec<f64> {
        let mut all = Vec::new();
        for i in 1..=m {
            for j in 1..=m {
                all.push(lattice_laplacian_eigenvalue(m, h, i) + lattice_laplacian_eigenvalue(m, h, j));
            }
        }
        all.sort_by(f64::total_cmp);
        all.truncate(count);
        all
    }

    fn diag(d: &[f64]) -> SparseSymMatrix {
        SparseSymMatrix::new(CsrMatrix::from_diagonal(d)).unwrap()
    }

    fn with_method(method: Method) -> SolverOptions {
        SolverOptions {
            method,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn diagonal_and_identity() {
        let p = smallest_k_eigenpairs(&diag(&[1., 2., 3., 4., 5.]), 2, &SolverOptions::default())
            .unwrap();
        assert_eq!(p.values.len(), 2);
        assert_relative_eq!(p.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.values[1], 2.0, epsilon = 1e-14);
        assert!(p.max_residual() < 1e-14);

        let p = smallest_k_eigenpairs(&diag(&[1.0; 6]), 3, &SolverOptions::default()).unwrap();
        for v in &p.values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-14);
        }
        assert!(p.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn one_dimensional_laplacian_closed_form() {
        let h = 1.0 / 11.0;
        let a = laplacian_1d(10, h);
        for method in [Method::Dense, Method::Lobpcg, Method::Lanczos] {
            let p = smallest_k_eigenpairs(&a, 4, &with_method(method)).unwrap();
            for (j, v) in p.values.iter().enumerate() {
                let exact = lattice_laplacian_eigenvalue(10, h, j + 1);
                assert_relative_eq!(*v, exact, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn iterative_methods_on_a_grid() {
        let (m, h) = (40, 1.0 / 41.0);
        let a = laplacian_2d(m, h);
        let exact = grid_spectrum(m, h, 6);
        for method in [Method::Lobpcg, Method::Lanczos] {
            let p = smallest_k_eigenpairs(&a, 6, &with_method(method)).unwrap();
            for (v, e) in p.values.iter().zip(&exact) {
                assert_relative_eq!(*v, *e, max_relative = 1e-10);
            }
            assert!(p.orthonormality_defect() < 1e-8);
            assert!(p.max_residual() <= 1e-8);
        }
    }

    #[test]
    fn invalid_k() {
        let a = diag(&[1., 2., 3.]);
        assert!(matches!(
            smallest_k_eigenpairs(&a, 3, &SolverOptions::default()),
            Err(SolverError::InvalidK { k: 3, n: 3 })
        ));
        assert!(matches!(
            smallest_k_eigenpairs(&a, 0, &SolverOptions::default()),
            Err(SolverError::InvalidK { .. })
        ));
    }

    #[test]
    fn no_convergence_returns_best_iterates() {
        let a = laplacian_2d(30, 1.0);
        let opts = SolverOptions {
            max_iter: 3,
            ..with_method(Method::Lobpcg)
        };
        match smallest_k_eigenpairs(&a, 2, &opts) {
            Err(SolverError::NoConvergence { best, .. }) => {
                assert_eq!(best.values.len(), 2);
                assert!(best.values[0] > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn rayleigh_quotient_examples() {
        let a = diag(&[1., 3., 7.]);
        assert_eq!(rayleigh_quotient(&a, &[0., 1., 0.]).unwrap(), 3.0);
        assert_eq!(rayleigh_quotient(&a, &[1., 1., 0.]).unwrap(), 2.0);
        let q = rayleigh_quotient(&a, &[0.3, -2.0, 0.5]).unwrap();
        assert!((1.0..=7.0).contains(&q));
        assert!(matches!(
            rayleigh_quotient(&a, &[0., 0., 0.]),
            Err(SolverError::ZeroVector)
        ));
    }

    #[test]
    fn shift_invariance() {
        let a = laplacian_2d(25, 0.1);
        let p = smallest_k_eigenpairs(&a, 4, &SolverOptions::default()).unwrap();
        let q = smallest_k_eigenpairs(&a.shifted(10.0), 4, &SolverOptions::default()).unwrap();
        for (x, y) in p.values.iter().zip(&q.values) {
            assert_relative_eq!(x + 10.0, *y, max_relative = 1e-9);
        }
    }

    #[test]
    fn variational_lower_bound() {
        let a = laplacian_2d(25, 0.1);
        let p = smallest_k_eigenpairs(&a, 1, &SolverOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v: Vec<f64> = (0..625).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(p.values[0] <= rayleigh_quotient(&a, &v).unwrap() + 1e-8);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = laplacian_2d(30, 0.1);
        let p = smallest_k_eigenpairs(&a, 3, &SolverOptions::default()).unwrap();
        let q = smallest_k_eigenpairs(&a, 3, &SolverOptions::default()).unwrap();
        assert_eq!(p.values, q.values);
        assert_eq!(p.vectors, q.vectors);
    }

    #[test]
    fn squared_pairs_match_squared_matrix() {
        let a = laplacian_1d(10, 1.0 / 11.0);
        let a2 = SparseSymMatrix::new(a.matmul(&a).unwrap()).unwrap();
        let p = smallest_k_eigenpairs(&a, 3, &SolverOptions::default()).unwrap();
        let sq = squared_pairs(&p, &a2);
        let direct = smallest_k_eigenpairs(&a2, 3, &SolverOptions::default()).unwrap();
        for (x, y) in sq.values.iter().zip(&direct.values) {
            assert_relative_eq!(*x, *y, max_relative = 1e-10);
        }
        assert!(sq.max_residual() < 1e-12);
    }

    fn two_by_two() -> (SparseSymMatrix, CsrMatrix, SparseSymMatrix, EigenPairs) {
        let a = SparseSymMatrix::new(CsrMatrix::from_dense(&[vec![1., 0.], vec![0., 2.]])).unwrap();
        let t = CsrMatrix::from_dense(&[vec![0., 1.], vec![-1., 0.]]);
        let b = SparseSymMatrix::new(CsrMatrix::from_dense(&[vec![0., 1.], vec![1., 0.]])).unwrap();
        let pairs = EigenPairs {
            values: vec![1.0, 2.0],
            vectors: DMatrix::identity(2, 2),
            residuals: vec![0.0, 0.0],
            norm_estimate: 2.0,
            method: Method::Dense,
            iterations: 0,
            seed: 0,
        };
        (a, t, b, pairs)
    }

    #[test]
    fn commutator_bound_two_by_two() {
        let (a, t, b, pairs) = two_by_two();
        let pc = PowerCouple::new(2.0, 2.0, 2.0).unwrap();
        let m = check_membership(&pc, 101).unwrap();
        let r = verify_commutator_bound(&a, &[t], &[b], &pairs, 1, &pc, &m).unwrap();
        // ⟨[T,B]e1,e1⟩ = 2, ⟨[A,B]e1,Be1⟩ = 1, ‖Te1‖² = 1, gap 1.
        assert_eq!(r.lhs, 4.0);
        assert_eq!(r.rhs, 4.0);
        assert!(r.satisfied);
        assert_eq!(r.inequality, InequalityId::CommutatorBound);
    }

    #[test]
    fn commutator_bound_zero_skew() {
        let (a, _, b, pairs) = two_by_two();
        let pc = PowerCouple::new(2.0, 2.0, 2.0).unwrap();
        let m = check_membership(&pc, 101).unwrap();
        let zero = CsrMatrix::from_triplets(2, 2, &[]).unwrap();
        let r = verify_commutator_bound(&a, &[zero], &[b], &pairs, 1, &pc, &m).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn commutator_bound_preconditions() {
        let (a, t, b, mut pairs) = two_by_two();
        let pc = PowerCouple::new(2.0, 2.0, 2.0).unwrap();
        let m = check_membership(&pc, 101).unwrap();

        let bad = PowerCouple::new(2.0, 1.0, 2.0).unwrap();
        let rejected = check_membership(&bad, 101).unwrap();
        assert!(matches!(
            verify_commutator_bound(&a, std::slice::from_ref(&t), std::slice::from_ref(&b), &pairs, 1, &bad, &rejected),
            Err(SolverError::MembershipNotVerified(_))
        ));

        let elsewhere = check_membership(&PowerCouple::new(2.0, 2.0, 3.0).unwrap(), 101).unwrap();
        assert!(matches!(
            verify_commutator_bound(&a, std::slice::from_ref(&t), std::slice::from_ref(&b), &pairs, 1, &pc, &elsewhere),
            Err(SolverError::MembershipNotVerified(_))
        ));

        pairs.values = vec![2.0, 2.0];
        assert!(matches!(
            verify_commutator_bound(&a, &[t], &[b], &pairs, 1, &pc, &m),
            Err(SolverError::DegenerateGap { k: 1, .. })
        ));
    }
}
