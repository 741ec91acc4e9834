use std::sync::OnceLock;

use hypospec::discretization::{assemble_dirichlet_operator, build_grid, AxisBox, OperatorMode};
use hypospec::eigensolver::{rayleigh_quotient, smallest_k_eigenpairs, SolverOptions};
use hypospec::geometry::{DomainSpec, GreinerParams};
use hypospec::inequalities::{
    chebyshev_check, check_yang_second, generalized_chebyshev_check, lambda_next_upper_bound,
    power_mean_check, EigenSequence, SpectrumFamily,
};
use hypospec::sparse::SparseSymMatrix;
use hypospec::trials::random_admissible_pair;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entries() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..12)
}

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..100.0, 2..12).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

/// Small Greiner-ball operator and its lowest eigenvalue, built once.
fn ball_operator() -> &'static (SparseSymMatrix, f64) {
    static CELL: OnceLock<(SparseSymMatrix, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::greiner_ball(1.0).unwrap();
        let bbox = AxisBox::new([-1.5; 3], [1.5; 3]);
        let grid = build_grid(&dom, &gp, [0.25; 3], Some(bbox)).unwrap();
        let a = assemble_dirichlet_operator(&grid, &gp, OperatorMode::Greiner).unwrap();
        let lowest = smallest_k_eigenpairs(&a, 1, &SolverOptions::default()).unwrap().values[0];
        (a, lowest)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_mean_never_fails(s in entries(), gamma in 1.0f64..5.0) {
        let r = power_mean_check(&s, gamma).unwrap();
        prop_assert!(r.satisfied, "{r:?}");
    }

    #[test]
    fn chebyshev_holds_for_opposite_orderings(mut a in entries(), seed in any::<u64>()) {
        a.sort_by(f64::total_cmp);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b: Vec<f64> = a.iter().map(|_| rng.random_range(0.0..10.0)).collect();
        b.sort_by(|x, y| y.total_cmp(x));
        let r = chebyshev_check(&a, &b).unwrap();
        prop_assert!(r.satisfied, "{r:?}");
    }

    #[test]
    fn generalized_chebyshev_holds(mut a in entries(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ep = random_admissible_pair(&mut rng);
        a.sort_by(|x, y| y.total_cmp(x));
        let mut draw = |len: usize| {
            let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..10.0)).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (b, c) = (draw(a.len()), draw(a.len()));
        let r = generalized_chebyshev_check(&a, &b, &c, ep).unwrap();
        prop_assert!(r.satisfied, "{ep:?} {r:?}");
    }

    #[test]
    fn next_bound_is_homogeneous(v in spectrum(), scale in 0.01f64..100.0, n in 1usize..5) {
        let seq = EigenSequence::new(v.clone()).unwrap();
        let scaled = EigenSequence::new(v.iter().map(|x| x * scale).collect()).unwrap();
        let k = v.len() - 1;
        for family in [SpectrumFamily::Dirichlet, SpectrumFamily::Clamped] {
            if let (Ok(b), Ok(bs)) = (
                lambda_next_upper_bound(&seq, k, n, family),
                lambda_next_upper_bound(&scaled, k, n, family),
            ) {
                prop_assert!((bs - scale * b).abs() <= 1e-9 * bs.abs());
            }
        }
    }

    #[test]
    fn next_bound_is_sharper_than_mean_bound(v in spectrum(), n in 1usize..5) {
        let seq = EigenSequence::new(v.clone()).unwrap();
        for k in 1..v.len() {
            if let Ok(root) = lambda_next_upper_bound(&seq, k, n, SpectrumFamily::Dirichlet) {
                let mean_bound = check_yang_second(&seq, k, n).unwrap().rhs;
                prop_assert!(root <= mean_bound * (1.0 + 1e-12), "k = {k}: {root} > {mean_bound}");
                let mean = v[..k].iter().sum::<f64>() / k as f64;
                prop_assert!(root >= mean * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn rayleigh_quotient_bounded_below_by_lowest_eigenvalue(seed in any::<u64>()) {
        let (a, lowest) = ball_operator();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q = rayleigh_quotient(a, &v).unwrap();
        prop_assert!(q >= lowest * (1.0 - 1e-9), "{q} < {lowest}");
    }
}
