//! Membership of power couples `f(x) = (λ−x)^α`, `g(x) = (λ−x)^β` in the
//! class of function couples that feed the abstract commutator bound.
//!
//! A couple belongs to the class when `f, g > 0` on `(0, λ)` and
//!
//! ```text
//! ((f(x)−f(y))/(x−y))² + (f(x)²/(g(x)(λ−x)) + f(y)²/(g(y)(λ−y))) · (g(x)−g(y))/(x−y) ≤ 0
//! ```
//!
//! for all `x ≠ y` in `(0, λ)`. Membership is certified numerically on a grid;
//! the diagonal `x = y` is covered by the limit form
//! `(f'/f)² + 2 g'/((λ−x) g) = (α² − 2β)/(λ−x)²`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inequalities::ExponentPair;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoupleError {
    #[error("spectral ceiling lambda must be positive and finite, got {0}")]
    InvalidCeiling(f64),
    #[error("point {0} lies outside the open interval (0, lambda)")]
    DomainViolation(f64),
    #[error("residual requires distinct points, got x = y = {0}")]
    CoincidentPoints(f64),
    #[error("grid needs at least 10 points, got {0}")]
    GridTooSmall(usize),
}

/// Grid-edge offset and diagonal exclusion, both as fractions of `λ`.
pub const EDGE_FRACTION: f64 = 1e-3;
pub const DIAGONAL_FRACTION: f64 = 1e-3;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCouple {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl PowerCouple {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self, CoupleError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(CoupleError::InvalidCeiling(lambda));
        }
        Ok(Self {
            alpha,
            beta,
            lambda,
        })
    }

    pub fn from_pair(ep: ExponentPair, lambda: f64) -> Result<Self, CoupleError> {
        Self::new(ep.alpha, ep.beta, lambda)
    }

    pub fn exponents(&self) -> ExponentPair {
        ExponentPair::new(self.alpha, self.beta)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.lambda - x).powf(self.alpha)
    }

    pub fn g(&self, x: f64) -> f64 {
        (self.lambda - x).powf(self.beta)
    }

    /// `lim_{y→x}` of the residual divided by `f(x)²`: `(α² − 2β)/(λ−x)²`.
    /// Same sign as the raw limit, which is `(α² − 2β)(λ−x)^(2α−2)`.
    pub fn diagonal_limit(&self, x: f64) -> f64 {
        let d = self.lambda - x;
        (self.alpha * self.alpha - 2.0 * self.beta) / (d * d)
    }

    fn check_point(&self, x: f64) -> Result<(), CoupleError> {
        if x > 0.0 && x < self.lambda {
            Ok(())
        } else {
            Err(CoupleError::DomainViolation(x))
        }
    }
}

/// Residual of the defining condition for arbitrary callbacks `f`, `g`.
pub fn condition_residual_with<F, G>(f: F, g: G, lambda: f64, x: f64, y: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (fx, fy, gx, gy) = (f(x), f(y), g(x), g(y));
    let df = (fx - fy) / (x - y);
    let dg = (gx - gy) / (x - y);
    let weight = fx * fx / (gx * (lambda - x)) + fy * fy / (gy * (lambda - y));
    df * df + weight * dg
}

/// The residual divided by the sum of its two terms' magnitudes, in
/// `[−1, 1]`; zero when both terms vanish.
fn scaled_residual(pc: &PowerCouple, x: f64, y: f64) -> f64 {
    let (fx, fy, gx, gy) = (pc.f(x), pc.f(y), pc.g(x), pc.g(y));
    let df = (fx - fy) / (x - y);
    let dg = (gx - gy) / (x - y);
    let weight = fx * fx / (gx * (pc.lambda - x)) + fy * fy / (gy * (pc.lambda - y));
    let (first, second) = (df * df, weight * dg);
    let scale = first.abs() + second.abs();
    if scale == 0.0 {
        0.0
    } else {
        (first + second) / scale
    }
}

/// Diagonal limit on the same scale as [`scaled_residual`].
fn scaled_diagonal(pc: &PowerCouple) -> f64 {
    let a2 = pc.alpha * pc.alpha;
    let scale = a2 + 2.0 * pc.beta.abs();
    if scale == 0.0 {
        0.0
    } else {
        (a2 - 2.0 * pc.beta) / scale
    }
}

pub fn couple_condition_residual(pc: &PowerCouple, x: f64, y: f64) -> Result<f64, CoupleError> {
    pc.check_point(x)?;
    pc.check_point(y)?;
    if x == y {
        return Err(CoupleError::CoincidentPoints(x));
    }
    Ok(condition_residual_with(
        |s| pc.f(s),
        |s| pc.g(s),
        pc.lambda,
        x,
        y,
    ))
}

/// Necessary condition for membership: `g` nonincreasing and `α² ≤ 2β`.
pub fn necessary_condition(alpha: f64, beta: f64) -> bool {
    ExponentPair::new(alpha, beta).is_admissible()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Every grid residual is below tolerance. A numerical certificate only.
    GridVerified,
    RejectedByNecessaryCondition,
    RejectedByGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridWorst {
    pub residual: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub couple: PowerCouple,
    pub verdict: Membership,
    pub grid_points: usize,
    pub tolerance: f64,
    /// `None` when the necessary-condition gate rejected before any grid work.
    pub worst: Option<GridWorst>,
}

impl MembershipReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Membership::GridVerified
    }

    pub fn label(&self) -> &'static str {
        match self.verdict {
            Membership::GridVerified => "grid-verified",
            Membership::RejectedByNecessaryCondition => "rejected (necessary condition)",
            Membership::RejectedByGrid => "rejected (grid)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipOptions {
    /// Reject immediately when `necessary_condition` fails.
    pub gate: bool,
    pub tolerance: f64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            gate: true,
            tolerance: RESIDUAL_TOLERANCE,
        }
    }
}

/// Uniform grid `ε + i (λ − 2ε)/(N − 1)` on `(0, λ)`.
pub fn membership_grid(lambda: f64, grid_points: usize) -> Vec<f64> {
    let eps = lambda * EDGE_FRACTION;
    let step = (lambda - 2.0 * eps) / (grid_points - 1) as f64;
    (0..grid_points).map(|i| eps + i as f64 * step).collect()
}

pub fn check_membership(
    pc: &PowerCouple,
    grid_points: usize,
) -> Result<MembershipReport, CoupleError> {
    check_membership_with(pc, grid_points, MembershipOptions::default())
}

/// Grid test of the couple condition. Residuals are compared after dividing
/// by the magnitude of their two terms, so the verdict does not depend on the
/// scale of `λ`.
pub fn check_membership_with(
    pc: &PowerCouple,
    grid_points: usize,
    opts: MembershipOptions,
) -> Result<MembershipReport, CoupleError> {
    if grid_points < 10 {
        return Err(CoupleError::GridTooSmall(grid_points));
    }
    if opts.gate && !necessary_condition(pc.alpha, pc.beta) {
        return Ok(MembershipReport {
            couple: *pc,
            verdict: Membership::RejectedByNecessaryCondition,
            grid_points,
            tolerance: opts.tolerance,
            worst: None,
        });
    }

    let grid = membership_grid(pc.lambda, grid_points);
    let band = pc.lambda * DIAGONAL_FRACTION;
    let mut worst = GridWorst {
        residual: f64::NEG_INFINITY,
        x: grid[0],
        y: grid[0],
    };
    let mut consider = |residual: f64, x: f64, y: f64| {
        // NaN residuals count as failures.
        if residual > worst.residual || residual.is_nan() && !worst.residual.is_nan() {
            worst = GridWorst { residual, x, y };
        }
    };
    let diagonal = scaled_diagonal(pc);
    for (i, &x) in grid.iter().enumerate() {
        consider(diagonal, x, x);
        for &y in &grid[i + 1..] {
            if (x - y).abs() < band {
                continue;
            }
            consider(scaled_residual(pc, x, y), x, y);
        }
    }

    let verdict = if worst.residual <= opts.tolerance {
        Membership::GridVerified
    } else {
        Membership::RejectedByGrid
    };
    Ok(MembershipReport {
        couple: *pc,
        verdict,
        grid_points,
        tolerance: opts.tolerance,
        worst: Some(worst),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_couple_has_zero_residual() {
        let pc = PowerCouple::new(0.0, 0.0, 3.0).unwrap();
        for &(x, y) in &[(0.1, 2.0), (1.5, 0.7), (2.9, 0.01)] {
            assert_eq!(couple_condition_residual(&pc, x, y).unwrap(), 0.0);
        }
    }

    #[test]
    fn quadratic_couple_is_nonpositive() {
        let pc = PowerCouple::new(2.0, 2.0, 1.0).unwrap();
        let r = couple_condition_residual(&pc, 0.2, 0.8).unwrap();
        // Both terms are ±(a+b)² with a = 0.8, b = 0.2.
        assert!(r <= 1e-14, "{r}");
        assert!(r.abs() < 1e-14);
    }

    #[test]
    fn residual_approaches_diagonal_limit() {
        let pc = PowerCouple::new(2.0, 1.0, 1.0).unwrap();
        let x = 0.3;
        let limit = pc.diagonal_limit(x);
        assert_relative_eq!(limit, 2.0 / (0.7 * 0.7), max_relative = 1e-15);
        let near = couple_condition_residual(&pc, x, x + 1e-6).unwrap();
        assert_relative_eq!(near / pc.f(x).powi(2), limit, max_relative = 1e-4);
        assert!(near > 0.0);
    }

    #[test]
    fn residual_errors() {
        let pc = PowerCouple::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            couple_condition_residual(&pc, 0.0, 0.5),
            Err(CoupleError::DomainViolation(0.0))
        );
        assert_eq!(
            couple_condition_residual(&pc, 0.5, 1.0),
            Err(CoupleError::DomainViolation(1.0))
        );
        assert_eq!(
            couple_condition_residual(&pc, 0.5, 0.5),
            Err(CoupleError::CoincidentPoints(0.5))
        );
        assert!(PowerCouple::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn necessary_condition_examples() {
        assert!(necessary_condition(2.0, 2.0));
        assert!(!necessary_condition(2.0, 1.0));
        assert!(necessary_condition(0.0, 0.0));
        assert!(!necessary_condition(0.0, -1.0));
    }

    #[test]
    fn verdict_is_scale_free() {
        for lambda in [1e-3, 1.0, 33.0, 1e4] {
            for &(a, b) in &[(2.0, 2.0), (1.0, 1.0), (1.5, 1.5), (0.0, 0.0)] {
                let rep = check_membership(&PowerCouple::new(a, b, lambda).unwrap(), 200).unwrap();
                assert!(rep.accepted(), "({a},{b}) at {lambda}: {:?}", rep.worst);
            }
        }
    }

    #[test]
    fn membership_examples() {
        for &(a, b) in &[(2.0, 2.0), (1.0, 1.0)] {
            let rep = check_membership(&PowerCouple::new(a, b, 1.0).unwrap(), 200).unwrap();
            assert!(rep.accepted(), "({a},{b}) {:?}", rep.worst);
            assert!(rep.worst.unwrap().residual <= 1e-10);
            assert_eq!(rep.label(), "grid-verified");
        }
        let rep = check_membership(&PowerCouple::new(2.0, 1.0, 1.0).unwrap(), 200).unwrap();
        assert_eq!(rep.verdict, Membership::RejectedByNecessaryCondition);
        assert!(rep.worst.is_none());
        assert_eq!(
            check_membership(&PowerCouple::new(1.0, 1.0, 1.0).unwrap(), 9),
            Err(CoupleError::GridTooSmall(9))
        );
    }

    #[test]
    fn ungated_grid_rejects_inadmissible_couple() {
        let pc = PowerCouple::new(2.0, 1.0, 1.0).unwrap();
        let opts = MembershipOptions {
            gate: false,
            ..Default::default()
        };
        let rep = check_membership_with(&pc, 200, opts).unwrap();
        assert_eq!(rep.verdict, Membership::RejectedByGrid);
        assert!(rep.worst.unwrap().residual > 0.0);
    }

    #[test]
    fn constant_g_requires_constant_f() {
        let opts = MembershipOptions {
            gate: false,
            ..Default::default()
        };
        let rep = check_membership_with(&PowerCouple::new(0.0, 0.0, 2.0).unwrap(), 50, opts)
            .unwrap();
        assert!(rep.accepted());
        for &alpha in &[0.5, -0.5, 1.0] {
            let pc = PowerCouple::new(alpha, 0.0, 2.0).unwrap();
            let rep = check_membership_with(&pc, 50, opts).unwrap();
            assert!(!rep.accepted(), "alpha = {alpha}");
            let r = couple_condition_residual(&pc, 0.4, 1.1).unwrap();
            let df = (pc.f(0.4) - pc.f(1.1)) / (0.4 - 1.1);
            assert_eq!(r, df * df);
        }
    }
}
