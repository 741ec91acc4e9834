//! Universal eigenvalue inequalities for Dirichlet spectra of `-Δ_L` and its
//! square, together with the elementary sum inequalities they rest on.
//!
//! Every check is report-only: a sequence that violates an inequality yields a
//! [`BoundReport`] with `satisfied == false`, never an error. Errors are
//! reserved for inputs on which the expressions are undefined.
//!
//! Indexing follows the usual spectral convention: `k` is 1-based and the
//! "next" eigenvalue `λ_{k+1}` is `values[k]` in 0-based storage.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InequalityError {
    #[error("eigenvalue sequence is empty")]
    EmptySequence,
    #[error("eigenvalue sequence must start strictly positive, got {0}")]
    NonPositive(f64),
    #[error("eigenvalue sequence is not nondecreasing at index {index}")]
    NotNondecreasing { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("index k must be at least 1")]
    ZeroIndex,
    #[error("need at least {needed} values, got {got}")]
    InsufficientLength { needed: usize, got: usize },
    #[error("zero gap λ_(k+1) = λ_k with non-positive exponent {exponent}")]
    ZeroGapWithNonpositiveExponent { exponent: f64 },
    #[error("exponent pair (alpha={alpha}, beta={beta}) violates beta >= 0 and alpha^2 <= 2 beta")]
    AdmissibilityViolation { alpha: f64, beta: f64 },
    #[error("dimension parameter n must be positive")]
    ZeroDimension,
    #[error("negative discriminant {0}: no real root for the next-eigenvalue bound")]
    NegativeDiscriminant(f64),
    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("power-mean exponent gamma = {0} is below one")]
    GammaBelowOne(f64),
    #[error("input lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("anti-monotone pairing fails for indices ({0}, {1})")]
    HypothesisViolation(usize, usize),
    #[error("monotonicity requirement fails for list {list} at index {index}")]
    MonotonicityViolation { list: &'static str, index: usize },
    #[error("zero base raised to negative exponent {exponent} at index {index}")]
    ZeroBaseNegativeExponent { index: usize, exponent: f64 },
}

pub type Result<T> = std::result::Result<T, InequalityError>;

/// Ordered list `0 < λ_1 ≤ λ_2 ≤ …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EigenSequence(Vec<f64>);

impl EigenSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(InequalityError::EmptySequence);
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(InequalityError::NonFinite { index });
            }
        }
        if values[0] <= 0.0 {
            return Err(InequalityError::NonPositive(values[0]));
        }
        if let Some(index) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(InequalityError::NotNondecreasing { index: index + 1 });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `λ_i` with 1-based `i`.
    pub fn lambda(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    /// Every value shifted by `c`; fails if the result is no longer positive.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v + c).collect())
    }

    /// Element-wise square, the spectrum of the squared operator.
    pub fn squared(&self) -> Self {
        Self(self.0.iter().map(|v| v * v).collect())
    }

    fn require(&self, k: usize, extra: usize) -> Result<()> {
        if k == 0 {
            return Err(InequalityError::ZeroIndex);
        }
        if self.0.len() < k + extra {
            return Err(InequalityError::InsufficientLength {
                needed: k + extra,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for EigenSequence {
    type Error = InequalityError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<EigenSequence> for Vec<f64> {
    fn from(seq: EigenSequence) -> Self {
        seq.0
    }
}

/// Exponents `(α, β)` of the power couple `((λ−x)^α, (λ−x)^β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub alpha: f64,
    pub beta: f64,
}

impl ExponentPair {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn is_admissible(&self) -> bool {
        self.beta >= 0.0 && self.alpha * self.alpha <= 2.0 * self.beta
    }

    pub fn check_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(InequalityError::AdmissibilityViolation {
                alpha: self.alpha,
                beta: self.beta,
            })
        }
    }

    /// The exponent `2α − β − 1` of the weight paired with `λ_i`.
    pub fn mixed_exponent(&self) -> f64 {
        2.0 * self.alpha - self.beta - 1.0
    }

    pub fn is_quadratic(&self) -> bool {
        self.alpha == 2.0 && self.beta == 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// General Dirichlet bound with exponent pair.
    DirichletGeneral,
    YangFirst,
    PpwGap,
    YangSecond,
    /// General bound for the squared operator.
    ClampedGeneral,
    /// `ClampedGeneral` at `(α, β) = (2, 2)`.
    ClampedYangFirst,
    /// Squared-operator bound after the generalized Chebyshev step.
    ClampedChebyshev,
    /// `ClampedChebyshev` at `(α, β) = (2, 2)`.
    ClampedChebyshevQuadratic,
    ClampedGap,
    /// Abstract commutator bound for a self-adjoint operator with skew and
    /// symmetric families.
    CommutatorBound,
    GeneralizedChebyshev,
    PowerMean,
    Chebyshev,
}

impl InequalityId {
    pub const ALL: [InequalityId; 13] = [
        Self::DirichletGeneral,
        Self::YangFirst,
        Self::PpwGap,
        Self::YangSecond,
        Self::ClampedGeneral,
        Self::ClampedYangFirst,
        Self::ClampedChebyshev,
        Self::ClampedChebyshevQuadratic,
        Self::ClampedGap,
        Self::CommutatorBound,
        Self::GeneralizedChebyshev,
        Self::PowerMean,
        Self::Chebyshev,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DirichletGeneral => "dirichlet_general",
            Self::YangFirst => "yang_first",
            Self::PpwGap => "ppw_gap",
            Self::YangSecond => "yang_second",
            Self::ClampedGeneral => "clamped_general",
            Self::ClampedYangFirst => "clamped_yang_first",
            Self::ClampedChebyshev => "clamped_chebyshev",
            Self::ClampedChebyshevQuadratic => "clamped_chebyshev_quadratic",
            Self::ClampedGap => "clamped_gap",
            Self::CommutatorBound => "commutator_bound",
            Self::GeneralizedChebyshev => "generalized_chebyshev",
            Self::PowerMean => "power_mean",
            Self::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            ..Self::default()
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-12,
            abs: 1e-14,
        }
    }
}

/// One evaluation of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: InequalityId,
    pub k: usize,
    pub n: usize,
    pub exponents: Option<ExponentPair>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub tolerance: Tolerance,
    pub proxy: bool,
}

impl BoundReport {
    pub fn evaluate(
        inequality: InequalityId,
        k: usize,
        n: usize,
        exponents: Option<ExponentPair>,
        lhs: f64,
        rhs: f64,
        tolerance: Tolerance,
    ) -> Self {
        let slack = rhs - lhs;
        Self {
            inequality,
            k,
            n,
            exponents,
            lhs,
            rhs,
            slack,
            satisfied: verdict(slack, rhs, tolerance),
            tolerance,
            proxy: false,
        }
    }

    /// Re-judges the report under a different tolerance.
    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self.satisfied = verdict(self.slack, self.rhs, tolerance);
        self
    }

    pub fn as_proxy(mut self) -> Self {
        self.proxy = true;
        self
    }

    /// `slack / |rhs|`, or the raw slack when `rhs` vanishes.
    pub fn relative_slack(&self) -> f64 {
        if self.rhs == 0.0 {
            self.slack
        } else {
            self.slack / self.rhs.abs()
        }
    }
}

fn verdict(slack: f64, rhs: f64, tol: Tolerance) -> bool {
    slack >= -tol.abs - tol.rel * rhs.abs()
}

/// `base^exponent` with `0^e = 0` for `e > 0` and `0^0 = 1`.
///
/// Returns `None` for a zero base with a negative exponent.
pub(crate) fn power(base: f64, exponent: f64) -> Option<f64> {
    if base == 0.0 {
        return if exponent > 0.0 {
            Some(0.0)
        } else if exponent == 0.0 {
            Some(1.0)
        } else {
            None
        };
    }
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        Some(base.powi(exponent as i32))
    } else {
        Some(base.powf(exponent))
    }
}

/// `[(λ_{k+1} − λ_i)^e for i = 1..=k]`.
pub fn gap_powers(seq: &EigenSequence, k: usize, exponent: f64) -> Result<Vec<f64>> {
    seq.require(k, 1)?;
    let v = seq.values();
    let next = v[k];
    if exponent <= 0.0 && next <= v[k - 1] {
        return Err(InequalityError::ZeroGapWithNonpositiveExponent { exponent });
    }
    v[..k]
        .iter()
        .map(|&l| {
            power(next - l, exponent)
                .ok_or(InequalityError::ZeroGapWithNonpositiveExponent { exponent })
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(InequalityError::ZeroDimension)
    } else {
        Ok(n as f64)
    }
}

/// Gap sums shared by the exponent-pair bounds: `(Σ g^α, g^β, g^(2α−β−1))`.
fn exponent_pair_terms(
    seq: &EigenSequence,
    k: usize,
    ep: ExponentPair,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    ep.check_admissible()?;
    let lhs = gap_powers(seq, k, ep.alpha)?.iter().sum();
    let g_beta = gap_powers(seq, k, ep.beta)?;
    let g_mixed = gap_powers(seq, k, ep.mixed_exponent())?;
    Ok((lhs, g_beta, g_mixed))
}

/// `Σ (λ_{k+1}−λ_i)^α ≤ √(2/n) · (Σ (λ_{k+1}−λ_i)^β · Σ (λ_{k+1}−λ_i)^(2α−β−1) λ_i)^(1/2)`.
pub fn check_dirichlet_bound(
    seq: &EigenSequence,
    k: usize,
    n: usize,
    ep: ExponentPair,
) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let (lhs, g_beta, g_mixed) = exponent_pair_terms(seq, k, ep)?;
    let lam = &seq.values()[..k];
    let rhs = (2.0 / nf).sqrt() * (g_beta.iter().sum::<f64>() * dot(&g_mixed, lam)).sqrt();
    Ok(BoundReport::evaluate(
        InequalityId::DirichletGeneral,
        k,
        n,
        Some(ep),
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// `Σ (λ_{k+1}−λ_i)² ≤ (2/n) Σ (λ_{k+1}−λ_i) λ_i`.
pub fn check_yang_first(seq: &EigenSequence, k: usize, n: usize) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let g1 = gap_powers(seq, k, 1.0)?;
    let lhs = g1.iter().map(|g| g * g).sum();
    let rhs = 2.0 / nf * dot(&g1, &seq.values()[..k]);
    Ok(BoundReport::evaluate(
        InequalityId::YangFirst,
        k,
        n,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// `λ_{k+1} − λ_k ≤ (2/(n k)) Σ λ_i`.
pub fn check_ppw_gap(seq: &EigenSequence, k: usize, n: usize) -> Result<BoundReport> {
    let nf = check_n(n)?;
    seq.require(k, 1)?;
    let v = seq.values();
    let lhs = v[k] - v[k - 1];
    let rhs = 2.0 / (nf * k as f64) * v[..k].iter().sum::<f64>();
    Ok(BoundReport::evaluate(
        InequalityId::PpwGap,
        k,
        n,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// `λ_{k+1} ≤ (1 + 2/n) (1/k) Σ λ_i`.
pub fn check_yang_second(seq: &EigenSequence, k: usize, n: usize) -> Result<BoundReport> {
    let nf = check_n(n)?;
    seq.require(k, 1)?;
    let v = seq.values();
    let lhs = v[k];
    let rhs = (1.0 + 2.0 / nf) * v[..k].iter().sum::<f64>() / k as f64;
    Ok(BoundReport::evaluate(
        InequalityId::YangSecond,
        k,
        n,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

fn clamped_factor(n: f64) -> f64 {
    2.0 * (n + 1.0).sqrt() / n
}

/// Squared-operator bound:
/// `Σ g^α ≤ (2√(n+1)/n) [Σ g^β λ_i^½]^½ [Σ g^(2α−β−1) λ_i^½]^½` with `g = λ_{k+1} − λ_i`.
pub fn check_clamped_bound(
    seq: &EigenSequence,
    k: usize,
    n: usize,
    ep: ExponentPair,
) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let (lhs, g_beta, g_mixed) = exponent_pair_terms(seq, k, ep)?;
    let roots: Vec<f64> = seq.values()[..k].iter().map(|l| l.sqrt()).collect();
    let rhs = clamped_factor(nf) * dot(&g_beta, &roots).sqrt() * dot(&g_mixed, &roots).sqrt();
    let id = if ep.is_quadratic() {
        InequalityId::ClampedYangFirst
    } else {
        InequalityId::ClampedGeneral
    };
    Ok(BoundReport::evaluate(
        id,
        k,
        n,
        Some(ep),
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// Squared-operator bound after the generalized Chebyshev step:
/// `Σ g^α ≤ (2√(n+1)/n) [Σ g^β]^½ [Σ g^(2α−β−1) λ_i]^½`.
pub fn check_clamped_chebyshev_form(
    seq: &EigenSequence,
    k: usize,
    n: usize,
    ep: ExponentPair,
) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let (lhs, g_beta, g_mixed) = exponent_pair_terms(seq, k, ep)?;
    let lam = &seq.values()[..k];
    let rhs = clamped_factor(nf) * g_beta.iter().sum::<f64>().sqrt() * dot(&g_mixed, lam).sqrt();
    let id = if ep.is_quadratic() {
        InequalityId::ClampedChebyshevQuadratic
    } else {
        InequalityId::ClampedChebyshev
    };
    Ok(BoundReport::evaluate(
        id,
        k,
        n,
        Some(ep),
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// `λ_{k+1} − λ_k ≤ (4(n+1)/(n² k²)) (Σ λ_i^½)²`.
pub fn check_clamped_gap(seq: &EigenSequence, k: usize, n: usize) -> Result<BoundReport> {
    let nf = check_n(n)?;
    seq.require(k, 1)?;
    let v = seq.values();
    let lhs = v[k] - v[k - 1];
    let root_sum: f64 = v[..k].iter().map(|l| l.sqrt()).sum();
    let kf = k as f64;
    let rhs = 4.0 * (nf + 1.0) / (nf * nf * kf * kf) * root_sum * root_sum;
    Ok(BoundReport::evaluate(
        InequalityId::ClampedGap,
        k,
        n,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumFamily {
    Dirichlet,
    Clamped,
}

impl SpectrumFamily {
    /// Constant `c` in `Σ(Λ−λ_i)² ≤ c Σ(Λ−λ_i)λ_i`.
    pub fn quadratic_constant(&self, n: f64) -> f64 {
        match self {
            Self::Dirichlet => 2.0 / n,
            Self::Clamped => 4.0 * (n + 1.0) / (n * n),
        }
    }
}

/// Largest `Λ` compatible with the quadratic gap inequality given `λ_1..λ_k`.
///
/// With `S1 = Σλ_i`, `S2 = Σλ_i²`, the inequality reads
/// `F(Λ) = kΛ² − (2+c) S1 Λ + (1+c) S2 ≤ 0`; the larger root of `F` is returned.
pub fn lambda_next_upper_bound(
    seq: &EigenSequence,
    k: usize,
    n: usize,
    family: SpectrumFamily,
) -> Result<f64> {
    let nf = check_n(n)?;
    seq.require(k, 0)?;
    let c = family.quadratic_constant(nf);
    let lam = &seq.values()[..k];
    let s1: f64 = lam.iter().sum();
    let s2: f64 = lam.iter().map(|l| l * l).sum();
    let qa = k as f64;
    let qb = -(2.0 + c) * s1;
    let qc = (1.0 + c) * s2;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(InequalityError::NegativeDiscriminant(disc));
    }
    // qb < 0, so -qb + sqrt(disc) has no cancellation.
    Ok((-qb + disc.sqrt()) / (2.0 * qa))
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(InequalityError::NonFinite { index });
        }
        if value < 0.0 {
            return Err(InequalityError::NegativeEntry { index, value });
        }
    }
    Ok(())
}

/// `(Σ s_i)^γ ≤ k^(γ−1) Σ s_i^γ` for `γ ≥ 1`, `s_i ≥ 0`.
pub fn power_mean_check(s: &[f64], gamma: f64) -> Result<BoundReport> {
    if s.is_empty() {
        return Err(InequalityError::EmptySequence);
    }
    if gamma.is_nan() || gamma < 1.0 {
        return Err(InequalityError::GammaBelowOne(gamma));
    }
    check_nonnegative(s)?;
    let k = s.len();
    let lhs = power(s.iter().sum(), gamma).unwrap_or(0.0);
    let rhs = power(k as f64, gamma - 1.0).unwrap_or(1.0)
        * s.iter().map(|&v| power(v, gamma).unwrap_or(0.0)).sum::<f64>();
    Ok(BoundReport::evaluate(
        InequalityId::PowerMean,
        k,
        0,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

/// Chebyshev's sum inequality for oppositely ordered sequences:
/// `Σ a_i b_i ≤ (1/n)(Σ a_i)(Σ b_i)`.
///
/// The hypothesis `(a_k − a_j)(b_k − b_j) ≤ 0` is scanned over all pairs.
pub fn chebyshev_check(a: &[f64], b: &[f64]) -> Result<BoundReport> {
    if a.len() != b.len() {
        return Err(InequalityError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(InequalityError::EmptySequence);
    }
    check_nonnegative(a)?;
    check_nonnegative(b)?;
    let len = a.len();
    for j in 0..len {
        for i in (j + 1)..len {
            if (a[i] - a[j]) * (b[i] - b[j]) > 0.0 {
                return Err(InequalityError::HypothesisViolation(j, i));
            }
        }
    }
    let lhs = dot(a, b);
    let rhs = a.iter().sum::<f64>() * b.iter().sum::<f64>() / len as f64;
    Ok(BoundReport::evaluate(
        InequalityId::Chebyshev,
        len,
        0,
        None,
        lhs,
        rhs,
        Tolerance::default(),
    ))
}

fn check_monotone(values: &[f64], list: &'static str, increasing: bool) -> Result<()> {
    check_nonnegative(values)?;
    let bad = values.windows(2).position(|w| {
        if increasing {
            w[0] > w[1]
        } else {
            w[0] < w[1]
        }
    });
    match bad {
        Some(i) => Err(InequalityError::MonotonicityViolation { list, index: i + 1 }),
        None => Ok(()),
    }
}

/// Generalized Chebyshev inequality for `A` nonincreasing and `B`, `C`
/// nondecreasing (all nonnegative), with admissible `(α, β)`:
///
/// `Σ A^β B · Σ A^(2α−β−1) C ≤ Σ A^β · Σ A^(2α−β−1) B C`.
pub fn generalized_chebyshev_check(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    ep: ExponentPair,
) -> Result<BoundReport> {
    if a.len() != b.len() {
        return Err(InequalityError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() != c.len() {
        return Err(InequalityError::LengthMismatch(a.len(), c.len()));
    }
    if a.is_empty() {
        return Err(InequalityError::EmptySequence);
    }
    ep.check_admissible()?;
    check_monotone(a, "A", false)?;
    check_monotone(b, "B", true)?;
    check_monotone(c, "C", true)?;

    let mixed = ep.mixed_exponent();
    let mut a_beta = Vec::with_capacity(a.len());
    let mut a_mixed = Vec::with_capacity(a.len());
    for (index, &ai) in a.iter().enumerate() {
        a_beta.push(
            power(ai, ep.beta).ok_or(InequalityError::ZeroBaseNegativeExponent {
                index,
                exponent: ep.beta,
            })?,
        );
        a_mixed.push(
            power(ai, mixed).ok_or(InequalityError::ZeroBaseNegativeExponent {
                index,
                exponent: mixed,
            })?,
        );
    }
    let bc: Vec<f64> = b.iter().zip(c).map(|(x, y)| x * y).collect();
    let lhs = dot(&a_beta, b) * dot(&a_mixed, c);
    let rhs = a_beta.iter().sum::<f64>() * dot(&a_mixed, &bc);
    Ok(BoundReport::evaluate(
        InequalityId::GeneralizedChebyshev,
        a.len(),
        0,
        Some(ep),
        lhs,
        rhs,
        Tolerance::default(),
    ))
}
