//! Seeded randomized suites for the elementary sum inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::inequalities::{
    chebyshev_check, generalized_chebyshev_check, power_mean_check, BoundReport, ExponentPair,
    InequalityError, Tolerance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    PowerMean,
    Chebyshev,
    GeneralizedChebyshev,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::PowerMean, Suite::Chebyshev, Suite::GeneralizedChebyshev];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PowerMean => "power_mean",
            Self::Chebyshev => "chebyshev",
            Self::GeneralizedChebyshev => "generalized_chebyshev",
        }
    }

    fn stream(&self) -> u64 {
        match self {
            Self::PowerMean => 1,
            Self::Chebyshev => 2,
            Self::GeneralizedChebyshev => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_len: usize,
    /// Entries are drawn from `[0, max_entry]`.
    pub max_entry: f64,
    /// Fixed power-mean exponent; drawn from `[1, 5]` when `None`.
    pub gamma: Option<f64>,
    /// Fraction of Chebyshev trials drawn co-monotone, which must be skipped.
    pub comonotone_fraction: f64,
    pub tolerance: Tolerance,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: crate::eigensolver::DEFAULT_SEED,
            max_len: 12,
            max_entry: 10.0,
            gamma: None,
            comonotone_fraction: 0.1,
            tolerance: Tolerance::new(1e-9, 1e-12),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    /// Inputs rejected by a precondition (not counted as violations).
    pub skipped: usize,
    pub violations: usize,
    /// Trials where `lhs == rhs` exactly.
    pub equalities: usize,
    /// Smallest `slack / |rhs|` seen.
    pub worst_relative_slack: f64,
    pub first_violation: Option<BoundReport>,
}

impl SuiteSummary {
    fn new(suite: Suite, trials: usize) -> Self {
        Self {
            suite,
            trials,
            passed: 0,
            skipped: 0,
            violations: 0,
            equalities: 0,
            worst_relative_slack: f64::INFINITY,
            first_violation: None,
        }
    }

    fn record(&mut self, outcome: Result<BoundReport, InequalityError>, tol: Tolerance) {
        let report = match outcome {
            Ok(r) => r.with_tolerance(tol),
            Err(_) => {
                self.skipped += 1;
                return;
            }
        };
        if report.lhs == report.rhs {
            self.equalities += 1;
        }
        self.worst_relative_slack = self.worst_relative_slack.min(report.relative_slack());
        if report.satisfied {
            self.passed += 1;
        } else {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(report);
            }
        }
    }
}

fn sorted(rng: &mut ChaCha8Rng, len: usize, max: f64, ascending: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..=max)).collect();
    v.sort_by(f64::total_cmp);
    if !ascending {
        v.reverse();
    }
    v
}

/// Admissible pair: `β ∈ [0, 4]`, `α` uniform in `[−√(2β), √(2β)]`.
pub fn random_admissible_pair<R: Rng>(rng: &mut R) -> ExponentPair {
    let beta: f64 = rng.random_range(0.0..=4.0);
    let reach = (2.0 * beta).sqrt();
    let alpha = if reach > 0.0 {
        rng.random_range(-reach..=reach)
    } else {
        0.0
    };
    ExponentPair::new(alpha, beta)
}

pub fn run_suite(suite: Suite, opts: &TrialOptions) -> SuiteSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(suite.stream());
    let mut summary = SuiteSummary::new(suite, opts.trials);
    for _ in 0..opts.trials {
        let len = rng.random_range(1..=opts.max_len);
        let outcome = match suite {
            Suite::PowerMean => {
                let gamma = opts
                    .gamma
                    .unwrap_or_else(|| rng.random_range(1.0..=5.0));
                let s: Vec<f64> = (0..len)
                    .map(|_| rng.random_range(0.0..=opts.max_entry))
                    .collect();
                power_mean_check(&s, gamma)
            }
            Suite::Chebyshev => {
                let comonotone = rng.random_bool(opts.comonotone_fraction);
                let a = sorted(&mut rng, len, opts.max_entry, true);
                let b = sorted(&mut rng, len, opts.max_entry, comonotone);
                chebyshev_check(&a, &b)
            }
            Suite::GeneralizedChebyshev => {
                let ep = random_admissible_pair(&mut rng);
                let a = sorted(&mut rng, len, opts.max_entry, false);
                let b = sorted(&mut rng, len, opts.max_entry, true);
                let c = sorted(&mut rng, len, opts.max_entry, true);
                generalized_chebyshev_check(&a, &b, &c, ep)
            }
        };
        summary.record(outcome, opts.tolerance);
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_have_no_violations() {
        let opts = TrialOptions {
            trials: 2000,
            ..TrialOptions::default()
        };
        for suite in Suite::ALL {
            let s = run_suite(suite, &opts);
            assert_eq!(s.violations, 0, "{suite:?}: {:?}", s.first_violation);
            assert_eq!(s.passed + s.skipped, s.trials);
        }
    }

    #[test]
    fn unit_gamma_gives_equalities() {
        let opts = TrialOptions {
            trials: 500,
            gamma: Some(1.0),
            ..TrialOptions::default()
        };
        let s = run_suite(Suite::PowerMean, &opts);
        assert_eq!(s.violations, 0);
        assert_eq!(s.equalities, s.trials);
    }

    #[test]
    fn comonotone_inputs_are_skipped() {
        let opts = TrialOptions {
            trials: 300,
            comonotone_fraction: 1.0,
            max_len: 12,
            ..TrialOptions::default()
        };
        let s = run_suite(Suite::Chebyshev, &opts);
        assert_eq!(s.violations, 0);
        // Length-1 draws are trivially oppositely ordered; most others are not.
        assert!(s.skipped > s.trials / 2);
    }

    #[test]
    fn seeded_runs_repeat() {
        let opts = TrialOptions {
            trials: 200,
            ..TrialOptions::default()
        };
        for suite in Suite::ALL {
            assert_eq!(run_suite(suite, &opts), run_suite(suite, &opts));
        }
    }

    #[test]
    fn sampled_pairs_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            assert!(random_admissible_pair(&mut rng).is_admissible());
        }
    }
}
