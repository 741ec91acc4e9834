//! Python bindings: domains, classification, the discretized operator and
//! its spectrum, the eigenvalue inequalities, couple membership and the
//! randomized inequality trials.

use hypospec::couples::{check_membership_with, MembershipOptions, PowerCouple};
use hypospec::discretization::{
    assemble_dirichlet_operator, assemble_multipliers, assemble_skew_fields, build_grid,
    clamped_proxy, AxisBox, OperatorMode,
};
use hypospec::eigensolver::{
    smallest_k_eigenpairs, squared_pairs, verify_commutator_bound, EigenPairs, Method,
    SolverError, SolverOptions, DEFAULT_SEED,
};
use hypospec::geometry::{classify_domain, DomainSpec, GenericDomain, GreinerParams};
use hypospec::inequalities::{
    check_clamped_bound, check_clamped_chebyshev_form, check_clamped_gap, check_dirichlet_bound,
    check_ppw_gap, check_yang_first, check_yang_second, lambda_next_upper_bound, BoundReport,
    EigenSequence, ExponentPair, SpectrumFamily,
};
use hypospec::sparse::SparseSymMatrix;
use hypospec::trials::{run_suite, Suite, TrialOptions};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn invalid(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solver_err(e: SolverError) -> PyErr {
    match e {
        SolverError::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        other => invalid(other),
    }
}

/// One evaluated inequality row.
#[pyclass(name = "Bound", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyBound {
    inequality: String,
    k: usize,
    n: usize,
    alpha: Option<f64>,
    beta: Option<f64>,
    lhs: f64,
    rhs: f64,
    slack: f64,
    satisfied: bool,
    proxy: bool,
}

impl From<&BoundReport> for PyBound {
    fn from(r: &BoundReport) -> Self {
        Self {
            inequality: r.inequality.as_str().to_string(),
            k: r.k,
            n: r.n,
            alpha: r.exponents.map(|e| e.alpha),
            beta: r.exponents.map(|e| e.beta),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            satisfied: r.satisfied,
            proxy: r.proxy,
        }
    }
}

#[pymethods]
impl PyBound {
    fn __repr__(&self) -> String {
        format!(
            "Bound({}, k={}, lhs={}, rhs={}, satisfied={})",
            self.inequality, self.k, self.lhs, self.rhs, self.satisfied
        )
    }
}

#[pyclass(name = "Classification", frozen, get_all)]
struct PyClassification {
    characteristic: bool,
    /// Characteristic points as `(|z|, t)`.
    points: Vec<(f64, f64)>,
    median_gradient: f64,
}

#[pyclass(name = "Domain", frozen)]
struct PyDomain {
    spec: DomainSpec,
    gp: GreinerParams,
}

fn params(n: usize, sigma: u32) -> PyResult<GreinerParams> {
    GreinerParams::new(n, sigma).map_err(invalid)
}

#[pymethods]
impl PyDomain {
    #[staticmethod]
    #[pyo3(signature = (a=2.0, b=0.0, m=1.0, n=1, sigma=1))]
    fn torus(a: f64, b: f64, m: f64, n: usize, sigma: u32) -> PyResult<Self> {
        Ok(Self {
            spec: DomainSpec::torus(a, b, m).map_err(invalid)?,
            gp: params(n, sigma)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (r=1.0, n=1, sigma=1))]
    fn greiner_ball(r: f64, n: usize, sigma: u32) -> PyResult<Self> {
        Ok(Self {
            spec: DomainSpec::greiner_ball(r).map_err(invalid)?,
            gp: params(n, sigma)?,
        })
    }

    /// Centred open cube of the given half-width.
    #[staticmethod]
    #[pyo3(signature = (half=1.0, n=1, sigma=1))]
    fn cube(half: f64, n: usize, sigma: u32) -> PyResult<Self> {
        if !(half > 0.0 && half.is_finite()) {
            return Err(invalid(format!("half-width must be positive, got {half}")));
        }
        let gp = params(n, sigma)?;
        let spec = DomainSpec::Generic(GenericDomain::open_box(
            vec![0.0; gp.dim()],
            vec![half; gp.dim()],
        ));
        Ok(Self { spec, gp })
    }

    /// Level-set value at `(x, y, t)` for `n = 1`; negative inside.
    fn levelset(&self, x: f64, y: f64, t: f64) -> PyResult<f64> {
        let p = hypospec::geometry::Point::new(vec![x], vec![y], t).map_err(invalid)?;
        Ok(self.spec.levelset(&p, &self.gp))
    }

    #[pyo3(signature = (samples=4000, tol=None))]
    fn classify(&self, samples: usize, tol: Option<f64>) -> PyResult<PyClassification> {
        let rep = classify_domain(&self.spec, &self.gp, samples, tol).map_err(invalid)?;
        Ok(PyClassification {
            characteristic: rep.is_characteristic(),
            points: rep.points().iter().map(|p| (p.rho(), p.t)).collect(),
            median_gradient: rep.median_gradient,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Domain({}, n={}, sigma={})",
            self.spec.describe(),
            self.gp.n(),
            self.gp.sigma()
        )
    }
}

/// Lowest eigenpairs of an `Operator`.
#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    pairs: EigenPairs,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.pairs.values.clone()
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.pairs.residuals.clone()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.pairs.method.as_str()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.pairs.iterations
    }

    fn vector(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.pairs.len() {
            return Err(invalid(format!("index {i} out of range")));
        }
        Ok(self.pairs.vector(i))
    }

    fn __len__(&self) -> usize {
        self.pairs.len()
    }
}

/// Discretized Dirichlet operator on a domain (`n = 1`).
#[pyclass(name = "Operator", frozen)]
struct PyOperator {
    grid: hypospec::discretization::Grid,
    gp: GreinerParams,
    matrix: SparseSymMatrix,
}

fn method_from(name: &str) -> PyResult<Method> {
    match name {
        "auto" => Ok(Method::Auto),
        "dense" => Ok(Method::Dense),
        "lobpcg" => Ok(Method::Lobpcg),
        "lanczos" => Ok(Method::Lanczos),
        other => Err(invalid(format!("unknown method '{other}'"))),
    }
}

#[pymethods]
impl PyOperator {
    /// `bbox` is `(xlo, xhi, ylo, yhi, tlo, thi)`.
    #[new]
    #[pyo3(signature = (domain, h=0.2, bbox=None, mode="greiner"))]
    fn new(
        domain: &PyDomain,
        h: f64,
        bbox: Option<(f64, f64, f64, f64, f64, f64)>,
        mode: &str,
    ) -> PyResult<Self> {
        let mode = match mode {
            "greiner" => OperatorMode::Greiner,
            "euclidean" => OperatorMode::Euclidean,
            other => return Err(invalid(format!("unknown mode '{other}'"))),
        };
        let bbox = bbox.map(|(x0, x1, y0, y1, t0, t1)| AxisBox::new([x0, y0, t0], [x1, y1, t1]));
        let grid = build_grid(&domain.spec, &domain.gp, [h; 3], bbox).map_err(invalid)?;
        let matrix = assemble_dirichlet_operator(&grid, &domain.gp, mode).map_err(invalid)?;
        Ok(Self {
            grid,
            gp: domain.gp,
            matrix,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.grid.len()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.matrix.as_csr().nnz()
    }

    #[pyo3(signature = (k, seed=None, tol=1e-8, method="auto"))]
    fn solve(
        &self,
        py: Python<'_>,
        k: usize,
        seed: Option<u64>,
        tol: f64,
        method: &str,
    ) -> PyResult<PySpectrum> {
        let opts = SolverOptions {
            tol,
            seed: seed.unwrap_or(DEFAULT_SEED),
            method: method_from(method)?,
            ..SolverOptions::default()
        };
        let pairs = py
            .detach(|| smallest_k_eigenpairs(&self.matrix, k, &opts))
            .map_err(solver_err)?;
        Ok(PySpectrum { pairs })
    }

    /// Commutator rows for `k = 1..=kmax` on the operator, or on its square
    /// when `proxy` is set. Degenerate gaps are skipped.
    #[pyo3(signature = (spectrum, couples=vec![(2.0, 2.0), (1.0, 1.0), (1.5, 1.5)], kmax=8, proxy=false))]
    fn commutator_bounds(
        &self,
        py: Python<'_>,
        spectrum: &PySpectrum,
        couples: Vec<(f64, f64)>,
        kmax: usize,
        proxy: bool,
    ) -> PyResult<Vec<PyBound>> {
        if kmax + 1 > spectrum.pairs.len() {
            return Err(invalid(format!(
                "kmax = {kmax} needs {} eigenpairs, spectrum has {}",
                kmax + 1,
                spectrum.pairs.len()
            )));
        }
        py.detach(|| {
            let squared;
            let (op, pairs) = if proxy {
                let a2 = clamped_proxy(&self.matrix).map_err(invalid)?;
                squared = (squared_pairs(&spectrum.pairs, &a2), a2);
                (&squared.1, &squared.0)
            } else {
                (&self.matrix, &spectrum.pairs)
            };
            let bs = assemble_multipliers(&self.grid);
            let ts = assemble_skew_fields(&self.grid, &self.gp).map_err(invalid)?;
            let mut rows = Vec::new();
            for &(alpha, beta) in &couples {
                for k in 1..=kmax {
                    let pc = PowerCouple::new(alpha, beta, pairs.values[k]).map_err(invalid)?;
                    let membership =
                        check_membership_with(&pc, 200, MembershipOptions::default())
                            .map_err(invalid)?;
                    match verify_commutator_bound(op, &ts, &bs, pairs, k, &pc, &membership) {
                        Ok(r) => rows.push(PyBound::from(&if proxy { r.as_proxy() } else { r })),
                        Err(SolverError::DegenerateGap { .. }) => {}
                        Err(e) => return Err(solver_err(e)),
                    }
                }
            }
            Ok(rows)
        })
    }
}

/// Evaluates a named inequality on a nondecreasing eigenvalue sequence.
#[pyfunction]
#[pyo3(signature = (name, values, k, n=1, alpha=None, beta=None))]
fn check(
    name: &str,
    values: Vec<f64>,
    k: usize,
    n: usize,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> PyResult<PyBound> {
    let seq = EigenSequence::new(values).map_err(invalid)?;
    let pair = || match (alpha, beta) {
        (Some(a), Some(b)) => Ok(ExponentPair::new(a, b)),
        _ => Err(invalid(format!("'{name}' needs alpha and beta"))),
    };
    let quadratic = ExponentPair::new(2.0, 2.0);
    let report = match name {
        "yang_first" => check_yang_first(&seq, k, n),
        "ppw_gap" => check_ppw_gap(&seq, k, n),
        "yang_second" => check_yang_second(&seq, k, n),
        "dirichlet_general" => check_dirichlet_bound(&seq, k, n, pair()?),
        "clamped_yang_first" => check_clamped_bound(&seq, k, n, quadratic),
        "clamped_general" => check_clamped_bound(&seq, k, n, pair()?),
        "clamped_chebyshev_quadratic" => check_clamped_chebyshev_form(&seq, k, n, quadratic),
        "clamped_chebyshev" => check_clamped_chebyshev_form(&seq, k, n, pair()?),
        "clamped_gap" => check_clamped_gap(&seq, k, n),
        other => return Err(invalid(format!("unknown inequality '{other}'"))),
    }
    .map_err(invalid)?;
    Ok(PyBound::from(&report))
}

/// Larger root of the quadratic gap inequality in `λ_{k+1}`.
#[pyfunction]
#[pyo3(signature = (values, k, n=1, family="dirichlet"))]
fn next_eigenvalue_bound(values: Vec<f64>, k: usize, n: usize, family: &str) -> PyResult<f64> {
    let family = match family {
        "dirichlet" => SpectrumFamily::Dirichlet,
        "clamped" => SpectrumFamily::Clamped,
        other => return Err(invalid(format!("unknown family '{other}'"))),
    };
    let seq = EigenSequence::new(values).map_err(invalid)?;
    lambda_next_upper_bound(&seq, k, n, family).map_err(invalid)
}

#[pyclass(name = "Membership", frozen, get_all)]
struct PyMembership {
    verdict: &'static str,
    accepted: bool,
    /// Largest scaled residual on the grid; `None` when the necessary
    /// condition rejected first.
    worst_residual: Option<f64>,
}

#[pyfunction]
#[pyo3(signature = (alpha, beta, lam=1.0, grid=200, gate=true))]
fn check_couple(alpha: f64, beta: f64, lam: f64, grid: usize, gate: bool) -> PyResult<PyMembership> {
    let pc = PowerCouple::new(alpha, beta, lam).map_err(invalid)?;
    let opts = MembershipOptions {
        gate,
        ..MembershipOptions::default()
    };
    let rep = check_membership_with(&pc, grid, opts).map_err(invalid)?;
    Ok(PyMembership {
        verdict: rep.label(),
        accepted: rep.accepted(),
        worst_residual: rep.worst.map(|w| w.residual),
    })
}

#[pyclass(name = "TrialSummary", frozen, get_all)]
struct PyTrialSummary {
    suite: &'static str,
    trials: usize,
    passed: usize,
    skipped: usize,
    violations: usize,
    worst_relative_slack: f64,
}

#[pyfunction]
#[pyo3(signature = (suite, trials=10_000, seed=None))]
fn run_trials(py: Python<'_>, suite: &str, trials: usize, seed: Option<u64>) -> PyResult<PyTrialSummary> {
    let suite = Suite::ALL
        .into_iter()
        .find(|s| s.as_str() == suite.replace('-', "_"))
        .ok_or_else(|| invalid(format!("unknown suite '{suite}'")))?;
    let opts = TrialOptions {
        trials,
        seed: seed.unwrap_or(DEFAULT_SEED),
        ..TrialOptions::default()
    };
    let s = py.detach(|| run_suite(suite, &opts));
    Ok(PyTrialSummary {
        suite: s.suite.as_str(),
        trials: s.trials,
        passed: s.passed,
        skipped: s.skipped,
        violations: s.violations,
        worst_relative_slack: s.worst_relative_slack,
    })
}

#[pymodule(name = "hypospec")]
fn hypospec_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PyClassification>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyBound>()?;
    m.add_class::<PyMembership>()?;
    m.add_class::<PyTrialSummary>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(next_eigenvalue_bound, m)?)?;
    m.add_function(wrap_pyfunction!(check_couple, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
