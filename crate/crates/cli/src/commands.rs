use hypospec::couples::{check_membership, check_membership_with, MembershipOptions, PowerCouple};
use hypospec::discretization::{
    assemble_dirichlet_operator, assemble_multipliers, assemble_skew_fields, build_grid,
    clamped_proxy, AxisBox, Grid, OperatorMode,
};
use hypospec::eigensolver::{
    smallest_k_eigenpairs, squared_pairs, verify_commutator_bound, EigenPairs, Method,
    SolverError, SolverOptions, COMMUTATOR_TOLERANCE,
};
use hypospec::geometry::{classify_domain, DomainSpec, GenericDomain, GreinerParams};
use hypospec::inequalities::{
    check_clamped_bound, check_clamped_chebyshev_form, check_clamped_gap, check_dirichlet_bound,
    check_ppw_gap, check_yang_first, check_yang_second, BoundReport, EigenSequence, ExponentPair,
    InequalityError, Tolerance,
};
use hypospec::sparse::SparseSymMatrix;
use hypospec::trials::{run_suite, Suite, TrialOptions};
use serde::Serialize;

use crate::config::Settings;
use crate::output::{self, BoundRow, Meta, SpectrumRow, Tolerances};
use crate::{exit, ClassifyArgs, CliError, CoupleArgs, DomainArgs, GridArgs, LemmaArgs, SolveArgs, VerifyArgs};

pub const DEFAULT_H: f64 = 0.2;
pub const DEFAULT_K: usize = 9;
pub const DEFAULT_KMAX: usize = 8;
pub const DEFAULT_SAMPLES: usize = 4000;
pub const DEFAULT_GRID: usize = 200;
pub const DIRICHLET_TOLERANCE: f64 = 0.02;
pub const CLAMPED_TOLERANCE: f64 = 0.05;
pub const DEFAULT_COUPLES: [(f64, f64); 3] = [(2.0, 2.0), (1.0, 1.0), (1.5, 1.5)];

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NoConvergence { .. } => CliError::Solver(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<InequalityError> for CliError {
    fn from(e: InequalityError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub fn domain_from(s: &Settings, d: &DomainArgs) -> Result<(DomainSpec, GreinerParams), CliError> {
    let n = s.value_or("n", d.n, 1)?;
    let sigma = s.value_or("sigma", d.sigma, 1)?;
    let gp = GreinerParams::new(n, sigma).map_err(invalid)?;
    let kind = s.value_or("domain", d.domain.clone(), "torus".to_string())?;
    let dom = match kind.as_str() {
        "torus" => DomainSpec::torus(
            s.value_or("a", d.a, 2.0)?,
            s.value_or("b", d.b, 0.0)?,
            s.value_or("m", d.m, 1.0)?,
        )
        .map_err(invalid)?,
        "greiner-ball" | "ball" => {
            DomainSpec::greiner_ball(s.value_or("r", d.r, 1.0)?).map_err(invalid)?
        }
        "box" => {
            let half = s.value_or("half", d.half, 1.0)?;
            if !(half > 0.0 && half.is_finite()) {
                return Err(invalid(format!("box half-width must be positive, got {half}")));
            }
            DomainSpec::Generic(GenericDomain::open_box(
                vec![0.0; gp.dim()],
                vec![half; gp.dim()],
            ))
        }
        other => return Err(invalid(format!("unknown domain '{other}'"))),
    };
    Ok((dom, gp))
}

/// Assembled operator together with the data the commutator check needs.
pub struct System {
    pub grid: Grid,
    pub gp: GreinerParams,
    pub domain: DomainSpec,
    pub mode: OperatorMode,
    pub spacing: [f64; 3],
    pub operator: SparseSymMatrix,
}

impl System {
    pub fn build(
        domain: DomainSpec,
        gp: GreinerParams,
        spacing: [f64; 3],
        bbox: Option<AxisBox>,
        mode: OperatorMode,
    ) -> Result<Self, CliError> {
        let grid = build_grid(&domain, &gp, spacing, bbox).map_err(invalid)?;
        let operator = assemble_dirichlet_operator(&grid, &gp, mode).map_err(invalid)?;
        Ok(Self {
            grid,
            gp,
            domain,
            mode,
            spacing,
            operator,
        })
    }

    /// Commutator rows for `k = 1..=kmax` on the operator (`proxy = false`)
    /// or its square. Degenerate gaps are reported on stderr and skipped.
    pub fn commutator_rows(
        &self,
        pairs: &EigenPairs,
        couples: &[(f64, f64)],
        kmax: usize,
        proxy: bool,
    ) -> Result<Vec<BoundReport>, CliError> {
        let squared;
        let (op, pairs) = if proxy {
            let a2 = clamped_proxy(&self.operator).map_err(invalid)?;
            squared = (squared_pairs(pairs, &a2), a2);
            (&squared.1, &squared.0)
        } else {
            (&self.operator, pairs)
        };
        let bs = assemble_multipliers(&self.grid);
        let ts = assemble_skew_fields(&self.grid, &self.gp).map_err(invalid)?;
        let mut rows = Vec::new();
        for &(alpha, beta) in couples {
            for k in 1..=kmax {
                let pc = PowerCouple::new(alpha, beta, pairs.values[k]).map_err(invalid)?;
                let membership = check_membership(&pc, DEFAULT_GRID).map_err(invalid)?;
                match verify_commutator_bound(op, &ts, &bs, pairs, k, &pc, &membership) {
                    Ok(r) => rows.push(if proxy { r.as_proxy() } else { r }),
                    Err(SolverError::DegenerateGap { k, value }) => {
                        eprintln!("note: commutator row k = {k} skipped, degenerate gap at {value}")
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(rows)
    }
}

struct GridSetup {
    spacing: [f64; 3],
    bbox: Option<AxisBox>,
    mode: OperatorMode,
    solver: SolverOptions,
}

fn parse_bbox(raw: &str) -> Result<AxisBox, CliError> {
    let v: Vec<f64> = raw
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| invalid(format!("bbox '{raw}': {e}")))?;
    if v.len() != 6 {
        return Err(invalid(format!("bbox needs 6 numbers, got {}", v.len())));
    }
    Ok(AxisBox::new([v[0], v[2], v[4]], [v[1], v[3], v[5]]))
}

fn grid_setup(s: &Settings, g: &GridArgs) -> Result<GridSetup, CliError> {
    let h = s.value_or("h", g.h, DEFAULT_H)?;
    let spacing = [
        s.value_or("hx", g.hx, h)?,
        s.value_or("hy", g.hy, h)?,
        s.value_or("ht", g.ht, h)?,
    ];
    let bbox = s
        .value::<String>("bbox", g.bbox.clone())?
        .map(|b| parse_bbox(&b))
        .transpose()?;
    let mode = match s.value_or("mode", g.mode.clone(), "greiner".into())?.as_str() {
        "greiner" => OperatorMode::Greiner,
        "euclidean" => OperatorMode::Euclidean,
        other => return Err(invalid(format!("unknown mode '{other}'"))),
    };
    let method = match s.value_or("method", g.method.clone(), "auto".into())?.as_str() {
        "auto" => Method::Auto,
        "dense" => Method::Dense,
        "lobpcg" => Method::Lobpcg,
        "lanczos" => Method::Lanczos,
        other => return Err(invalid(format!("unknown method '{other}'"))),
    };
    let defaults = SolverOptions::default();
    let tol = s.value_or("tol", g.tol, defaults.tol)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    let solver = SolverOptions {
        tol,
        max_iter: s.value_or("max-iter", g.max_iter, defaults.max_iter)?,
        seed: s.seed(g.seed)?,
        method,
        ..defaults
    };
    Ok(GridSetup {
        spacing,
        bbox,
        mode,
        solver,
    })
}

fn mode_name(mode: OperatorMode) -> &'static str {
    match mode {
        OperatorMode::Greiner => "greiner",
        OperatorMode::Euclidean => "euclidean",
    }
}

fn meta(
    command: &'static str,
    system: Option<&System>,
    setup: &GridSetup,
    tolerances: Tolerances,
) -> Meta {
    Meta {
        command,
        seed: setup.solver.seed,
        h: setup.spacing,
        domain: system.map(|s| s.domain.describe()).unwrap_or_default(),
        n: system.map_or(1, |s| s.gp.n()),
        sigma: system.map_or(1, |s| s.gp.sigma()),
        mode: mode_name(setup.mode).to_string(),
        tolerances,
    }
}

pub fn classify(s: &Settings, args: &ClassifyArgs) -> Result<i32, CliError> {
    let (dom, gp) = domain_from(s, &args.domain)?;
    let samples = s.value_or("samples", args.samples, DEFAULT_SAMPLES)?;
    let report = classify_domain(&dom, &gp, samples, None).map_err(invalid)?;
    println!("domain: {} (n = {}, sigma = {})", dom.describe(), gp.n(), gp.sigma());
    if report.is_characteristic() {
        println!("characteristic: {} point(s)", report.points().len());
        for p in report.points() {
            println!("  |z| = {:.6}, t = {:.6}", p.rho(), p.t);
        }
    } else {
        println!("noncharacteristic");
    }
    if let Some(path) = s.value::<String>("json", args.json.clone())? {
        #[derive(Serialize)]
        struct Doc<'a> {
            domain: String,
            n: usize,
            sigma: u32,
            report: &'a hypospec::geometry::ClassificationReport,
        }
        let text = serde_json::to_string_pretty(&Doc {
            domain: dom.describe(),
            n: gp.n(),
            sigma: gp.sigma(),
            report: &report,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
        output::emit(Some(&path), &(text + "\n"))?;
    }
    Ok(exit::SUCCESS)
}

pub fn solve(s: &Settings, args: &SolveArgs) -> Result<i32, CliError> {
    let (dom, gp) = domain_from(s, &args.domain)?;
    let setup = grid_setup(s, &args.grid)?;
    let k = s.value_or("k", args.k, DEFAULT_K)?;
    let proxy = s.switch("proxy", args.proxy)?;
    let system = System::build(dom, gp, setup.spacing, setup.bbox, setup.mode)?;
    eprintln!(
        "grid: {} unknowns, operator nnz {}",
        system.grid.len(),
        system.operator.nnz()
    );
    if let Some(path) = s.value::<String>("export-matrix", args.export_matrix.clone())? {
        let file = std::fs::File::create(&path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        system
            .operator
            .write_matrix_market(std::io::BufWriter::new(file))
            .map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    }
    let mut pairs = smallest_k_eigenpairs(&system.operator, k, &setup.solver)?;
    if proxy {
        let a2 = clamped_proxy(&system.operator).map_err(invalid)?;
        pairs = squared_pairs(&pairs, &a2);
    }
    let rows: Vec<SpectrumRow> = pairs
        .values
        .iter()
        .zip(&pairs.residuals)
        .enumerate()
        .map(|(i, (&lambda, &residual))| SpectrumRow {
            index: i + 1,
            lambda,
            residual,
        })
        .collect();
    output::emit(
        s.value::<String>("output", args.output.clone())?.as_deref(),
        &output::spectrum_csv(&rows),
    )?;
    if let Some(path) = s.value::<String>("json", args.json.clone())? {
        #[derive(Serialize)]
        struct Body<'a> {
            method: &'static str,
            iterations: usize,
            norm_estimate: f64,
            unknowns: usize,
            proxy: bool,
            spectrum: &'a [SpectrumRow],
        }
        let m = meta(
            "solve",
            Some(&system),
            &setup,
            Tolerances {
                eigensolver: setup.solver.tol,
                dirichlet: DIRICHLET_TOLERANCE,
                clamped: CLAMPED_TOLERANCE,
                commutator: COMMUTATOR_TOLERANCE,
            },
        );
        let body = Body {
            method: pairs.method.as_str(),
            iterations: pairs.iterations,
            norm_estimate: pairs.norm_estimate,
            unknowns: system.grid.len(),
            proxy,
            spectrum: &rows,
        };
        output::emit(Some(&path), &output::json(&m, body)?)?;
    }
    Ok(exit::SUCCESS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Dirichlet,
    Clamped,
    Both,
}

impl Family {
    fn dirichlet(self) -> bool {
        self != Family::Clamped
    }

    fn clamped(self) -> bool {
        self != Family::Dirichlet
    }
}

fn parse_couples(raw: &str) -> Result<Vec<(f64, f64)>, CliError> {
    raw.split(',')
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| invalid(format!("couple '{item}' is not alpha:beta")))?;
            Ok((
                a.trim().parse().map_err(invalid)?,
                b.trim().parse().map_err(invalid)?,
            ))
        })
        .collect()
}

pub fn dirichlet_rows(
    seq: &EigenSequence,
    kmax: usize,
    n: usize,
    ep: Option<ExponentPair>,
    tol: f64,
) -> Result<Vec<BoundReport>, CliError> {
    let t = Tolerance::relative(tol);
    let mut rows = Vec::new();
    for k in 1..=kmax {
        rows.push(check_yang_first(seq, k, n)?.with_tolerance(t));
        rows.push(check_ppw_gap(seq, k, n)?.with_tolerance(t));
        rows.push(check_yang_second(seq, k, n)?.with_tolerance(t));
        if let Some(ep) = ep.filter(|e| !e.is_quadratic()) {
            rows.push(check_dirichlet_bound(seq, k, n, ep)?.with_tolerance(t));
        }
    }
    Ok(rows)
}

pub fn clamped_rows(
    seq: &EigenSequence,
    kmax: usize,
    n: usize,
    ep: Option<ExponentPair>,
    tol: f64,
    proxy: bool,
) -> Result<Vec<BoundReport>, CliError> {
    let t = Tolerance::relative(tol);
    let quadratic = ExponentPair::new(2.0, 2.0);
    let mut rows = Vec::new();
    for k in 1..=kmax {
        rows.push(check_clamped_bound(seq, k, n, quadratic)?.with_tolerance(t));
        rows.push(check_clamped_chebyshev_form(seq, k, n, quadratic)?.with_tolerance(t));
        rows.push(check_clamped_gap(seq, k, n)?.with_tolerance(t));
        if let Some(ep) = ep.filter(|e| !e.is_quadratic()) {
            rows.push(check_clamped_bound(seq, k, n, ep)?.with_tolerance(t));
            rows.push(check_clamped_chebyshev_form(seq, k, n, ep)?.with_tolerance(t));
        }
    }
    if proxy {
        rows = rows.into_iter().map(BoundReport::as_proxy).collect();
    }
    Ok(rows)
}

pub fn verify(s: &Settings, args: &VerifyArgs) -> Result<i32, CliError> {
    let family = match s.value_or("family", args.family.clone(), "dirichlet".into())?.as_str() {
        "dirichlet" => Family::Dirichlet,
        "clamped" => Family::Clamped,
        "both" => Family::Both,
        other => return Err(invalid(format!("unknown family '{other}'"))),
    };
    let kmax = s.value_or("kmax", args.kmax, DEFAULT_KMAX)?;
    if kmax == 0 {
        return Err(invalid("kmax must be at least 1"));
    }
    let ep = match (
        s.value("alpha", args.alpha)?,
        s.value("beta", args.beta)?,
    ) {
        (Some(alpha), Some(beta)) => {
            let ep = ExponentPair::new(alpha, beta);
            ep.check_admissible()?;
            Some(ep)
        }
        (None, None) => None,
        _ => return Err(invalid("alpha and beta must be given together")),
    };
    let tol_d = s.value_or("tol-dirichlet", args.tol_dirichlet, DIRICHLET_TOLERANCE)?;
    let tol_c = s.value_or("tol-clamped", args.tol_clamped, CLAMPED_TOLERANCE)?;
    let couples = match s.value::<String>("couples", args.couples.clone())? {
        Some(raw) => parse_couples(&raw)?,
        None => match ep {
            Some(e) => vec![(e.alpha, e.beta)],
            None => DEFAULT_COUPLES.to_vec(),
        },
    };
    let setup = grid_setup(s, &args.grid)?;
    let tolerances = Tolerances {
        eigensolver: setup.solver.tol,
        dirichlet: tol_d,
        clamped: tol_c,
        commutator: COMMUTATOR_TOLERANCE,
    };

    let mut reports = Vec::new();
    let m;
    if let Some(path) = s.value::<String>("spectrum", args.spectrum.clone())? {
        let n = s.value_or("n", args.domain.n, 1)?;
        let text = std::fs::read_to_string(&path)
            .map_err(|e| invalid(format!("cannot read spectrum {path}: {e}")))?;
        let seq = EigenSequence::new(output::parse_spectrum(&text)?)?;
        if seq.len() < kmax + 1 {
            return Err(invalid(format!(
                "kmax = {kmax} needs {} eigenvalues, file has {}",
                kmax + 1,
                seq.len()
            )));
        }
        let proxy = s.switch("proxy", args.proxy)?;
        if family.dirichlet() {
            reports.extend(dirichlet_rows(&seq, kmax, n, ep, tol_d)?);
        }
        if family.clamped() {
            reports.extend(clamped_rows(&seq, kmax, n, ep, tol_c, proxy)?);
        }
        let mut mm = meta("verify", None, &setup, tolerances);
        mm.domain = format!("spectrum:{path}");
        mm.n = n;
        m = mm;
    } else {
        let (dom, gp) = domain_from(s, &args.domain)?;
        let system = System::build(dom, gp, setup.spacing, setup.bbox, setup.mode)?;
        let pairs = smallest_k_eigenpairs(&system.operator, kmax + 1, &setup.solver)?;
        let seq = pairs.sequence()?;
        let n = system.gp.n();
        let commutator = !s.switch("no-commutator", args.no_commutator)?;
        if family.dirichlet() {
            reports.extend(dirichlet_rows(&seq, kmax, n, ep, tol_d)?);
            if commutator {
                reports.extend(system.commutator_rows(&pairs, &couples, kmax, false)?);
            }
        }
        if family.clamped() {
            reports.extend(clamped_rows(&seq.squared(), kmax, n, ep, tol_c, true)?);
            if commutator {
                reports.extend(system.commutator_rows(&pairs, &couples, kmax, true)?);
            }
        }
        m = meta("verify", Some(&system), &setup, tolerances);
    }

    let rows: Vec<BoundRow> = reports.iter().map(BoundRow::from).collect();
    output::emit(
        s.value::<String>("output", args.output.clone())?.as_deref(),
        &output::bound_csv(&rows),
    )?;
    if let Some(path) = s.value::<String>("json", args.json.clone())? {
        #[derive(Serialize)]
        struct Body<'a> {
            rows: &'a [BoundRow],
        }
        output::emit(Some(&path), &output::json(&m, Body { rows: &rows })?)?;
    }
    let failed: Vec<&BoundRow> = rows.iter().filter(|r| !r.satisfied).collect();
    eprintln!("verify: {} rows, {} unsatisfied", rows.len(), failed.len());
    for r in &failed {
        eprintln!("  FAIL {} k = {}: lhs {} > rhs {}", r.inequality, r.k, r.lhs, r.rhs);
    }
    Ok(if failed.is_empty() {
        exit::SUCCESS
    } else {
        exit::BOUND_FAILURE
    })
}

pub fn couple_check(s: &Settings, args: &CoupleArgs) -> Result<i32, CliError> {
    let alpha = s
        .value("alpha", args.alpha)?
        .ok_or_else(|| invalid("--alpha is required"))?;
    let beta = s
        .value("beta", args.beta)?
        .ok_or_else(|| invalid("--beta is required"))?;
    let lambda = s.value_or("lambda", args.lambda, 1.0)?;
    let grid = s.value_or("grid", args.grid, DEFAULT_GRID)?;
    let gate = !s.switch("no-gate", args.no_gate)?;
    let pc = PowerCouple::new(alpha, beta, lambda).map_err(invalid)?;
    let opts = MembershipOptions {
        gate,
        ..MembershipOptions::default()
    };
    let report = check_membership_with(&pc, grid, opts).map_err(invalid)?;
    println!("couple ({alpha}, {beta}) on (0, {lambda}): {}", report.label());
    if let Some(w) = report.worst {
        println!("worst scaled residual {:e} at x = {}, y = {}", w.residual, w.x, w.y);
    }
    if let Some(path) = s.value::<String>("json", args.json.clone())? {
        let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
        output::emit(Some(&path), &(text + "\n"))?;
    }
    Ok(if report.accepted() {
        exit::SUCCESS
    } else {
        exit::BOUND_FAILURE
    })
}

pub fn lemma_test(s: &Settings, args: &LemmaArgs) -> Result<i32, CliError> {
    let defaults = TrialOptions::default();
    let trials = s.value_or("trials", args.trials, defaults.trials)?;
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let suites: Vec<Suite> = match s.value_or("suite", args.suite.clone(), "all".into())?.as_str() {
        "all" => Suite::ALL.to_vec(),
        "power-mean" => vec![Suite::PowerMean],
        "chebyshev" => vec![Suite::Chebyshev],
        "generalized-chebyshev" => vec![Suite::GeneralizedChebyshev],
        other => return Err(invalid(format!("unknown suite '{other}'"))),
    };
    let gamma = s.value("gamma", args.gamma)?;
    if let Some(g) = gamma.filter(|g| g.is_nan() || *g < 1.0) {
        return Err(InequalityError::GammaBelowOne(g).into());
    }
    let opts = TrialOptions {
        trials,
        seed: s.seed(args.seed)?,
        gamma,
        ..defaults
    };
    let summaries: Vec<_> = suites.iter().map(|suite| run_suite(*suite, &opts)).collect();
    println!("suite,trials,passed,skipped,violations,equalities,worst_relative_slack");
    for r in &summaries {
        println!(
            "{},{},{},{},{},{},{}",
            r.suite.as_str(),
            r.trials,
            r.passed,
            r.skipped,
            r.violations,
            r.equalities,
            output::num(r.worst_relative_slack)
        );
    }
    if let Some(path) = s.value::<String>("json", args.json.clone())? {
        #[derive(Serialize)]
        struct Doc<'a> {
            seed: u64,
            tolerance: Tolerance,
            suites: &'a [hypospec::trials::SuiteSummary],
        }
        let text = serde_json::to_string_pretty(&Doc {
            seed: opts.seed,
            tolerance: opts.tolerance,
            suites: &summaries,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
        output::emit(Some(&path), &(text + "\n"))?;
    }
    let violations: usize = summaries.iter().map(|r| r.violations).sum();
    Ok(if violations == 0 {
        exit::SUCCESS
    } else {
        exit::LEMMA_VIOLATION
    })
}
