//! Greiner vector fields
//!
//! ```text
//! X_j = ∂/∂x_j + 2σ y_j |z|^(2σ−2) ∂/∂t,    Y_j = ∂/∂y_j − 2σ x_j |z|^(2σ−2) ∂/∂t
//! ```
//!
//! on `R^(2n+1)`, the horizontal gradient of level-set functions, and the
//! classification of domain boundaries into characteristic and
//! noncharacteristic ones. `σ = 1` is the Heisenberg sub-Laplacian.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("n and sigma must both be at least 1 (n = {n}, sigma = {sigma})")]
    InvalidParams { n: usize, sigma: u32 },
    #[error("point has {got} coordinates per block, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain parameter: {0}")]
    InvalidDomain(String),
    #[error("generic domain carries neither a gradient callback nor a finite-difference step")]
    MissingDerivatives,
    #[error("no boundary points found inside the bounding box")]
    EmptyBoundary,
    #[error("classification needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreinerParams {
    n: usize,
    sigma: u32,
}

impl GreinerParams {
    pub fn new(n: usize, sigma: u32) -> Result<Self> {
        if n == 0 || sigma == 0 {
            return Err(GeometryError::InvalidParams { n, sigma });
        }
        Ok(Self { n, sigma })
    }

    /// The Heisenberg sub-Laplacian on `R^3`.
    pub fn heisenberg() -> Self {
        Self { n: 1, sigma: 1 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// Ambient dimension `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// `2σ |z|^(2σ−2)` given `|z|²`.
    pub fn t_weight(&self, rho_sq: f64) -> f64 {
        2.0 * self.sigma as f64 * rho_sq.powi(self.sigma as i32 - 1)
    }

    /// Coefficient of `∂/∂t` in `X_j` at the point, `2σ y_j |z|^(2σ−2)`.
    pub fn x_field_coefficient(&self, p: &Point, j: usize) -> f64 {
        self.t_weight(p.rho_sq()) * p.y[j]
    }

    /// Coefficient of `∂/∂t` in `Y_j` at the point, `−2σ x_j |z|^(2σ−2)`.
    pub fn y_field_coefficient(&self, p: &Point, j: usize) -> f64 {
        -self.t_weight(p.rho_sq()) * p.x[j]
    }

    /// Applies `(X_1..X_n, Y_1..Y_n)` to a Euclidean gradient.
    pub fn horizontal_from_euclidean(&self, p: &Point, grad: &EuclideanGradient) -> Vec<f64> {
        let w = self.t_weight(p.rho_sq());
        let mut out = Vec::with_capacity(2 * self.n);
        for j in 0..self.n {
            out.push(grad.dx[j] + w * p.y[j] * grad.dt);
        }
        for j in 0..self.n {
            out.push(grad.dy[j] - w * p.x[j] * grad.dt);
        }
        out
    }
}

/// A point `(x, y, t)` with `x, y ∈ R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        Ok(Self { x, y, t })
    }

    /// Point with `x_1 = rho` and all other planar coordinates zero.
    pub fn on_profile(n: usize, rho: f64, t: f64) -> Self {
        let mut x = vec![0.0; n];
        x[0] = rho;
        Self {
            x,
            y: vec![0.0; n],
            t,
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn rho_sq(&self) -> f64 {
        self.x.iter().chain(&self.y).map(|v| v * v).sum()
    }

    /// `|z|`.
    pub fn rho(&self) -> f64 {
        self.rho_sq().sqrt()
    }

    /// Coordinates in the order `x_1..x_n, y_1..y_n, t`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(2 * self.n() + 1);
        c.extend_from_slice(&self.x);
        c.extend_from_slice(&self.y);
        c.push(self.t);
        c
    }

    pub fn from_coords(coords: &[f64]) -> Self {
        let n = (coords.len() - 1) / 2;
        Self {
            x: coords[..n].to_vec(),
            y: coords[n..2 * n].to_vec(),
            t: coords[2 * n],
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanGradient {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dt: f64,
}

pub type LevelSetFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&Point) -> EuclideanGradient + Send + Sync>;

/// Domain `{φ < 0}` described by a user-supplied level set.
#[derive(Clone)]
pub struct GenericDomain {
    pub levelset: LevelSetFn,
    pub gradient: Option<GradientFn>,
    /// Central-difference step used when no gradient callback is given.
    pub fd_step: Option<f64>,
    /// Per-coordinate bounds in the order `x_1..x_n, y_1..y_n, t`.
    pub bounds: Vec<(f64, f64)>,
    pub label: String,
}

impl fmt::Debug for GenericDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericDomain")
            .field("label", &self.label)
            .field("has_gradient", &self.gradient.is_some())
            .field("fd_step", &self.fd_step)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl GenericDomain {
    /// Axis-aligned open box `{|c_i − center_i| < half_i}` with level set
    /// `max_i (|c_i − center_i| − half_i)`.
    pub fn open_box(center: Vec<f64>, half: Vec<f64>) -> Self {
        let bounds = center
            .iter()
            .zip(&half)
            .map(|(c, h)| (c - h, c + h))
            .collect();
        let levelset: LevelSetFn = Arc::new(move |p: &Point| {
            p.coords()
                .iter()
                .zip(center.iter().zip(&half))
                .map(|(v, (c, h))| (v - c).abs() - h)
                .fold(f64::NEG_INFINITY, f64::max)
        });
        Self {
            levelset,
            gradient: None,
            fd_step: Some(1e-6),
            bounds,
            label: "box".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum DomainSpec {
    /// `(|z| − a)² + (t − b)² < m²`.
    TorusShell { a: f64, b: f64, m: f64 },
    /// `|z|^(4σ) + t² < r^(4σ)`.
    GreinerBall { r: f64 },
    Generic(GenericDomain),
}

impl DomainSpec {
    pub fn torus(a: f64, b: f64, m: f64) -> Result<Self> {
        if !(a > 0.0 && m > 0.0 && b.is_finite() && a.is_finite() && m.is_finite()) {
            return Err(GeometryError::InvalidDomain(format!(
                "torus shell needs a > 0, m > 0 (a = {a}, b = {b}, m = {m})"
            )));
        }
        Ok(Self::TorusShell { a, b, m })
    }

    pub fn greiner_ball(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(GeometryError::InvalidDomain(format!(
                "greiner ball needs r > 0 (r = {r})"
            )));
        }
        Ok(Self::GreinerBall { r })
    }

    pub fn describe(&self) -> String {
        match self {
            Self::TorusShell { a, b, m } => format!("torus(a={a},b={b},m={m})"),
            Self::GreinerBall { r } => format!("greiner-ball(r={r})"),
            Self::Generic(g) => format!("generic({})", g.label),
        }
    }

    /// `φ` with `Ω = {φ < 0}`.
    pub fn levelset(&self, p: &Point, gp: &GreinerParams) -> f64 {
        match self {
            Self::TorusShell { a, b, m } => {
                let dr = p.rho() - a;
                let dt = p.t - b;
                dr * dr + dt * dt - m * m
            }
            Self::GreinerBall { r } => {
                let s = gp.sigma() as i32;
                p.rho_sq().powi(2 * s) + p.t * p.t - r.powi(4 * s)
            }
            Self::Generic(g) => (g.levelset)(p),
        }
    }

    /// Per-coordinate bounds (`x_1..x_n, y_1..y_n, t`) of `{φ ≤ 0}`.
    pub fn extents(&self, gp: &GreinerParams) -> Vec<(f64, f64)> {
        let n = gp.n();
        let (planar, t) = match self {
            Self::TorusShell { a, b, m } => ((a + m), (b - m, b + m)),
            Self::GreinerBall { r } => {
                let top = r.powi(2 * gp.sigma() as i32);
                (*r, (-top, top))
            }
            Self::Generic(g) => return g.bounds.clone(),
        };
        let mut out = vec![(-planar, planar); 2 * n];
        out.push(t);
        out
    }

    /// Analytic Euclidean gradient for the built-in families.
    ///
    /// For the torus shell the gradient is undefined on the axis `z = 0`.
    pub fn euclidean_gradient(&self, p: &Point, gp: &GreinerParams) -> Result<EuclideanGradient> {
        match self {
            Self::TorusShell { a, b, .. } => {
                let rho = p.rho();
                let s = 2.0 * (rho - a) / rho;
                Ok(EuclideanGradient {
                    dx: p.x.iter().map(|v| s * v).collect(),
                    dy: p.y.iter().map(|v| s * v).collect(),
                    dt: 2.0 * (p.t - b),
                })
            }
            Self::GreinerBall { .. } => {
                let sigma = gp.sigma() as i32;
                let s = 4.0 * sigma as f64 * p.rho_sq().powi(2 * sigma - 1);
                Ok(EuclideanGradient {
                    dx: p.x.iter().map(|v| s * v).collect(),
                    dy: p.y.iter().map(|v| s * v).collect(),
                    dt: 2.0 * p.t,
                })
            }
            Self::Generic(g) => match (&g.gradient, g.fd_step) {
                (Some(grad), _) => Ok(grad(p)),
                (None, Some(h)) => Ok(central_difference_gradient(&g.levelset, p, h)),
                (None, None) => Err(GeometryError::MissingDerivatives),
            },
        }
    }
}

pub fn central_difference_gradient(phi: &LevelSetFn, p: &Point, h: f64) -> EuclideanGradient {
    let base = p.coords();
    let partial = |i: usize| {
        let mut fwd = base.clone();
        let mut bwd = base.clone();
        fwd[i] += h;
        bwd[i] -= h;
        (phi(&Point::from_coords(&fwd)) - phi(&Point::from_coords(&bwd))) / (2.0 * h)
    };
    let n = p.n();
    EuclideanGradient {
        dx: (0..n).map(partial).collect(),
        dy: (n..2 * n).map(partial).collect(),
        dt: partial(2 * n),
    }
}

/// `|∇_L φ|² = Σ_j (X_j φ)² + (Y_j φ)²`.
///
/// Built-in families use the closed forms
/// `4(|z|−a)² + 16σ²|z|^(4σ−2)(t−b)²` (torus shell) and
/// `16σ²|z|^(8σ−2) + 16σ²|z|^(4σ−2) t²` (Greiner ball).
pub fn horizontal_gradient_sq(dom: &DomainSpec, p: &Point, gp: &GreinerParams) -> Result<f64> {
    if p.n() != gp.n() || p.y.len() != gp.n() {
        return Err(GeometryError::DimensionMismatch {
            expected: gp.n(),
            got: p.n(),
        });
    }
    let sigma = gp.sigma() as f64;
    let s = gp.sigma() as i32;
    let rho_sq = p.rho_sq();
    // |z|^(4σ−2) = (|z|²)^(2σ−1)
    let rho_4s_2 = rho_sq.powi(2 * s - 1);
    match dom {
        DomainSpec::TorusShell { a, b, .. } => {
            let dr = rho_sq.sqrt() - a;
            let dt = p.t - b;
            Ok(4.0 * dr * dr + 16.0 * sigma * sigma * rho_4s_2 * dt * dt)
        }
        DomainSpec::GreinerBall { .. } => {
            let rho_8s_2 = rho_sq.powi(4 * s - 1);
            Ok(16.0 * sigma * sigma * (rho_8s_2 + rho_4s_2 * p.t * p.t))
        }
        DomainSpec::Generic(_) => {
            let grad = dom.euclidean_gradient(p, gp)?;
            Ok(gp
                .horizontal_from_euclidean(p, &grad)
                .iter()
                .map(|v| v * v)
                .sum())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Classification {
    Noncharacteristic,
    Characteristic(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classification: Classification,
    pub boundary_samples: usize,
    /// Median of `|∇_L φ|` over the boundary sample.
    pub median_gradient: f64,
    /// Threshold on `|∇_L φ|` below which a point counts as characteristic.
    pub tolerance: f64,
    /// Smallest `|∇_L φ|` seen on the sample.
    pub min_gradient: f64,
}

impl ClassificationReport {
    pub fn is_characteristic(&self) -> bool {
        matches!(self.classification, Classification::Characteristic(_))
    }

    pub fn points(&self) -> &[Point] {
        match &self.classification {
            Classification::Characteristic(p) => p,
            Classification::Noncharacteristic => &[],
        }
    }
}

/// Relative threshold factor: characteristic iff `|∇_L φ| ≤ 1e−6 · median`.
pub const CHARACTERISTIC_FACTOR: f64 = 1e-6;
/// Sampled characteristic points closer than this merge into their centroid.
pub const CLUSTER_RADIUS: f64 = 1e-3;

/// Samples the boundary `{φ = 0}` and returns its characteristic points.
///
/// Built-in families are sampled along their `(|z|, t)` profile curve in one
/// representative `z` direction. Generic domains are sampled by bisection of
/// sign changes along axis-parallel lines through the bounding box.
/// `tol` overrides the median-relative threshold on `|∇_L φ|`.
pub fn classify_domain(
    dom: &DomainSpec,
    gp: &GreinerParams,
    samples: usize,
    tol: Option<f64>,
) -> Result<ClassificationReport> {
    if samples < 100 {
        return Err(GeometryError::TooFewSamples(samples));
    }
    let boundary = sample_boundary(dom, gp, samples)?;
    if boundary.is_empty() {
        return Err(GeometryError::EmptyBoundary);
    }
    let grads: Vec<f64> = boundary
        .iter()
        .map(|p| horizontal_gradient_sq(dom, p, gp).map(f64::sqrt))
        .collect::<Result<_>>()?;
    let mut sorted = grads.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let tolerance = tol.unwrap_or(CHARACTERISTIC_FACTOR * median);

    let hits: Vec<Point> = boundary
        .iter()
        .zip(&grads)
        .filter(|(_, g)| g.powi(2) <= tolerance * tolerance)
        .map(|(p, _)| p.clone())
        .collect();
    let clusters = cluster_points(hits, CLUSTER_RADIUS);
    let classification = if clusters.is_empty() {
        Classification::Noncharacteristic
    } else {
        Classification::Characteristic(clusters)
    };
    Ok(ClassificationReport {
        classification,
        boundary_samples: boundary.len(),
        median_gradient: median,
        tolerance,
        min_gradient: sorted[0],
    })
}

fn sample_boundary(dom: &DomainSpec, gp: &GreinerParams, samples: usize) -> Result<Vec<Point>> {
    let n = gp.n();
    let angles =
        (0..samples).map(move |i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (samples - 1) as f64);
    match dom {
        DomainSpec::TorusShell { a, b, m } => Ok(angles
            .filter_map(|th| {
                let rho = a + m * th.cos();
                (rho >= 0.0).then(|| Point::on_profile(n, rho, b + m * th.sin()))
            })
            .collect()),
        DomainSpec::GreinerBall { r } => {
            let s = gp.sigma() as i32;
            let top = r.powi(2 * s);
            // t = r^(2σ) sin θ, |z| = r (1 − sin²θ)^(1/(4σ)) for θ ∈ [−π/2, π/2].
            Ok((0..samples)
                .map(|i| {
                    let th = -std::f64::consts::FRAC_PI_2
                        + std::f64::consts::PI * i as f64 / (samples - 1) as f64;
                    let sn = th.sin().clamp(-1.0, 1.0);
                    let rho = r * (1.0 - sn * sn).max(0.0).powf(1.0 / (4.0 * s as f64));
                    Point::on_profile(n, rho, top * sn)
                })
                .collect())
        }
        DomainSpec::Generic(g) => Ok(ray_boundary_samples(g, samples)),
    }
}

/// Boundary points of a generic level set, found along axis-parallel lines.
fn ray_boundary_samples(g: &GenericDomain, samples: usize) -> Vec<Point> {
    let dim = g.bounds.len();
    let phi = |c: &[f64]| (g.levelset)(&Point::from_coords(c));
    // Lines per axis: a lattice over the remaining coordinates (odd count so
    // the box center is included), each line sampled at `steps` points.
    let per_side = {
        let target = (samples as f64).powf(1.0 / (dim - 1).max(1) as f64).ceil() as usize;
        let capped = target.clamp(3, 41);
        capped | 1
    };
    let steps = samples.max(64);
    let mut out = Vec::new();
    for axis in 0..dim {
        let others: Vec<usize> = (0..dim).filter(|&d| d != axis).collect();
        let total = per_side.pow(others.len() as u32);
        for flat in 0..total {
            let mut base = vec![0.0; dim];
            let mut rem = flat;
            for &d in &others {
                let i = rem % per_side;
                rem /= per_side;
                let (lo, hi) = g.bounds[d];
                base[d] = lo + (hi - lo) * i as f64 / (per_side - 1) as f64;
            }
            let (lo, hi) = g.bounds[axis];
            let at = |s: f64, base: &mut Vec<f64>| {
                base[axis] = s;
                phi(base)
            };
            let mut prev_s = lo;
            let mut prev_v = at(lo, &mut base);
            for i in 1..=steps {
                let s = lo + (hi - lo) * i as f64 / steps as f64;
                let v = at(s, &mut base);
                if prev_v == 0.0 {
                    base[axis] = prev_s;
                    out.push(Point::from_coords(&base));
                } else if prev_v.signum() != v.signum() && v != 0.0 {
                    let (mut a, mut b, mut fa) = (prev_s, s, prev_v);
                    for _ in 0..80 {
                        let mid = 0.5 * (a + b);
                        let fm = at(mid, &mut base);
                        if fm == 0.0 {
                            a = mid;
                            b = mid;
                            break;
                        }
                        if fm.signum() == fa.signum() {
                            a = mid;
                            fa = fm;
                        } else {
                            b = mid;
                        }
                    }
                    base[axis] = 0.5 * (a + b);
                    out.push(Point::from_coords(&base));
                }
                prev_s = s;
                prev_v = v;
            }
        }
    }
    out
}

/// Greedy clustering: each point joins the first cluster whose running
/// centroid lies within `radius`, otherwise starts a new one.
fn cluster_points(points: Vec<Point>, radius: f64) -> Vec<Point> {
    let mut clusters: Vec<(Vec<f64>, usize)> = Vec::new();
    for p in points {
        let c = p.coords();
        let found = clusters.iter_mut().find(|(sum, count)| {
            let dist: f64 = sum
                .iter()
                .zip(&c)
                .map(|(s, v)| (s / *count as f64 - v).powi(2))
                .sum::<f64>()
                .sqrt();
            dist <= radius
        });
        match found {
            Some((sum, count)) => {
                sum.iter_mut().zip(&c).for_each(|(s, v)| *s += v);
                *count += 1;
            }
            None => clusters.push((c, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, count)| {
            let centroid: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
            Point::from_coords(&centroid)
        })
        .collect()
}
