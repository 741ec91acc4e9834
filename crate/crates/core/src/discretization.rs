//! Masked lattice discretization of `−Δ_L` on `R^3` (`n = 1`).
//!
//! Unknowns live on lattice nodes with `φ < 0`; every other node carries the
//! Dirichlet value zero. The operator is assembled in Gram form
//! `A = Σ D_Fᵀ D_F` from forward-difference discretizations `D_F` of the
//! vector fields, so `A` is symmetric positive semidefinite by construction
//! and `vᵀAv = Σ ‖D_F v‖²` exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DomainSpec, GreinerParams, Point};
use crate::sparse::{norm, CsrMatrix, SparseError, SparseSymMatrix};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("lattice assembly supports n = 1 only, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("grid spacing must be positive and finite")]
    InvalidSpacing,
    #[error("no lattice node lies inside the domain")]
    EmptyInterior,
    #[error("bounding box does not enclose the domain: {0}")]
    InsufficientMargin(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Axis order is `(x, y, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl AxisBox {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Self { lo, hi }
    }
}

/// Which first-order fields enter the Gram form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorMode {
    /// `X = ∂x + c_X ∂t`, `Y = ∂y + c_Y ∂t`.
    #[default]
    Greiner,
    /// Coefficients zeroed and `∂t` added as a third field: the Euclidean
    /// 7-point Laplacian, used as a solver oracle.
    Euclidean,
}

#[derive(Debug, Clone)]
pub struct Grid {
    lo: [f64; 3],
    h: [f64; 3],
    dims: [usize; 3],
    /// Lattice index of each unknown, increasing.
    nodes: Vec<usize>,
    /// Unknown index for each lattice node.
    lookup: Vec<Option<usize>>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.h
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.lo
    }

    fn lattice_index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.dims[1] + i[1]) * self.dims[2] + i[2]
    }

    fn lattice_coords(&self, flat: usize) -> [usize; 3] {
        let it = flat % self.dims[2];
        let rest = flat / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], it]
    }

    fn position(&self, i: [usize; 3]) -> [f64; 3] {
        [
            self.lo[0] + i[0] as f64 * self.h[0],
            self.lo[1] + i[1] as f64 * self.h[1],
            self.lo[2] + i[2] as f64 * self.h[2],
        ]
    }

    /// Coordinates `(x, y, t)` of unknown `u`.
    pub fn coords(&self, u: usize) -> [f64; 3] {
        self.position(self.lattice_coords(self.nodes[u]))
    }

    /// Unknown index at lattice position `i`, or `None` outside the domain.
    pub fn unknown_at(&self, i: [isize; 3]) -> Option<usize> {
        if (0..3).any(|a| i[a] < 0 || i[a] as usize >= self.dims[a]) {
            return None;
        }
        self.lookup[self.lattice_index([i[0] as usize, i[1] as usize, i[2] as usize])]
    }

    pub fn lattice_position(&self, u: usize) -> [usize; 3] {
        self.lattice_coords(self.nodes[u])
    }

    /// Samples `f(x, y, t)` at every unknown.
    pub fn sample<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|u| f(self.coords(u))).collect()
    }
}

fn node_count(lo: f64, hi: f64, h: f64) -> usize {
    ((hi - lo) / h + 1e-9).floor() as usize + 1
}

/// Builds the masked lattice over `bbox` (or the domain extents padded by
/// two spacings). The box must contain the domain extents and its face
/// nodes must lie outside the domain.
pub fn build_grid(
    dom: &DomainSpec,
    gp: &GreinerParams,
    h: [f64; 3],
    bbox: Option<AxisBox>,
) -> Result<Grid, GridError> {
    if gp.n() != 1 {
        return Err(GridError::UnsupportedDimension(gp.n()));
    }
    if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(GridError::InvalidSpacing);
    }
    let ext = dom.extents(gp);
    // extents are (x_1, y_1, t) for n = 1
    let bbox = bbox.unwrap_or_else(|| {
        AxisBox::new(
            [0, 1, 2].map(|a| ext[a].0 - 2.0 * h[a]),
            [0, 1, 2].map(|a| ext[a].1 + 2.0 * h[a]),
        )
    });
    for (a, &(lo, hi)) in ext.iter().enumerate() {
        if bbox.lo[a] > lo || bbox.hi[a] < hi {
            return Err(GridError::InsufficientMargin(format!(
                "axis {a}: box [{}, {}] vs domain [{lo}, {hi}]",
                bbox.lo[a], bbox.hi[a]
            )));
        }
    }
    let dims = [0, 1, 2].map(|a| node_count(bbox.lo[a], bbox.hi[a], h[a]));
    let total = dims[0] * dims[1] * dims[2];
    let mut grid = Grid {
        lo: bbox.lo,
        h,
        dims,
        nodes: Vec::new(),
        lookup: vec![None; total],
    };
    for flat in 0..total {
        let i = grid.lattice_coords(flat);
        let [x, y, t] = grid.position(i);
        let inside = dom.levelset(&Point::on_xy(x, y, t), gp) < 0.0;
        let on_face = (0..3).any(|a| i[a] == 0 || i[a] + 1 == dims[a]);
        if inside && on_face {
            return Err(GridError::InsufficientMargin(format!(
                "face node ({x}, {y}, {t}) lies inside the domain"
            )));
        }
        if inside {
            grid.lookup[flat] = Some(grid.nodes.len());
            grid.nodes.push(flat);
        }
    }
    if grid.nodes.is_empty() {
        return Err(GridError::EmptyInterior);
    }
    Ok(grid)
}

impl Point {
    pub(crate) fn on_xy(x: f64, y: f64, t: f64) -> Self {
        Point {
            x: vec![x],
            y: vec![y],
            t,
        }
    }
}

/// `t`-coefficient of each planar field at `(x, y)`:
/// `c_X = 2σ y |z|^(2σ−2)`, `c_Y = −2σ x |z|^(2σ−2)`.
pub fn field_coefficients(gp: &GreinerParams, x: f64, y: f64) -> (f64, f64) {
    let w = gp.t_weight(x * x + y * y);
    (w * y, -w * x)
}

const AXIS: [[isize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

fn add(i: [usize; 3], d: [isize; 3]) -> [isize; 3] {
    [0, 1, 2].map(|a| i[a] as isize + d[a])
}

/// Forward-difference matrices of the fields. Rows run over every lattice
/// node touching the domain, columns over unknowns.
///
/// `D_X u(p) = (u(p+e_x) − u(p))/h_x + c̄ (u(p+e_t) − u(p))/h_t` where `c̄` is
/// the mean of the coefficient at `p` and `p+e_x`; likewise for `Y` along
/// `e_y`.
pub fn assemble_difference_fields(
    grid: &Grid,
    gp: &GreinerParams,
    mode: OperatorMode,
) -> Result<Vec<CsrMatrix>, GridError> {
    let n_fields = match mode {
        OperatorMode::Greiner => 2,
        OperatorMode::Euclidean => 3,
    };
    let total = grid.dims.iter().product::<usize>();
    let mut out = Vec::with_capacity(n_fields);
    for (field, &dir) in AXIS.iter().enumerate().take(n_fields) {
        let mut triplets = Vec::new();
        let mut row = 0usize;
        for flat in 0..total {
            let i = grid.lattice_coords(flat);
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(3);
            let mut push = |d: [isize; 3], w: f64| {
                if let Some(u) = grid.unknown_at(add(i, d)) {
                    entries.push((u, w));
                }
            };
            let hd = grid.h[field];
            push([0, 0, 0], -1.0 / hd);
            push(dir, 1.0 / hd);
            if mode == OperatorMode::Greiner {
                let p = grid.position(i);
                let q = [p[0] + dir[0] as f64 * grid.h[0], p[1] + dir[1] as f64 * grid.h[1]];
                let (cx0, cy0) = field_coefficients(gp, p[0], p[1]);
                let (cx1, cy1) = field_coefficients(gp, q[0], q[1]);
                let c = if field == 0 {
                    0.5 * (cx0 + cx1)
                } else {
                    0.5 * (cy0 + cy1)
                };
                if c != 0.0 {
                    let ht = grid.h[2];
                    push([0, 0, 0], -c / ht);
                    push([0, 0, 1], c / ht);
                }
            }
            if entries.is_empty() {
                continue;
            }
            for (u, w) in entries {
                triplets.push((row, u, w));
            }
            row += 1;
        }
        out.push(CsrMatrix::from_triplets(row, grid.len(), &triplets)?);
    }
    Ok(out)
}

/// `A = Σ_F D_Fᵀ D_F`, the Dirichlet discretization of `−Δ_L`.
pub fn assemble_dirichlet_operator(
    grid: &Grid,
    gp: &GreinerParams,
    mode: OperatorMode,
) -> Result<SparseSymMatrix, GridError> {
    let fields = assemble_difference_fields(grid, gp, mode)?;
    let mut acc: Option<CsrMatrix> = None;
    for d in &fields {
        let gram = d.transpose().matmul(d)?;
        acc = Some(match acc {
            None => gram,
            Some(a) => a.add_scaled(&gram, 1.0)?,
        });
    }
    Ok(SparseSymMatrix::new(acc.expect("at least one field"))?)
}

/// Coordinate multipliers `B_x`, `B_y` as diagonal matrices.
pub fn assemble_multipliers(grid: &Grid) -> Vec<SparseSymMatrix> {
    (0..2)
        .map(|a| {
            let diag = grid.sample(|c| c[a]);
            SparseSymMatrix::new(CsrMatrix::from_diagonal(&diag)).expect("diagonal")
        })
        .collect()
}

/// Exactly skew-symmetric centered discretizations `T_X`, `T_Y`.
///
/// The `∂t` part uses the symmetrized coefficient `½(c_p + c_q)` on each
/// `t`-edge, so `T_pq = −T_qp` holds bit for bit.
pub fn assemble_skew_fields(grid: &Grid, gp: &GreinerParams) -> Result<Vec<CsrMatrix>, GridError> {
    let mut out = Vec::with_capacity(2);
    for (field, &dir) in AXIS.iter().enumerate().take(2) {
        let hd = grid.h[field];
        let ht = grid.h[2];
        let coeff = |u: usize| {
            let c = grid.coords(u);
            let (cx, cy) = field_coefficients(gp, c[0], c[1]);
            if field == 0 {
                cx
            } else {
                cy
            }
        };
        let mut triplets = Vec::new();
        for u in 0..grid.len() {
            let i = grid.lattice_position(u);
            let neg = [-dir[0], -dir[1], -dir[2]];
            if let Some(v) = grid.unknown_at(add(i, dir)) {
                triplets.push((u, v, 1.0 / (2.0 * hd)));
            }
            if let Some(v) = grid.unknown_at(add(i, neg)) {
                triplets.push((u, v, -1.0 / (2.0 * hd)));
            }
            let cu = coeff(u);
            for (d, sign) in [([0, 0, 1], 1.0), ([0, 0, -1], -1.0)] {
                if let Some(v) = grid.unknown_at(add(i, d)) {
                    let c = 0.5 * (cu + coeff(v));
                    if c != 0.0 {
                        triplets.push((u, v, sign * c / (2.0 * ht)));
                    }
                }
            }
        }
        out.push(CsrMatrix::from_triplets(grid.len(), grid.len(), &triplets)?);
    }
    Ok(out)
}

/// `A²`, the stand-in for the squared operator. Its boundary behaviour is of
/// Navier type rather than clamped.
pub fn clamped_proxy(a: &SparseSymMatrix) -> Result<SparseSymMatrix, GridError> {
    Ok(SparseSymMatrix::new(a.matmul(a)?)?)
}

/// `‖[A, B] v + 2 T v‖ / ‖v‖`, the defect of the discrete commutator identity.
pub fn commutator_defect(
    a: &SparseSymMatrix,
    b: &SparseSymMatrix,
    t: &CsrMatrix,
    v: &[f64],
) -> f64 {
    let bv = b.mul_vec(v);
    let abv = a.mul_vec(&bv);
    let av = a.mul_vec(v);
    let bav = b.mul_vec(&av);
    let tv = t.mul_vec(v);
    let r: Vec<f64> = (0..v.len())
        .map(|i| abv[i] - bav[i] + 2.0 * tv[i])
        .collect();
    norm(&r) / norm(v)
}

/// Closed-form Dirichlet spectrum of the 1-D three-point Laplacian with `m`
/// interior nodes and spacing `h`: `(4/h²) sin²(jπ / (2(m+1)))`.
pub fn lattice_laplacian_eigenvalue(m: usize, h: f64, j: usize) -> f64 {
    let s = (j as f64 * std::f64::consts::PI / (2.0 * (m + 1) as f64)).sin();
    4.0 / (h * h) * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GenericDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn torus_grid(h: f64) -> (Grid, GreinerParams) {
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::torus(2.0, 0.0, 1.0).unwrap();
        let bbox = AxisBox::new([-3.2, -3.2, -1.2], [3.2, 3.2, 1.2]);
        (build_grid(&dom, &gp, [h; 3], Some(bbox)).unwrap(), gp)
    }

    #[test]
    fn torus_grid_matches_direct_scan() {
        let (grid, gp) = torus_grid(0.2);
        let dom = DomainSpec::torus(2.0, 0.0, 1.0).unwrap();
        // Independent scan of the same lattice.
        let mut count = 0;
        for ix in 0..33 {
            for iy in 0..33 {
                for it in 0..13 {
                    let p = Point::on_xy(
                        -3.2 + ix as f64 * 0.2,
                        -3.2 + iy as f64 * 0.2,
                        -1.2 + it as f64 * 0.2,
                    );
                    if dom.levelset(&p, &gp) < 0.0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(grid.dims(), [33, 33, 13]);
        assert_eq!(grid.len(), count);
        assert!(grid.len() > 1000);
        for u in 0..grid.len() {
            let [x, y, t] = grid.coords(u);
            assert!(dom.levelset(&Point::on_xy(x, y, t), &gp) < 0.0);
        }
    }

    #[test]
    fn grid_errors() {
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::torus(2.0, 0.0, 0.1).unwrap();
        let bbox = AxisBox::new([-3.2, -3.2, -1.2], [3.2, 3.2, 1.2]);
        assert!(matches!(
            build_grid(&dom, &gp, [1.0; 3], Some(bbox)),
            Err(GridError::EmptyInterior)
        ));
        let dom = DomainSpec::torus(2.0, 0.0, 1.0).unwrap();
        let small = AxisBox::new([-2.0, -2.0, -1.0], [2.0, 2.0, 1.0]);
        assert!(matches!(
            build_grid(&dom, &gp, [0.2; 3], Some(small)),
            Err(GridError::InsufficientMargin(_))
        ));
        let gp2 = GreinerParams::new(2, 1).unwrap();
        assert!(matches!(
            build_grid(&dom, &gp2, [0.2; 3], None),
            Err(GridError::UnsupportedDimension(2))
        ));
        assert!(matches!(
            build_grid(&dom, &gp, [0.0, 0.2, 0.2], None),
            Err(GridError::InvalidSpacing)
        ));
    }

    #[test]
    fn default_box_is_padded() {
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::greiner_ball(1.0).unwrap();
        let grid = build_grid(&dom, &gp, [0.1; 3], None).unwrap();
        assert!(grid.len() > 100);
        assert!((grid.origin()[0] + 1.2).abs() < 1e-12);
    }

    #[test]
    fn operator_is_symmetric_psd_and_gram() {
        let (grid, gp) = torus_grid(0.4);
        let fields = assemble_difference_fields(&grid, &gp, OperatorMode::Greiner).unwrap();
        let a = assemble_dirichlet_operator(&grid, &gp, OperatorMode::Greiner).unwrap();
        assert_eq!(a.symmetry_defect(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let quad = crate::sparse::dot(&v, &a.mul_vec(&v));
            let gram: f64 = fields
                .iter()
                .map(|d| {
                    let dv = d.mul_vec(&v);
                    crate::sparse::dot(&dv, &dv)
                })
                .sum();
            assert!(quad >= -1e-10 * crate::sparse::dot(&v, &v) * a.max_abs());
            assert!((quad - gram).abs() <= 1e-12 * gram.abs());
        }
    }

    #[test]
    fn heisenberg_coefficients() {
        let gp = GreinerParams::heisenberg();
        assert_eq!(field_coefficients(&gp, 0.3, -0.7), (-1.4, -0.6));
        let gp2 = GreinerParams::new(1, 2).unwrap();
        assert_eq!(field_coefficients(&gp2, 0.0, 0.0), (0.0, 0.0));
        // 2σ y |z|^2 with σ = 2 at (1, 1): 4·1·2
        assert_eq!(field_coefficients(&gp2, 1.0, 1.0), (8.0, -8.0));
    }

    #[test]
    fn multipliers_are_node_coordinates() {
        let (grid, _) = torus_grid(0.4);
        let bs = assemble_multipliers(&grid);
        assert_eq!(bs.len(), 2);
        for u in 0..grid.len() {
            let c = grid.coords(u);
            assert_eq!(bs[0].get(u, u), c[0]);
            assert_eq!(bs[1].get(u, u), c[1]);
            assert!(c[0] >= -3.2 && c[0] <= 3.2);
        }
        let ab = bs[0].matmul(&bs[1]).unwrap();
        let ba = bs[1].matmul(&bs[0]).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn skew_fields_are_exactly_skew() {
        for sigma in 1..=2 {
            let (grid, _) = torus_grid(0.4);
            let gp = GreinerParams::new(1, sigma).unwrap();
            for t in assemble_skew_fields(&grid, &gp).unwrap() {
                assert_eq!(t.skew_defect(), 0.0);
            }
        }
    }

    #[test]
    fn centered_stencil_on_a_line() {
        // Three interior nodes along x; t and y have a single interior layer.
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::Generic(GenericDomain::open_box(
            vec![0.0, 0.0, 0.0],
            vec![2.0, 0.5, 0.5],
        ));
        let bbox = AxisBox::new([-2.0, -1.0, -1.0], [2.0, 1.0, 1.0]);
        let grid = build_grid(&dom, &gp, [1.0; 3], Some(bbox)).unwrap();
        assert_eq!(grid.len(), 3);
        let t = &assemble_skew_fields(&grid, &gp).unwrap()[0];
        // y = t = 0 on this line, so the ∂t part vanishes.
        let expect = [[0.0, 0.5, 0.0], [-0.5, 0.0, 0.5], [0.0, -0.5, 0.0]];
        for (r, row) in expect.iter().enumerate() {
            for (c, &want) in row.iter().enumerate() {
                assert_eq!(t.get(r, c), want);
            }
        }
    }

    #[test]
    fn proxy_is_square() {
        let (grid, gp) = torus_grid(0.4);
        let a = assemble_dirichlet_operator(&grid, &gp, OperatorMode::Greiner).unwrap();
        let a2 = clamped_proxy(&a).unwrap();
        assert_eq!(a2.symmetry_defect(), 0.0);
        let v = grid.sample(|c| (c[0] * 0.3).sin() + c[2]);
        let lhs = a2.mul_vec(&v);
        let rhs = a.mul_vec(&a.mul_vec(&v));
        let scale = a.max_abs().powi(2) * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    fn bump(c: [f64; 3]) -> f64 {
        // C^5 bump of radius 0.9 centred on the core circle point (2, 0, 0).
        let r2 = (c[0] - 2.0).powi(2) + c[1].powi(2) + c[2].powi(2);
        (1.0 - r2 / 0.81).max(0.0).powi(6)
    }

    fn defect_at(h: f64, sigma: u32) -> [f64; 2] {
        let gp = GreinerParams::new(1, sigma).unwrap();
        let dom = DomainSpec::torus(2.0, 0.0, 1.0).unwrap();
        let bbox = AxisBox::new([-3.2, -3.2, -1.2], [3.2, 3.2, 1.2]);
        let grid = build_grid(&dom, &gp, [h; 3], Some(bbox)).unwrap();
        let a = assemble_dirichlet_operator(&grid, &gp, OperatorMode::Greiner).unwrap();
        let bs = assemble_multipliers(&grid);
        let ts = assemble_skew_fields(&grid, &gp).unwrap();
        let v = grid.sample(bump);
        [0, 1].map(|p| commutator_defect(&a, &bs[p], &ts[p], &v))
    }

    #[test]
    fn commutator_identity_is_second_order() {
        for sigma in 1..=2 {
            let coarse = defect_at(0.1, sigma);
            let fine = defect_at(0.05, sigma);
            for p in 0..2 {
                let ratio = coarse[p] / fine[p];
                assert!((3.5..4.5).contains(&ratio), "sigma {sigma} field {p}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn euclidean_mode_is_seven_point_laplacian() {
        let gp = GreinerParams::heisenberg();
        let dom = DomainSpec::Generic(GenericDomain::open_box(vec![0.0; 3], vec![1.0; 3]));
        let bbox = AxisBox::new([-1.0; 3], [1.0; 3]);
        let grid = build_grid(&dom, &gp, [0.5; 3], Some(bbox)).unwrap();
        assert_eq!(grid.len(), 27);
        let a = assemble_dirichlet_operator(&grid, &gp, OperatorMode::Euclidean).unwrap();
        let center = grid.unknown_at([2, 2, 2]).unwrap();
        assert_eq!(a.get(center, center), 6.0 / 0.25);
        let nb = grid.unknown_at([3, 2, 2]).unwrap();
        assert_eq!(a.get(center, nb), -1.0 / 0.25);
        assert_eq!(a.as_csr().row(center).count(), 7);
    }
}
