//! Boundary conditions as equivalence classes of rank-2 coefficient pairs
//! `[A | B]`, their canonical charts, self-adjointness, and the
//! separated / coupled / degenerated trichotomy.
//!
//! Two pairs `(A, B)` and `(TA, TB)` with `T` invertible describe the same
//! boundary condition; every observable here (chart point, classification,
//! self-adjointness) is invariant under that equivalence.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::mat2::{mat2_rank, rank_2x4, Mat2};
use crate::tol::{CLASS_EPS, RANK_EPS, SELF_ADJOINT_EPS};
use crate::transfer::TransferSystem;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BcError {
    #[error("coefficient pair (A, B) does not have rank 2")]
    NotRank2,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("boundary condition is not self-adjoint")]
    NotSelfAdjoint,
    #[error("boundary condition is not separated self-adjoint")]
    NotSeparated,
    #[error("boundary condition is not coupled self-adjoint")]
    NotCoupled,
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
}

/// The canonical coordinate systems: six general charts on the space of
/// boundary conditions, four self-adjoint charts on its self-adjoint
/// subspace. The digits name the column pair of `(A, B)` whose 2x2 minor is
/// normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartId {
    N12,
    N13,
    N14,
    N23,
    N24,
    N34,
    O13,
    O14,
    O23,
    O24,
}

impl ChartId {
    pub const GENERAL: [ChartId; 6] = [
        ChartId::N12,
        ChartId::N13,
        ChartId::N14,
        ChartId::N23,
        ChartId::N24,
        ChartId::N34,
    ];
    pub const SELF_ADJOINT: [ChartId; 4] = [ChartId::O13, ChartId::O14, ChartId::O23, ChartId::O24];

    pub fn is_self_adjoint_chart(self) -> bool {
        matches!(
            self,
            ChartId::O13 | ChartId::O14 | ChartId::O23 | ChartId::O24
        )
    }

    /// Column pair (0-based, over the 2x4 matrix `(A, B)`) normalized by
    /// this chart.
    pub fn minor_columns(self) -> (usize, usize) {
        match self {
            ChartId::N12 => (0, 1),
            ChartId::N13 | ChartId::O13 => (0, 2),
            ChartId::N14 | ChartId::O14 => (0, 3),
            ChartId::N23 | ChartId::O23 => (1, 2),
            ChartId::N24 | ChartId::O24 => (1, 3),
            ChartId::N34 => (2, 3),
        }
    }

    /// The value the minor columns take in normalized form.
    fn minor_target(self) -> Mat2 {
        match self {
            ChartId::N12 | ChartId::N14 | ChartId::O14 => Mat2::identity(),
            ChartId::N13 | ChartId::O13 => Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]),
            ChartId::N23 | ChartId::N34 | ChartId::O23 => {
                Mat2::from_real([[-1.0, 0.0], [0.0, -1.0]])
            }
            ChartId::N24 | ChartId::O24 => Mat2::from_real([[-1.0, 0.0], [0.0, 1.0]]),
        }
    }

    /// The two free columns, complementary to the minor pair.
    fn free_columns(self) -> (usize, usize) {
        let (c0, c1) = self.minor_columns();
        let mut free = (0..4).filter(|c| *c != c0 && *c != c1);
        (free.next().unwrap(), free.next().unwrap())
    }

    pub fn name(self) -> &'static str {
        match self {
            ChartId::N12 => "N12",
            ChartId::N13 => "N13",
            ChartId::N14 => "N14",
            ChartId::N23 => "N23",
            ChartId::N24 => "N24",
            ChartId::N34 => "N34",
            ChartId::O13 => "O13",
            ChartId::O14 => "O14",
            ChartId::O23 => "O23",
            ChartId::O24 => "O24",
        }
    }

    pub fn parse(s: &str) -> Option<ChartId> {
        match s {
            "N12" => Some(ChartId::N12),
            "N13" => Some(ChartId::N13),
            "N14" => Some(ChartId::N14),
            "N23" => Some(ChartId::N23),
            "N24" => Some(ChartId::N24),
            "N34" => Some(ChartId::N34),
            "O13" => Some(ChartId::O13),
            "O14" => Some(ChartId::O14),
            "O23" => Some(ChartId::O23),
            "O24" => Some(ChartId::O24),
            _ => None,
        }
    }
}

impl std::fmt::Display for ChartId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A boundary condition `A (y_0, f_0Δy_0)^T + B (y_N, f_NΔy_N)^T = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    pub a: Mat2,
    pub b: Mat2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcClass {
    Degenerated,
    Separated,
    Coupled,
}

impl BcClass {
    pub fn name(self) -> &'static str {
        match self {
            BcClass::Degenerated => "degenerated",
            BcClass::Separated => "separated",
            BcClass::Coupled => "coupled",
        }
    }
}

impl BoundaryCondition {
    /// Validated constructor; rejects coefficient pairs of rank below 2.
    pub fn new(a: Mat2, b: Mat2) -> Result<BoundaryCondition, BcError> {
        let bc = BoundaryCondition { a, b };
        bc.check_rank2()?;
        Ok(bc)
    }

    /// Builds from the two rows of the 2x4 matrix `(A, B)`.
    pub fn from_rows(r0: [Complex64; 4], r1: [Complex64; 4]) -> Result<BoundaryCondition, BcError> {
        BoundaryCondition::new(
            Mat2::new([[r0[0], r0[1]], [r1[0], r1[1]]]),
            Mat2::new([[r0[2], r0[3]], [r1[2], r1[3]]]),
        )
    }

    pub fn from_real_rows(rows: [[f64; 4]; 2]) -> Result<BoundaryCondition, BcError> {
        let lift = |r: [f64; 4]| {
            [
                Complex64::new(r[0], 0.0),
                Complex64::new(r[1], 0.0),
                Complex64::new(r[2], 0.0),
                Complex64::new(r[3], 0.0),
            ]
        };
        BoundaryCondition::from_rows(lift(rows[0]), lift(rows[1]))
    }

    /// Entry `(i, j)` of the 2x4 matrix `(A, B)`, `j ∈ 0..4`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if j < 2 {
            self.a.e[i][j]
        } else {
            self.b.e[i][j - 2]
        }
    }

    pub fn scale_ref(&self) -> f64 {
        self.a.max_abs().max(self.b.max_abs())
    }

    pub fn rank(&self) -> u8 {
        rank_2x4(&self.a, &self.b, self.scale_ref().max(f64::MIN_POSITIVE))
    }

    pub fn check_rank2(&self) -> Result<(), BcError> {
        if self.rank() == 2 {
            Ok(())
        } else {
            Err(BcError::NotRank2)
        }
    }

    /// The equivalent representative `(TA, TB)`.
    pub fn transformed(&self, t: &Mat2) -> BoundaryCondition {
        BoundaryCondition {
            a: t.mul(&self.a),
            b: t.mul(&self.b),
        }
    }

    /// Self-adjointness test `A E A* = B E B*` against the symplectic form,
    /// relative to the squared coefficient scale.
    pub fn is_self_adjoint(&self) -> bool {
        let e = Mat2::symplectic();
        let lhs = self.a.mul(&e).mul(&self.a.conj_transpose());
        let rhs = self.b.mul(&e).mul(&self.b.conj_transpose());
        let scale = self.a.max_abs().powi(2) + self.b.max_abs().powi(2);
        lhs.sub(&rhs).max_abs() <= SELF_ADJOINT_EPS * scale.max(f64::MIN_POSITIVE)
    }

    /// Trichotomy by block ranks: a vanishing block is degenerated, two
    /// rank-one blocks are separated, anything else is coupled.
    pub fn classify(&self) -> Result<BcClass, BcError> {
        self.check_rank2()?;
        let scale = self.scale_ref();
        let ra = mat2_rank(&self.a, scale);
        let rb = mat2_rank(&self.b, scale);
        if ra == 0 || rb == 0 {
            Ok(BcClass::Degenerated)
        } else if ra <= 1 && rb <= 1 {
            Ok(BcClass::Separated)
        } else {
            Ok(BcClass::Coupled)
        }
    }

    fn minor(&self, chart: ChartId) -> Mat2 {
        let (c0, c1) = chart.minor_columns();
        Mat2::new([
            [self.entry(0, c0), self.entry(0, c1)],
            [self.entry(1, c0), self.entry(1, c1)],
        ])
    }

    /// Normalizes into the general chart whose column-pair minor has the
    /// largest determinant magnitude; equivalent representatives select the
    /// same chart and coordinates.
    pub fn normalize_to_chart(&self) -> Result<ChartPoint, BcError> {
        let scale2 = self.scale_ref().powi(2);
        let best = ChartId::GENERAL
            .into_iter()
            .map(|c| (c, self.minor(c).det().norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if best.1 <= RANK_EPS * scale2 {
            return Err(BcError::NotRank2);
        }
        Ok(self.chart_coordinates(best.0))
    }

    /// Coordinates in a specific general chart. The chart's minor must be
    /// invertible; callers that need the numerically best chart should use
    /// [`normalize_to_chart`](Self::normalize_to_chart).
    pub fn to_chart(&self, chart: ChartId) -> Result<ChartPoint, BcError> {
        if chart.is_self_adjoint_chart() {
            return self.to_self_adjoint_chart(chart);
        }
        let scale2 = self.scale_ref().powi(2);
        if self.minor(chart).det().norm() <= RANK_EPS * scale2 {
            return Err(BcError::ChartMismatch(format!(
                "minor of columns {:?} is singular",
                chart.minor_columns()
            )));
        }
        Ok(self.chart_coordinates(chart))
    }

    fn chart_coordinates(&self, chart: ChartId) -> ChartPoint {
        let t = chart
            .minor_target()
            .mul(&self.minor(chart).inverse().unwrap());
        let norm = self.transformed(&t);
        let (f0, f1) = chart.free_columns();
        ChartPoint::General {
            chart,
            coords: [
                norm.entry(0, f0),
                norm.entry(0, f1),
                norm.entry(1, f0),
                norm.entry(1, f1),
            ],
        }
    }

    /// Normalizes a self-adjoint boundary condition into the self-adjoint
    /// chart with the largest minor determinant; every self-adjoint boundary
    /// condition lies in at least one of the four.
    pub fn self_adjoint_chart(&self) -> Result<ChartPoint, BcError> {
        let scale2 = self.scale_ref().powi(2);
        let best = ChartId::SELF_ADJOINT
            .into_iter()
            .map(|c| (c, self.minor(c).det().norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if best.1 <= RANK_EPS * scale2 {
            return Err(BcError::NotSelfAdjoint);
        }
        self.to_self_adjoint_chart(best.0)
    }

    /// Coordinates in a specific self-adjoint chart, verifying the chart's
    /// reality and conjugacy constraints.
    pub fn to_self_adjoint_chart(&self, chart: ChartId) -> Result<ChartPoint, BcError> {
        if !chart.is_self_adjoint_chart() {
            return Err(BcError::ChartMismatch(format!(
                "{chart} is not a self-adjoint chart"
            )));
        }
        let scale2 = self.scale_ref().powi(2);
        if self.minor(chart).det().norm() <= RANK_EPS * scale2 {
            return Err(BcError::ChartMismatch(format!(
                "minor of columns {:?} is singular",
                chart.minor_columns()
            )));
        }
        let ChartPoint::General { coords, .. } = self.chart_coordinates(chart) else {
            unreachable!()
        };
        // Free-slot layout, identical in all four self-adjoint charts
        // (row-major): (0, f0) = real coordinate, (0, f1) = conj(z),
        // (1, f0) = z, (1, f1) = real coordinate.
        let (a, zbar, z, b) = (coords[0], coords[1], coords[2], coords[3]);
        let tol = CLASS_EPS * (1.0 + coords.iter().map(|c| c.norm()).fold(0.0, f64::max));
        if a.im.abs() > tol || b.im.abs() > tol || (zbar - z.conj()).norm() > tol {
            return Err(BcError::NotSelfAdjoint);
        }
        Ok(ChartPoint::SelfAdjoint {
            chart,
            a: a.re,
            z,
            b: b.re,
        })
    }

    /// Recovers `(α, β)` for a separated self-adjoint boundary condition.
    pub fn separated_params(&self) -> Result<SeparatedParams, BcError> {
        if self.classify()? != BcClass::Separated {
            return Err(BcError::NotSeparated);
        }
        if !self.is_self_adjoint() {
            return Err(BcError::NotSelfAdjoint);
        }
        let alpha = real_direction_angle(&self.a).ok_or(BcError::NotSeparated)?;
        let beta = real_direction_angle(&self.b).ok_or(BcError::NotSeparated)?;
        SeparatedParams::new(wrap_half_open(alpha), wrap_half_closed(beta))
    }

    /// Recovers `(γ, K)` for a coupled self-adjoint boundary condition.
    pub fn coupled_params(&self) -> Result<CoupledParams, BcError> {
        if self.classify()? != BcClass::Coupled {
            return Err(BcError::NotCoupled);
        }
        if !self.is_self_adjoint() {
            return Err(BcError::NotSelfAdjoint);
        }
        let scale2 = self.scale_ref().powi(2);
        let minor = self.minor(ChartId::N34);
        if minor.det().norm() <= RANK_EPS * scale2 {
            return Err(BcError::NotCoupled);
        }
        // Normalize to [A' | -I]; then A' = e^{iγ} K with K real, det K = 1.
        let t = ChartId::N34.minor_target().mul(&minor.inverse().unwrap());
        let a_prime = t.mul(&self.a);
        let det = a_prime.det();
        if (det.norm() - 1.0).abs() > 1e-8 {
            return Err(BcError::NotCoupled);
        }
        let mut gamma = det.arg() / 2.0;
        let mut k = a_prime.scale(Complex64::from_polar(1.0, -gamma));
        if gamma < 0.0 {
            gamma += PI;
            k = k.scale(Complex64::new(-1.0, 0.0));
        }
        if gamma >= PI - 1e-9 {
            // Same class as gamma = 0 with the sign of K flipped.
            gamma = 0.0;
            k = k.scale(Complex64::new(-1.0, 0.0));
        }
        let tol = 1e-8 * (1.0 + k.max_abs());
        if !k.is_real(tol) {
            return Err(BcError::NotCoupled);
        }
        let k_real = Mat2::from_real([[k.e[0][0].re, k.e[0][1].re], [k.e[1][0].re, k.e[1][1].re]]);
        CoupledParams::new(gamma, k_real)
    }
}

/// Angle `θ ∈ [0, π)` with row space of the rank-one block spanned by
/// `(cos θ, -sin θ)`, or `None` when the block direction is not real up to
/// a phase.
fn real_direction_angle(block: &Mat2) -> Option<f64> {
    let rows = [
        [block.e[0][0], block.e[0][1]],
        [block.e[1][0], block.e[1][1]],
    ];
    let norms: Vec<f64> = rows.iter().map(|r| r[0].norm().max(r[1].norm())).collect();
    let i = if norms[0] >= norms[1] { 0 } else { 1 };
    let v = rows[i];
    let pivot = if v[0].norm() >= v[1].norm() {
        v[0]
    } else {
        v[1]
    };
    let phase = Complex64::from_polar(1.0, -pivot.arg());
    let r0 = v[0] * phase;
    let r1 = v[1] * phase;
    let tol = 1e-8 * norms[i];
    if r0.im.abs() > tol || r1.im.abs() > tol {
        return None;
    }
    Some(f64::atan2(-r1.re, r0.re))
}

fn wrap_half_open(x: f64) -> f64 {
    // Into [0, π). Values within rounding of π describe the same direction
    // as 0 and snap there.
    let y = x.rem_euclid(PI);
    if y >= PI - 1e-9 {
        0.0
    } else {
        y
    }
}

fn wrap_half_closed(x: f64) -> f64 {
    // Into (0, π]. Values within rounding of 0 describe the same direction
    // as π and snap there.
    let y = x.rem_euclid(PI);
    if y <= 1e-9 {
        PI
    } else {
        y
    }
}

/// A point of a chart: the chart id plus the free coordinates, from which
/// the normalized coefficient pair is reconstructed exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartPoint {
    General {
        chart: ChartId,
        coords: [Complex64; 4],
    },
    SelfAdjoint {
        chart: ChartId,
        a: f64,
        z: Complex64,
        b: f64,
    },
}

impl ChartPoint {
    pub fn chart(&self) -> ChartId {
        match self {
            ChartPoint::General { chart, .. } => *chart,
            ChartPoint::SelfAdjoint { chart, .. } => *chart,
        }
    }

    /// Rebuilds the normalized coefficient pair.
    pub fn reconstruct(&self) -> BoundaryCondition {
        match self {
            ChartPoint::General { chart, coords } => {
                let mut rows = [[Complex64::default(); 4]; 2];
                let (c0, c1) = chart.minor_columns();
                let target = chart.minor_target();
                for i in 0..2 {
                    rows[i][c0] = target.e[i][0];
                    rows[i][c1] = target.e[i][1];
                }
                let (f0, f1) = chart.free_columns();
                rows[0][f0] = coords[0];
                rows[0][f1] = coords[1];
                rows[1][f0] = coords[2];
                rows[1][f1] = coords[3];
                BoundaryCondition {
                    a: Mat2::new([[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]]),
                    b: Mat2::new([[rows[0][2], rows[0][3]], [rows[1][2], rows[1][3]]]),
                }
            }
            ChartPoint::SelfAdjoint { chart, a, z, b } => ChartPoint::General {
                chart: *chart,
                coords: [
                    Complex64::new(*a, 0.0),
                    z.conj(),
                    *z,
                    Complex64::new(*b, 0.0),
                ],
            }
            .reconstruct(),
        }
    }

    /// Coordinate distance between two points of the same chart, infinite
    /// across different charts.
    pub fn distance(&self, other: &ChartPoint) -> f64 {
        match (self, other) {
            (
                ChartPoint::General {
                    chart: c1,
                    coords: x,
                },
                ChartPoint::General {
                    chart: c2,
                    coords: y,
                },
            ) if c1 == c2 => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
            (
                ChartPoint::SelfAdjoint {
                    chart: c1,
                    a: a1,
                    z: z1,
                    b: b1,
                },
                ChartPoint::SelfAdjoint {
                    chart: c2,
                    a: a2,
                    z: z2,
                    b: b2,
                },
            ) if c1 == c2 => ((a1 - a2).abs().max((b1 - b2).abs())).max((z1 - z2).norm()),
            _ => f64::INFINITY,
        }
    }
}

/// Parameters of a separated self-adjoint boundary condition
/// `S_{α,β} = [[cos α, -sin α, 0, 0], [0, 0, cos β, -sin β]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparatedParams {
    pub alpha: f64,
    pub beta: f64,
}

impl SeparatedParams {
    pub fn new(alpha: f64, beta: f64) -> Result<SeparatedParams, BcError> {
        if !(0.0..PI).contains(&alpha) {
            return Err(BcError::ParamOutOfRange(format!(
                "alpha = {alpha} outside [0, pi)"
            )));
        }
        if !(beta > 0.0 && beta <= PI) {
            return Err(BcError::ParamOutOfRange(format!(
                "beta = {beta} outside (0, pi]"
            )));
        }
        Ok(SeparatedParams { alpha, beta })
    }

    pub fn bc(&self) -> BoundaryCondition {
        BoundaryCondition {
            a: Mat2::from_real([[self.alpha.cos(), -self.alpha.sin()], [0.0, 0.0]]),
            b: Mat2::from_real([[0.0, 0.0], [self.beta.cos(), -self.beta.sin()]]),
        }
    }
}

/// Parameters of a coupled self-adjoint boundary condition
/// `[e^{iγ} K | -I]` with `K` real of determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledParams {
    pub gamma: f64,
    pub k: Mat2,
}

impl CoupledParams {
    pub fn new(gamma: f64, k: Mat2) -> Result<CoupledParams, BcError> {
        if !(0.0..PI).contains(&gamma) {
            return Err(BcError::ParamOutOfRange(format!(
                "gamma = {gamma} outside [0, pi)"
            )));
        }
        if !k.is_real(1e-10 * (1.0 + k.max_abs())) {
            return Err(BcError::ParamOutOfRange("K must be real".into()));
        }
        if (k.det() - Complex64::new(1.0, 0.0)).norm() > 1e-10 * (1.0 + k.max_abs().powi(2)) {
            return Err(BcError::ParamOutOfRange(format!(
                "det K = {} but must be 1",
                k.det()
            )));
        }
        Ok(CoupledParams { gamma, k })
    }

    pub fn bc(&self) -> BoundaryCondition {
        let phase = Complex64::from_polar(1.0, self.gamma);
        BoundaryCondition {
            a: self.k.scale(phase),
            b: Mat2::identity().scale(Complex64::new(-1.0, 0.0)),
        }
    }
}

/// Canonical boundary condition from separated or coupled parameters.
pub fn canonical_bc(params: &CanonicalParams) -> BoundaryCondition {
    match params {
        CanonicalParams::Separated(p) => p.bc(),
        CanonicalParams::Coupled(p) => p.bc(),
    }
}

#[derive(Clone, Debug)]
pub enum CanonicalParams {
    Separated(SeparatedParams),
    Coupled(CoupledParams),
}

/// The unique boundary condition with `λ` as an eigenvalue of geometric
/// multiplicity two: `[Φ_N(λ) | -I]`.
pub fn double_eigenvalue_bc(ts: &TransferSystem, lambda: Complex64) -> BoundaryCondition {
    BoundaryCondition {
        a: ts.phi_end_at(lambda),
        b: Mat2::identity().scale(Complex64::new(-1.0, 0.0)),
    }
}

/// A tangent direction `(H | L)` at a chart: entries outside the chart's
/// free slots vanish, and in the self-adjoint charts the reality and
/// conjugacy constraints hold by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BcTangent {
    pub chart: ChartId,
    pub h: Mat2,
    pub l: Mat2,
}

impl BcTangent {
    /// Tangent in a general chart, given the four free-slot displacements in
    /// chart coordinate order.
    pub fn general(chart: ChartId, coords: [Complex64; 4]) -> Result<BcTangent, BcError> {
        if chart.is_self_adjoint_chart() {
            return Err(BcError::ChartMismatch(format!(
                "{chart} requires a self-adjoint tangent"
            )));
        }
        let point = ChartPoint::General { chart, coords };
        let moved = point.reconstruct();
        let zero = ChartPoint::General {
            chart,
            coords: [Complex64::default(); 4],
        }
        .reconstruct();
        Ok(BcTangent {
            chart,
            h: moved.a.sub(&zero.a),
            l: moved.b.sub(&zero.b),
        })
    }

    /// Tangent in a self-adjoint chart: displacements of the two real
    /// coordinates and of the complex one.
    pub fn self_adjoint(
        chart: ChartId,
        da: f64,
        dz: Complex64,
        db: f64,
    ) -> Result<BcTangent, BcError> {
        if !chart.is_self_adjoint_chart() {
            return Err(BcError::ChartMismatch(format!(
                "{chart} is not a self-adjoint chart"
            )));
        }
        let point = ChartPoint::SelfAdjoint {
            chart,
            a: da,
            z: dz,
            b: db,
        };
        let moved = point.reconstruct();
        let zero = ChartPoint::SelfAdjoint {
            chart,
            a: 0.0,
            z: Complex64::default(),
            b: 0.0,
        }
        .reconstruct();
        Ok(BcTangent {
            chart,
            h: moved.a.sub(&zero.a),
            l: moved.b.sub(&zero.b),
        })
    }

    /// Free-slot displacements in chart coordinate order.
    pub fn general_coords(&self) -> [Complex64; 4] {
        let (f0, f1) = self.chart.free_columns();
        let entry = |i: usize, j: usize| {
            if j < 2 {
                self.h.e[i][j]
            } else {
                self.l.e[i][j - 2]
            }
        };
        [entry(0, f0), entry(0, f1), entry(1, f0), entry(1, f1)]
    }

    /// `(da, dz, db)` for a self-adjoint-chart tangent.
    pub fn self_adjoint_coords(&self) -> (f64, Complex64, f64) {
        let c = self.general_coords();
        if self.chart.is_self_adjoint_chart() {
            (c[0].re, c[2], c[3].re)
        } else {
            (0.0, Complex64::default(), 0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h.max_abs() == 0.0 && self.l.max_abs() == 0.0
    }
}

/// Moves a chart point by `t` times a tangent of the same chart.
pub fn chart_step(point: &ChartPoint, tangent: &BcTangent, t: f64) -> Result<ChartPoint, BcError> {
    if point.chart() != tangent.chart {
        return Err(BcError::ChartMismatch(format!(
            "point in {} but tangent in {}",
            point.chart(),
            tangent.chart
        )));
    }
    match point {
        ChartPoint::General { chart, coords } => {
            let d = tangent.general_coords();
            let mut moved = *coords;
            for i in 0..4 {
                moved[i] += d[i] * t;
            }
            Ok(ChartPoint::General {
                chart: *chart,
                coords: moved,
            })
        }
        ChartPoint::SelfAdjoint { chart, a, z, b } => {
            let (da, dz, db) = tangent.self_adjoint_coords();
            Ok(ChartPoint::SelfAdjoint {
                chart: *chart,
                a: a + da * t,
                z: z + dz * t,
                b: b + db * t,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::{EquationClass, SlEquation};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fourier() -> SlEquation {
        SlEquation::from_real(
            &[1.0, 1.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 1.0],
            EquationClass::RealPositiveWeight,
        )
    }

    #[test]
    fn already_normalized_n12() {
        // The favoured chart is the one whose column-pair minor has the
        // largest determinant magnitude; here that is the identity block.
        let bc = BoundaryCondition::from_real_rows([[1.0, 0.0, 0.3, 0.4], [0.0, 1.0, 0.5, 0.6]])
            .unwrap();
        match bc.normalize_to_chart().unwrap() {
            ChartPoint::General { chart, coords } => {
                assert_eq!(chart, ChartId::N12);
                assert!((coords[0] - c(0.3, 0.0)).norm() < 1e-12);
                assert!((coords[1] - c(0.4, 0.0)).norm() < 1e-12);
                assert!((coords[2] - c(0.5, 0.0)).norm() < 1e-12);
                assert!((coords[3] - c(0.6, 0.0)).norm() < 1e-12);
            }
            _ => panic!("expected general chart point"),
        }
        // With a dominant B block the selection moves to the (3,4) minor;
        // coordinates in N12 are still available on request.
        let bc = BoundaryCondition::from_real_rows([[1.0, 0.0, 3.0, 4.0], [0.0, 1.0, 5.0, 6.0]])
            .unwrap();
        assert_eq!(bc.normalize_to_chart().unwrap().chart(), ChartId::N14);
        match bc.to_chart(ChartId::N12).unwrap() {
            ChartPoint::General { coords, .. } => {
                assert!((coords[0] - c(3.0, 0.0)).norm() < 1e-12);
                assert!((coords[3] - c(6.0, 0.0)).norm() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn dirichlet_like_point_lands_in_n13() {
        // S_{0,π} = [[1,0,0,0],[0,0,-1,0]]
        let bc = SeparatedParams::new(0.0, PI).unwrap().bc();
        match bc.normalize_to_chart().unwrap() {
            ChartPoint::General { chart, coords } => {
                assert_eq!(chart, ChartId::N13);
                for x in coords {
                    assert!(x.norm() < 1e-12, "coords should vanish, got {x}");
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn equivalence_invariance_of_chart_point() {
        let bc = BoundaryCondition::from_real_rows([[1.0, 0.0, 3.0, 4.0], [0.0, 1.0, 5.0, 6.0]])
            .unwrap();
        let t = Mat2::new([[c(1.0, 2.0), c(0.5, -1.0)], [c(-0.3, 0.4), c(2.0, 0.0)]]);
        let p1 = bc.normalize_to_chart().unwrap();
        let p2 = bc.transformed(&t).normalize_to_chart().unwrap();
        assert!(p1.distance(&p2) < 1e-10);
    }

    #[test]
    fn separated_canonical_forms() {
        // (α, β) = (0, π) -> [[1,0,0,0],[0,0,-1,0]]
        let bc = SeparatedParams::new(0.0, PI).unwrap().bc();
        assert!((bc.a.e[0][0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(bc.a.e[0][1].norm() < 1e-12);
        assert!((bc.b.e[1][0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(bc.b.e[1][1].norm() < 1e-12);

        // (α, β) = (3π/4, π/2) -> [[-√2/2, -√2/2, 0, 0], [0, 0, 0, -1]]
        let bc = SeparatedParams::new(3.0 * PI / 4.0, PI / 2.0).unwrap().bc();
        let s = (2.0f64).sqrt() / 2.0;
        assert!((bc.a.e[0][0] - c(-s, 0.0)).norm() < 1e-12);
        assert!((bc.a.e[0][1] - c(-s, 0.0)).norm() < 1e-12);
        assert!(bc.b.e[1][0].norm() < 1e-12);
        assert!((bc.b.e[1][1] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn canonical_coupled_identity_is_periodic_type() {
        let p = CoupledParams::new(0.0, Mat2::identity()).unwrap();
        let bc = p.bc();
        assert!((bc.a.e[0][0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((bc.b.e[0][0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(bc.is_self_adjoint());
        assert_eq!(bc.classify().unwrap(), BcClass::Coupled);
    }

    #[test]
    fn self_adjointness_fixtures() {
        assert!(SeparatedParams::new(PI / 4.0, PI / 2.0)
            .unwrap()
            .bc()
            .is_self_adjoint());

        // [e^{iπ/3} K | -I] with K = [[1,1],[0,1]]
        let k = Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]);
        let bc = CoupledParams::new(PI / 3.0, k).unwrap().bc();
        assert!(bc.is_self_adjoint());

        // Example boundary condition [[c, 2c+1, 0, 0], [0, 0, c, 1]] at
        // c = -1+i is not self-adjoint.
        let cc = c(-1.0, 1.0);
        let bc = BoundaryCondition::from_rows(
            [cc, cc * 2.0 + 1.0, c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), cc, c(1.0, 0.0)],
        )
        .unwrap();
        assert!(!bc.is_self_adjoint());
    }

    #[test]
    fn classification_fixtures() {
        let degen = BoundaryCondition::from_real_rows([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
            .unwrap();
        assert_eq!(degen.classify().unwrap(), BcClass::Degenerated);

        let sep = SeparatedParams::new(1.1, 2.2).unwrap().bc();
        assert_eq!(sep.classify().unwrap(), BcClass::Separated);

        let coupled =
            BoundaryCondition::from_real_rows([[2.0, 1.0, -1.0, 0.0], [1.0, 1.0, 0.0, -1.0]])
                .unwrap();
        assert_eq!(coupled.classify().unwrap(), BcClass::Coupled);
    }

    #[test]
    fn rank_deficient_pair_is_rejected() {
        let err = BoundaryCondition::from_real_rows([[1.0, 2.0, 0.0, 0.0], [2.0, 4.0, 0.0, 0.0]]);
        assert_eq!(err.unwrap_err(), BcError::NotRank2);
    }

    #[test]
    fn double_eigenvalue_bc_at_zero() {
        // Φ_2(0) = [[1, 2], [0, 1]] for the Fourier equation, so the
        // constructed pair is [[1,2,-1,0],[0,1,0,-1]].
        let ts = TransferSystem::build(&fourier());
        let bc = double_eigenvalue_bc(&ts, c(0.0, 0.0));
        assert!((bc.a.e[0][0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((bc.a.e[0][1] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((bc.a.e[1][0]).norm() < 1e-12);
        assert!((bc.a.e[1][1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((bc.b.e[0][0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((bc.b.e[1][1] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn chart_round_trip() {
        let bc = BoundaryCondition::from_rows(
            [c(0.3, 1.0), c(-2.0, 0.2), c(1.0, -1.0), c(0.0, 0.7)],
            [c(1.5, 0.0), c(0.1, -0.4), c(-0.6, 0.9), c(2.0, 1.0)],
        )
        .unwrap();
        let p = bc.normalize_to_chart().unwrap();
        let back = p.reconstruct().normalize_to_chart().unwrap();
        assert!(p.distance(&back) < 1e-10);
    }

    #[test]
    fn separated_params_round_trip() {
        for &(alpha, beta) in &[(0.0, PI), (1.2, 0.4), (3.0, PI / 2.0), (PI / 2.0, PI)] {
            let p = SeparatedParams::new(alpha, beta).unwrap();
            let bc = p.bc();
            // Recover from a scrambled representative.
            let t = Mat2::new([[c(0.0, 2.0), c(1.0, 0.0)], [c(-1.0, 0.5), c(0.3, 0.0)]]);
            let q = bc.transformed(&t).separated_params().unwrap();
            assert!(
                (q.alpha - alpha).abs() < 1e-9,
                "alpha {alpha} -> {}",
                q.alpha
            );
            assert!((q.beta - beta).abs() < 1e-9, "beta {beta} -> {}", q.beta);
        }
    }

    #[test]
    fn coupled_params_round_trip() {
        let k = Mat2::from_real([[2.0, 0.3], [1.0, 0.65]]);
        // det = 2*0.65 - 0.3 = 1.0
        let p = CoupledParams::new(1.0, k).unwrap();
        let bc = p.bc();
        let t = Mat2::new([[c(1.0, -1.0), c(0.2, 0.0)], [c(0.0, 0.3), c(1.0, 1.0)]]);
        let q = bc.transformed(&t).coupled_params().unwrap();
        assert!((q.gamma - 1.0).abs() < 1e-9);
        assert!(q.k.sub(&k).max_abs() < 1e-9);
    }

    #[test]
    fn canonical_params_reject_out_of_range() {
        assert!(matches!(
            SeparatedParams::new(PI, 1.0),
            Err(BcError::ParamOutOfRange(_))
        ));
        assert!(matches!(
            SeparatedParams::new(0.0, 0.0),
            Err(BcError::ParamOutOfRange(_))
        ));
        let not_unimodular = Mat2::from_real([[2.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            CoupledParams::new(0.5, not_unimodular),
            Err(BcError::ParamOutOfRange(_))
        ));
        assert!(matches!(
            CoupledParams::new(-0.1, Mat2::identity()),
            Err(BcError::ParamOutOfRange(_))
        ));
    }

    #[test]
    fn tangent_pattern_in_self_adjoint_chart() {
        let tan = BcTangent::self_adjoint(ChartId::O13, 1.0, c(2.0, -1.0), 3.0).unwrap();
        // (H | L) = [[0, 1, 0, conj(z)], [0, z, 0, 3]]
        assert!(tan.h.e[0][0].norm() < 1e-15);
        assert!((tan.h.e[0][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((tan.h.e[1][1] - c(2.0, -1.0)).norm() < 1e-15);
        assert!((tan.l.e[0][1] - c(2.0, 1.0)).norm() < 1e-15);
        assert!((tan.l.e[1][1] - c(3.0, 0.0)).norm() < 1e-15);
        assert!(tan.l.e[0][0].norm() < 1e-15);
        let (da, dz, db) = tan.self_adjoint_coords();
        assert_eq!(da, 1.0);
        assert_eq!(db, 3.0);
        assert!((dz - c(2.0, -1.0)).norm() < 1e-15);
    }
}
