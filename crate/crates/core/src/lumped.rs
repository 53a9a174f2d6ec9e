//! Lossless decoupling-and-matching four-port and its lumped LC
//! realization.
//!
//! Port order throughout is `T1, T2, A1, A2`: the two source-side ports
//! followed by the two antenna-side ports.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inverse_sqrt_spd, principal_sqrt_spd, LinalgError};

/// Admittances below this magnitude are treated as open circuits.
pub const ZERO_BRANCH_SIEMENS: f64 = 1e-12;

/// `(node_a, node_b)` for the six cross branches `Y5..Y10`.
pub const CROSS_BRANCHES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DmnError {
    #[error("antenna impedance matrix is not symmetric")]
    NotReciprocal,
    #[error("Re{{Z_AT}} is not positive definite (eigenvalue {eigenvalue:.6e} ohm): array is over-coupled")]
    OverCoupled { eigenvalue: f64 },
    #[error("source resistance must be positive, got {0}")]
    SourceResistance(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("branch admittance {0} has a real part and cannot be realized with L or C")]
    LossyBranch(Complex64),
    #[error("reference frequency must be positive, got {0}")]
    Frequency(f64),
    #[error("component has no Q factor")]
    MissingQ,
}

fn to_dmatrix(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, k| m[(i, k)])
}

fn to_matrix2(m: &DMatrix<f64>) -> Matrix2<f64> {
    Matrix2::from_fn(|i, k| m[(i, k)])
}

/// Ideal lossless reciprocal four-port described by its impedance blocks
/// `X1`, `X2` and admittance blocks `B1`, `B2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DmnAbstract {
    pub x1: Matrix2<Complex64>,
    pub x2: Matrix2<Complex64>,
    pub b1: Matrix2<Complex64>,
    pub b2: Matrix2<Complex64>,
    pub source_resistance: f64,
}

impl DmnAbstract {
    /// `[[0, X1], [X1, X2]]`
    pub fn z_mt(&self) -> Matrix4<Complex64> {
        let mut z = Matrix4::zeros();
        z.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.x1);
        z.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.x1);
        z.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.x2);
        z
    }

    /// `[[B1, B2], [B2, 0]]`
    pub fn y_mt(&self) -> Matrix4<Complex64> {
        let mut y = Matrix4::zeros();
        y.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.b1);
        y.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.b2);
        y.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.b2);
        y
    }

    /// `‖Y_MT Z_MT - I‖_max`; zero up to round-off for a consistent design.
    pub fn inverse_consistency(&self) -> f64 {
        (self.y_mt() * self.z_mt() - Matrix4::identity()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_lossless(&self) -> bool {
        [self.x1, self.x2, self.b1, self.b2].iter().all(|m| m.iter().all(|c| c.re == 0.0))
    }
}

/// Synthesizes the four-port that presents `r` at each source port and
/// isolates the two sources when the antenna ports see `z_at`.
pub fn synthesize_zmt(z_at: &Matrix2<Complex64>, r: f64) -> Result<DmnAbstract, DmnError> {
    if !(r > 0.0) {
        return Err(DmnError::SourceResistance(r));
    }
    let scale = z_at.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if (z_at[(0, 1)] - z_at[(1, 0)]).norm() > 1e-12 * scale {
        return Err(DmnError::NotReciprocal);
    }
    let re = z_at.map(|c| c.re);
    let im = z_at.map(|c| c.im);
    let re = (re + re.transpose()) * 0.5;
    let im = (im + im.transpose()) * 0.5;

    let map_pd = |e: LinalgError| match e {
        LinalgError::NotPositiveDefinite { eigenvalue } => DmnError::OverCoupled { eigenvalue },
        other => DmnError::Linalg(other),
    };
    let re_sqrt = to_matrix2(&principal_sqrt_spd(&to_dmatrix(&re)).map_err(map_pd)?);
    let re_isqrt = to_matrix2(&inverse_sqrt_spd(&to_dmatrix(&re)).map_err(map_pd)?);

    let imag = |m: Matrix2<f64>| m.map(|v| Complex64::new(0.0, v));
    let sr = r.sqrt();
    let x1 = imag(re_sqrt * -sr);
    let x2 = imag(-im);
    let b1_real = re_isqrt * im * re_isqrt * (-1.0 / r);
    let b1 = imag((b1_real + b1_real.transpose()) * 0.5);
    let b2 = imag(re_isqrt / sr);

    Ok(DmnAbstract { x1, x2, b1, b2, source_resistance: r })
}

/// The ten branch admittances `Y1..Y10` of the lumped four-port: four shunt
/// branches at `T1, T2, A1, A2`, then the cross branches in
/// [`CROSS_BRANCHES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSet {
    pub y: [Complex64; 10],
}

impl BranchSet {
    /// Branch `n` (1-based, as in `Y1..Y10`).
    pub fn get(&self, n: usize) -> Complex64 {
        self.y[n - 1]
    }

    /// Nodal admittance matrix of the branch network.
    pub fn assemble_y(&self) -> Matrix4<Complex64> {
        let mut y = Matrix4::zeros();
        for i in 0..4 {
            y[(i, i)] += self.y[i];
        }
        for (k, &(a, b)) in CROSS_BRANCHES.iter().enumerate() {
            let v = self.y[4 + k];
            y[(a, a)] += v;
            y[(b, b)] += v;
            y[(a, b)] -= v;
            y[(b, a)] -= v;
        }
        y
    }

    /// Relabels antenna ports `A1 <-> A2` and source ports `T1 <-> T2`.
    pub fn swapped(&self) -> BranchSet {
        let y = &self.y;
        BranchSet { y: [y[1], y[0], y[3], y[2], y[4], y[8], y[7], y[6], y[5], y[9]] }
    }
}

/// Node-to-branch decomposition of a four-port admittance matrix.
pub fn branches_from_y(y: &Matrix4<Complex64>) -> BranchSet {
    let mut out = [Complex64::new(0.0, 0.0); 10];
    for (i, v) in out.iter_mut().take(4).enumerate() {
        *v = y.row(i).iter().sum();
    }
    for (k, &(a, b)) in CROSS_BRANCHES.iter().enumerate() {
        out[4 + k] = -y[(a, b)];
    }
    BranchSet { y: out }
}

pub fn extract_branches(dmn: &DmnAbstract) -> BranchSet {
    branches_from_y(&dmn.y_mt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Capacitor,
    Inductor,
}

/// Manufacturer quality factor, quoted at `frequency_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSpec {
    pub q_factor: f64,
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LumpedComponent {
    pub kind: ComponentKind,
    /// Farads or henries.
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<QSpec>,
}

/// Component with its loss folded into a frequency-independent series
/// resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossyComponent {
    pub kind: ComponentKind,
    pub value: f64,
    pub series_resistance_ohm: f64,
}

impl LumpedComponent {
    pub fn with_q(mut self, q: QSpec) -> Self {
        self.q = Some(q);
        self
    }

    /// Lossless reactance at `frequency`.
    pub fn reactance(&self, frequency: f64) -> f64 {
        let w = 2.0 * PI * frequency;
        match self.kind {
            ComponentKind::Inductor => w * self.value,
            ComponentKind::Capacitor => -1.0 / (w * self.value),
        }
    }
}

/// Series resistance equivalent to the component's Q at its quoted
/// frequency.
pub fn apply_q_loss(c: &LumpedComponent) -> Result<LossyComponent, DmnError> {
    let q = c.q.ok_or(DmnError::MissingQ)?;
    let w = 2.0 * PI * q.frequency_hz;
    let rs = match c.kind {
        ComponentKind::Inductor => w * c.value / q.q_factor,
        ComponentKind::Capacitor => 1.0 / (w * c.value * q.q_factor),
    };
    Ok(LossyComponent { kind: c.kind, value: c.value, series_resistance_ohm: rs })
}

/// Realizes a purely imaginary admittance as a capacitor (`Im y > 0`) or an
/// inductor (`Im y < 0`) at `f_r`. Returns `None` for a vanishing branch.
pub fn realize_lc(y: Complex64, f_r: f64) -> Result<Option<LumpedComponent>, DmnError> {
    if !(f_r > 0.0) {
        return Err(DmnError::Frequency(f_r));
    }
    if y.norm() < ZERO_BRANCH_SIEMENS {
        return Ok(None);
    }
    if y.re.abs() > 1e-12 * y.norm() {
        return Err(DmnError::LossyBranch(y));
    }
    let w = 2.0 * PI * f_r;
    let c = if y.im > 0.0 {
        LumpedComponent { kind: ComponentKind::Capacitor, value: y.im / w, q: None }
    } else {
        LumpedComponent { kind: ComponentKind::Inductor, value: 1.0 / (y.im.abs() * w), q: None }
    };
    Ok(Some(c))
}

/// Per-branch Q values, indexed `1..=10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub entries: Vec<(usize, QSpec)>,
}

impl QTable {
    /// Manufacturer values for the published reference design.
    pub fn reference_parts() -> Self {
        let at = |q| QSpec { q_factor: q, frequency_hz: 2.4e9 };
        Self {
            entries: vec![
                (1, at(137.0)),
                (2, at(137.0)),
                (3, at(131.0)),
                (4, at(131.0)),
                (5, at(64.4)),
                (6, at(78.9)),
                (9, at(78.9)),
                (7, at(146.0)),
                (8, at(146.0)),
            ],
        }
    }

    pub fn get(&self, branch: usize) -> Option<QSpec> {
        self.entries.iter().find(|(n, _)| *n == branch).map(|&(_, q)| q)
    }
}

/// A complete lumped design: abstract four-port, branch admittances and the
/// components realizing them (`None` marks an omitted branch).
#[derive(Debug, Clone, PartialEq)]
pub struct DmnLumpedDesign {
    pub network: DmnAbstract,
    pub branches: BranchSet,
    pub components: [Option<LumpedComponent>; 10],
    pub reference_frequency: f64,
}

impl DmnLumpedDesign {
    pub fn omitted_branches(&self) -> Vec<usize> {
        (1..=10).filter(|&n| self.components[n - 1].is_none()).collect()
    }

    pub fn with_q_table(mut self, table: &QTable) -> Self {
        for (i, c) in self.components.iter_mut().enumerate() {
            if let (Some(c), Some(q)) = (c.as_mut(), table.get(i + 1)) {
                c.q = Some(q);
            }
        }
        self
    }
}

pub fn design_lumped(z_at: &Matrix2<Complex64>, r: f64, f_r: f64) -> Result<DmnLumpedDesign, DmnError> {
    let network = synthesize_zmt(z_at, r)?;
    let branches = extract_branches(&network);
    let mut components = [None; 10];
    for (slot, &y) in components.iter_mut().zip(branches.y.iter()) {
        *slot = realize_lc(y, f_r)?;
    }
    Ok(DmnLumpedDesign { network, branches, components, reference_frequency: f_r })
}
