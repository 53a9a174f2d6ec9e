//! Networkless decoupling and matching for a three-element array.
//!
//! Instead of a passive network, each element is driven by a generator with
//! internal impedance `Z_i`, and the centre generator's voltage is a linear
//! combination `u03 = g (u01 + u02)` of the outer ones. For an array matrix
//! `[[a, b, c], [b, a, c], [c, c, a]]` the choice of `Z_i` and `g` below makes
//! every element see a conjugate-matched source. Each generator then reaches
//! its element through an L-section that turns the 50 Ω source into `Z_i`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lumped::{ComponentKind, LumpedComponent};

const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NdmError {
    #[error("impedance matrix must be 3x3, got {0}x{1}")]
    Shape(usize, usize),
    #[error("impedance matrix lacks the [[a,b,c],[b,a,c],[c,c,a]] structure (deviation {0:.3e})")]
    Structure(f64),
    #[error("outer elements are uncoupled (b = 0): centre source impedance is undefined")]
    Uncoupled,
    #[error("coupling gain denominator vanishes (Re a = Re b or c = 0)")]
    GainPole,
    #[error("source impedance {0} has non-positive real part")]
    NonPassiveSource(Complex64),
    #[error("port {0}: driven system is singular")]
    Singular(usize),
    #[error("source resistance must be positive, got {0}")]
    SourceResistance(f64),
    #[error("target impedance {0} has non-positive real part")]
    Target(Complex64),
    #[error("voltage transfer of port {0} is zero")]
    ZeroTransfer(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NdmSolution {
    /// Generator impedances `Z1 = Z2`, `Z3`.
    pub z_sources: [Complex64; 3],
    pub g1: Complex64,
    pub g2: Complex64,
    /// Gain from the alternative textbook form whose denominator is
    /// `(b - a + Z1) c`; kept for comparison only, it does not match.
    pub g_alternative: Option<Complex64>,
    /// Voltage division factors `u_i / u0_i` at conjugate match.
    pub x: [Complex64; 3],
}

fn structured(z: &DMatrix<Complex64>) -> Result<Matrix3<Complex64>, NdmError> {
    if z.nrows() != 3 || z.ncols() != 3 {
        return Err(NdmError::Shape(z.nrows(), z.ncols()));
    }
    let m = Matrix3::from_fn(|i, j| z[(i, j)]);
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    let ideal = Matrix3::new(a, b, c, b, a, c, c, c, a);
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let dev = (m - ideal).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if dev > STRUCTURE_TOL * scale {
        return Err(NdmError::Structure(dev / scale));
    }
    Ok(ideal)
}

fn division_factor(z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * z.arg())).inv()
}

pub fn ndm_solve(z: &DMatrix<Complex64>) -> Result<NdmSolution, NdmError> {
    let m = structured(z)?;
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(0, 2)]);
    let scale = a.norm().max(b.norm()).max(c.norm());
    if b.norm() <= 1e-15 * scale {
        return Err(NdmError::Uncoupled);
    }
    let z1 = (a - b).conj();
    let z3 = (a - c * c / b).conj();
    let numerator = -c * c + (a + z3) * b;
    let denominator = (b - a - z1) * c;
    if denominator.norm() <= 1e-15 * scale * scale {
        return Err(NdmError::GainPole);
    }
    let g = numerator / denominator;
    let alt_den = (b - a + z1) * c;
    let g_alternative = (alt_den.norm() > 1e-15 * scale * scale).then(|| numerator / alt_den);
    Ok(NdmSolution {
        z_sources: [z1, z1, z3],
        g1: g,
        g2: g,
        g_alternative,
        x: [division_factor(z1), division_factor(z1), division_factor(z3)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    /// Worst per-port `|u_i - x_i u0_i| / |u0_i|`.
    pub residual: f64,
    /// Worst column deviation of `(I - Z0 (Z0 + Z)^-1) G` from `diag(x) G`.
    pub division_residual: f64,
    pub currents: [Complex64; 3],
    pub voltages: [Complex64; 3],
    /// Power absorbed by the array, W (peak phasors).
    pub delivered_power_w: f64,
    /// Sum of generator available powers, W.
    pub available_power_w: f64,
}

/// Drives the array from the solved generators and measures how far each
/// port is from conjugate match.
pub fn verify_matching(
    z: &DMatrix<Complex64>,
    sol: &NdmSolution,
    u01: Complex64,
    u02: Complex64,
) -> Result<MatchingReport, NdmError> {
    let m = structured(z)?;
    let z0 = Matrix3::from_diagonal(&Vector3::from(sol.z_sources));
    let lu = (z0 + m).lu();
    let inv = lu.try_inverse().ok_or(NdmError::Singular(0))?;
    let u0 = Vector3::new(u01, u02, sol.g1 * u01 + sol.g2 * u02);
    let i = inv * u0;
    let u = m * i;

    let mut residual: f64 = 0.0;
    for k in 0..3 {
        if u0[k].norm() > 0.0 {
            residual = residual.max((u[k] - sol.x[k] * u0[k]).norm() / u0[k].norm());
        } else if u[k].norm() > 0.0 {
            residual = f64::INFINITY;
        }
    }

    let through = Matrix3::identity() - z0 * inv;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let g = nalgebra::Matrix3x2::new(one, zero, zero, one, sol.g1, sol.g2);
    let lhs = through * g;
    let rhs = Matrix3::from_diagonal(&Vector3::from(sol.x)) * g;
    let mut division_residual: f64 = 0.0;
    for col in 0..2 {
        let norm = rhs.column(col).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let dev = (lhs.column(col) - rhs.column(col)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        division_residual = division_residual.max(dev / norm);
    }

    let delivered = 0.5 * (0..3).map(|k| (i[k].conj() * u[k]).re).sum::<f64>();
    let mut available = 0.0;
    for k in 0..3 {
        let rz = sol.z_sources[k].re;
        if !(rz > 0.0) {
            return Err(NdmError::NonPassiveSource(sol.z_sources[k]));
        }
        available += u0[k].norm_sqr() / (8.0 * rz);
    }

    Ok(MatchingReport {
        residual,
        division_residual,
        currents: [i[0], i[1], i[2]],
        voltages: [u[0], u[1], u[2]],
        delivered_power_w: delivered,
        available_power_w: available,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Series,
    Shunt,
}

/// One reactive element of a matching section, sized at the design
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactiveElement {
    pub placement: Placement,
    pub reactance_ohm: f64,
}

impl ReactiveElement {
    /// Inductor for positive reactance, capacitor otherwise.
    pub fn component(&self, f_r: f64) -> LumpedComponent {
        let w = 2.0 * PI * f_r;
        if self.reactance_ohm > 0.0 {
            LumpedComponent { kind: ComponentKind::Inductor, value: self.reactance_ohm / w, q: None }
        } else {
            LumpedComponent { kind: ComponentKind::Capacitor, value: -1.0 / (w * self.reactance_ohm), q: None }
        }
    }
}

/// Lossless two-port from a source of resistance `r` to a port whose
/// Thevenin impedance is the target. Elements are listed from the source
/// side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSection {
    pub elements: Vec<ReactiveElement>,
    /// Open-circuit output voltage per unit source EMF.
    pub voltage_transfer: Complex64,
    /// Impedance seen looking back into the section from the target side.
    pub thevenin_impedance: Complex64,
}

/// ABCD matrix of a cascade of reactive elements at `frequency`, each
/// element scaled from its design reactance at `f_r`.
pub fn cascade_abcd(elements: &[ReactiveElement], f_r: f64, frequency: f64) -> Matrix2<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let ratio = frequency / f_r;
    elements.iter().fold(Matrix2::identity(), |acc, e| {
        let x = if e.reactance_ohm > 0.0 { e.reactance_ohm * ratio } else { e.reactance_ohm / ratio };
        let z = Complex64::new(0.0, x);
        let stage = match e.placement {
            Placement::Series => Matrix2::new(one, z, zero, one),
            Placement::Shunt => Matrix2::new(one, zero, z.inv(), one),
        };
        acc * stage
    })
}

/// Thevenin transfer and impedance of an ABCD two-port fed from `r`.
pub fn thevenin(abcd: &Matrix2<Complex64>, r: f64) -> (Complex64, Complex64) {
    let den = abcd[(0, 0)] + abcd[(1, 0)] * r;
    (den.inv(), (abcd[(0, 1)] + abcd[(1, 1)] * r) / den)
}

pub fn l_section_match(z_target: Complex64, r: f64, f_r: f64) -> Result<LSection, NdmError> {
    if !(r > 0.0) {
        return Err(NdmError::SourceResistance(r));
    }
    if !(z_target.re > 0.0) {
        return Err(NdmError::Target(z_target));
    }
    let tol = 1e-12 * r;
    let mut elements = Vec::new();
    if (z_target.re - r).abs() <= tol {
        if z_target.im.abs() > tol {
            elements.push(ReactiveElement { placement: Placement::Series, reactance_ohm: z_target.im });
        }
    } else if z_target.re < r {
        let xp = r * (z_target.re / (r - z_target.re)).sqrt();
        let parallel = Complex64::new(r, 0.0) * Complex64::new(0.0, xp) / Complex64::new(r, xp);
        let xs = z_target.im - parallel.im;
        elements.push(ReactiveElement { placement: Placement::Shunt, reactance_ohm: xp });
        if xs.abs() > tol {
            elements.push(ReactiveElement { placement: Placement::Series, reactance_ohm: xs });
        }
    } else {
        let yt = z_target.inv();
        let xs = (r / yt.re - r * r).max(0.0).sqrt();
        let bp = yt.im + xs / (r * r + xs * xs);
        elements.push(ReactiveElement { placement: Placement::Series, reactance_ohm: xs });
        if bp.abs() > 1e-12 / r {
            elements.push(ReactiveElement { placement: Placement::Shunt, reactance_ohm: -1.0 / bp });
        }
    }
    let (voltage_transfer, thevenin_impedance) = thevenin(&cascade_abcd(&elements, f_r, f_r), r);
    Ok(LSection { elements, voltage_transfer, thevenin_impedance })
}

pub fn compensate_drives(u0: [Complex64; 3], transfers: [Complex64; 3]) -> Result<[Complex64; 3], NdmError> {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        if transfers[k].norm() == 0.0 {
            return Err(NdmError::ZeroTransfer(k + 1));
        }
        out[k] = u0[k] / transfers[k];
    }
    Ok(out)
}

/// Complete networkless design: generators, matching sections and the
/// controlled-source gains needed on the 50 Ω side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdmDesign {
    pub solution: NdmSolution,
    pub source_resistance_ohm: f64,
    pub reference_frequency_hz: f64,
    pub u0: [Complex64; 3],
    pub u0_prime: [Complex64; 3],
    pub matching_sections: [LSection; 3],
    /// Gains from the outer 50 Ω-side EMFs to the centre one.
    pub vcvs_gains: [Complex64; 2],
}

pub fn design_ndm(
    z: &DMatrix<Complex64>,
    r: f64,
    f_r: f64,
    u01: Complex64,
    u02: Complex64,
) -> Result<NdmDesign, NdmError> {
    let solution = ndm_solve(z)?;
    let sections = [
        l_section_match(solution.z_sources[0], r, f_r)?,
        l_section_match(solution.z_sources[1], r, f_r)?,
        l_section_match(solution.z_sources[2], r, f_r)?,
    ];
    let t = [sections[0].voltage_transfer, sections[1].voltage_transfer, sections[2].voltage_transfer];
    let u0 = [u01, u02, solution.g1 * u01 + solution.g2 * u02];
    let u0_prime = compensate_drives(u0, t)?;
    let vcvs_gains = [solution.g1 * t[0] / t[2], solution.g2 * t[1] / t[2]];
    Ok(NdmDesign {
        solution,
        source_resistance_ohm: r,
        reference_frequency_hz: f_r,
        u0,
        u0_prime,
        matching_sections: sections,
        vcvs_gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::structured_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table() -> DMatrix<Complex64> {
        structured_matrix(c(73.05, 42.44), c(40.74, -28.31), Some(c(64.11, -0.074)))
    }

    #[test]
    fn outer_sources() {
        let s = ndm_solve(&table()).unwrap();
        assert!((s.z_sources[0] - c(32.31, -70.75)).norm() < 1e-9);
        assert_eq!(s.z_sources[0], s.z_sources[1]);
        assert_eq!(s.g1, s.g2);
    }

    #[test]
    fn gain_matches_published_magnitude() {
        let s = ndm_solve(&table()).unwrap();
        assert!((s.g1.norm() - 0.1176).abs() < 5e-4, "{}", s.g1.norm());
        assert!((s.g1.arg().to_degrees() - 145.28).abs() < 0.05);
        assert!(s.g_alternative.is_some());
    }

    #[test]
    fn rejects_unstructured_and_uncoupled() {
        let mut z = table();
        z[(2, 2)] = c(80.0, 0.0);
        assert!(matches!(ndm_solve(&z), Err(NdmError::Structure(_))));
        let z = structured_matrix(c(73.0, 42.0), c(0.0, 0.0), Some(c(10.0, 0.0)));
        assert_eq!(ndm_solve(&z), Err(NdmError::Uncoupled));
        assert!(matches!(ndm_solve(&DMatrix::zeros(2, 2)), Err(NdmError::Shape(2, 2))));
    }

    #[test]
    fn matching_residual_on_table() {
        let z = table();
        let s = ndm_solve(&z).unwrap();
        let r = verify_matching(&z, &s, c(1.0, 0.3), c(-0.2, 0.7)).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
        assert!(r.division_residual < 1e-9);
        assert!(((r.delivered_power_w - r.available_power_w) / r.available_power_w).abs() < 1e-9);
    }

    #[test]
    fn zero_drive_has_zero_residual() {
        let z = table();
        let s = ndm_solve(&z).unwrap();
        let r = verify_matching(&z, &s, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.currents.iter().all(|i| i.norm() == 0.0));
    }

    #[test]
    fn perturbed_source_breaks_matching() {
        let z = table();
        let mut s = ndm_solve(&z).unwrap();
        s.z_sources[0] += 1.0;
        let r = verify_matching(&z, &s, c(1.0, 0.0), c(0.5, -0.5)).unwrap();
        assert!(r.residual > 1e-3);
    }

    #[test]
    fn l_section_hits_targets() {
        for target in [c(32.31, -70.75), c(4.09, 4.66), c(120.0, 35.0), c(80.0, -60.0), c(50.0, 20.0)] {
            let l = l_section_match(target, 50.0, 3e9).unwrap();
            assert!((l.thevenin_impedance - target).norm() < 1e-9 * target.norm(), "{target}");
            assert!(l.elements.len() <= 2);
        }
    }

    #[test]
    fn l_section_topology() {
        let low = l_section_match(c(4.09, 4.66), 50.0, 3e9).unwrap();
        assert_eq!(low.elements[0].placement, Placement::Shunt);
        let high = l_section_match(c(120.0, 35.0), 50.0, 3e9).unwrap();
        assert_eq!(high.elements[0].placement, Placement::Series);
        let series = l_section_match(c(50.0, 20.0), 50.0, 3e9).unwrap();
        assert_eq!(series.elements.len(), 1);
    }

    #[test]
    fn matched_target_needs_nothing() {
        let l = l_section_match(c(50.0, 0.0), 50.0, 3e9).unwrap();
        assert!(l.elements.is_empty());
        assert_eq!(l.voltage_transfer, c(1.0, 0.0));
    }

    #[test]
    fn compensation_definition() {
        let u = [c(1.0, 0.0); 3];
        assert_eq!(compensate_drives(u, [c(1.0, 0.0); 3]).unwrap(), u);
        let t = Complex64::from_polar(2.0, PI / 2.0);
        let out = compensate_drives(u, [t; 3]).unwrap();
        assert!((out[0] - Complex64::from_polar(0.5, -PI / 2.0)).norm() < 1e-15);
        assert_eq!(compensate_drives(u, [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]), Err(NdmError::ZeroTransfer(2)));
    }

    #[test]
    fn element_realization() {
        let l = ReactiveElement { placement: Placement::Series, reactance_ohm: 52.44 }.component(3e9);
        assert_eq!(l.kind, ComponentKind::Inductor);
        assert!((l.reactance(3e9) - 52.44).abs() < 1e-9);
        let c = ReactiveElement { placement: Placement::Shunt, reactance_ohm: -20.0 }.component(3e9);
        assert_eq!(c.kind, ComponentKind::Capacitor);
        assert!((c.reactance(3e9) + 20.0).abs() < 1e-9);
    }
}
