//! Impedance matrices of side-by-side half-wave dipole arrays.
//!
//! Self and mutual impedances follow the classical induced-EMF treatment
//! of thin wires carrying sinusoidal current. Impedances are referred to
//! the feed terminals, so the dipole may be evaluated away from its
//! design frequency with its physical length held fixed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{ci, exp_integral_kernel, si, SpecialError, EULER_GAMMA};
use crate::{FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrayError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("frequency must be positive, got {0} Hz")]
    Frequency(f64),
    #[error("spacing must be positive, got {0} m")]
    Spacing(f64),
    #[error("feed current vanishes at {0} Hz (dipole is a whole number of wavelengths long)")]
    FeedNull(f64),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Parallel side-by-side dipoles of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub element_count: usize,
    pub dipole_length_m: f64,
    /// Outer element spacing. With three elements the centre one sits at
    /// half this distance from each outer element.
    pub spacing_m: f64,
    pub wire_radius_m: f64,
    pub reference_frequency_hz: f64,
}

impl ArrayGeometry {
    /// Half-wave dipoles at `reference_frequency_hz`, spaced by
    /// `spacing_wavelengths`, wire radius λ/1000.
    pub fn half_wave(element_count: usize, reference_frequency_hz: f64, spacing_wavelengths: f64) -> Self {
        let lambda = SPEED_OF_LIGHT / reference_frequency_hz;
        Self {
            element_count,
            dipole_length_m: lambda / 2.0,
            spacing_m: spacing_wavelengths * lambda,
            wire_radius_m: lambda / 1000.0,
            reference_frequency_hz,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.reference_frequency_hz
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        if !matches!(self.element_count, 2 | 3) {
            return Err(ArrayError::Geometry(format!(
                "element_count must be 2 or 3, got {}",
                self.element_count
            )));
        }
        if !(self.spacing_m > 0.0) {
            return Err(ArrayError::Spacing(self.spacing_m));
        }
        if !(self.dipole_length_m > 0.0) || !(self.reference_frequency_hz > 0.0) {
            return Err(ArrayError::Geometry("length and reference frequency must be positive".into()));
        }
        if !(self.wire_radius_m > 0.0) || self.wire_radius_m >= self.dipole_length_m / 100.0 {
            return Err(ArrayError::Geometry(format!(
                "wire radius {} m violates thin-wire limit (< length/100 = {} m)",
                self.wire_radius_m,
                self.dipole_length_m / 100.0
            )));
        }
        Ok(())
    }
}

fn wavenumber(frequency: f64) -> Result<f64, ArrayError> {
    if !(frequency > 0.0) {
        return Err(ArrayError::Frequency(frequency));
    }
    Ok(2.0 * PI * frequency / SPEED_OF_LIGHT)
}

/// Converts an impedance referred to the current maximum into one referred
/// to the centre feed: divides by `sin²(kL/2)`.
fn refer_to_feed(z: Complex64, half_kl: f64, frequency: f64) -> Result<Complex64, ArrayError> {
    let s2 = half_kl.sin().powi(2);
    if s2 < 1e-9 {
        return Err(ArrayError::FeedNull(frequency));
    }
    Ok(z / s2)
}

/// Input impedance of a centre-fed thin dipole.
pub fn dipole_self_impedance(geometry: &ArrayGeometry, frequency: f64) -> Result<Complex64, ArrayError> {
    geometry.validate()?;
    let k = wavenumber(frequency)?;
    let len = geometry.dipole_length_m;
    let kl = k * len;
    let (s, c) = kl.sin_cos();

    let (si1, ci1) = (si(kl), ci(kl)?);
    let (si2, ci2) = (si(2.0 * kl), ci(2.0 * kl)?);
    let ci_radius = ci(2.0 * k * geometry.wire_radius_m.powi(2) / len)?;

    let eta = FREE_SPACE_IMPEDANCE;
    let r = eta / (2.0 * PI)
        * (EULER_GAMMA + kl.ln() - ci1
            + 0.5 * s * (si2 - 2.0 * si1)
            + 0.5 * c * (EULER_GAMMA + (kl / 2.0).ln() + ci2 - 2.0 * ci1));
    let x = eta / (4.0 * PI) * (2.0 * si1 + c * (2.0 * si1 - si2) - s * (2.0 * ci1 - ci2 - ci_radius));

    refer_to_feed(Complex64::new(r, x), kl / 2.0, frequency)
}

/// Mutual impedance between two parallel, side-by-side dipoles of the
/// geometry's length, separated by `spacing`. Referred to the feeds.
pub fn dipole_mutual_impedance(
    spacing: f64,
    geometry: &ArrayGeometry,
    frequency: f64,
) -> Result<Complex64, ArrayError> {
    if !(spacing > 0.0) {
        return Err(ArrayError::Spacing(spacing));
    }
    let k = wavenumber(frequency)?;
    let h = geometry.dipole_length_m / 2.0;

    // ∫₀ʰ sin(k(h - z)) e^{-jkR}/R dz, R the distance to a source point at z0.
    let segment = |z0: f64| -> Result<Complex64, ArrayError> {
        let ends = |z: f64| -> Result<Complex64, ArrayError> {
            let zeta = z - z0;
            let r = spacing.hypot(zeta);
            // R ± ζ without cancellation
            let (plus, minus) = if zeta >= 0.0 {
                (r + zeta, spacing * spacing / (r + zeta))
            } else {
                (spacing * spacing / (r - zeta), r - zeta)
            };
            let phase = k * (h - z0);
            Ok(Complex64::from_polar(1.0, phase) * exp_integral_kernel(k * plus)?
                + Complex64::from_polar(1.0, -phase) * exp_integral_kernel(k * minus)?)
        };
        Ok((ends(h)? - ends(0.0)?) / Complex64::new(0.0, 2.0))
    };

    let kh = k * h;
    let total = segment(h)? + segment(-h)? - segment(0.0)? * (2.0 * kh.cos());
    let z = Complex64::new(0.0, FREE_SPACE_IMPEDANCE / (4.0 * PI)) * total * 2.0;
    refer_to_feed(z, kh, frequency)
}

/// Impedance matrix of an array at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayImpedance {
    pub frequency: f64,
    pub z_matrix: DMatrix<Complex64>,
}

impl ArrayImpedance {
    pub fn a(&self) -> Complex64 {
        self.z_matrix[(0, 0)]
    }

    pub fn b(&self) -> Complex64 {
        self.z_matrix[(0, 1)]
    }

    /// Outer-to-centre coupling; only present for three elements.
    pub fn c(&self) -> Option<Complex64> {
        (self.z_matrix.nrows() == 3).then(|| self.z_matrix[(0, 2)])
    }

    pub fn is_reciprocal(&self) -> bool {
        self.z_matrix == self.z_matrix.transpose()
    }

    /// Smallest eigenvalue of the resistive part.
    pub fn min_resistive_eigenvalue(&self) -> f64 {
        let re = self.z_matrix.map(|z| z.re);
        SymmetricEigen::new(re).eigenvalues.min()
    }
}

/// Builds the `[[a,b],[b,a]]` or `[[a,b,c],[b,a,c],[c,c,a]]` matrix.
pub fn structured_matrix(a: Complex64, b: Complex64, c: Option<Complex64>) -> DMatrix<Complex64> {
    match c {
        None => DMatrix::from_row_slice(2, 2, &[a, b, b, a]),
        Some(c) => DMatrix::from_row_slice(3, 3, &[a, b, c, b, a, c, c, c, a]),
    }
}

pub fn array_impedance(geometry: &ArrayGeometry, frequency: f64) -> Result<ArrayImpedance, ArrayError> {
    geometry.validate()?;
    let a = dipole_self_impedance(geometry, frequency)?;
    let b = dipole_mutual_impedance(geometry.spacing_m, geometry, frequency)?;
    let c = match geometry.element_count {
        3 => Some(dipole_mutual_impedance(geometry.spacing_m / 2.0, geometry, frequency)?),
        _ => None,
    };
    Ok(ArrayImpedance { frequency, z_matrix: structured_matrix(a, b, c) })
}

/// Frequency-dependent array impedance, optionally anchored so that at the
/// reference frequency it equals a supplied matrix: `Z(f) = Z_emf(f) +
/// (anchor - Z_emf(f_r))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayModel {
    pub geometry: ArrayGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<Vec<Complex64>>>,
}

impl ArrayModel {
    pub fn new(geometry: ArrayGeometry) -> Self {
        Self { geometry, anchor: None }
    }

    pub fn anchored(geometry: ArrayGeometry, anchor: &DMatrix<Complex64>) -> Self {
        let rows = anchor.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self { geometry, anchor: Some(rows) }
    }

    pub fn impedance(&self, frequency: f64) -> Result<DMatrix<Complex64>, ArrayError> {
        let z = array_impedance(&self.geometry, frequency)?.z_matrix;
        match &self.anchor {
            None => Ok(z),
            Some(rows) => {
                let n = self.geometry.element_count;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(ArrayError::Geometry(format!("anchor matrix must be {n}x{n}")));
                }
                let anchor = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
                let at_ref = array_impedance(&self.geometry, self.geometry.reference_frequency_hz)?.z_matrix;
                Ok(z + anchor - at_ref)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> ArrayGeometry {
        ArrayGeometry::half_wave(2, 3e9, 0.25)
    }

    #[test]
    fn half_wave_self_impedance() {
        let z = dipole_self_impedance(&geometry(), 3e9).unwrap();
        assert!((z.re - 73.05).abs() / 73.05 < 0.01, "{z}");
        assert!((z.im - 42.44).abs() / 42.44 < 0.05, "{z}");
    }

    #[test]
    fn quarter_wave_mutual_impedance() {
        let g = geometry();
        let z = dipole_mutual_impedance(g.spacing_m, &g, 3e9).unwrap();
        assert!((z - Complex64::new(40.74, -28.31)).norm() / Complex64::new(40.74, -28.31).norm() < 0.02);
    }

    #[test]
    fn coupling_vanishes_far_away() {
        let g = geometry();
        let z = dipole_mutual_impedance(100.0 * g.wavelength(), &g, 3e9).unwrap();
        assert!(z.norm() < 1.0);
    }

    #[test]
    fn matrix_is_exactly_symmetric() {
        for &f in &[2.5e9, 2.9e9, 3.0e9, 3.3e9] {
            for n in [2, 3] {
                let z = array_impedance(&ArrayGeometry::half_wave(n, 3e9, 0.25), f).unwrap();
                assert!(z.is_reciprocal());
                assert_eq!(z.z_matrix[(0, 0)], z.z_matrix[(1, 1)]);
            }
        }
    }

    #[test]
    fn three_element_structure() {
        let z = array_impedance(&ArrayGeometry::half_wave(3, 3e9, 0.25), 3e9).unwrap();
        assert_eq!(z.z_matrix[(2, 2)], z.a());
        assert_eq!(z.z_matrix[(1, 2)], z.c().unwrap());
        assert_eq!(z.z_matrix[(2, 0)], z.c().unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut g = geometry();
        assert!(dipole_self_impedance(&g, 0.0).is_err());
        assert!(dipole_mutual_impedance(0.0, &g, 3e9).is_err());
        g.element_count = 4;
        assert!(array_impedance(&g, 3e9).is_err());
        let mut g = geometry();
        g.wire_radius_m = g.dipole_length_m / 50.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn feed_null_detected() {
        // full-wave dipole at 2 f_r
        assert!(matches!(dipole_self_impedance(&geometry(), 6e9), Err(ArrayError::FeedNull(_))));
    }

    #[test]
    fn anchored_model_hits_anchor_at_reference() {
        let g = geometry();
        let anchor = structured_matrix(Complex64::new(73.05, 42.44), Complex64::new(40.74, -28.31), None);
        let model = ArrayModel::anchored(g, &anchor);
        let z = model.impedance(3e9).unwrap();
        assert!((z - &anchor).norm() < 1e-12);
        let off = model.impedance(2.9e9).unwrap();
        let raw = array_impedance(&g, 2.9e9).unwrap().z_matrix;
        assert!((off - raw).norm() > 0.0);
    }
}
