//! Closed-form microstrip synthesis.
//!
//! Width comes from the Wheeler/Hammerstad synthesis branches for a
//! zero-thickness strip, then is narrowed so that the strip's effective
//! width (physical width plus the conductor-thickness increment) equals
//! the synthesized one. Effective permittivity includes the usual
//! thickness correction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT};

pub const MIN_IMPEDANCE: f64 = 10.0;
pub const MAX_IMPEDANCE: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicrostripError {
    #[error("target impedance {0} ohm outside the synthesis range [{MIN_IMPEDANCE}, {MAX_IMPEDANCE}] ohm")]
    ImpedanceRange(f64),
    #[error("invalid substrate: {0}")]
    Substrate(String),
    #[error("electrical length and frequency must be positive")]
    Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Substrate {
    pub eps_r: f64,
    pub height_m: f64,
    pub conductor_thickness_m: f64,
}

impl Substrate {
    /// Rogers RO3006, 1.52 mm, 35 µm copper.
    pub fn ro3006() -> Self {
        Self { eps_r: 6.15, height_m: 1.52e-3, conductor_thickness_m: 35e-6 }
    }

    fn validate(&self) -> Result<(), MicrostripError> {
        if !(self.eps_r > 1.0) || !(self.height_m > 0.0) || !(self.conductor_thickness_m >= 0.0) {
            return Err(MicrostripError::Substrate(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrostripSpec {
    pub target_impedance_ohm: f64,
    pub electrical_length_deg: f64,
    pub substrate: Substrate,
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrostripLine {
    #[serde(flatten)]
    pub spec: MicrostripSpec,
    pub width_m: f64,
    pub physical_length_m: f64,
    pub effective_eps: f64,
}

/// `W/h` of a zero-thickness strip with characteristic impedance `z0`.
pub fn synthesis_width_ratio(z0: f64, eps_r: f64) -> f64 {
    let a = z0 / 60.0 * ((eps_r + 1.0) / 2.0).sqrt() + (eps_r - 1.0) / (eps_r + 1.0) * (0.23 + 0.11 / eps_r);
    let narrow = 8.0 * a.exp() / ((2.0 * a).exp() - 2.0);
    if narrow < 2.0 {
        return narrow;
    }
    let b = FREE_SPACE_IMPEDANCE * std::f64::consts::PI / (2.0 * z0 * eps_r.sqrt());
    2.0 / std::f64::consts::PI
        * (b - 1.0 - (2.0 * b - 1.0).ln() + (eps_r - 1.0) / (2.0 * eps_r) * ((b - 1.0).ln() + 0.39 - 0.61 / eps_r))
}

/// Width increment due to finite conductor thickness.
fn thickness_increment(width: f64, sub: &Substrate) -> f64 {
    let t = sub.conductor_thickness_m;
    if t == 0.0 {
        return 0.0;
    }
    let arg = if width / sub.height_m >= 1.0 / (2.0 * std::f64::consts::PI) {
        2.0 * sub.height_m / t
    } else {
        4.0 * std::f64::consts::PI * width / t
    };
    t / std::f64::consts::PI * (1.0 + arg.ln())
}

pub fn effective_permittivity(width: f64, sub: &Substrate) -> f64 {
    let u = width / sub.height_m;
    let er = sub.eps_r;
    (er + 1.0) / 2.0 + (er - 1.0) / 2.0 / (1.0 + 12.0 / u).sqrt()
        - (er - 1.0) / 4.6 * (sub.conductor_thickness_m / sub.height_m) / u.sqrt()
}

/// Physical width whose thickness-corrected effective width is `target`.
fn physical_width(target: f64, sub: &Substrate) -> f64 {
    if sub.conductor_thickness_m == 0.0 {
        return target;
    }
    let f = |w: f64| w + thickness_increment(w, sub) - target;
    let mut lo = target * 1e-6;
    let mut hi = target.max(sub.conductor_thickness_m) * 4.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    while f(lo) > 0.0 {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * target {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn microstrip_dimensions(spec: &MicrostripSpec) -> Result<MicrostripLine, MicrostripError> {
    let z = spec.target_impedance_ohm;
    if !(MIN_IMPEDANCE..=MAX_IMPEDANCE).contains(&z) {
        return Err(MicrostripError::ImpedanceRange(z));
    }
    spec.substrate.validate()?;
    if !(spec.electrical_length_deg >= 0.0) || !(spec.frequency_hz > 0.0) {
        return Err(MicrostripError::Length);
    }
    let sub = &spec.substrate;
    let w_eff = synthesis_width_ratio(z, sub.eps_r) * sub.height_m;
    let width = physical_width(w_eff, sub);
    let effective_eps = effective_permittivity(width, sub);
    let lambda0 = SPEED_OF_LIGHT / spec.frequency_hz;
    let physical_length = spec.electrical_length_deg / 360.0 * lambda0 / effective_eps.sqrt();
    Ok(MicrostripLine { spec: *spec, width_m: width, physical_length_m: physical_length, effective_eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(z: f64, deg: f64) -> MicrostripSpec {
        MicrostripSpec {
            target_impedance_ohm: z,
            electrical_length_deg: deg,
            substrate: Substrate::ro3006(),
            frequency_hz: 3e9,
        }
    }

    fn within(actual: f64, expected: f64, rel: f64) -> bool {
        ((actual - expected) / expected).abs() < rel
    }

    #[test]
    fn ring_line() {
        let l = microstrip_dimensions(&spec(97.1845, 90.0)).unwrap();
        assert!(within(l.width_m, 0.4356e-3, 0.05), "{}", l.width_m);
        assert!(within(l.physical_length_m, 12.5859e-3, 0.05));
    }

    #[test]
    fn fifty_ohm_line() {
        let l = microstrip_dimensions(&spec(50.0, 51.056)).unwrap();
        assert!(within(l.width_m, 2.2016e-3, 0.05));
        assert!(within(l.physical_length_m, 6.7001e-3, 0.05));
    }

    #[test]
    fn low_impedance_line() {
        let l = microstrip_dimensions(&spec(23.3544, 90.0)).unwrap();
        assert!(within(l.width_m, 7.0753e-3, 0.05));
        assert!(within(l.physical_length_m, 11.0431e-3, 0.05));
    }

    #[test]
    fn effective_eps_bounded() {
        for z in [10.0, 25.0, 50.0, 100.0, 150.0, 200.0] {
            let l = microstrip_dimensions(&spec(z, 90.0)).unwrap();
            assert!(l.effective_eps > 1.0 && l.effective_eps < 6.15, "{z}: {}", l.effective_eps);
            assert!(l.width_m > 0.0);
        }
    }

    #[test]
    fn width_decreases_with_impedance() {
        let widths: Vec<f64> = (0..50)
            .map(|i| 10.0 + 190.0 * i as f64 / 49.0)
            .map(|z| microstrip_dimensions(&spec(z, 90.0)).unwrap().width_m)
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn out_of_range_impedance() {
        let err = microstrip_dimensions(&spec(5.0, 90.0)).unwrap_err();
        assert_eq!(err, MicrostripError::ImpedanceRange(5.0));
        assert!(err.to_string().contains("[10, 200]"));
        assert!(microstrip_dimensions(&spec(250.0, 90.0)).is_err());
    }

    #[test]
    fn zero_thickness_uses_synthesized_width() {
        let mut s = spec(50.0, 90.0);
        s.substrate.conductor_thickness_m = 0.0;
        let l = microstrip_dimensions(&s).unwrap();
        assert_eq!(l.width_m, synthesis_width_ratio(50.0, 6.15) * 1.52e-3);
    }
}
