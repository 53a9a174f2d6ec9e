//! Ring-hybrid decoupling and matching network.
//!
//! The ring is a rat-race of characteristic impedance `z0` with ports in
//! circumferential order `T1, A1, T2, A2`: three 90° segments and one 270°
//! segment between `T2` and `A2`. `T1` sees the even array mode `a + b`
//! and `T2` the odd mode `a - b`; each is then matched to the source
//! resistance with transmission-line sections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::microstrip::{microstrip_dimensions, MicrostripError, MicrostripLine, MicrostripSpec, Substrate};

/// Ring segments as `(from, to, electrical length in degrees)`.
pub const RING_SEGMENTS: [(RingPort, RingPort, f64); 4] = [
    (RingPort::T1, RingPort::A1, 90.0),
    (RingPort::A1, RingPort::T2, 90.0),
    (RingPort::T2, RingPort::A2, 270.0),
    (RingPort::A2, RingPort::T1, 90.0),
];

pub const STUB_LENGTH_DEG: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingPort {
    T1,
    A1,
    T2,
    A2,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("degenerate array modes (a = ±b): the ring cannot separate them")]
    DegenerateModes,
    #[error("source resistance must be positive, got {0}")]
    SourceResistance(f64),
    #[error("port impedance {0} has Re = R with nonzero reactance: single-line match has a pole")]
    SingleLinePole(Complex64),
    #[error("port impedance {0} is not passive")]
    NotPassive(Complex64),
    #[error("port susceptance of {0} vanishes: stub match is degenerate")]
    DegenerateStub(Complex64),
    #[error(transparent)]
    Microstrip(#[from] MicrostripError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingPorts {
    pub z0: f64,
    pub z1: Complex64,
    pub z2: Complex64,
}

/// Ring impedance and the resulting port impedances at `T1`, `T2`.
pub fn design_ring(a: Complex64, b: Complex64, r: f64) -> Result<RingPorts, RingError> {
    if !(r > 0.0) {
        return Err(RingError::SourceResistance(r));
    }
    let even = a + b;
    let odd = a - b;
    let scale = a.norm().max(b.norm());
    if even.norm() <= 1e-12 * scale || odd.norm() <= 1e-12 * scale {
        return Err(RingError::DegenerateModes);
    }
    let z0 = (4.0 * even.norm() * odd.norm() * r * r).sqrt().sqrt();
    let half = z0 * z0 / 2.0;
    Ok(RingPorts { z0, z1: half / even, z2: half / odd })
}

/// Outcome of matching a port with one transmission line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingleLineMatch {
    Feasible {
        z0i_ohm: f64,
        /// Electrical length folded into (0°, 180°].
        theta_deg: f64,
        /// Principal arctangent before folding.
        raw_theta_deg: f64,
    },
    /// The required line impedance is imaginary (`j·z0i_imag_ohm`).
    Infeasible { z0i_imag_ohm: f64 },
}

impl SingleLineMatch {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SingleLineMatch::Feasible { .. })
    }
}

pub fn match_single_line(z: Complex64, r: f64) -> Result<SingleLineMatch, RingError> {
    if !(r > 0.0) {
        return Err(RingError::SourceResistance(r));
    }
    let gap = r - z.re;
    if gap.abs() <= 1e-12 * r {
        if z.im.abs() <= 1e-12 * r {
            return Ok(SingleLineMatch::Feasible { z0i_ohm: r, theta_deg: 0.0, raw_theta_deg: 0.0 });
        }
        return Err(RingError::SingleLinePole(z));
    }
    let radicand = r * z.re - r * z.im * z.im / gap;
    if radicand < 0.0 {
        return Ok(SingleLineMatch::Infeasible { z0i_imag_ohm: (-radicand).sqrt() });
    }
    let z0i = radicand.sqrt();
    let raw = if z.im == 0.0 { 90.0 } else { (gap * z0i / (r * z.im)).atan().to_degrees() };
    let theta = if raw <= 0.0 { raw + 180.0 } else { raw };
    Ok(SingleLineMatch::Feasible { z0i_ohm: z0i, theta_deg: theta, raw_theta_deg: raw })
}

/// Input impedance of a lossless line (`zc`, `theta_rad`) terminated in `load`.
pub fn line_input_impedance(load: Complex64, zc: f64, theta_rad: f64) -> Complex64 {
    let t = Complex64::new(0.0, theta_rad.tan());
    zc * (load + t * zc) / (zc + t * load)
}

/// `R`-impedance line that makes the port real, followed by a quarter-wave
/// transformer of impedance `z22_ohm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterWaveMatch {
    pub z21_ohm: f64,
    pub theta21_deg: f64,
    /// Real impedance seen after the first line.
    pub rx_ohm: f64,
    pub z22_ohm: f64,
}

pub fn match_t2_quarter_wave(z2: Complex64, r: f64) -> Result<QuarterWaveMatch, RingError> {
    if !(r > 0.0) {
        return Err(RingError::SourceResistance(r));
    }
    if !(z2.re > 0.0) {
        return Err(RingError::NotPassive(z2));
    }
    let gamma = (z2 - r) / (z2 + r);
    if z2.im.abs() <= 1e-12 * z2.norm() || gamma.norm() < 1e-15 {
        return Ok(QuarterWaveMatch { z21_ohm: r, theta21_deg: 0.0, rx_ohm: z2.re, z22_ohm: (r * z2.re).sqrt() });
    }
    // Γ(θ) = Γ e^{-2jθ} is real at θ = arg Γ / 2 (mod 90°)
    let half_arg = gamma.arg().to_degrees() / 2.0;
    let theta = half_arg.rem_euclid(90.0);
    let g = (gamma * Complex64::from_polar(1.0, -2.0 * theta.to_radians())).re;
    let rx = r * (1.0 + g) / (1.0 - g);
    Ok(QuarterWaveMatch { z21_ohm: r, theta21_deg: theta, rx_ohm: rx, z22_ohm: (r * rx).sqrt() })
}

/// Shunt short-circuited stub cancelling the port susceptance, followed by a
/// quarter-wave transformer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StubMatch {
    pub zs1_ohm: f64,
    /// 45° for a capacitive port (inductive stub), 135° otherwise.
    pub stub_length_deg: f64,
    pub conductance_s: f64,
    pub zs2_ohm: f64,
}

pub fn match_t2_stub(z2: Complex64, r: f64) -> Result<StubMatch, RingError> {
    if !(r > 0.0) {
        return Err(RingError::SourceResistance(r));
    }
    let y = z2.inv();
    if !(y.re > 0.0) {
        return Err(RingError::NotPassive(z2));
    }
    if y.im.abs() <= 1e-12 * y.norm() {
        return Err(RingError::DegenerateStub(z2));
    }
    let (zs1, len) = if y.im > 0.0 { (1.0 / y.im, STUB_LENGTH_DEG) } else { (-1.0 / y.im, 180.0 - STUB_LENGTH_DEG) };
    Ok(StubMatch { zs1_ohm: zs1, stub_length_deg: len, conductance_s: y.re, zs2_ohm: (r / y.re).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T2Strategy {
    QuarterWave,
    Stub,
}

/// How a ring port is brought to the source resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PortMatch {
    SingleLine { z0i_ohm: f64, theta_deg: f64 },
    QuarterWave(QuarterWaveMatch),
    Stub(StubMatch),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingHybridDesign {
    pub source_resistance_ohm: f64,
    #[serde(flatten)]
    pub ports: RingPorts,
    pub t1_single_line: SingleLineMatch,
    pub t2_single_line: SingleLineMatch,
    pub t1: PortMatch,
    pub t2: PortMatch,
}

fn port_match(z: Complex64, r: f64, single: SingleLineMatch, fallback: T2Strategy) -> Result<PortMatch, RingError> {
    match single {
        SingleLineMatch::Feasible { z0i_ohm, theta_deg, .. } => Ok(PortMatch::SingleLine { z0i_ohm, theta_deg }),
        SingleLineMatch::Infeasible { .. } => match fallback {
            T2Strategy::QuarterWave => Ok(PortMatch::QuarterWave(match_t2_quarter_wave(z, r)?)),
            T2Strategy::Stub => match match_t2_stub(z, r) {
                Ok(s) => Ok(PortMatch::Stub(s)),
                Err(RingError::DegenerateStub(_)) => Ok(PortMatch::QuarterWave(match_t2_quarter_wave(z, r)?)),
                Err(e) => Err(e),
            },
        },
    }
}

/// Full design: ring plus port matching. A port whose single-line match is
/// infeasible falls back to `strategy`.
pub fn design_ring_hybrid(a: Complex64, b: Complex64, r: f64, strategy: T2Strategy) -> Result<RingHybridDesign, RingError> {
    let ports = design_ring(a, b, r)?;
    let single = |z| match match_single_line(z, r) {
        Err(RingError::SingleLinePole(_)) => Ok(SingleLineMatch::Infeasible { z0i_imag_ohm: f64::INFINITY }),
        other => other,
    };
    let t1_single_line = single(ports.z1)?;
    let t2_single_line = single(ports.z2)?;
    let t1 = port_match(ports.z1, r, t1_single_line, strategy)?;
    let t2 = port_match(ports.z2, r, t2_single_line, strategy)?;
    Ok(RingHybridDesign { source_resistance_ohm: r, ports, t1_single_line, t2_single_line, t1, t2 })
}

/// Named microstrip realization of one line of the design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NamedLine {
    pub name: &'static str,
    #[serde(flatten)]
    pub line: MicrostripLine,
}

impl RingHybridDesign {
    /// Microstrip dimensions of every line in the design.
    pub fn microstrip_lines(&self, substrate: Substrate, frequency_hz: f64) -> Result<Vec<NamedLine>, RingError> {
        let mk = |name, z, deg| -> Result<NamedLine, RingError> {
            let spec = MicrostripSpec { target_impedance_ohm: z, electrical_length_deg: deg, substrate, frequency_hz };
            Ok(NamedLine { name, line: microstrip_dimensions(&spec)? })
        };
        let mut out = vec![mk("ring", self.ports.z0, 90.0)?];
        for (port, m) in [("t1", self.t1), ("t2", self.t2)] {
            match m {
                PortMatch::SingleLine { z0i_ohm, theta_deg } => {
                    out.push(mk(if port == "t1" { "t1_line" } else { "t2_line" }, z0i_ohm, theta_deg)?)
                }
                PortMatch::QuarterWave(q) => {
                    out.push(mk(if port == "t1" { "t1_real_line" } else { "t2_real_line" }, q.z21_ohm, q.theta21_deg)?);
                    out.push(mk(if port == "t1" { "t1_quarter_wave" } else { "t2_quarter_wave" }, q.z22_ohm, 90.0)?);
                }
                PortMatch::Stub(s) => {
                    out.push(mk(if port == "t1" { "t1_stub" } else { "t2_stub" }, s.zs1_ohm, s.stub_length_deg)?);
                    out.push(mk(if port == "t1" { "t1_quarter_wave" } else { "t2_quarter_wave" }, s.zs2_ohm, 90.0)?);
                }
            }
        }
        Ok(out)
    }
}
