//! Modified nodal analysis at a single frequency.
//!
//! Unknowns are the non-ground node voltages followed by one current per
//! voltage-defined branch (lines, stubs, impedance-block ports, sources and
//! ports). A branch current flows into the element at its first terminal.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::netlist::{Control, Element, Netlist, NodeId, GROUND};
use super::EngineError;

const PIVOT_TOL: f64 = 1e-13;
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Drive applied to a netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    /// EMF behind each port's reference resistance.
    pub port_emfs: Vec<Complex64>,
    /// Whether independent voltage sources keep their amplitudes.
    pub sources_active: bool,
}

impl Excitation {
    /// Unit EMF at port `k`, everything else zeroed except controlled sources.
    pub fn port(k: usize, port_count: usize) -> Self {
        let mut port_emfs = vec![Complex64::new(0.0, 0.0); port_count];
        port_emfs[k] = Complex64::new(1.0, 0.0);
        Self { port_emfs, sources_active: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub frequency_hz: f64,
    /// Indexed by node id; entry 0 is ground.
    pub voltages: Vec<Complex64>,
    /// Branch currents in element order.
    pub branch_currents: Vec<Complex64>,
    /// Current flowing into the network at each port's positive terminal.
    pub port_currents: Vec<Complex64>,
    /// `‖A x − rhs‖ / ‖rhs‖`.
    pub residual: f64,
}

impl Solution {
    pub fn voltage(&self, p: NodeId, n: NodeId) -> Complex64 {
        self.voltages[p] - self.voltages[n]
    }
}

/// Assembled system for one frequency; reusable across right-hand sides.
pub(crate) struct System<'a> {
    netlist: &'a Netlist,
    frequency: f64,
    matrix: DMatrix<Complex64>,
    /// Right-hand side entries that scale with port EMFs: `(row, port, gain)`.
    emf_terms: Vec<(usize, usize, Complex64)>,
    /// Right-hand side entries from independent sources.
    source_terms: Vec<(usize, Complex64)>,
    port_rows: Vec<usize>,
    branch_offset: usize,
}

fn stamp_admittance(m: &mut DMatrix<Complex64>, p: NodeId, n: NodeId, y: Complex64) {
    if p != GROUND {
        m[(p - 1, p - 1)] += y;
    }
    if n != GROUND {
        m[(n - 1, n - 1)] += y;
    }
    if p != GROUND && n != GROUND {
        m[(p - 1, n - 1)] -= y;
        m[(n - 1, p - 1)] -= y;
    }
}

/// Adds `coef·(V_p − V_n)` to `row`.
fn stamp_voltage(m: &mut DMatrix<Complex64>, row: usize, p: NodeId, n: NodeId, coef: Complex64) {
    if p != GROUND {
        m[(row, p - 1)] += coef;
    }
    if n != GROUND {
        m[(row, n - 1)] -= coef;
    }
}

/// Current `col` leaves node `p` and enters node `n`.
fn stamp_branch_kcl(m: &mut DMatrix<Complex64>, col: usize, p: NodeId, n: NodeId) {
    if p != GROUND {
        m[(p - 1, col)] += 1.0;
    }
    if n != GROUND {
        m[(n - 1, col)] -= 1.0;
    }
}

impl<'a> System<'a> {
    pub(crate) fn assemble(netlist: &'a Netlist, frequency: f64) -> Result<Self, EngineError> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(EngineError::Frequency(frequency));
        }
        let nv = netlist.node_count() - 1;
        let nb: usize = netlist.elements.iter().map(Element::branch_count).sum::<usize>() + netlist.ports.len();
        let size = nv + nb;
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        let mut emf_terms = Vec::new();
        let mut source_terms = Vec::new();
        let w = 2.0 * PI * frequency;
        let j = Complex64::new(0.0, 1.0);
        let mut col = nv;

        for e in &netlist.elements {
            match e {
                Element::Resistor { p, n, ohms } => stamp_admittance(&mut m, *p, *n, Complex64::new(1.0 / ohms, 0.0)),
                Element::Capacitor { p, n, farads, series_resistance_ohm } => {
                    let z = Complex64::new(*series_resistance_ohm, -1.0 / (w * farads));
                    stamp_admittance(&mut m, *p, *n, z.inv());
                }
                Element::Inductor { p, n, henries, series_resistance_ohm } => {
                    let z = Complex64::new(*series_resistance_ohm, w * henries);
                    stamp_admittance(&mut m, *p, *n, z.inv());
                }
                Element::Line { n1, n2, z0_ohm, theta_deg, f_ref_hz } => {
                    let theta = theta_deg.to_radians() * frequency / f_ref_hz;
                    let (s, c) = theta.sin_cos();
                    let (i1, i2) = (col, col + 1);
                    stamp_branch_kcl(&mut m, i1, *n1, GROUND);
                    stamp_branch_kcl(&mut m, i2, *n2, GROUND);
                    // V1 = cos·V2 − jZc·sin·I2
                    stamp_voltage(&mut m, i1, *n1, GROUND, Complex64::new(1.0, 0.0));
                    stamp_voltage(&mut m, i1, *n2, GROUND, Complex64::new(-c, 0.0));
                    m[(i1, i2)] += j * z0_ohm * s;
                    // I1 = j·sin/Zc·V2 − cos·I2
                    m[(i2, i1)] += 1.0;
                    stamp_voltage(&mut m, i2, *n2, GROUND, -j * s / *z0_ohm);
                    m[(i2, i2)] += c;
                    col += 2;
                }
                Element::ShortStub { p, n, z0_ohm, theta_deg, f_ref_hz } => {
                    let theta = theta_deg.to_radians() * frequency / f_ref_hz;
                    let (s, c) = theta.sin_cos();
                    stamp_branch_kcl(&mut m, col, *p, *n);
                    stamp_voltage(&mut m, col, *p, *n, Complex64::new(c, 0.0));
                    m[(col, col)] -= j * z0_ohm * s;
                    col += 1;
                }
                Element::ZBlock { ports, source } => {
                    let z = source
                        .evaluate(frequency)
                        .map_err(|message| EngineError::Impedance { frequency_hz: frequency, message })?;
                    if z.nrows() != ports.len() || z.ncols() != ports.len() {
                        return Err(EngineError::Impedance {
                            frequency_hz: frequency,
                            message: format!("{}x{} matrix for a {}-port block", z.nrows(), z.ncols(), ports.len()),
                        });
                    }
                    for (k, &(p, n)) in ports.iter().enumerate() {
                        let row = col + k;
                        stamp_branch_kcl(&mut m, row, p, n);
                        stamp_voltage(&mut m, row, p, n, Complex64::new(1.0, 0.0));
                        for l in 0..ports.len() {
                            m[(row, col + l)] -= z[(k, l)];
                        }
                    }
                    col += ports.len();
                }
                Element::VoltageSource { p, n, emf, internal_ohm } => {
                    stamp_branch_kcl(&mut m, col, *p, *n);
                    stamp_voltage(&mut m, col, *p, *n, Complex64::new(1.0, 0.0));
                    m[(col, col)] -= internal_ohm;
                    source_terms.push((col, *emf));
                    col += 1;
                }
                Element::Vcvs { p, n, terms, internal_ohm } => {
                    stamp_branch_kcl(&mut m, col, *p, *n);
                    stamp_voltage(&mut m, col, *p, *n, Complex64::new(1.0, 0.0));
                    m[(col, col)] -= internal_ohm;
                    for t in terms {
                        match t.control {
                            Control::NodePair { p, n } => stamp_voltage(&mut m, col, p, n, -t.gain),
                            Control::PortEmf { index } => emf_terms.push((col, index, t.gain)),
                        }
                    }
                    col += 1;
                }
            }
        }

        let branch_offset = nv;
        let mut port_rows = Vec::with_capacity(netlist.ports.len());
        for (k, port) in netlist.ports.iter().enumerate() {
            stamp_branch_kcl(&mut m, col, port.p, port.n);
            stamp_voltage(&mut m, col, port.p, port.n, Complex64::new(1.0, 0.0));
            m[(col, col)] -= port.reference_ohm;
            emf_terms.push((col, k, Complex64::new(1.0, 0.0)));
            port_rows.push(col);
            col += 1;
        }
        debug_assert_eq!(col, size);
        Ok(Self { netlist, frequency, matrix: m, emf_terms, source_terms, port_rows, branch_offset })
    }

    fn rhs(&self, excitation: &Excitation) -> Result<DVector<Complex64>, EngineError> {
        if excitation.port_emfs.len() != self.netlist.ports.len() {
            return Err(EngineError::Excitation(format!(
                "{} port EMFs for {} ports",
                excitation.port_emfs.len(),
                self.netlist.ports.len()
            )));
        }
        let mut rhs = DVector::zeros(self.matrix.nrows());
        for &(row, port, gain) in &self.emf_terms {
            rhs[row] += gain * excitation.port_emfs[port];
        }
        if excitation.sources_active {
            for &(row, emf) in &self.source_terms {
                rhs[row] += emf;
            }
        }
        Ok(rhs)
    }

    fn describe_unknown(&self, index: usize) -> String {
        if index < self.branch_offset {
            return format!("voltage of node '{}' (floating node?)", self.netlist.node_name(index + 1));
        }
        let mut col = self.branch_offset;
        for (k, e) in self.netlist.elements.iter().enumerate() {
            let n = e.branch_count();
            if index < col + n {
                return format!("current of element {k} ({}) (degenerate loop?)", e.label());
            }
            col += n;
        }
        let port = &self.netlist.ports[index - col];
        format!("current of port '{}' (degenerate loop?)", port.name)
    }

    pub(crate) fn factor(self) -> Result<Factored<'a>, EngineError> {
        let scale = self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let lu = self.matrix.clone().lu();
        let u = lu.u();
        for i in 0..u.nrows() {
            if u[(i, i)].norm() <= PIVOT_TOL * scale {
                // the pivot column of a partial-pivot LU is the unknown itself
                return Err(EngineError::Singular { frequency_hz: self.frequency, unknown: self.describe_unknown(i) });
            }
        }
        Ok(Factored { system: self, lu })
    }
}

pub(crate) struct Factored<'a> {
    system: System<'a>,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Factored<'_> {
    pub(crate) fn solve(&self, excitation: &Excitation) -> Result<Solution, EngineError> {
        let sys = &self.system;
        let rhs = sys.rhs(excitation)?;
        let singular = || EngineError::Singular { frequency_hz: sys.frequency, unknown: "system".into() };
        let mut x = self.lu.solve(&rhs).ok_or_else(singular)?;
        // one step of iterative refinement
        let r = &rhs - &sys.matrix * &x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        let rhs_norm = rhs.norm();
        let residual = if rhs_norm == 0.0 { (&sys.matrix * &x).norm() } else { (&rhs - &sys.matrix * &x).norm() / rhs_norm };
        if !(residual < RESIDUAL_TOL) {
            return Err(EngineError::Inaccurate { frequency_hz: sys.frequency, residual });
        }
        let nv = sys.branch_offset;
        let mut voltages = Vec::with_capacity(nv + 1);
        voltages.push(Complex64::new(0.0, 0.0));
        voltages.extend(x.iter().take(nv).copied());
        let first_port = sys.port_rows.first().copied().unwrap_or(x.len());
        let branch_currents = x.rows(nv, first_port - nv).iter().copied().collect();
        let port_currents = sys.port_rows.iter().map(|&row| -x[row]).collect();
        Ok(Solution { frequency_hz: sys.frequency, voltages, branch_currents, port_currents, residual })
    }

    pub(crate) fn netlist(&self) -> &Netlist {
        self.system.netlist
    }
}

/// Solves the netlist at one frequency.
pub fn assemble_and_solve(netlist: &Netlist, frequency: f64, excitation: &Excitation) -> Result<Solution, EngineError> {
    netlist.validate()?;
    System::assemble(netlist, frequency)?.factor()?.solve(excitation)
}
