use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::mna::{Excitation, System};
use super::netlist::Netlist;
use super::EngineError;

#[derive(Debug, Clone, PartialEq)]
pub struct SParameterSweep {
    pub frequencies_hz: Vec<f64>,
    pub s: Vec<DMatrix<Complex64>>,
    pub reference_ohm: Vec<f64>,
}

impl SParameterSweep {
    pub fn port_count(&self) -> usize {
        self.reference_ohm.len()
    }

    /// `S_ij` trace (zero-based indices).
    pub fn trace(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.s.iter().map(|m| m[(i, j)]).collect()
    }

    pub fn trace_db(&self, i: usize, j: usize) -> Vec<f64> {
        self.s.iter().map(|m| to_db(m[(i, j)])).collect()
    }

    /// Index of the grid point nearest to `frequency`.
    pub fn nearest_index(&self, frequency: f64) -> usize {
        let mut best = 0;
        for (k, f) in self.frequencies_hz.iter().enumerate() {
            if (f - frequency).abs() < (self.frequencies_hz[best] - frequency).abs() {
                best = k;
            }
        }
        best
    }
}

pub const DB_FLOOR: f64 = -300.0;

pub fn to_db(s: Complex64) -> f64 {
    let m = s.norm();
    if m == 0.0 {
        DB_FLOOR
    } else {
        (20.0 * m.log10()).max(DB_FLOOR)
    }
}

/// `n` equally spaced frequencies from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// S-matrix at one frequency.
pub fn s_matrix(netlist: &Netlist, frequency: f64) -> Result<DMatrix<Complex64>, EngineError> {
    let n = netlist.ports.len();
    let factored = System::assemble(netlist, frequency)?.factor()?;
    let ports = &factored.netlist().ports;
    let mut s = DMatrix::zeros(n, n);
    for k in 0..n {
        let sol = factored.solve(&Excitation::port(k, n))?;
        let a_k = 1.0 / (2.0 * ports[k].reference_ohm.sqrt());
        for (j, port) in ports.iter().enumerate() {
            let v = sol.voltage(port.p, port.n);
            let r = port.reference_ohm;
            let b_j = (v - sol.port_currents[j] * r) / (2.0 * r.sqrt());
            s[(j, k)] = b_j / a_k;
        }
    }
    Ok(s)
}

/// Port-wise S-parameters over `frequencies`, evaluated in parallel.
pub fn s_parameters(netlist: &Netlist, frequencies: &[f64]) -> Result<SParameterSweep, EngineError> {
    netlist.validate()?;
    if netlist.ports.is_empty() {
        return Err(EngineError::InvalidNetlist("netlist has no ports".into()));
    }
    if frequencies.is_empty() || frequencies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(EngineError::InvalidNetlist("frequency grid must be non-empty and strictly increasing".into()));
    }
    let s = frequencies.par_iter().map(|&f| s_matrix(netlist, f)).collect::<Result<Vec<_>, _>>()?;
    if let Some((k, _)) = s.iter().enumerate().find(|(_, m)| m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
        return Err(EngineError::Inaccurate { frequency_hz: frequencies[k], residual: f64::NAN });
    }
    Ok(SParameterSweep {
        frequencies_hz: frequencies.to_vec(),
        s,
        reference_ohm: netlist.ports.iter().map(|p| p.reference_ohm).collect(),
    })
}
