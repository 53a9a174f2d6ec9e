//! Frequency-domain linear circuit solver with S-parameter extraction.

use std::path::PathBuf;

use thiserror::Error;

pub mod bandwidth;
pub mod csv;
pub mod mna;
pub mod netlist;
pub mod sparams;
pub mod touchstone;

pub use bandwidth::{bandwidth, joint_bandwidth, Bandwidth};
pub use csv::export_csv;
pub use mna::{assemble_and_solve, Excitation, Solution};
pub use netlist::{Control, ControlTerm, Element, ImpedanceSource, Netlist, NodeId, Port, GROUND};
pub use sparams::{linear_grid, s_matrix, s_parameters, to_db, SParameterSweep};
pub use touchstone::{export_touchstone, parse_touchstone};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
    #[error("node '{0}' has no path to ground")]
    FloatingNode(String),
    #[error("singular system at {frequency_hz} Hz: {unknown}")]
    Singular { frequency_hz: f64, unknown: String },
    #[error("solution residual {residual:.3e} too large at {frequency_hz} Hz")]
    Inaccurate { frequency_hz: f64, residual: f64 },
    #[error("impedance block failed at {frequency_hz} Hz: {message}")]
    Impedance { frequency_hz: f64, message: String },
    #[error("frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("bad excitation: {0}")]
    Excitation(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}
