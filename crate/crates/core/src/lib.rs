//! Decoupling and matching network synthesis for compact dipole arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array;
pub mod circuit;
pub mod linalg;
pub mod lumped;
pub mod microstrip;
pub mod ndm;
pub mod ring_hybrid;
pub mod scenario;
pub mod special;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Impedance of free space, ohm.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;
