//! Runs one design flow and builds its simulation netlist.

use anyhow::{bail, Context, Result};
use dmnkit::array::{array_impedance, structured_matrix, ArrayGeometry};
use dmnkit::circuit::{ImpedanceSource, Netlist};
use dmnkit::lumped::{design_lumped, DmnLumpedDesign};
use dmnkit::ndm::{design_ndm, verify_matching, MatchingReport, NdmDesign};
use dmnkit::ring_hybrid::{design_ring_hybrid, NamedLine, RingHybridDesign, T2Strategy};
use dmnkit::scenario::{antenna_source, baseline_netlist, dmn_le_netlist, ndm_netlist, ring_hybrid_netlist, Loss};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::config::{RunConfig, Scenario};

/// Array impedances at `f_r` and where they came from.
#[derive(Debug, Clone)]
pub struct ArrayData {
    pub from_override: bool,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Option<Complex64>,
}

impl ArrayData {
    pub fn matrix(&self) -> DMatrix<Complex64> {
        structured_matrix(self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone)]
pub enum DesignKind {
    Baseline,
    Lumped(Box<DmnLumpedDesign>),
    Ring { design: Box<RingHybridDesign>, lines: Vec<NamedLine> },
    Ndm { design: Box<NdmDesign>, check: MatchingReport },
}

#[derive(Debug, Clone)]
pub struct Design {
    pub scenario: Scenario,
    pub array: ArrayData,
    pub kind: DesignKind,
}

fn geometry(cfg: &RunConfig, elements: usize) -> ArrayGeometry {
    let mut g = ArrayGeometry::half_wave(elements, cfg.reference_frequency_hz, cfg.spacing_wavelengths);
    if let Some(r) = cfg.wire_radius_m {
        g.wire_radius_m = r;
    }
    g
}

fn array_data(cfg: &RunConfig, elements: usize) -> Result<ArrayData> {
    if let Some(o) = cfg.z_at_override {
        let c = match (elements, o.c_ohm) {
            (3, None) => bail!("the z_at_override needs c_ohm for the three-element array"),
            (3, c) => c,
            _ => None,
        };
        return Ok(ArrayData { from_override: true, a: o.a_ohm, b: o.b_ohm, c });
    }
    let z = array_impedance(&geometry(cfg, elements), cfg.reference_frequency_hz).context("array impedance")?;
    Ok(ArrayData { from_override: false, a: z.a(), b: z.b(), c: z.c() })
}

fn antenna(cfg: &RunConfig, data: &ArrayData, elements: usize) -> ImpedanceSource {
    let g = geometry(cfg, elements);
    if data.from_override {
        antenna_source(g, Some(&data.matrix()))
    } else {
        antenna_source(g, None)
    }
}

pub fn design(cfg: &RunConfig, scenario: Scenario) -> Result<Design> {
    let r = cfg.source_resistance_ohm;
    let f_r = cfg.reference_frequency_hz;
    let elements = if scenario == Scenario::Ndm { 3 } else { 2 };
    let array = array_data(cfg, elements)?;
    let kind = match scenario {
        Scenario::Baseline => DesignKind::Baseline,
        Scenario::DmnLe => {
            let z = Matrix2::new(array.a, array.b, array.b, array.a);
            let mut d = design_lumped(&z, r, f_r).context("lumped decoupling network")?;
            if let Loss::QFactor { table } = &cfg.loss {
                d = d.with_q_table(table);
            }
            DesignKind::Lumped(Box::new(d))
        }
        Scenario::DmnRh | Scenario::DmnRhStub => {
            let strategy = if scenario == Scenario::DmnRh { T2Strategy::QuarterWave } else { T2Strategy::Stub };
            let d = design_ring_hybrid(array.a, array.b, r, strategy).context("ring hybrid")?;
            let lines = d.microstrip_lines(cfg.substrate, f_r).context("microstrip realization")?;
            DesignKind::Ring { design: Box::new(d), lines }
        }
        Scenario::Ndm => {
            let z = array.matrix();
            let (u01, u02) = (cfg.ndm_drive.u01.phasor(), cfg.ndm_drive.u02.phasor());
            let d = design_ndm(&z, r, f_r, u01, u02).context("networkless design")?;
            let check = verify_matching(&z, &d.solution, u01, u02).context("matching check")?;
            DesignKind::Ndm { design: Box::new(d), check }
        }
        Scenario::Compare => bail!("compare is not a single design"),
    };
    Ok(Design { scenario, array, kind })
}

impl Design {
    pub fn netlist(&self, cfg: &RunConfig) -> Result<Netlist> {
        let r = cfg.source_resistance_ohm;
        Ok(match &self.kind {
            DesignKind::Baseline => baseline_netlist(antenna(cfg, &self.array, 2), r),
            DesignKind::Lumped(d) => dmn_le_netlist(d, &cfg.loss, antenna(cfg, &self.array, 2), r)?,
            DesignKind::Ring { design, .. } => {
                ring_hybrid_netlist(design, antenna(cfg, &self.array, 2), cfg.reference_frequency_hz)
            }
            DesignKind::Ndm { design, .. } => ndm_netlist(design, antenna(cfg, &self.array, 3)),
        })
    }
}
