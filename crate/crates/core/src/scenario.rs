//! Netlists for the bare array and the three decoupling designs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{ArrayGeometry, ArrayModel};
use crate::circuit::{Control, ControlTerm, Element, ImpedanceSource, Netlist, NodeId, GROUND};
use crate::lumped::{apply_q_loss, ComponentKind, DmnError, DmnLumpedDesign, LumpedComponent, QTable, CROSS_BRANCHES};
use crate::ndm::{NdmDesign, Placement};
use crate::ring_hybrid::{PortMatch, RingHybridDesign, RingPort, RING_SEGMENTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Loss {
    Ideal,
    QFactor { table: QTable },
}

/// Array impedance for the simulator: the EMF model, shifted to hit
/// `anchor` exactly at the reference frequency when one is given.
pub fn antenna_source(geometry: ArrayGeometry, anchor: Option<&DMatrix<Complex64>>) -> ImpedanceSource {
    let model = match anchor {
        Some(z) => ArrayModel::anchored(geometry, z),
        None => ArrayModel::new(geometry),
    };
    ImpedanceSource::ArrayModel { model }
}

fn antenna_block(netlist: &mut Netlist, nodes: &[NodeId], source: ImpedanceSource) {
    netlist.add(Element::ZBlock { ports: nodes.iter().map(|&n| (n, GROUND)).collect(), source });
}

/// Two-element array driven directly from the ports.
pub fn baseline_netlist(antenna: ImpedanceSource, r: f64) -> Netlist {
    let mut n = Netlist::new();
    let a1 = n.node("a1");
    let a2 = n.node("a2");
    antenna_block(&mut n, &[a1, a2], antenna);
    n.add_port("p1", a1, GROUND, r).add_port("p2", a2, GROUND, r);
    n
}

fn lumped_element(p: NodeId, q: NodeId, c: &LumpedComponent, lossy: bool) -> Result<Element, DmnError> {
    let rs = if lossy && c.q.is_some() { apply_q_loss(c)?.series_resistance_ohm } else { 0.0 };
    Ok(match c.kind {
        ComponentKind::Capacitor => Element::Capacitor { p, n: q, farads: c.value, series_resistance_ohm: rs },
        ComponentKind::Inductor => Element::Inductor { p, n: q, henries: c.value, series_resistance_ohm: rs },
    })
}

/// Ten-branch lumped network between ports `T1, T2` and the array at
/// `A1, A2`.
pub fn dmn_le_netlist(design: &DmnLumpedDesign, loss: &Loss, antenna: ImpedanceSource, r: f64) -> Result<Netlist, DmnError> {
    let design = match loss {
        Loss::Ideal => design.clone(),
        Loss::QFactor { table } => design.clone().with_q_table(table),
    };
    let lossy = matches!(loss, Loss::QFactor { .. });
    let mut n = Netlist::new();
    let nodes = [n.node("t1"), n.node("t2"), n.node("a1"), n.node("a2")];
    for (k, comp) in design.components.iter().enumerate() {
        let Some(comp) = comp else { continue };
        let (p, q) = if k < 4 { (nodes[k], GROUND) } else { (nodes[CROSS_BRANCHES[k - 4].0], nodes[CROSS_BRANCHES[k - 4].1]) };
        n.add(lumped_element(p, q, comp, lossy)?);
    }
    antenna_block(&mut n, &nodes[2..], antenna);
    n.add_port("p1", nodes[0], GROUND, r).add_port("p2", nodes[1], GROUND, r);
    Ok(n)
}

fn line(n1: NodeId, n2: NodeId, z0: f64, deg: f64, f_r: f64) -> Element {
    Element::Line { n1, n2, z0_ohm: z0, theta_deg: deg, f_ref_hz: f_r }
}

/// Adds the matching section of one ring port and returns the node where
/// the external port attaches.
fn port_section(n: &mut Netlist, ring_node: NodeId, name: &str, m: &PortMatch, f_r: f64) -> NodeId {
    let outer = n.node(&format!("{name}_port"));
    match *m {
        PortMatch::SingleLine { z0i_ohm, theta_deg } => {
            n.add(line(ring_node, outer, z0i_ohm, theta_deg, f_r));
        }
        PortMatch::QuarterWave(q) => {
            let mid = n.node(&format!("{name}_x"));
            n.add(line(ring_node, mid, q.z21_ohm, q.theta21_deg, f_r));
            n.add(line(mid, outer, q.z22_ohm, 90.0, f_r));
        }
        PortMatch::Stub(s) => {
            n.add(Element::ShortStub { p: ring_node, n: GROUND, z0_ohm: s.zs1_ohm, theta_deg: s.stub_length_deg, f_ref_hz: f_r });
            n.add(line(ring_node, outer, s.zs2_ohm, 90.0, f_r));
        }
    }
    outer
}

/// Rat-race ring with its port matching sections; port 1 feeds the sum
/// port `T1`, port 2 the difference port `T2`.
pub fn ring_hybrid_netlist(design: &RingHybridDesign, antenna: ImpedanceSource, f_r: f64) -> Netlist {
    let r = design.source_resistance_ohm;
    let mut n = Netlist::new();
    let t1 = n.node("t1");
    let a1 = n.node("a1");
    let t2 = n.node("t2");
    let a2 = n.node("a2");
    let id = |p: RingPort| match p {
        RingPort::T1 => t1,
        RingPort::A1 => a1,
        RingPort::T2 => t2,
        RingPort::A2 => a2,
    };
    for (from, to, deg) in RING_SEGMENTS {
        n.add(line(id(from), id(to), design.ports.z0, deg, f_r));
    }
    antenna_block(&mut n, &[a1, a2], antenna);
    let p1 = port_section(&mut n, t1, "t1", &design.t1, f_r);
    let p2 = port_section(&mut n, t2, "t2", &design.t2, f_r);
    n.add_port("p1", p1, GROUND, r).add_port("p2", p2, GROUND, r);
    n
}

/// Three L-sections into the three-element array. Ports 1 and 2 are the
/// outer generators; the centre one is a controlled source following them.
pub fn ndm_netlist(design: &NdmDesign, antenna: ImpedanceSource) -> Netlist {
    let r = design.source_resistance_ohm;
    let f_r = design.reference_frequency_hz;
    let mut n = Netlist::new();
    let mut feeds = [GROUND; 3];
    let mut antennas = [GROUND; 3];
    for k in 0..3 {
        let mut node = n.node(&format!("s{}", k + 1));
        feeds[k] = node;
        for (e, el) in design.matching_sections[k].elements.iter().enumerate() {
            let c = el.component(f_r);
            match el.placement {
                Placement::Shunt => {
                    n.add(lumped_element(node, GROUND, &c, false).expect("lossless element"));
                }
                Placement::Series => {
                    let next = n.node(&format!("s{}_{}", k + 1, e + 1));
                    n.add(lumped_element(node, next, &c, false).expect("lossless element"));
                    node = next;
                }
            }
        }
        antennas[k] = node;
    }
    antenna_block(&mut n, &antennas, antenna);
    let terms = vec![
        ControlTerm { gain: design.vcvs_gains[0], control: Control::PortEmf { index: 0 } },
        ControlTerm { gain: design.vcvs_gains[1], control: Control::PortEmf { index: 1 } },
    ];
    n.add(Element::Vcvs { p: feeds[2], n: GROUND, terms, internal_ohm: Complex64::new(r, 0.0) });
    n.add_port("p1", feeds[0], GROUND, r).add_port("p2", feeds[1], GROUND, r);
    n
}
