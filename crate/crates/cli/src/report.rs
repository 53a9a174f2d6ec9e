//! JSON documents written next to each sweep. Key names carry their units.

use dmnkit::circuit::{bandwidth, joint_bandwidth, Bandwidth, SParameterSweep};
use dmnkit::lumped::{apply_q_loss, ComponentKind, LumpedComponent};
use dmnkit::ndm::{LSection, Placement};
use dmnkit::ring_hybrid::{PortMatch, SingleLineMatch};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{RunConfig, Scenario};
use crate::design::{Design, DesignKind};

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn polar(z: Complex64) -> Value {
    json!({ "magnitude": z.norm(), "phase_deg": z.arg().to_degrees() })
}

fn component(c: &LumpedComponent) -> Value {
    let mut v = match c.kind {
        ComponentKind::Capacitor => json!({ "kind": "capacitor", "capacitance_pf": c.value * 1e12 }),
        ComponentKind::Inductor => json!({ "kind": "inductor", "inductance_nh": c.value * 1e9 }),
    };
    if let Some(q) = c.q {
        v["q_factor"] = json!(q.q_factor);
        v["q_frequency_hz"] = json!(q.frequency_hz);
        if let Ok(l) = apply_q_loss(c) {
            v["series_resistance_ohm"] = json!(l.series_resistance_ohm);
        }
    }
    v
}

fn port_match(m: &PortMatch) -> Value {
    match m {
        PortMatch::SingleLine { z0i_ohm, theta_deg } => {
            json!({ "kind": "single_line", "line_impedance_ohm": z0i_ohm, "electrical_length_deg": theta_deg })
        }
        PortMatch::QuarterWave(q) => json!({
            "kind": "quarter_wave",
            "z21_ohm": q.z21_ohm,
            "theta21_deg": q.theta21_deg,
            "real_impedance_ohm": q.rx_ohm,
            "z22_ohm": q.z22_ohm,
            "theta22_deg": 90.0,
        }),
        PortMatch::Stub(s) => json!({
            "kind": "stub",
            "zs1_ohm": s.zs1_ohm,
            "stub_length_deg": s.stub_length_deg,
            "conductance_s": s.conductance_s,
            "zs2_ohm": s.zs2_ohm,
            "theta_s2_deg": 90.0,
        }),
    }
}

fn single_line(m: &SingleLineMatch) -> Value {
    match *m {
        SingleLineMatch::Feasible { z0i_ohm, theta_deg, raw_theta_deg } => json!({
            "feasible": true,
            "line_impedance_ohm": z0i_ohm,
            "electrical_length_deg": theta_deg,
            "principal_angle_deg": raw_theta_deg,
        }),
        SingleLineMatch::Infeasible { z0i_imag_ohm } => {
            json!({ "feasible": false, "line_impedance_imag_ohm": z0i_imag_ohm })
        }
    }
}

fn section(s: &LSection, f_r: f64) -> Value {
    let elements: Vec<Value> = s
        .elements
        .iter()
        .map(|e| {
            let mut v = component(&e.component(f_r));
            v["placement"] = json!(match e.placement {
                Placement::Series => "series",
                Placement::Shunt => "shunt",
            });
            v["reactance_ohm"] = json!(e.reactance_ohm);
            v
        })
        .collect();
    json!({
        "elements_from_source": elements,
        "voltage_transfer": polar(s.voltage_transfer),
        "thevenin_impedance_ohm": complex(s.thevenin_impedance),
    })
}

fn design_body(d: &Design, cfg: &RunConfig) -> Value {
    let f_r = cfg.reference_frequency_hz;
    match &d.kind {
        DesignKind::Baseline => json!({}),
        DesignKind::Lumped(l) => {
            let branches: Vec<Value> = (0..10)
                .map(|k| {
                    let mut v = match &l.components[k] {
                        Some(c) => component(c),
                        None => json!({ "kind": "omitted" }),
                    };
                    v["branch"] = json!(k + 1);
                    v["admittance_s"] = complex(l.branches.y[k]);
                    v
                })
                .collect();
            json!({ "branches": branches, "omitted_branches": l.omitted_branches() })
        }
        DesignKind::Ring { design, lines } => {
            let lines: Vec<Value> = lines
                .iter()
                .map(|n| {
                    json!({
                        "name": n.name,
                        "impedance_ohm": n.line.spec.target_impedance_ohm,
                        "electrical_length_deg": n.line.spec.electrical_length_deg,
                        "width_mm": n.line.width_m * 1e3,
                        "length_mm": n.line.physical_length_m * 1e3,
                        "effective_eps": n.line.effective_eps,
                    })
                })
                .collect();
            json!({
                "z0_ohm": design.ports.z0,
                "z1_ohm": complex(design.ports.z1),
                "z2_ohm": complex(design.ports.z2),
                "t1_single_line": single_line(&design.t1_single_line),
                "t2_single_line": single_line(&design.t2_single_line),
                "t1_match": port_match(&design.t1),
                "t2_match": port_match(&design.t2),
                "microstrip": lines,
            })
        }
        DesignKind::Ndm { design, check } => {
            let s = &design.solution;
            json!({
                "z_sources_ohm": s.z_sources.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
                "g": polar(s.g1),
                "g_alternative": s.g_alternative.map(polar),
                "division_factors": s.x.iter().map(|&x| polar(x)).collect::<Vec<_>>(),
                "u0_v": design.u0.iter().map(|&u| polar(u)).collect::<Vec<_>>(),
                "u0_prime_v": design.u0_prime.iter().map(|&u| polar(u)).collect::<Vec<_>>(),
                "vcvs_gains": design.vcvs_gains.iter().map(|&g| polar(g)).collect::<Vec<_>>(),
                "matching_sections": design.matching_sections.iter().map(|m| section(m, f_r)).collect::<Vec<_>>(),
                "matching_residual": check.residual,
                "delivered_power_w": check.delivered_power_w,
                "available_power_w": check.available_power_w,
            })
        }
    }
}

pub fn design_report(d: &Design, cfg: &RunConfig) -> Value {
    let mut array = json!({
        "source": if d.array.from_override { "override" } else { "emf_model" },
        "a_ohm": complex(d.array.a),
        "b_ohm": complex(d.array.b),
    });
    if let Some(c) = d.array.c {
        array["c_ohm"] = complex(c);
    }
    let mut cfg = cfg.clone();
    cfg.scenario = d.scenario;
    json!({
        "scenario": d.scenario.name(),
        "config": serde_json::to_value(&cfg).expect("config serializes"),
        "array": array,
        "design": design_body(d, &cfg),
    })
}

/// One bandwidth figure of merit.
pub struct BandwidthSpec {
    pub label: &'static str,
    pub traces: &'static [(usize, usize)],
    pub threshold_db: f64,
    /// Measure around the minimum of the first trace instead of `f_r`.
    pub around_minimum: bool,
}

const S11: &[(usize, usize)] = &[(0, 0)];
const S21: &[(usize, usize)] = &[(1, 0)];
const S22: &[(usize, usize)] = &[(1, 1)];
const ALL: &[(usize, usize)] = &[(0, 0), (1, 0), (1, 1)];
const MATCH: &[(usize, usize)] = &[(0, 0), (1, 1)];

pub fn bandwidth_specs(s: Scenario) -> Vec<BandwidthSpec> {
    let spec = |label, traces, threshold_db| BandwidthSpec { label, traces, threshold_db, around_minimum: false };
    match s {
        Scenario::Baseline => vec![
            BandwidthSpec { label: "s11", traces: S11, threshold_db: -10.0, around_minimum: true },
            BandwidthSpec { label: "s22", traces: S22, threshold_db: -10.0, around_minimum: true },
        ],
        Scenario::DmnLe => vec![spec("s11_s21_s22", ALL, -20.0), spec("s11_s21_s22", ALL, -10.0)],
        Scenario::DmnRh | Scenario::DmnRhStub => vec![
            spec("s21", S21, -20.0),
            spec("s11", S11, -20.0),
            spec("s22", S22, -10.0),
            spec("s22", S22, -20.0),
        ],
        Scenario::Ndm => vec![spec("s21", S21, -20.0), spec("s11_s22", MATCH, -10.0)],
        Scenario::Compare => Vec::new(),
    }
}

pub fn measure(sweep: &SParameterSweep, spec: &BandwidthSpec, f_r: f64) -> Bandwidth {
    let (i, j) = spec.traces[0];
    let center = if spec.around_minimum { dmnkit::circuit::bandwidth::minimum(sweep, i, j).0 } else { f_r };
    if spec.traces.len() == 1 {
        bandwidth(sweep, i, j, spec.threshold_db, center)
    } else {
        joint_bandwidth(sweep, spec.traces, spec.threshold_db, center)
    }
}

pub fn bandwidth_entry(spec: &BandwidthSpec, bw: &Bandwidth) -> Value {
    json!({
        "traces": spec.label,
        "threshold_db": bw.threshold_db,
        "center_hz": bw.center_hz,
        "interval_hz": bw.interval_hz.map(|(lo, hi)| vec![lo, hi]),
        "width_hz": bw.width_hz,
        "clipped": { "low": bw.clipped_low, "high": bw.clipped_high },
    })
}
