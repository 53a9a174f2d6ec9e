//! Plain-text design tables with published reference values alongside.

use std::fmt::Write;

use dmnkit::lumped::ComponentKind;
use dmnkit::ring_hybrid::{NamedLine, PortMatch, SingleLineMatch};
use num_complex::Complex64;

use crate::design::{Design, DesignKind};

#[derive(Debug, Clone, Copy)]
enum Value {
    Real(f64),
    Complex(Complex64),
    Polar(Complex64),
    Sci(f64),
}

impl Value {
    fn render(self, unit: &str) -> String {
        let text = match self {
            Value::Real(x) => format!("{x:.4} {unit}"),
            Value::Complex(z) => {
                let sign = if z.im < 0.0 { '-' } else { '+' };
                format!("{:.4} {sign} j{:.4} {unit}", z.re, z.im.abs())
            }
            Value::Polar(z) => format!("{:.4} ∠ {:.4}° {unit}", z.norm(), z.arg().to_degrees()),
            Value::Sci(x) => format!("{x:.2e} {unit}"),
        };
        text.trim_end().to_string()
    }

    fn as_complex(self) -> Complex64 {
        match self {
            Value::Real(x) | Value::Sci(x) => Complex64::new(x, 0.0),
            Value::Complex(z) | Value::Polar(z) => z,
        }
    }
}

struct Row {
    name: String,
    unit: &'static str,
    value: Option<Value>,
    published: Option<Value>,
}

pub struct Table {
    title: String,
    rows: Vec<Row>,
}

impl Table {
    fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), rows: Vec::new() }
    }

    fn row(&mut self, name: impl Into<String>, unit: &'static str, value: Option<Value>, published: Option<Value>) {
        self.rows.push(Row { name: name.into(), unit, value, published });
    }

    pub fn render(&self) -> String {
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    r.value.map_or("-".into(), |v| v.render(r.unit)),
                    r.published.map_or("-".into(), |v| v.render(r.unit)),
                    match (r.value, r.published) {
                        (Some(v), Some(p)) => format!("{:.2}%", deviation(v, p)),
                        _ => "-".into(),
                    },
                ]
            })
            .collect();
        let header = ["quantity".to_string(), "computed".into(), "published".into(), "deviation".into()];
        let mut widths = [0usize; 4];
        for row in std::iter::once(&header).chain(&cells) {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String; 4]| {
            let mut s = String::new();
            for (k, (c, w)) in row.iter().zip(widths).enumerate() {
                let pad = w - c.chars().count();
                if k > 0 {
                    s.push_str(" | ");
                }
                if k == 0 {
                    s.push_str(c);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str(&" ".repeat(pad));
                    s.push_str(c);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", line(&header));
        let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
        for row in &cells {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }
}

fn deviation(v: Value, p: Value) -> f64 {
    let (v, p) = (v.as_complex(), p.as_complex());
    100.0 * (v - p).norm() / p.norm()
}

fn c(re: f64, im: f64) -> Option<Value> {
    Some(Value::Complex(Complex64::new(re, im)))
}

fn real(x: f64) -> Option<Value> {
    Some(Value::Real(x))
}

fn polar(mag: f64, deg: f64) -> Option<Value> {
    Some(Value::Polar(Complex64::from_polar(mag, deg.to_radians())))
}

fn array_table(d: &Design) -> Table {
    let source = if d.array.from_override { "override" } else { "induced-EMF model" };
    let mut t = Table::new(format!("Array impedance at the reference frequency ({source})"));
    t.row("a", "Ω", Some(Value::Complex(d.array.a)), c(73.05, 42.44));
    t.row("b", "Ω", Some(Value::Complex(d.array.b)), c(40.74, -28.31));
    if let Some(cc) = d.array.c {
        t.row("c", "Ω", Some(Value::Complex(cc)), c(64.11, -0.074));
    }
    t
}

fn line_rows(t: &mut Table, lines: &[NamedLine], name: &str, label: &str, length: f64, width: f64) {
    let line = lines.iter().find(|l| l.name == name);
    t.row(format!("l_{label}"), "mm", line.map(|l| Value::Real(l.line.physical_length_m * 1e3)), real(length));
    t.row(format!("w_{label}"), "mm", line.map(|l| Value::Real(l.line.width_m * 1e3)), real(width));
}

/// Tables for one design: the array impedances first, then the scenario's own.
pub fn tables(d: &Design) -> Vec<Table> {
    let mut out = vec![array_table(d)];
    match &d.kind {
        DesignKind::Baseline => {}
        DesignKind::Lumped(l) => {
            let published: [Option<f64>; 10] = [
                Some(0.53888),
                Some(0.53888),
                Some(0.63942),
                Some(0.63942),
                Some(2.3544),
                Some(2.7827),
                Some(0.29575),
                Some(0.29575),
                Some(2.7827),
                None,
            ];
            let mut t = Table::new("Lumped decoupling and matching network components");
            for (k, comp) in l.components.iter().enumerate() {
                match comp {
                    Some(comp) => {
                        let (prefix, unit, scale) = match comp.kind {
                            ComponentKind::Capacitor => ("C", "pF", 1e12),
                            ComponentKind::Inductor => ("L", "nH", 1e9),
                        };
                        let q = comp.q.map_or(String::new(), |q| format!(" (Q {} @ {} GHz)", q.q_factor, q.frequency_hz / 1e9));
                        t.row(format!("{prefix}{}{q}", k + 1), unit, real(comp.value * scale), published[k].and_then(real));
                    }
                    None => t.row(format!("Y{} (omitted)", k + 1), "S", None, None),
                }
            }
            out.push(t);
        }
        DesignKind::Ring { design, lines } => {
            let mut t = Table::new("Ring hybrid calculated parameters");
            t.row("Z0", "Ω", real(design.ports.z0), real(97.1845));
            t.row("Z1", "Ω", Some(Value::Complex(design.ports.z1)), c(40.8666, -5.0754));
            t.row("Z2", "Ω", Some(Value::Complex(design.ports.z2)), c(25.2097, -55.2266));
            match design.t1_single_line {
                SingleLineMatch::Feasible { z0i_ohm, theta_deg, .. } => {
                    t.row("Z01", "Ω", real(z0i_ohm), real(43.6155));
                    t.row("theta01", "°", real(theta_deg), real(122.498));
                }
                SingleLineMatch::Infeasible { z0i_imag_ohm } => t.row("Z01 (imaginary)", "Ω", c(0.0, z0i_imag_ohm), real(43.6155)),
            }
            match design.t2_single_line {
                SingleLineMatch::Infeasible { z0i_imag_ohm } => t.row("Z02", "Ω", c(0.0, z0i_imag_ohm), c(0.0, 69.936)),
                SingleLineMatch::Feasible { z0i_ohm, .. } => t.row("Z02 (real)", "Ω", real(z0i_ohm), c(0.0, 69.936)),
            }
            out.push(t);

            let mut m = Table::new("Ring hybrid line parameters");
            m.row("theta_r", "°", real(90.0), real(90.0));
            line_rows(&mut m, lines, "ring", "r", 12.5859, 0.4356);
            if let PortMatch::SingleLine { theta_deg, .. } = design.t1 {
                m.row("theta_1", "°", real(theta_deg), real(122.498));
            }
            line_rows(&mut m, lines, "t1_line", "1", 15.8662, 2.7999);
            match design.t2 {
                PortMatch::QuarterWave(q) => {
                    m.row("Z21", "Ω", real(q.z21_ohm), real(50.0));
                    m.row("theta_21", "°", real(q.theta21_deg), real(51.056));
                    line_rows(&mut m, lines, "t2_real_line", "21", 6.7001, 2.2016);
                    m.row("Z22", "Ω", real(q.z22_ohm), real(23.3544));
                    m.row("theta_22", "°", real(90.0), real(90.0));
                    line_rows(&mut m, lines, "t2_quarter_wave", "22", 11.0431, 7.0753);
                }
                PortMatch::Stub(s) => {
                    m.row("ZS1", "Ω", real(s.zs1_ohm), real(66.7342));
                    m.row("theta_S1", "°", real(s.stub_length_deg), real(45.0));
                    line_rows(&mut m, lines, "t2_stub", "S1", 6.0741, 1.2249);
                    m.row("ZS2", "Ω", real(s.zs2_ohm), real(85.44));
                    m.row("theta_S2", "°", real(90.0), real(90.0));
                    line_rows(&mut m, lines, "t2_quarter_wave", "S2", 12.4345, 0.6503);
                }
                PortMatch::SingleLine { z0i_ohm, theta_deg } => {
                    m.row("Z02", "Ω", real(z0i_ohm), None);
                    m.row("theta_2", "°", real(theta_deg), None);
                }
            }
            out.push(m);
        }
        DesignKind::Ndm { design, check } => {
            let s = &design.solution;
            let mut t = Table::new("Networkless generator impedances");
            t.row("Z1", "Ω", Some(Value::Complex(s.z_sources[0])), c(32.3, -70.76));
            t.row("Z2", "Ω", Some(Value::Complex(s.z_sources[1])), c(32.3, -70.76));
            t.row("Z3", "Ω", Some(Value::Complex(s.z_sources[2])), c(4.09, 4.66));
            out.push(t);

            let mut p = Table::new("Networkless design parameters");
            let published_u0 = [polar(10.6327, -41.8153), polar(3.368, 124.8037), polar(0.8736, 109.4254)];
            let published_u0p = [polar(13.2283, 82.5424), polar(4.1514, -110.8386), polar(2.7878, 37.6868)];
            for (k, (&u, pub_u)) in design.u0.iter().zip(published_u0).enumerate() {
                p.row(format!("u0,{}", k + 1), "V", Some(Value::Polar(u)), pub_u);
            }
            for (k, (&u, pub_u)) in design.u0_prime.iter().zip(published_u0p).enumerate() {
                p.row(format!("u0',{}", k + 1), "V", Some(Value::Polar(u)), pub_u);
            }
            p.row("g1, g2", "", Some(Value::Polar(s.g1)), polar(0.1176, 145.2833));
            if let Some(g) = s.g_alternative {
                p.row("g (denominator (b-a+Z1)c)", "", Some(Value::Polar(g)), None);
            }
            p.row("matching residual", "", Some(Value::Sci(check.residual)), None);
            out.push(p);
        }
    }
    out
}

pub fn render(d: &Design) -> String {
    let mut out = format!("== {} ==\n", d.scenario.name());
    for t in tables(d) {
        out.push_str(&t.render());
        out.push('\n');
    }
    out
}
