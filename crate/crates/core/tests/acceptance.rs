//! Acceptance criteria. Each test prints one PASS/FAIL line.

mod common;

use std::time::Instant;

use common::{c, max_abs, random_netlist};
use dmnkit::array::{structured_matrix, ArrayGeometry};
use dmnkit::circuit::touchstone::format_touchstone;
use dmnkit::circuit::{
    bandwidth, bandwidth::minimum, joint_bandwidth, linear_grid, parse_touchstone, s_matrix, s_parameters, to_db,
    ImpedanceSource, SParameterSweep,
};
use dmnkit::lumped::{design_lumped, ComponentKind, QTable};
use dmnkit::microstrip::{microstrip_dimensions, MicrostripSpec, Substrate};
use dmnkit::ndm::{design_ndm, ndm_solve, verify_matching};
use dmnkit::ring_hybrid::{
    design_ring, design_ring_hybrid, match_single_line, match_t2_quarter_wave, match_t2_stub, SingleLineMatch, T2Strategy,
};
use dmnkit::scenario::{antenna_source, baseline_netlist, dmn_le_netlist, ndm_netlist, ring_hybrid_netlist, Loss};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const FR: f64 = 3e9;
const R: f64 = 50.0;
/// Four significant figures.
const SIG4: f64 = 5e-4;

fn table_a() -> Complex64 {
    c(73.05, 42.44)
}
fn table_b() -> Complex64 {
    c(40.74, -28.31)
}
fn table_c() -> Complex64 {
    c(64.11, -0.074)
}

fn wide_grid() -> Vec<f64> {
    linear_grid(2.4e9, 3.6e9, 1201)
}

/// Prints the verdict line and returns whether every check passed.
fn report(id: u32, title: &str, checks: &[(String, bool)]) -> bool {
    let ok = checks.iter().all(|(_, pass)| *pass);
    let detail: Vec<String> = checks.iter().map(|(d, pass)| format!("{}{d}", if *pass { "" } else { "!" })).collect();
    println!("{} criterion {id} ({title}): {}", if ok { "PASS" } else { "FAIL" }, detail.join("; "));
    ok
}

fn rel(actual: f64, expected: f64) -> f64 {
    ((actual - expected) / expected).abs()
}

fn rel_c(actual: Complex64, expected: Complex64) -> f64 {
    (actual - expected).norm() / expected.norm()
}

#[test]
fn criterion_1_ring_hybrid_chain() {
    let t = Instant::now();
    let p = design_ring(table_a(), table_b(), R).unwrap();
    let mut checks = vec![
        (format!("z0 {:.4}", p.z0), rel(p.z0, 97.1845) <= SIG4),
        (format!("z1 {:.4}", p.z1), rel_c(p.z1, c(40.8666, -5.0754)) <= SIG4),
        (format!("z2 {:.4}", p.z2), rel_c(p.z2, c(25.2097, -55.2266)) <= SIG4),
    ];
    match match_single_line(p.z1, R).unwrap() {
        SingleLineMatch::Feasible { z0i_ohm, theta_deg, .. } => {
            checks.push((format!("z01 {z0i_ohm:.4}"), rel(z0i_ohm, 43.6155) <= SIG4));
            checks.push((format!("theta1 {theta_deg:.4}"), rel(theta_deg, 122.498) <= SIG4));
        }
        other => checks.push((format!("t1 {other:?}"), false)),
    }
    match match_single_line(p.z2, R).unwrap() {
        SingleLineMatch::Infeasible { z0i_imag_ohm } => {
            checks.push((format!("z02 j{z0i_imag_ohm:.4}"), rel(z0i_imag_ohm, 69.936) <= SIG4))
        }
        other => checks.push((format!("t2 {other:?}"), false)),
    }
    let ms = t.elapsed().as_secs_f64() * 1e3;
    checks.push((format!("{ms:.3} ms"), ms < 100.0));
    assert!(report(1, "ring hybrid chain", &checks));
}

#[test]
fn criterion_2_t2_matching() {
    let z2 = design_ring(table_a(), table_b(), R).unwrap().z2;
    let q = match_t2_quarter_wave(z2, R).unwrap();
    let s = match_t2_stub(z2, R).unwrap();
    let checks = vec![
        (format!("theta21 {:.4}", q.theta21_deg), (q.theta21_deg - 51.056).abs() <= 0.01),
        (format!("z22 {:.4} (published 23.3544)", q.z22_ohm), (q.z22_ohm - 23.3544).abs() <= 0.01),
        (format!("zs1 {:.4}", s.zs1_ohm), (s.zs1_ohm - 66.7342).abs() <= 0.01),
        (format!("zs2 {:.4}", s.zs2_ohm), (s.zs2_ohm - 85.44).abs() <= 0.1),
    ];
    assert!(report(2, "T2 matching", &checks));
}

#[test]
fn criterion_3_microstrip() {
    // (name, impedance, degrees, published width mm, published length mm)
    let lines = [
        ("ring", 97.1845, 90.0, 0.4356, 12.5859),
        ("t1", 43.6155, 122.498, 2.7999, 15.8662),
        ("t21", 50.0, 51.056, 2.2016, 6.7001),
        ("t22", 23.3544, 90.0, 7.0753, 11.0431),
        ("stub", 66.7342, 45.0, 1.2249, 6.0741),
        ("s2", 85.44, 90.0, 0.6503, 12.4345),
    ];
    let mut checks = Vec::new();
    for (name, z, deg, w, l) in lines {
        let spec = MicrostripSpec {
            target_impedance_ohm: z,
            electrical_length_deg: deg,
            substrate: Substrate::ro3006(),
            frequency_hz: FR,
        };
        let m = microstrip_dimensions(&spec).unwrap();
        let (wm, lm) = (m.width_m * 1e3, m.physical_length_m * 1e3);
        checks.push((format!("{name} w {wm:.4} l {lm:.4}"), rel(wm, w) <= 0.05 && rel(lm, l) <= 0.05));
    }
    assert!(report(3, "microstrip synthesis", &checks));
}

#[test]
fn criterion_4_lumped_values() {
    let z = Matrix2::new(table_a(), table_b(), table_b(), table_a());
    let d = design_lumped(&z, R, FR).unwrap();
    // (branch, kind, published value)
    let table = [
        (1, ComponentKind::Capacitor, 0.53888e-12),
        (2, ComponentKind::Capacitor, 0.53888e-12),
        (3, ComponentKind::Capacitor, 0.63942e-12),
        (4, ComponentKind::Capacitor, 0.63942e-12),
        (5, ComponentKind::Inductor, 2.3544e-9),
        (6, ComponentKind::Inductor, 2.7827e-9),
        (9, ComponentKind::Inductor, 2.7827e-9),
        (7, ComponentKind::Capacitor, 0.29575e-12),
        (8, ComponentKind::Capacitor, 0.29575e-12),
    ];
    let mut checks = Vec::new();
    for (n, kind, value) in table {
        let tol = if n == 6 { 0.01 } else { 0.10 };
        match d.components[n - 1] {
            Some(comp) => checks.push((
                format!("{n}: {:.5e} ({:+.2}%)", comp.value, 100.0 * (comp.value - value) / value),
                comp.kind == kind && rel(comp.value, value) <= tol,
            )),
            None => checks.push((format!("{n}: omitted"), false)),
        }
    }
    checks.push((format!("omitted {:?}", d.omitted_branches()), d.omitted_branches() == vec![10]));
    assert!(report(4, "lumped component values", &checks));
}

fn random_zat(rng: &mut StdRng) -> Matrix2<Complex64> {
    let ra = rng.gen_range(20.0..120.0);
    let a = c(ra, rng.gen_range(-80.0..80.0));
    let b = c(rng.gen_range(-0.9..0.9) * ra, rng.gen_range(-60.0..60.0));
    Matrix2::new(a, b, b, a)
}

#[test]
fn criterion_5_golden_lumped_property() {
    let mut rng = StdRng::seed_from_u64(5);
    let mut cases = vec![Matrix2::new(table_a(), table_b(), table_b(), table_a())];
    cases.extend((0..100).map(|_| random_zat(&mut rng)));
    let mut worst = f64::NEG_INFINITY;
    for z in &cases {
        let d = design_lumped(z, R, FR).unwrap();
        let zd = DMatrix::from_fn(2, 2, |i, j| z[(i, j)]);
        let n = dmn_le_netlist(&d, &Loss::Ideal, ImpedanceSource::fixed(&zd), R).unwrap();
        let s = s_matrix(&n, FR).unwrap();
        worst = worst.max(s.iter().map(|v| to_db(*v)).fold(f64::NEG_INFINITY, f64::max));
    }
    let checks = vec![(format!("{} arrays, worst |S| {worst:.1} dB", cases.len()), worst < -80.0)];
    assert!(report(5, "lossless DMN-LE decouples and matches", &checks));
}

#[test]
fn criterion_6_ndm_closed_forms() {
    let z = structured_matrix(table_a(), table_b(), Some(table_c()));
    let sol = ndm_solve(&z).unwrap();
    let z1 = sol.z_sources[0];
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut disk = || loop {
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                return v;
            }
        };
        let (u1, u2) = (disk(), disk());
        worst = worst.max(verify_matching(&z, &sol, u1, u2).unwrap().residual);
    }
    let z3 = sol.z_sources[2];
    let g = sol.g1;
    let alt = sol.g_alternative.unwrap();
    let checks = vec![
        (format!("Z1 = Z2 = {z1:.4}"), (z1 - c(32.3, -70.76)).norm() <= 0.1 && sol.z_sources[1] == z1),
        (format!("residual {worst:.2e}"), worst < 1e-9),
        (
            format!(
                "Z3 {z3:.4} vs published 4.09+4.66i; g {:.4}@{:.2}deg vs published 0.1176@145.28deg; alternative-form g {:.4}@{:.2}deg",
                g.norm(),
                g.arg().to_degrees(),
                alt.norm(),
                alt.arg().to_degrees()
            ),
            z3.re.is_finite() && g.norm().is_finite(),
        ),
    ];
    assert!(report(6, "NDM closed forms", &checks));
}

#[test]
fn criterion_7_baseline() {
    let g = ArrayGeometry::half_wave(2, FR, 0.25);
    let n = baseline_netlist(antenna_source(g, None), R);
    let s = s_parameters(&n, &wide_grid()).unwrap();
    let k = s.nearest_index(FR);
    let (f_min, _) = minimum(&s, 0, 0);
    let s11 = to_db(s.s[k][(0, 0)]);
    let s21 = to_db(s.s[k][(1, 0)]);
    let checks = vec![
        (format!("min S11 at {:.3} GHz", f_min / 1e9), (2.6e9..=2.85e9).contains(&f_min)),
        (format!("S11(3 GHz) {s11:.2} dB"), (s11 + 6.0).abs() <= 2.0),
        (format!("S21(3 GHz) {s21:.2} dB"), (s21 + 12.0).abs() <= 3.0),
    ];
    assert!(report(7, "baseline array", &checks));
}

fn sweep(n: &dmnkit::circuit::Netlist) -> SParameterSweep {
    s_parameters(n, &wide_grid()).unwrap()
}

#[test]
fn criterion_8_bandwidths() {
    let z2 = structured_matrix(table_a(), table_b(), None);
    let z3 = structured_matrix(table_a(), table_b(), Some(table_c()));
    let g2 = ArrayGeometry::half_wave(2, FR, 0.25);
    let g3 = ArrayGeometry::half_wave(3, FR, 0.25);
    let within = |w: f64, nominal: f64| (0.5 * nominal..=1.5 * nominal).contains(&w);

    let zm = Matrix2::new(table_a(), table_b(), table_b(), table_a());
    let le = design_lumped(&zm, R, FR).unwrap();
    let loss = Loss::QFactor { table: QTable::reference_parts() };
    let s_le = sweep(&dmn_le_netlist(&le, &loss, antenna_source(g2, Some(&z2)), R).unwrap());
    let le_bw = joint_bandwidth(&s_le, &[(0, 0), (1, 0), (0, 1), (1, 1)], -20.0, FR);

    let rh = design_ring_hybrid(table_a(), table_b(), R, T2Strategy::QuarterWave).unwrap();
    let s_rh = sweep(&ring_hybrid_netlist(&rh, antenna_source(g2, Some(&z2)), FR));
    let rh21 = bandwidth(&s_rh, 1, 0, -20.0, FR);
    let rh22 = bandwidth(&s_rh, 1, 1, -10.0, FR);

    let nd = design_ndm(&z3, R, FR, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let s_nd = sweep(&ndm_netlist(&nd, antenna_source(g3, Some(&z3))));
    let nd21 = bandwidth(&s_nd, 1, 0, -20.0, FR);

    let mhz = |b: &dmnkit::circuit::Bandwidth| format!("{:.1} MHz{}", b.width_hz / 1e6, if b.is_clipped() { " (clipped)" } else { "" });
    let checks = vec![
        (format!("DMN-LE joint -20 dB {}", mhz(&le_bw)), within(le_bw.width_hz, 100e6)),
        (format!("DMN-RH S21 -20 dB {}", mhz(&rh21)), rh21.width_hz > 400e6 || rh21.is_clipped()),
        (format!("DMN-RH S22 -10 dB {}", mhz(&rh22)), within(rh22.width_hz, 100e6)),
        (format!("NDM S21 -20 dB {}", mhz(&nd21)), nd21.width_hz > 250e6 || nd21.is_clipped()),
    ];
    assert!(report(8, "bandwidths", &checks));
}

#[test]
fn criterion_9_engine_properties() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(9);
    let grid = linear_grid(2.4e9, 3.6e9, 25);
    let (mut recip, mut unit, mut roundtrip): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..50 {
        let n = random_netlist(&mut rng, false);
        let s = s_parameters(&n, &grid).unwrap();
        for m in &s.s {
            recip = recip.max(max_abs(&(m - m.transpose())));
        }
        let n = random_netlist(&mut rng, true);
        let s = s_parameters(&n, &grid).unwrap();
        for m in &s.s {
            unit = unit.max(max_abs(&(m.adjoint() * m - DMatrix::identity(2, 2))));
        }
        if k < 10 {
            let mut common = s.clone();
            common.reference_ohm = vec![50.0; 2];
            let text = format_touchstone(&common).unwrap();
            let back = parse_touchstone(&text, 2).unwrap();
            for (a, b) in common.s.iter().zip(&back.s) {
                roundtrip = roundtrip.max(max_abs(&(a - b)));
            }
            for (a, b) in common.frequencies_hz.iter().zip(&back.frequencies_hz) {
                roundtrip = roundtrip.max(((a - b) / a).abs());
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let checks = vec![
        (format!("reciprocity {recip:.1e}"), recip < 1e-9),
        (format!("unitarity {unit:.1e}"), unit < 1e-8),
        (format!("touchstone round trip {roundtrip:.1e}"), roundtrip < 1e-8),
        (format!("{secs:.2} s"), secs < 60.0),
    ];
    assert!(report(9, "engine properties", &checks));
}
