mod common;

use common::{c, line_zin, real_point_oracle};
use dmnkit::ring_hybrid::{
    design_ring, design_ring_hybrid, match_single_line, match_t2_quarter_wave, match_t2_stub, PortMatch, RingError,
    SingleLineMatch, T2Strategy,
};
use num_complex::Complex64;
use proptest::prelude::*;

const R: f64 = 50.0;

fn table() -> (Complex64, Complex64) {
    (c(73.05, 42.44), c(40.74, -28.31))
}

#[test]
fn quarter_wave_line_length_matches_bisection() {
    let (a, b) = table();
    let p = design_ring(a, b, R).unwrap();
    let q = match_t2_quarter_wave(p.z2, R).unwrap();
    let oracle = real_point_oracle(p.z2, R);
    assert!((q.theta21_deg - oracle).abs() < 1e-8, "{} vs {oracle}", q.theta21_deg);
    let rx = line_zin(p.z2, R, q.theta21_deg.to_radians());
    assert!(rx.im.abs() < 1e-9 && (rx.re - q.rx_ohm).abs() < 1e-9);
    let end = line_zin(c(R, 0.0), q.z22_ohm, std::f64::consts::FRAC_PI_2);
    assert!((end.re - q.rx_ohm).abs() < 1e-9);
}

#[test]
fn stub_match_brings_port_to_source() {
    let (a, b) = table();
    let p = design_ring(a, b, R).unwrap();
    let s = match_t2_stub(p.z2, R).unwrap();
    let stub_y = c(0.0, -1.0 / (s.zs1_ohm * s.stub_length_deg.to_radians().tan()));
    let y = p.z2.inv() + stub_y;
    assert!(y.im.abs() < 1e-12 && (y.re - s.conductance_s).abs() < 1e-15);
    let seen = line_zin(y.inv(), s.zs2_ohm, std::f64::consts::FRAC_PI_2);
    assert!((seen - c(R, 0.0)).norm() < 1e-9);
}

#[test]
fn table_design_chooses_single_line_for_t1() {
    let (a, b) = table();
    let d = design_ring_hybrid(a, b, R, T2Strategy::Stub).unwrap();
    assert!(matches!(d.t1, PortMatch::SingleLine { .. }));
    assert!(matches!(d.t2, PortMatch::Stub(_)));
    assert!(!d.t2_single_line.is_feasible());
}

#[test]
fn errors() {
    let (a, _) = table();
    assert!(matches!(design_ring(a, a, R), Err(RingError::DegenerateModes)));
    assert!(matches!(design_ring(a, c(1.0, 0.0), -1.0), Err(RingError::SourceResistance(_))));
    assert!(matches!(match_single_line(c(R, 3.0), R), Err(RingError::SingleLinePole(_))));
    assert!(matches!(match_t2_stub(c(20.0, 0.0), R), Err(RingError::DegenerateStub(_))));
    assert!(matches!(match_t2_stub(c(-5.0, 3.0), R), Err(RingError::NotPassive(_))));
}

proptest! {
    #[test]
    fn even_odd_mode_identity(
        ra in 30.0f64..150.0, xa in -80.0f64..80.0, rb in -60.0f64..60.0, xb in -60.0f64..60.0, r in 10.0f64..100.0,
    ) {
        let (a, b) = (c(ra, xa), c(rb, xb));
        prop_assume!((a + b).norm() > 1.0 && (a - b).norm() > 1.0);
        let p = design_ring(a, b, r).unwrap();
        let half = p.z0 * p.z0 / 2.0;
        prop_assert!((p.z1 * (a + b) - half).norm() < 1e-10 * half);
        prop_assert!((p.z2 * (a - b) - half).norm() < 1e-10 * half);
        prop_assert!((p.z1.norm() * p.z2.norm() - r * r).abs() < 1e-9 * r * r);
    }

    #[test]
    fn single_line_match_is_exact(re in 1.0f64..300.0, im in -200.0f64..200.0, r in 10.0f64..100.0) {
        prop_assume!((re - r).abs() > 1e-3 * r);
        let z = c(re, im);
        match match_single_line(z, r).unwrap() {
            SingleLineMatch::Feasible { z0i_ohm, theta_deg, .. } => {
                prop_assert!(theta_deg > 0.0 && theta_deg <= 180.0);
                let zin = line_zin(z, z0i_ohm, theta_deg.to_radians());
                prop_assert!((zin - c(r, 0.0)).norm() < 1e-7 * r, "{}", zin);
            }
            SingleLineMatch::Infeasible { z0i_imag_ohm } => {
                prop_assert!(z0i_imag_ohm > 0.0);
                prop_assert!(r * re - r * im * im / (r - re) < 0.0);
            }
        }
    }
}
