//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dmnkit::circuit::{Element, Netlist, NodeId, GROUND};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

pub const ETA: f64 = 376.730_313_668;
pub const GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn simpson_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn cos_kernel(t: f64) -> f64 {
    // (cos t − 1)/t, with its series near zero
    if t.abs() < 1e-4 {
        -t / 2.0 + t * t * t / 24.0
    } else {
        (t.cos() - 1.0) / t
    }
}

/// `(Si, Ci)` on an increasing grid of positive points, by accumulating
/// adaptive Simpson integrals between neighbours.
pub fn si_ci_quadrature(grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(grid.len());
    let (mut s, mut cc, mut prev) = (0.0, 0.0, 0.0);
    for &x in grid {
        s += simpson_adaptive(&sinc, prev, x, 1e-15);
        cc += simpson_adaptive(&cos_kernel, prev, x, 1e-15);
        prev = x;
        out.push((s, GAMMA + x.ln() + cc));
    }
    out
}

/// Denman–Beavers iteration for the square root of a 2×2 SPD matrix.
pub fn denman_beavers(m: Matrix2<f64>) -> Matrix2<f64> {
    let mut y = m;
    let mut z = Matrix2::identity();
    for _ in 0..100 {
        let yi = y.try_inverse().unwrap();
        let zi = z.try_inverse().unwrap();
        let ny = 0.5 * (y + zi);
        let nz = 0.5 * (z + yi);
        let done = (ny - y).amax() < 1e-15 * y.amax();
        y = ny;
        z = nz;
        if done {
            break;
        }
    }
    y
}

fn gauss_legendre_16() -> ([f64; 16], [f64; 16]) {
    // nodes and weights from Newton iteration on P16
    let n = 16;
    let mut x = [0.0; 16];
    let mut w = [0.0; 16];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
                break;
            }
        }
    }
    (x, w)
}

/// Composite 16-point Gauss–Legendre over `[a, b]` with `panels` panels.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let (x, w) = gauss_legendre_16();
    let h = (b - a) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for k in 0..16 {
            sum += f(lo + 0.5 * h * (x[k] + 1.0)) * (0.5 * h * w[k]);
        }
    }
    sum
}

/// Mutual impedance of two parallel side-by-side dipoles of half-length
/// `h` at distance `d`: the tangential field of one sinusoidal current
/// filament integrated against the other's current.
pub fn emf_mutual_oracle(d: f64, h: f64, k: f64) -> Complex64 {
    let field = |z: f64| {
        let r1 = (d * d + (z - h) * (z - h)).sqrt();
        let r2 = (d * d + (z + h) * (z + h)).sqrt();
        let r0 = (d * d + z * z).sqrt();
        let e = |r: f64| Complex64::from_polar(1.0 / r, -k * r);
        e(r1) + e(r2) - e(r0) * (2.0 * (k * h).cos())
    };
    let integral = integrate_complex(|z| field(z) * (k * (h - z.abs())).sin(), -h, h, 400);
    let s = (k * h).sin();
    Complex64::new(0.0, ETA / (4.0 * PI)) * integral / (s * s)
}

/// Radiation resistance (referred to the feed) of a dipole of half-length
/// `h` from the far-field power integral.
pub fn radiation_resistance_oracle(h: f64, k: f64) -> f64 {
    let kh = k * h;
    let f = |t: f64| {
        let s = t.sin();
        if s < 1e-12 {
            0.0
        } else {
            ((kh * t.cos()).cos() - kh.cos()).powi(2) / s
        }
    };
    ETA / (2.0 * PI) * simpson_adaptive(&f, 0.0, PI, 1e-12) / kh.sin().powi(2)
}

/// Input impedance of a lossless line terminated in `load`.
pub fn line_zin(load: Complex64, zc: f64, theta: f64) -> Complex64 {
    let t = Complex64::new(0.0, theta.tan());
    zc * (load + t * zc) / (zc + t * load)
}

/// Smallest positive electrical length (degrees) at which a 50 Ω line
/// makes `z` real, found by bracketing and bisection.
pub fn real_point_oracle(z: Complex64, zc: f64) -> f64 {
    let im = |deg: f64| line_zin(z, zc, deg.to_radians()).im;
    let mut prev = 1e-6;
    let step = 0.01;
    let mut cur = prev + step;
    while im(prev).signum() == im(cur).signum() || im(cur).abs() > 1e6 {
        prev = cur;
        cur += step;
    }
    let (mut lo, mut hi) = (prev, cur);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if im(lo).signum() == im(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Random connected two-port built from R, L, C, lines and stubs.
pub fn random_netlist(rng: &mut StdRng, lossless: bool) -> Netlist {
    let mut n = Netlist::new();
    let count = rng.gen_range(2..=6);
    let nodes: Vec<NodeId> = (0..count).map(|i| n.node(&format!("n{i}"))).collect();
    let f_ref = 3e9;
    let pick = |rng: &mut StdRng, p: NodeId, q: NodeId, ground_ok: bool| -> Element {
        let kinds = if lossless { 3 } else { 4 };
        let kind = rng.gen_range(0..kinds + usize::from(ground_ok && q == GROUND));
        let rs = if lossless { 0.0 } else { rng.gen_range(0.0..2.0) };
        match kind {
            0 => Element::Inductor { p, n: q, henries: rng.gen_range(0.5e-9..20e-9), series_resistance_ohm: rs },
            1 => Element::Capacitor { p, n: q, farads: rng.gen_range(0.1e-12..5e-12), series_resistance_ohm: rs },
            2 if q == GROUND => Element::ShortStub {
                p,
                n: q,
                z0_ohm: rng.gen_range(20.0..150.0),
                theta_deg: rng.gen_range(10.0..170.0),
                f_ref_hz: f_ref,
            },
            2 => Element::Line {
                n1: p,
                n2: q,
                z0_ohm: rng.gen_range(20.0..150.0),
                theta_deg: rng.gen_range(5.0..200.0),
                f_ref_hz: f_ref,
            },
            3 if !lossless => Element::Resistor { p, n: q, ohms: rng.gen_range(5.0..500.0) },
            _ => Element::ShortStub {
                p,
                n: q,
                z0_ohm: rng.gen_range(20.0..150.0),
                theta_deg: rng.gen_range(10.0..170.0),
                f_ref_hz: f_ref,
            },
        }
    };
    for i in 0..count {
        let to_ground = pick(rng, nodes[i], GROUND, true);
        n.add(to_ground);
        if i > 0 {
            let j = rng.gen_range(0..i);
            let e = pick(rng, nodes[i], nodes[j], false);
            n.add(e);
        }
    }
    for _ in 0..rng.gen_range(0..count) {
        let i = rng.gen_range(0..count);
        let j = rng.gen_range(0..count);
        if i != j {
            let e = pick(rng, nodes[i], nodes[j], false);
            n.add(e);
        }
    }
    let p2 = if count > 1 { nodes[count - 1] } else { nodes[0] };
    n.add_port("p1", nodes[0], GROUND, 50.0);
    n.add_port("p2", p2, GROUND, rng.gen_range(25.0..75.0));
    n
}

pub fn max_abs(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
