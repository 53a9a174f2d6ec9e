//! Touchstone v1 writer and reader (real/imaginary data, GHz).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::sparams::SParameterSweep;
use super::EngineError;

/// Shortest decimal that round-trips the value rounded to 9 significant
/// digits.
pub(crate) fn sig9(x: f64) -> String {
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:?}")
}

/// Order of `(i, j)` entries on a data line: the 2-port format lists
/// `S21` before `S12`.
fn entry_order(n: usize) -> Vec<(usize, usize)> {
    if n == 2 {
        vec![(0, 0), (1, 0), (0, 1), (1, 1)]
    } else {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }
}

pub fn format_touchstone(sweep: &SParameterSweep) -> Result<String, EngineError> {
    let n = sweep.port_count();
    if !(1..=4).contains(&n) {
        return Err(EngineError::Format(format!("touchstone export supports 1-4 ports, got {n}")));
    }
    let r = sweep.reference_ohm[0];
    if sweep.reference_ohm.iter().any(|&x| x != r) {
        return Err(EngineError::Format("touchstone v1 needs a common reference impedance".into()));
    }
    let mut out = format!("# GHz S RI R {}\n", sig9(r).trim_end_matches(".0"));
    for (f, s) in sweep.frequencies_hz.iter().zip(&sweep.s) {
        let mut line = sig9(f / 1e9);
        for (k, (i, j)) in entry_order(n).into_iter().enumerate() {
            // 3- and 4-port data put each matrix row on its own line
            if n > 2 && k > 0 && k % n == 0 {
                line.push('\n');
            }
            let v = s[(i, j)];
            let _ = write!(line, " {} {}", sig9(v.re), sig9(v.im));
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

pub fn export_touchstone(sweep: &SParameterSweep, path: &Path) -> Result<(), EngineError> {
    let text = format_touchstone(sweep)?;
    std::fs::write(path, text).map_err(|source| EngineError::Io { path: path.to_path_buf(), source })
}

pub fn parse_touchstone(text: &str, ports: usize) -> Result<SParameterSweep, EngineError> {
    let bad = |m: String| EngineError::Format(m);
    let mut reference = 50.0;
    let mut scale = 1e9;
    let mut numbers = Vec::new();
    for line in text.lines() {
        let line = line.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            let tokens: Vec<String> = opts.split_whitespace().map(str::to_ascii_uppercase).collect();
            for (k, t) in tokens.iter().enumerate() {
                match t.as_str() {
                    "HZ" => scale = 1.0,
                    "KHZ" => scale = 1e3,
                    "MHZ" => scale = 1e6,
                    "GHZ" => scale = 1e9,
                    "S" | "RI" => {}
                    "R" => {
                        reference = tokens
                            .get(k + 1)
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| bad("missing reference impedance".into()))?
                    }
                    "MA" | "DB" | "Y" | "Z" | "H" | "G" => return Err(bad(format!("unsupported option {t}"))),
                    _ => {}
                }
            }
            continue;
        }
        for tok in line.split_whitespace() {
            numbers.push(tok.parse::<f64>().map_err(|e| bad(format!("{tok}: {e}")))?);
        }
    }
    let per_row = 1 + 2 * ports * ports;
    if numbers.len() % per_row != 0 {
        return Err(bad(format!("{} values is not a multiple of {per_row}", numbers.len())));
    }
    let order = entry_order(ports);
    let mut frequencies_hz = Vec::new();
    let mut s = Vec::new();
    for row in numbers.chunks(per_row) {
        frequencies_hz.push(row[0] * scale);
        let mut m = DMatrix::zeros(ports, ports);
        for (k, &(i, j)) in order.iter().enumerate() {
            m[(i, j)] = Complex64::new(row[1 + 2 * k], row[2 + 2 * k]);
        }
        s.push(m);
    }
    Ok(SParameterSweep { frequencies_hz, s, reference_ohm: vec![reference; ports] })
}
