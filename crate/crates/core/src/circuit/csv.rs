use std::path::Path;

use super::sparams::{to_db, SParameterSweep};
use super::touchstone::sig9;
use super::EngineError;

/// Header row: `freq_hz` then `sIJ_db,sIJ_deg` for each entry, row-major.
pub fn csv_header(ports: usize) -> String {
    let mut cols = vec!["freq_hz".to_string()];
    for i in 1..=ports {
        for j in 1..=ports {
            cols.push(format!("s{i}{j}_db"));
            cols.push(format!("s{i}{j}_deg"));
        }
    }
    cols.join(",")
}

pub fn format_csv(sweep: &SParameterSweep) -> String {
    let n = sweep.port_count();
    let mut out = csv_header(n);
    out.push('\n');
    for (f, s) in sweep.frequencies_hz.iter().zip(&sweep.s) {
        let mut row = vec![sig9(*f)];
        for i in 0..n {
            for j in 0..n {
                row.push(sig9(to_db(s[(i, j)])));
                row.push(sig9(s[(i, j)].arg().to_degrees()));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn export_csv(sweep: &SParameterSweep, path: &Path) -> Result<(), EngineError> {
    std::fs::write(path, format_csv(sweep)).map_err(|source| EngineError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn header_is_exact() {
        assert_eq!(csv_header(2), "freq_hz,s11_db,s11_deg,s12_db,s12_deg,s21_db,s21_deg,s22_db,s22_deg");
    }

    #[test]
    fn db_values_and_floor() {
        assert!((to_db(Complex64::new(0.5, 0.0)) + 6.020_599_913_279_624).abs() < 1e-12);
        assert_eq!(to_db(Complex64::new(0.0, 0.0)), -300.0);
        let sweep = SParameterSweep { frequencies_hz: vec![3e9], s: vec![DMatrix::zeros(1, 1)], reference_ohm: vec![50.0] };
        assert_eq!(format_csv(&sweep), "freq_hz,s11_db,s11_deg\n3000000000.0,-300.0,0.0\n");
    }
}
