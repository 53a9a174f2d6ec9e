use serde::{Deserialize, Serialize};

use super::sparams::SParameterSweep;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub threshold_db: f64,
    pub center_hz: f64,
    /// `None` when the trace is above threshold at the centre.
    pub interval_hz: Option<(f64, f64)>,
    pub width_hz: f64,
    pub clipped_low: bool,
    pub clipped_high: bool,
}

impl Bandwidth {
    pub fn is_clipped(&self) -> bool {
        self.clipped_low || self.clipped_high
    }
}

/// Maximal interval around `center` where `values_db <= threshold_db`, with
/// the edges placed by linear interpolation in dB.
pub fn interval_below(frequencies: &[f64], values_db: &[f64], threshold_db: f64, center: f64) -> Bandwidth {
    assert_eq!(frequencies.len(), values_db.len());
    let empty = Bandwidth {
        threshold_db,
        center_hz: center,
        interval_hz: None,
        width_hz: 0.0,
        clipped_low: false,
        clipped_high: false,
    };
    if frequencies.is_empty() {
        return empty;
    }
    let mut k = 0;
    for (i, f) in frequencies.iter().enumerate() {
        if (f - center).abs() < (frequencies[k] - center).abs() {
            k = i;
        }
    }
    if values_db[k] > threshold_db {
        return empty;
    }
    let cross = |i: usize, o: usize| {
        let (vi, vo) = (values_db[i], values_db[o]);
        let t = (threshold_db - vi) / (vo - vi);
        frequencies[i] + t * (frequencies[o] - frequencies[i])
    };
    let mut lo = k;
    while lo > 0 && values_db[lo - 1] <= threshold_db {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < frequencies.len() && values_db[hi + 1] <= threshold_db {
        hi += 1;
    }
    let clipped_low = lo == 0;
    let clipped_high = hi + 1 == frequencies.len();
    let f_lo = if clipped_low { frequencies[0] } else { cross(lo, lo - 1) };
    let f_hi = if clipped_high { frequencies[hi] } else { cross(hi, hi + 1) };
    Bandwidth {
        threshold_db,
        center_hz: center,
        interval_hz: Some((f_lo, f_hi)),
        width_hz: f_hi - f_lo,
        clipped_low,
        clipped_high,
    }
}

/// Interval around `center` where `|S_ij|` stays at or below the threshold.
pub fn bandwidth(sweep: &SParameterSweep, i: usize, j: usize, threshold_db: f64, center: f64) -> Bandwidth {
    interval_below(&sweep.frequencies_hz, &sweep.trace_db(i, j), threshold_db, center)
}

/// Interval where every listed trace is at or below the threshold.
pub fn joint_bandwidth(sweep: &SParameterSweep, traces: &[(usize, usize)], threshold_db: f64, center: f64) -> Bandwidth {
    let worst: Vec<f64> = (0..sweep.frequencies_hz.len())
        .map(|k| traces.iter().map(|&(i, j)| super::sparams::to_db(sweep.s[k][(i, j)])).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    interval_below(&sweep.frequencies_hz, &worst, threshold_db, center)
}

/// Frequency of the minimum of `|S_ij|`.
pub fn minimum(sweep: &SParameterSweep, i: usize, j: usize) -> (f64, f64) {
    let db = sweep.trace_db(i, j);
    let k = (0..db.len()).fold(0, |best, k| if db[k] < db[best] { k } else { best });
    (sweep.frequencies_hz[k], db[k])
}
