use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use dmnkit::microstrip::Substrate;
use dmnkit::scenario::Loss;
use dmnkit::lumped::QTable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Baseline,
    DmnLe,
    DmnRh,
    DmnRhStub,
    Ndm,
    Compare,
}

impl Scenario {
    pub const DESIGNS: [Scenario; 5] =
        [Scenario::Baseline, Scenario::DmnLe, Scenario::DmnRh, Scenario::DmnRhStub, Scenario::Ndm];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::DmnLe => "dmn-le",
            Scenario::DmnRh => "dmn-rh",
            Scenario::DmnRhStub => "dmn-rh-stub",
            Scenario::Ndm => "ndm",
            Scenario::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossFlag {
    Ideal,
    QFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

/// Fixed array impedances used in place of the EMF model at `f_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZOverride {
    pub a_ohm: Complex64,
    pub b_ohm: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_ohm: Option<Complex64>,
}

impl ZOverride {
    pub fn published() -> Self {
        Self {
            a_ohm: Complex64::new(73.05, 42.44),
            b_ohm: Complex64::new(40.74, -28.31),
            c_ohm: Some(Complex64::new(64.11, -0.074)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarVolts {
    pub magnitude_v: f64,
    pub phase_deg: f64,
}

impl PolarVolts {
    pub fn phasor(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude_v, self.phase_deg.to_radians())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdmDrive {
    pub u01: PolarVolts,
    pub u02: PolarVolts,
}

impl Default for NdmDrive {
    fn default() -> Self {
        Self {
            u01: PolarVolts { magnitude_v: 10.6327, phase_deg: -41.8153 },
            u02: PolarVolts { magnitude_v: 3.368, phase_deg: 124.8037 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub reference_frequency_hz: f64,
    pub spacing_wavelengths: f64,
    /// Defaults to λ/1000 at the reference frequency.
    pub wire_radius_m: Option<f64>,
    pub source_resistance_ohm: f64,
    /// Defaults to 0.8–1.2 f_r with 1201 points.
    pub sweep: Option<SweepConfig>,
    pub substrate: Substrate,
    pub loss: Loss,
    pub z_at_override: Option<ZOverride>,
    pub ndm_drive: NdmDrive,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::DmnRh,
            reference_frequency_hz: 3e9,
            spacing_wavelengths: 0.25,
            wire_radius_m: None,
            source_resistance_ohm: 50.0,
            sweep: None,
            substrate: Substrate::ro3006(),
            loss: Loss::Ideal,
            z_at_override: None,
            ndm_drive: NdmDrive::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub reference_frequency_hz: Option<f64>,
    pub spacing_wavelengths: Option<f64>,
    pub points: Option<usize>,
    pub loss: Option<LossFlag>,
    pub output_dir: Option<PathBuf>,
    pub published_z: bool,
}

const DEFAULT_POINTS: usize = 1201;

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        cfg.apply(flags);
        cfg.resolve();
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, flags: &Overrides) {
        if let Some(s) = flags.scenario {
            self.scenario = s;
        }
        if let Some(f) = flags.reference_frequency_hz {
            self.reference_frequency_hz = f;
        }
        if let Some(s) = flags.spacing_wavelengths {
            self.spacing_wavelengths = s;
        }
        if let Some(l) = flags.loss {
            self.loss = match l {
                LossFlag::Ideal => Loss::Ideal,
                LossFlag::QFactor => match &self.loss {
                    Loss::QFactor { .. } => self.loss.clone(),
                    Loss::Ideal => Loss::QFactor { table: QTable::reference_parts() },
                },
            };
        }
        if flags.published_z {
            self.z_at_override = Some(ZOverride::published());
        }
        if let Some(o) = &flags.output_dir {
            self.output_dir = o.clone();
        }
        if let Some(n) = flags.points {
            let sweep = self.sweep.get_or_insert_with(|| default_sweep(self.reference_frequency_hz));
            sweep.points = n;
        }
    }

    /// Fills defaults that depend on other fields so the echoed config is
    /// complete.
    fn resolve(&mut self) {
        let f = self.reference_frequency_hz;
        if self.sweep.is_none() {
            self.sweep = Some(default_sweep(f));
        }
        if self.wire_radius_m.is_none() && f > 0.0 {
            self.wire_radius_m = Some(dmnkit::SPEED_OF_LIGHT / f / 1000.0);
        }
    }

    fn validate(&self) -> Result<()> {
        let f = self.reference_frequency_hz;
        if !(f > 0.0 && f.is_finite()) {
            bail!("reference frequency must be positive, got {f}");
        }
        if !(self.spacing_wavelengths > 0.0) {
            bail!("spacing must be positive, got {} wavelengths", self.spacing_wavelengths);
        }
        if !(self.source_resistance_ohm > 0.0) {
            bail!("source resistance must be positive, got {}", self.source_resistance_ohm);
        }
        let s = self.sweep();
        if !(s.start_hz < f && f < s.stop_hz) {
            bail!("sweep {}..{} Hz must contain the reference frequency {f} Hz", s.start_hz, s.stop_hz);
        }
        if s.points < 3 {
            bail!("sweep needs at least 3 points, got {}", s.points);
        }
        if let Some(r) = self.wire_radius_m {
            if !(r > 0.0) {
                bail!("wire radius must be positive, got {r}");
            }
        }
        Ok(())
    }

    pub fn sweep(&self) -> SweepConfig {
        self.sweep.unwrap_or_else(|| default_sweep(self.reference_frequency_hz))
    }

    pub fn grid(&self) -> Vec<f64> {
        let s = self.sweep();
        dmnkit::circuit::linear_grid(s.start_hz, s.stop_hz, s.points)
    }
}

fn default_sweep(f_r: f64) -> SweepConfig {
    SweepConfig { start_hz: 0.8 * f_r, stop_hz: 1.2 * f_r, points: DEFAULT_POINTS }
}
