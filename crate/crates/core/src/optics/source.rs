use serde::{Deserialize, Serialize};

use super::basis::{auto_half_span, build_measurement_matrix, MeasurementBasis};
use super::crystal::CrystalSpec;
use super::grid::SpectralGrid;
use super::jsa::{JointSpectralAmplitude, JsaKernel};
use super::pump::PumpSpec;
use super::schmidt::{schmidt_decompose, SchmidtDecomposition};
use super::DEFAULT_R_SCALE;
use crate::{Error, Result};

fn default_pump_center() -> f64 {
    780e-9
}
fn default_pump_width() -> f64 {
    1e-9
}
fn default_half_width() -> f64 {
    30e-9
}
fn default_points() -> usize {
    256
}
fn default_r_scale() -> f64 {
    DEFAULT_R_SCALE
}
fn default_min_kept() -> usize {
    12
}
fn default_capture() -> f64 {
    0.99
}

/// Pump, grid and calibration settings for the squeezed-light source. The
/// crystal itself is supplied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// Metres.
    #[serde(default = "default_pump_center")]
    pub pump_center: f64,
    /// Gaussian σ, metres.
    #[serde(default = "default_pump_width")]
    pub pump_width: f64,
    /// Overrides the crystal file's length, metres.
    #[serde(default)]
    pub length: Option<f64>,
    /// Overrides the crystal file's poling period, metres. When neither is
    /// set the period is matched at the degenerate point.
    #[serde(default)]
    pub poling_period: Option<f64>,
    /// Signal/idler grid centre; defaults to 2·pump_center.
    #[serde(default)]
    pub grid_center: Option<f64>,
    #[serde(default = "default_half_width")]
    pub grid_half_width: f64,
    #[serde(default = "default_points")]
    pub grid_points: usize,
    #[serde(default = "default_r_scale")]
    pub r_scale: f64,
    /// n_kept = max(n, min_kept).
    #[serde(default = "default_min_kept")]
    pub min_kept: usize,
    /// Fixed frexel half-span in metres; chosen from mode support when unset.
    #[serde(default)]
    pub frexel_half_span: Option<f64>,
    /// Fraction of the first n modes' norm the automatic half-span must hold.
    #[serde(default = "default_capture")]
    pub frexel_capture: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |k: &str, v: String| Err(Error::InvalidParameter(format!("{k} = {v}")));
        if !(self.pump_center > 0.0) {
            return bad("pump_center", self.pump_center.to_string());
        }
        if !(self.pump_width > 0.0) {
            return bad("pump_width", self.pump_width.to_string());
        }
        if !(self.grid_half_width > 0.0) {
            return bad("grid_half_width", self.grid_half_width.to_string());
        }
        if self.grid_points < 2 {
            return bad("grid_points", self.grid_points.to_string());
        }
        if !(self.r_scale > 0.0) {
            return bad("r_scale", self.r_scale.to_string());
        }
        if !(self.frexel_capture > 0.0 && self.frexel_capture <= 1.0) {
            return bad("frexel_capture", self.frexel_capture.to_string());
        }
        Ok(())
    }

    pub fn grid_center(&self) -> f64 {
        self.grid_center.unwrap_or(2.0 * self.pump_center)
    }

    pub fn n_kept(&self, n: usize) -> usize {
        n.max(self.min_kept)
    }

    /// Crystal with length/period overrides applied and, if still unset, the
    /// poling period matched at 2·pump_center.
    pub fn prepare_crystal(&self, crystal: &CrystalSpec) -> Result<CrystalSpec> {
        let mut c = crystal.clone();
        if let Some(l) = self.length {
            c.length = l;
        }
        if let Some(p) = self.poling_period {
            c.poling_period = Some(p);
        }
        if c.poling_period.is_none() {
            let l0 = 2.0 * self.pump_center;
            if let Ok(p) = c.poling_period_optimal(l0, l0) {
                c.poling_period = Some(p);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn build(&self, crystal: &CrystalSpec, segments: usize) -> Result<Source> {
        self.validate()?;
        let crystal = self.prepare_crystal(crystal)?;
        let pump = PumpSpec::new(self.pump_center, self.pump_width, vec![0.0; segments.max(1)])?;
        let grid = SpectralGrid::centered(self.grid_center(), self.grid_half_width, self.grid_points)?;
        let kernel = JsaKernel::new(&pump, &crystal, &grid, &grid)?;
        Ok(Source { config: self.clone(), crystal, pump, grid, kernel })
    }
}

/// A configured source: precomputed JSA kernel for a fixed segment count.
#[derive(Debug, Clone)]
pub struct Source {
    pub config: SourceConfig,
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    pub grid: SpectralGrid,
    pub kernel: JsaKernel,
}

impl Source {
    pub fn segments(&self) -> usize {
        self.pump.segments()
    }

    pub fn jsa(&self, phases: &[f64]) -> Result<JointSpectralAmplitude> {
        self.kernel.assemble(phases)
    }

    pub fn schmidt(&self, phases: &[f64], n_kept: usize) -> Result<SchmidtDecomposition> {
        schmidt_decompose(&self.jsa(phases)?, n_kept, self.config.r_scale)
    }

    /// `(center, half_span)` of the frexel window for `n` frexels.
    pub fn frexel_window(&self, n: usize) -> Result<(f64, f64)> {
        let center = self.config.grid_center();
        if let Some(s) = self.config.frexel_half_span {
            return Ok((center, s));
        }
        let schmidt = self.schmidt(&vec![0.0; self.segments()], self.config.n_kept(n))?;
        Ok((center, auto_half_span(&schmidt, n, center, self.config.frexel_capture)?))
    }

    pub fn basis(&self, schmidt: &SchmidtDecomposition, n: usize) -> Result<MeasurementBasis> {
        let (center, span) = self.frexel_window(n)?;
        build_measurement_matrix(schmidt, n, span, center)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SourceConfig::default();
        assert_eq!(c.grid_points, 256);
        assert!((c.grid_center() - 1560e-9).abs() < 1e-20);
        assert_eq!(c.n_kept(4), 12);
        assert_eq!(c.n_kept(20), 20);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<SourceConfig>("grid_pionts = 3").is_err());
    }

    #[test]
    fn ktp_gets_matched_period() {
        let c = SourceConfig::default().prepare_crystal(&CrystalSpec::ktp()).unwrap();
        let p = c.poling_period.unwrap();
        assert!((p - 25.295e-6).abs() < 1e-9);
    }
}
