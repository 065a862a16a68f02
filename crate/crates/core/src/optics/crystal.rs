use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const KTP_TOML: &str = include_str!("../../data/ktp.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Five-coefficient Sellmeier law, n² = c1 + c2/(λ²−c3) + c4/(λ²−c5), λ in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sellmeier(pub [f64; 5]);

impl Sellmeier {
    pub fn constant(n: f64) -> Self {
        Sellmeier([n * n, 0.0, 0.0, 0.0, 0.0])
    }

    /// Bare refractive index at `lambda_um`.
    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        let [c1, c2, c3, c4, c5] = self.0;
        let l2 = lambda_um * lambda_um;
        let (d1, d2) = (l2 - c3, l2 - c5);
        if d1.abs() < 1e-12 || d2.abs() < 1e-12 {
            return Err(Error::Domain(format!("Sellmeier pole at {lambda_um} um")));
        }
        let radicand = c1 + c2 / d1 + c4 / d2;
        if !(radicand > 0.0) {
            return Err(Error::Domain(format!(
                "Sellmeier radicand {radicand} is not positive at {lambda_um} um"
            )));
        }
        Ok(radicand.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierTable {
    pub x: Sellmeier,
    pub y: Sellmeier,
    pub z: Sellmeier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisMap {
    pub pump: Axis,
    pub signal: Axis,
    pub idler: Axis,
}

impl Default for AxisMap {
    fn default() -> Self {
        AxisMap { pump: Axis::Z, signal: Axis::Z, idler: Axis::Z }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WaveguideOffset {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

/// Nonlinear waveguide. `poling_period = None` disables the grating term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalSpec {
    pub name: String,
    pub sellmeier: SellmeierTable,
    /// Metres.
    pub length: f64,
    /// Metres.
    #[serde(default)]
    pub poling_period: Option<f64>,
    #[serde(default)]
    pub axes: AxisMap,
    #[serde(default)]
    pub waveguide_offset: WaveguideOffset,
}

impl CrystalSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: CrystalSpec =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("crystal file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read crystal file {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Built-in KTP data, no poling period set.
    pub fn ktp() -> Self {
        Self::from_toml_str(KTP_TOML).expect("embedded KTP data is valid")
    }

    /// Dispersionless crystal with index `n` on every axis.
    pub fn toy(n: f64, length: f64) -> Self {
        let s = Sellmeier::constant(n);
        CrystalSpec {
            name: "toy".into(),
            sellmeier: SellmeierTable { x: s, y: s, z: s },
            length,
            poling_period: None,
            axes: AxisMap::default(),
            waveguide_offset: WaveguideOffset::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::InvalidParameter(format!("length {} must be > 0", self.length)));
        }
        if let Some(p) = self.poling_period {
            if !(p > 0.0) {
                return Err(Error::InvalidParameter(format!("poling_period {p} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn with_poling_period(mut self, period: Option<f64>) -> Self {
        self.poling_period = period;
        self
    }

    /// Refractive index along `axis` at `lambda_um` micrometres, waveguide offset included.
    pub fn sellmeier_index(&self, axis: Axis, lambda_um: f64) -> Result<f64> {
        let (law, offset) = match axis {
            Axis::X => (&self.sellmeier.x, self.waveguide_offset.x),
            Axis::Y => (&self.sellmeier.y, self.waveguide_offset.y),
            Axis::Z => (&self.sellmeier.z, self.waveguide_offset.z),
        };
        let n = law.index(lambda_um)? + offset;
        if !(n > 1.0) {
            return Err(Error::Domain(format!("index {n} along {axis:?} at {lambda_um} um is not > 1")));
        }
        Ok(n)
    }

    /// k = 2π n / λ with λ in metres.
    pub fn wavenumber(&self, axis: Axis, lambda: f64) -> Result<f64> {
        Ok(2.0 * PI * self.sellmeier_index(axis, lambda * 1e6)? / lambda)
    }

    /// k_P − k_S − k_I without the grating term.
    fn bare_mismatch(&self, signal: f64, idler: f64) -> Result<f64> {
        if !(signal > 0.0 && idler > 0.0) {
            return Err(Error::Domain("wavelengths must be positive".into()));
        }
        let pump = 1.0 / (1.0 / signal + 1.0 / idler);
        Ok(self.wavenumber(self.axes.pump, pump)?
            - self.wavenumber(self.axes.signal, signal)?
            - self.wavenumber(self.axes.idler, idler)?)
    }

    /// Δk = k_P − k_S − k_I − 2π/Λ in rad/m, with 1/λ_P = 1/λ_S + 1/λ_I.
    pub fn phase_mismatch(&self, signal: f64, idler: f64) -> Result<f64> {
        let grating = self.poling_period.map_or(0.0, |p| 2.0 * PI / p);
        Ok(self.bare_mismatch(signal, idler)? - grating)
    }

    /// First-order quasi-phase-matching period cancelling Δk at the targets.
    pub fn poling_period_optimal(&self, signal: f64, idler: f64) -> Result<f64> {
        let dk = self.bare_mismatch(signal, idler)?;
        let scale = 2.0 * PI / signal.min(idler);
        if !(dk > 1e-9 * scale) {
            return Err(Error::Domain(format!(
                "k_P - k_S - k_I = {dk} rad/m; no first-order quasi-phase-matching period"
            )));
        }
        Ok(2.0 * PI / dk)
    }
}
