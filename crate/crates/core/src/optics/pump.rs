use num_complex::Complex64;

use super::SPEED_OF_LIGHT;
use crate::{Error, Result};

/// Gaussian pump split into `N = phases.len()` contiguous segments over
/// [c − 3σ, c + 3σ], each carrying its own phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    /// Central wavelength, metres.
    pub center: f64,
    /// Gaussian width σ, metres.
    pub width: f64,
    pub phases: Vec<f64>,
}

impl PumpSpec {
    pub fn new(center: f64, width: f64, phases: Vec<f64>) -> Result<Self> {
        if !(center > 0.0) {
            return Err(Error::InvalidParameter(format!("pump center {center} must be > 0")));
        }
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!("pump width {width} must be > 0")));
        }
        if phases.is_empty() {
            return Err(Error::InvalidParameter("pump needs at least one segment".into()));
        }
        Ok(Self { center, width, phases })
    }

    pub fn segments(&self) -> usize {
        self.phases.len()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - 3.0 * self.width, self.center + 3.0 * self.width)
    }

    /// Unit-peak Gaussian envelope, zero outside ±3σ.
    pub fn envelope(&self, lambda: f64) -> f64 {
        let x = lambda - self.center;
        if x.abs() > 3.0 * self.width {
            return 0.0;
        }
        (-x * x / (2.0 * self.width * self.width)).exp()
    }

    /// Index of the segment containing `lambda`, if inside the support.
    pub fn segment_of(&self, lambda: f64) -> Option<usize> {
        segment_index(self.center, self.width, self.segments(), lambda)
    }

    /// Angular frequency at the centre of segment `i`, rad/s.
    pub fn segment_angular_frequency(&self, i: usize) -> f64 {
        let (lo, hi) = self.support();
        let w = (hi - lo) / self.segments() as f64;
        let lambda = lo + w * (i as f64 + 0.5);
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda
    }

    pub fn amplitude(&self, lambda: f64) -> Complex64 {
        match self.segment_of(lambda) {
            Some(i) => Complex64::from_polar(self.envelope(lambda), self.phases[i]),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

pub(crate) fn segment_index(center: f64, width: f64, segments: usize, lambda: f64) -> Option<usize> {
    let lo = center - 3.0 * width;
    let x = (lambda - lo) / (6.0 * width);
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    Some(((x * segments as f64).floor() as usize).min(segments - 1))
}
