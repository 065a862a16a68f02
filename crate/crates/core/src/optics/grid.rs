use crate::{Error, Result};

/// Uniformly spaced wavelength samples in metres. Samples are cell midpoints,
/// so a midpoint-rule integral is `step * sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    samples: Vec<f64>,
}

impl SpectralGrid {
    /// `count` samples from `min` to `max` inclusive.
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParameter(format!("grid count {count} < 2")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidParameter(format!("grid span [{min}, {max}] is empty")));
        }
        let step = (max - min) / (count - 1) as f64;
        let samples = (0..count).map(|i| min + step * i as f64).collect();
        Ok(Self { samples })
    }

    pub fn centered(center: f64, half_width: f64, count: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, count)
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 samples".into()));
        }
        let step = samples[1] - samples[0];
        if !(step > 0.0) {
            return Err(Error::InvalidParameter("grid samples must increase".into()));
        }
        for w in samples.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) || ((d - step) / step).abs() > 1e-6 {
                return Err(Error::InvalidParameter("grid samples must be uniformly spaced".into()));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn step(&self) -> f64 {
        (self.samples[self.count() - 1] - self.samples[0]) / (self.count() - 1) as f64
    }

    pub fn span(&self) -> (f64, f64) {
        (self.samples[0], self.samples[self.count() - 1])
    }

    pub fn center(&self) -> f64 {
        let (a, b) = self.span();
        0.5 * (a + b)
    }

    /// Covered interval including the half cells at both ends.
    pub fn cell_bounds(&self) -> (f64, f64) {
        let (a, b) = self.span();
        let h = 0.5 * self.step();
        (a - h, b + h)
    }
}
