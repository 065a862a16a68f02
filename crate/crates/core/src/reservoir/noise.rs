use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// Additive i.i.d. Gaussian noise, one standard deviation per observable.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    std: Vec<f64>,
}

impl NoiseModel {
    pub fn new(std: Vec<f64>) -> Result<Self> {
        if let Some(s) = std.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!("noise std {s} must be finite and >= 0")));
        }
        Ok(Self { std })
    }

    pub fn uniform(std: f64, len: usize) -> Result<Self> {
        Self::new(vec![std; len])
    }

    pub fn zero(len: usize) -> Self {
        Self { std: vec![0.0; len] }
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn len(&self) -> usize {
        self.std.len()
    }

    pub fn is_empty(&self) -> bool {
        self.std.is_empty()
    }

    pub fn is_silent(&self) -> bool {
        self.std.iter().all(|&s| s == 0.0)
    }

    /// Adds one draw per observable. Silent entries consume no randomness.
    pub fn apply<R: Rng + ?Sized>(&self, values: &mut [f64], rng: &mut R) {
        for (v, &s) in values.iter_mut().zip(&self.std) {
            if s > 0.0 {
                *v += Normal::new(0.0, s).expect("validated std").sample(rng);
            }
        }
    }
}

/// Repeated measurements at one phase setting: `samples[rep][observable]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    pub phase: f64,
    pub samples: Vec<Vec<f64>>,
}

fn check(traces: &[NoiseTrace]) -> Result<usize> {
    let first = traces.first().ok_or_else(|| Error::Degenerate("no noise traces".into()))?;
    let m = first.samples.first().map_or(0, Vec::len);
    if m == 0 {
        return Err(Error::Degenerate("noise traces carry no observables".into()));
    }
    for t in traces {
        if t.samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "phase point {} has {} repetition(s); at least 2 are required",
                t.phase,
                t.samples.len()
            )));
        }
        if t.samples.iter().any(|s| s.len() != m) {
            return Err(Error::Dimension("traces disagree on the observable count".into()));
        }
    }
    Ok(m)
}

/// Least-squares std per observable with the mean fixed to the model
/// prediction at each phase: s² = mean of squared residuals.
pub fn fit_noise<F>(traces: &[NoiseTrace], predict: F) -> Result<NoiseModel>
where
    F: Fn(f64) -> Vec<f64>,
{
    let m = check(traces)?;
    let mut ss = vec![0.0; m];
    let mut count = 0usize;
    for t in traces {
        let mean = predict(t.phase);
        if mean.len() != m {
            return Err(Error::Dimension("model prediction length differs from traces".into()));
        }
        for s in &t.samples {
            for k in 0..m {
                ss[k] += (s[k] - mean[k]).powi(2);
            }
        }
        count += t.samples.len();
    }
    NoiseModel::new(ss.iter().map(|v| (v / count as f64).sqrt()).collect())
}

/// Same fit with the per-point sample mean standing in for the model
/// (one degree of freedom spent per phase point).
pub fn fit_noise_sample_mean(traces: &[NoiseTrace]) -> Result<NoiseModel> {
    let m = check(traces)?;
    let mut ss = vec![0.0; m];
    let mut dof = 0usize;
    for t in traces {
        let r = t.samples.len() as f64;
        for k in 0..m {
            let mean = t.samples.iter().map(|s| s[k]).sum::<f64>() / r;
            ss[k] += t.samples.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>();
        }
        dof += t.samples.len() - 1;
    }
    NoiseModel::new(ss.iter().map(|v| (v / dof as f64).sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::component_rng;

    fn model(phase: f64) -> Vec<f64> {
        vec![phase.cos().powi(2), phase.sin().powi(2), 0.5 * (1.0 + (2.0 * phase).sin())]
    }

    fn synthetic(std: f64, points: usize, reps: usize, seed: u64) -> Vec<NoiseTrace> {
        let mut rng = component_rng(seed, "test/noise-traces");
        let noise = NoiseModel::uniform(std, 3).unwrap();
        (0..points)
            .map(|p| {
                let phase = p as f64 * std::f64::consts::PI / points as f64;
                let samples = (0..reps)
                    .map(|_| {
                        let mut v = model(phase);
                        noise.apply(&mut v, &mut rng);
                        v
                    })
                    .collect();
                NoiseTrace { phase, samples }
            })
            .collect()
    }

    #[test]
    fn noiseless_traces() {
        let fit = fit_noise(&synthetic(0.0, 20, 3, 1), model).unwrap();
        assert!(fit.std().iter().all(|&s| s < 1e-8));
        let fit = fit_noise_sample_mean(&synthetic(0.0, 20, 3, 1)).unwrap();
        assert!(fit.std().iter().all(|&s| s < 1e-8));
    }

    #[test]
    fn recovers_injected_std() {
        let fit = fit_noise(&synthetic(0.05, 200, 2, 2), model).unwrap();
        for &s in fit.std() {
            assert!((0.04..=0.06).contains(&s), "{s}");
        }
    }

    #[test]
    fn regimes_are_ordered() {
        let low = fit_noise(&synthetic(0.02, 50, 4, 3), model).unwrap();
        let avg = fit_noise(&synthetic(0.05, 50, 4, 3), model).unwrap();
        for k in 0..3 {
            assert!(low.std()[k] < avg.std()[k]);
        }
    }

    #[test]
    fn needs_two_repetitions() {
        let t = vec![NoiseTrace { phase: 0.0, samples: vec![vec![1.0]] }];
        assert!(fit_noise(&t, |_| vec![1.0]).is_err());
        assert!(fit_noise_sample_mean(&t).is_err());
        assert!(fit_noise(&[], |_| vec![1.0]).is_err());
    }

    #[test]
    fn rejects_negative_std() {
        assert!(NoiseModel::new(vec![-0.1]).is_err());
    }

    #[test]
    fn sample_std_matches_configuration() {
        let noise = NoiseModel::uniform(0.05, 1).unwrap();
        let mut rng = component_rng(9, "test/scatter");
        let xs: Vec<f64> = (0..1000)
            .map(|_| {
                let mut v = [0.3];
                noise.apply(&mut v, &mut rng);
                v[0]
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
        assert!((sd - 0.05).abs() < 0.2 * 0.05);
    }
}
