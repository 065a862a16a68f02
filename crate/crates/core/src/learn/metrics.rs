use super::readout::threshold;
use crate::{Error, Result};

fn check(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.is_empty() {
        return Err(Error::Degenerate("empty sequence".into()));
    }
    if pred.len() != target.len() {
        return Err(Error::Dimension(format!("{} predictions for {} targets", pred.len(), target.len())));
    }
    Ok(())
}

/// Fraction of steps where both sequences agree after the 0.5 threshold.
pub fn accuracy(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let hits = pred.iter().zip(target).filter(|(p, t)| threshold(**p) == threshold(**t)).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Squared Pearson correlation.
pub fn capacity(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let n = pred.len() as f64;
    let (mp, mt) = (pred.iter().sum::<f64>() / n, target.iter().sum::<f64>() / n);
    let (mut cov, mut vp, mut vt) = (0.0, 0.0, 0.0);
    for (p, t) in pred.iter().zip(target) {
        let (a, b) = (p - mp, t - mt);
        cov += a * b;
        vp += a * a;
        vt += b * b;
    }
    let scale = |v: f64, m: f64| v <= 1e-24 * n * (1.0 + m * m);
    if scale(vp, mp) || scale(vt, mt) {
        return Err(Error::Degenerate("capacity undefined for a constant sequence".into()));
    }
    Ok((cov * cov / (vp * vt)).clamp(0.0, 1.0))
}

pub fn mean_squared_error(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    Ok(pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64)
}
