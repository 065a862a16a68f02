use std::ops::Range;

use rand::Rng;

use super::double_scroll::DoubleScrollState;
use crate::rng::component_rng;
use crate::{Error, Result};

/// Inputs and targets (both as vectors per step) with a washout and a
/// temporal train/test split: train = washout..split, test = split..len.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    pub washout: usize,
    pub split: usize,
}

impl TaskDataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>, washout: usize) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::Dimension(format!("{} inputs, {} targets", inputs.len(), targets.len())));
        }
        if washout >= inputs.len() {
            return Err(Error::InvalidParameter(format!(
                "washout {washout} leaves no samples out of {}",
                inputs.len()
            )));
        }
        let split = washout + (2 * (inputs.len() - washout)).div_ceil(3);
        let split = split.min(inputs.len()).max(washout + 1);
        Ok(Self { inputs, targets, washout, split })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Sets the split; must satisfy washout < split ≤ len.
    pub fn with_split(mut self, split: usize) -> Result<Self> {
        if split <= self.washout || split > self.len() {
            return Err(Error::InvalidParameter(format!(
                "split {split} must lie in ({}, {}]",
                self.washout,
                self.len()
            )));
        }
        self.split = split;
        Ok(self)
    }

    /// Raises the washout (e.g. to a reservoir-specific value), keeping split > washout.
    pub fn with_washout(mut self, washout: usize) -> Result<Self> {
        if washout < self.washout || washout >= self.split {
            return Err(Error::InvalidParameter(format!(
                "washout {washout} must lie in [{}, {})",
                self.washout,
                self.split
            )));
        }
        self.washout = washout;
        Ok(self)
    }

    pub fn train_range(&self) -> Range<usize> {
        self.washout..self.split
    }

    pub fn test_range(&self) -> Range<usize> {
        self.split..self.len()
    }

    pub fn channels(&self) -> usize {
        self.targets.first().map_or(0, Vec::len)
    }

    pub fn target_channel(&self, channel: usize, range: Range<usize>) -> Vec<f64> {
        self.targets[range].iter().map(|t| t[channel]).collect()
    }
}

fn bits(length: usize, seed: u64) -> Vec<u8> {
    let mut rng = component_rng(seed, "task/bits");
    (0..length).map(|_| rng.random_range(0..=1u8)).collect()
}

/// Parity of the window s_{k−τ} … s_k; washout τ.
pub fn parity_from_bits(s: &[u8], tau: usize) -> Result<TaskDataset> {
    if tau == 0 {
        return Err(Error::InvalidParameter("parity delay must be >= 1".into()));
    }
    let targets = (0..s.len())
        .map(|k| {
            let t = if k < tau { 0 } else { s[k - tau..=k].iter().fold(0, |a, b| a ^ b) };
            vec![t as f64]
        })
        .collect();
    TaskDataset::new(s.iter().map(|&b| vec![b as f64]).collect(), targets, tau)
}

/// Temporal XOR ŷ_k = s_k ⊕ s_{k−1} of uniform random bits.
pub fn gen_xor(length: usize, seed: u64) -> Result<TaskDataset> {
    if length < 2 {
        return Err(Error::InvalidParameter("XOR needs at least 2 steps".into()));
    }
    parity_from_bits(&bits(length, seed), 1)
}

/// ŷ_k = s_k ⊕ s_{k−1} ⊕ … ⊕ s_{k−τ}; the same bit stream as [`gen_xor`].
pub fn gen_parity(length: usize, tau: usize, seed: u64) -> Result<TaskDataset> {
    if length <= tau {
        return Err(Error::InvalidParameter(format!("parity needs more than {tau} steps")));
    }
    parity_from_bits(&bits(length, seed), tau)
}

/// s_k ~ U[−1, 1], ŷ_k = s_{k−τ}; washout τ.
pub fn gen_memory(length: usize, tau: usize, seed: u64) -> Result<TaskDataset> {
    if length <= tau {
        return Err(Error::InvalidParameter(format!("memory task needs more than {tau} steps")));
    }
    let mut rng = component_rng(seed, "task/uniform");
    let s: Vec<f64> = (0..length).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let targets = (0..length).map(|k| vec![if k < tau { 0.0 } else { s[k - tau] }]).collect();
    TaskDataset::new(s.into_iter().map(|x| vec![x]).collect(), targets, tau)
}

/// One-step-ahead forecasting of a sampled trajectory: input s_k, target
/// s_{k+1}. Channels are min-max scaled to [−1, 1] using samples
/// 0..=`fit_until` so that test data never informs the scaling.
pub fn gen_double_scroll(trajectory: &[DoubleScrollState], washout: usize, fit_until: usize) -> Result<TaskDataset> {
    if trajectory.len() < 3 || fit_until >= trajectory.len() {
        return Err(Error::InvalidParameter("trajectory too short for the requested scaling span".into()));
    }
    let raw: Vec<[f64; 3]> = trajectory.iter().map(|s| s.to_array()).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for x in &raw[..=fit_until] {
        for c in 0..3 {
            lo[c] = lo[c].min(x[c]);
            hi[c] = hi[c].max(x[c]);
        }
    }
    if (0..3).any(|c| !(hi[c] > lo[c])) {
        return Err(Error::Degenerate("a double-scroll channel is constant over the scaling span".into()));
    }
    let u: Vec<Vec<f64>> = raw
        .iter()
        .map(|x| (0..3).map(|c| 2.0 * (x[c] - lo[c]) / (hi[c] - lo[c]) - 1.0).collect())
        .collect();
    let inputs = u[..u.len() - 1].to_vec();
    let targets = u[1..].to_vec();
    TaskDataset::new(inputs, targets, washout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_definition() {
        let d = parity_from_bits(&[0, 1, 1, 0], 1).unwrap();
        let t: Vec<f64> = d.targets[1..].iter().map(|t| t[0]).collect();
        assert_eq!(t, vec![1.0, 0.0, 1.0]);
        assert_eq!(d.washout, 1);
    }

    #[test]
    fn xor_of_zeros() {
        let d = parity_from_bits(&[0; 10], 1).unwrap();
        assert!(d.targets.iter().all(|t| t[0] == 0.0));
    }

    #[test]
    fn parity_reduces_to_xor() {
        assert_eq!(gen_parity(50, 1, 9).unwrap(), gen_xor(50, 9).unwrap());
    }

    #[test]
    fn parity_window() {
        let d = parity_from_bits(&[1, 1, 0, 1], 2).unwrap();
        assert_eq!(d.targets[3][0], 0.0);
        assert_eq!(d.washout, 2);
    }

    #[test]
    fn memory_identity_and_delay() {
        let d = gen_memory(20, 0, 1).unwrap();
        assert!(d.inputs.iter().zip(&d.targets).all(|(a, b)| a == b));
        let d = gen_memory(20, 3, 1).unwrap();
        for k in 3..20 {
            assert_eq!(d.targets[k][0], d.inputs[k - 3][0]);
        }
    }

    #[test]
    fn memory_inputs_are_centred() {
        let d = gen_memory(10_000, 1, 5).unwrap();
        let mean = d.inputs.iter().map(|x| x[0]).sum::<f64>() / 10_000.0;
        assert!(mean.abs() < 0.05);
        assert!(d.inputs.iter().all(|x| (-1.0..=1.0).contains(&x[0])));
    }

    #[test]
    fn split_bounds() {
        let d = gen_xor(30, 1).unwrap();
        assert!(d.split > d.washout);
        assert!(d.clone().with_split(1).is_err());
        assert!(d.clone().with_split(31).is_err());
        let d = d.with_split(20).unwrap();
        assert_eq!(d.train_range(), 1..20);
        assert_eq!(d.test_range(), 20..30);
    }
}
