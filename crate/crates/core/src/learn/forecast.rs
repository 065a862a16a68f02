use super::metrics::capacity;
use super::readout::LinearReadout;
use crate::reservoir::{Dynamics, ReservoirState};
use crate::{Error, Result};

const GUARD: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct Forecast {
    /// predictions[h][channel]: forecast of the input h + 1 steps after the seed window.
    pub predictions: Vec<Vec<f64>>,
    pub state: ReservoirState,
}

/// Teacher-forces `seed_window` from `state`, then feeds each prediction back
/// as the next input for `horizon` steps. With an empty window the first
/// prediction is read from `state.observables`.
pub fn closed_loop_forecast<D: Dynamics>(
    dynamics: &mut D,
    state: ReservoirState,
    readouts: &[LinearReadout],
    seed_window: &[Vec<f64>],
    horizon: usize,
) -> Result<Forecast> {
    if readouts.is_empty() {
        return Err(Error::InvalidParameter("no readouts".into()));
    }
    let mut state = state;
    for s in seed_window {
        state = dynamics.step(s, &state)?.1;
    }
    let mut predictions = Vec::with_capacity(horizon);
    for h in 0..horizon {
        let y: Vec<f64> = readouts.iter().map(|r| r.predict(&state.observables)).collect();
        if y.iter().any(|v| !(v.abs() <= GUARD)) {
            return Err(Error::Divergence(format!("closed-loop prediction left |y| <= {GUARD} at step {h}")));
        }
        state = dynamics.step(&y, &state)?.1;
        predictions.push(y);
    }
    Ok(Forecast { predictions, state })
}

/// Per-channel capacity of a forecast against the true continuation.
pub fn forecast_capacities(predictions: &[Vec<f64>], truth: &[Vec<f64>]) -> Result<Vec<f64>> {
    if predictions.is_empty() {
        return Err(Error::Degenerate("empty forecast: capacity undefined".into()));
    }
    if predictions.len() != truth.len() {
        return Err(Error::Dimension(format!("{} predictions for {} truth rows", predictions.len(), truth.len())));
    }
    let channels = predictions[0].len();
    (0..channels)
        .map(|c| {
            let p: Vec<f64> = predictions.iter().map(|r| r[c]).collect();
            let t: Vec<f64> = truth.iter().map(|r| r[c]).collect();
            capacity(&p, &t)
        })
        .collect()
}
