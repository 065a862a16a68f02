use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use super::ensembles::{general_ensemble, global_phase_ensemble};
use super::{PredictionRow, Sizes, TaskKind, TaskResult, TaskSpec};
use crate::learn::double_scroll::attractor_samples;
use crate::learn::{
    accuracy, capacity, closed_loop_forecast, forecast_capacities, gen_double_scroll, gen_memory, gen_parity, gen_xor,
    train_readout, train_readouts, DoubleScrollState, TaskDataset,
};
use crate::reservoir::presets::{EncodingPreset, GeneralPreset};
use crate::reservoir::{kernel_quality, Dynamics, EncodingParams, MultiplexEnsemble};
use crate::rng::component_rng;
use crate::{Error, Result};

const TRAJECTORY_LEN: usize = 4000;
const BURN_IN: usize = 500;
const MAX_START: usize = 1000;
const KERNEL_EPS: f64 = 1e-4;

pub fn run_task(spec: &TaskSpec, seed: u64) -> Result<TaskResult> {
    match spec.task {
        TaskKind::Xor => run_xor(spec, seed),
        TaskKind::Memory => run_memory(spec, seed),
        TaskKind::Parity => run_parity(spec, &[spec.tau], seed),
        TaskKind::KernelQuality => run_kernel_quality(spec, seed),
        TaskKind::DoubleScroll => {
            let trajectory = double_scroll_trajectory(spec.sizes, seed)?;
            Ok(run_double_scroll(spec, &trajectory, seed)?.result)
        }
    }
}

fn fixed_encoding(spec: &TaskSpec) -> Result<EncodingParams> {
    match &spec.preset {
        EncodingPreset::GlobalPhase(p) => p.encoding(),
        _ => Err(Error::Preset(format!("task {} needs a global-phase preset", spec.task.id()))),
    }
}

fn general_preset(spec: &TaskSpec) -> Result<&GeneralPreset> {
    match &spec.preset {
        EncodingPreset::General(p) => Ok(p),
        _ => Err(Error::Preset(format!("task {} needs a general-encoding preset", spec.task.id()))),
    }
}

/// Washout raised to the task's own minimum, train span set by `sizes`.
fn frame(data: TaskDataset, sizes: &Sizes) -> Result<TaskDataset> {
    let w = sizes.washout.max(data.washout);
    let d = data.with_split(w + sizes.train)?;
    if w > d.washout {
        d.with_washout(w)
    } else {
        Ok(d)
    }
}

fn rows(trace: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), trace.ncols(), |i, j| trace[(idx[i], j)])
}

/// Trains one scalar readout on `train` rows and predicts `test` rows.
fn fit_predict(
    trace: &DMatrix<f64>,
    data: &TaskDataset,
    train: &[usize],
    test: &[usize],
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let target = |idx: &[usize]| idx.iter().map(|&k| data.targets[k][0]).collect::<Vec<f64>>();
    let readout = train_readout(&rows(trace, train), &target(train), lambda)?;
    Ok((readout.predict_rows(&rows(trace, test)), target(test)))
}

fn prediction_rows(steps: &[usize], pred: &[f64], target: &[f64]) -> Vec<PredictionRow> {
    steps
        .iter()
        .zip(pred.iter().zip(target))
        .map(|(&step, (&value, &target))| PredictionRow { step, channel: 0, value, target })
        .collect()
}

fn drive(ensemble: &mut MultiplexEnsemble, inputs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let state = ensemble.initial_state();
    Ok(ensemble.run_from(state, inputs)?.0)
}

fn names(ensemble: &MultiplexEnsemble) -> Vec<String> {
    let sel = ensemble.selection();
    (0..sel.len()).map(|k| sel.name(k)).collect()
}

/// Temporal XOR; accuracy on the test span.
pub fn run_xor(spec: &TaskSpec, seed: u64) -> Result<TaskResult> {
    let mut ens = global_phase_ensemble(fixed_encoding(spec)?, spec.backend, &spec.source, &spec.crystal, &spec.noise, seed)?;
    let data = frame(gen_xor(spec.sizes.total(), seed)?, &spec.sizes)?;
    let trace = drive(&mut ens, &data.inputs)?;
    let (train, test): (Vec<usize>, Vec<usize>) = if spec.resplit {
        let mut idx: Vec<usize> = (data.washout..data.len()).collect();
        idx.shuffle(&mut component_rng(seed, "split/shuffle"));
        let (a, b) = idx.split_at(spec.sizes.train);
        (a.to_vec(), b.to_vec())
    } else {
        (data.train_range().collect(), data.test_range().collect())
    };
    let (pred, target) = fit_predict(&trace, &data, &train, &test, spec.lambda)?;
    Ok(TaskResult {
        metrics: vec![("accuracy".into(), accuracy(&pred, &target)?)],
        predictions: prediction_rows(&test, &pred, &target),
        trace,
        observable_names: names(&ens),
    })
}

/// Linear memory ŷ_k = s_{k−τ}; capacity on the test span.
pub fn run_memory(spec: &TaskSpec, seed: u64) -> Result<TaskResult> {
    let mut ens = global_phase_ensemble(fixed_encoding(spec)?, spec.backend, &spec.source, &spec.crystal, &spec.noise, seed)?;
    let data = frame(gen_memory(spec.sizes.total(), spec.tau, seed)?, &spec.sizes)?;
    let trace = drive(&mut ens, &data.inputs)?;
    let train: Vec<usize> = data.train_range().collect();
    let test: Vec<usize> = data.test_range().collect();
    let (pred, target) = fit_predict(&trace, &data, &train, &test, spec.lambda)?;
    Ok(TaskResult {
        metrics: vec![("capacity".into(), capacity(&pred, &target)?)],
        predictions: prediction_rows(&test, &pred, &target),
        trace,
        observable_names: names(&ens),
    })
}

/// Parity of the last τ + 1 bits. One reservoir run serves every τ in `taus`;
/// metrics are named "accuracy" for a single τ and "accuracy/tau=τ" otherwise.
pub fn run_parity(spec: &TaskSpec, taus: &[usize], seed: u64) -> Result<TaskResult> {
    if taus.is_empty() {
        return Err(Error::InvalidParameter("no parity delays".into()));
    }
    let preset = general_preset(spec)?;
    let mut ens = general_ensemble(preset, &spec.crystal, spec.segments, spec.modes, spec.backend, &spec.noise, seed)?;
    let mut trace = None;
    let mut metrics = Vec::new();
    let mut predictions = Vec::new();
    for &tau in taus {
        let data = frame(gen_parity(spec.sizes.total(), tau, seed)?, &spec.sizes)?;
        if trace.is_none() {
            trace = Some(drive(&mut ens, &data.inputs)?);
        }
        let tr = trace.as_ref().expect("driven above");
        let train: Vec<usize> = data.train_range().collect();
        let test: Vec<usize> = data.test_range().collect();
        let (pred, target) = fit_predict(tr, &data, &train, &test, spec.lambda)?;
        let name = if taus.len() == 1 { "accuracy".to_string() } else { format!("accuracy/tau={tau}") };
        metrics.push((name, accuracy(&pred, &target)?));
        if taus.len() == 1 {
            predictions = prediction_rows(&test, &pred, &target);
        }
    }
    Ok(TaskResult { metrics, predictions, trace: trace.expect("at least one delay"), observable_names: names(&ens) })
}

/// Rank of d = n(2n+1) post-washout observable rows under uniform inputs on [−1, 1].
pub fn run_kernel_quality(spec: &TaskSpec, seed: u64) -> Result<TaskResult> {
    let preset = general_preset(spec)?;
    let mut ens = general_ensemble(preset, &spec.crystal, spec.segments, spec.modes, spec.backend, &spec.noise, seed)?;
    let d = ens.output_len();
    let mut rng = component_rng(seed, "task/uniform");
    let inputs: Vec<Vec<f64>> = (0..spec.sizes.washout + d).map(|_| vec![rng.random_range(-1.0..=1.0)]).collect();
    let trace = drive(&mut ens, &inputs)?;
    let square = trace.rows(spec.sizes.washout, d).into_owned();
    let rank = kernel_quality(&square, KERNEL_EPS);
    Ok(TaskResult {
        metrics: vec![("kernel_quality".into(), rank as f64), ("observables".into(), d as f64)],
        predictions: Vec::new(),
        trace,
        observable_names: names(&ens),
    })
}

/// Attractor samples long enough for any start offset in [0, 1000).
pub fn double_scroll_trajectory(sizes: Sizes, _seed: u64) -> Result<Vec<DoubleScrollState>> {
    attractor_samples(TRAJECTORY_LEN.max(MAX_START + sizes.total() + 1), BURN_IN)
}

#[derive(Debug, Clone)]
pub struct DoubleScrollOutcome {
    pub result: TaskResult,
    /// Mean over windows of the per-window closed-loop capacity, per channel.
    pub closed_loop: [f64; 3],
    /// Teacher-forced one-step capacity over the whole test span, per channel.
    pub one_step: [f64; 3],
}

const CHANNELS: [&str; 3] = ["v1", "v2", "i"];

/// One-step-ahead training, then closed-loop rollouts of `spec.horizon`
/// steps restarted from the teacher-forced state at each of
/// test / horizon consecutive windows.
pub fn run_double_scroll(spec: &TaskSpec, trajectory: &[DoubleScrollState], seed: u64) -> Result<DoubleScrollOutcome> {
    let preset = match &spec.preset {
        EncodingPreset::RandomGlobalPhase(p) => p,
        _ => return Err(Error::Preset("double scroll needs a random-global-phase preset".into())),
    };
    let sizes = spec.sizes;
    if spec.horizon == 0 || sizes.test < spec.horizon {
        return Err(Error::InvalidParameter(format!(
            "test span {} holds no window of horizon {}",
            sizes.test, spec.horizon
        )));
    }
    let windows = sizes.test / spec.horizon;
    let len = sizes.washout + sizes.train + windows * spec.horizon + 1;
    let start = component_rng(seed, "task/double-scroll-start").random_range(0..MAX_START);
    if start + len > trajectory.len() {
        return Err(Error::InvalidParameter("trajectory too short for the requested sizes".into()));
    }
    let data = gen_double_scroll(&trajectory[start..start + len], sizes.washout, sizes.washout + sizes.train)?
        .with_split(sizes.washout + sizes.train)?;

    let reservoirs = spec.reservoirs.unwrap_or(preset.reservoirs);
    let encoding = preset.encoding(reservoirs, seed)?;
    let mut ens = global_phase_ensemble(encoding, spec.backend, &spec.source, &spec.crystal, &spec.noise, seed)?;

    let split = data.split;
    let (head, mut state) = ens.run_from(ens.initial_state(), &data.inputs[..split])?;
    let train = head.rows(data.washout, split - data.washout).into_owned();
    let targets = DMatrix::from_fn(train.nrows(), 3, |i, c| data.targets[data.washout + i][c]);
    let readouts = train_readouts(&train, &targets, spec.lambda)?;

    let end_of_train = state.clone();
    let mut per_window = Vec::with_capacity(windows);
    let mut predictions = Vec::new();
    let mut k0 = split;
    for _ in 0..windows {
        let fc = closed_loop_forecast(&mut ens, state.clone(), &readouts, &[], spec.horizon)?;
        let truth: Vec<Vec<f64>> = data.inputs[k0..k0 + spec.horizon].to_vec();
        per_window.push(forecast_capacities(&fc.predictions, &truth)?);
        for (j, (p, t)) in fc.predictions.iter().zip(&truth).enumerate() {
            for c in 0..3 {
                predictions.push(PredictionRow { step: k0 + j, channel: c, value: p[c], target: t[c] });
            }
        }
        state = ens.run_from(state, &data.inputs[k0..k0 + spec.horizon])?.1;
        k0 += spec.horizon;
    }
    let mut closed_loop = [0.0; 3];
    for w in &per_window {
        for c in 0..3 {
            closed_loop[c] += w[c] / windows as f64;
        }
    }

    // Teacher-forced pass over the test span from the end of training.
    let (tail, _) = ens.run_from(end_of_train.clone(), &data.inputs[split..data.len()])?;
    let mut one_step = [0.0; 3];
    // Row k of the trace predicts target k; the last training row predicts target split − 1.
    let mut obs_rows = vec![end_of_train.observables.clone()];
    obs_rows.extend((0..tail.nrows() - 1).map(|i| tail.row(i).iter().copied().collect::<Vec<f64>>()));
    for c in 0..3 {
        let pred: Vec<f64> = obs_rows.iter().map(|o| readouts[c].predict(o)).collect();
        let truth: Vec<f64> = data.inputs[split..data.len()].iter().map(|x| x[c]).collect();
        one_step[c] = capacity(&pred, &truth)?;
    }

    let mut metrics = Vec::new();
    for c in 0..3 {
        metrics.push((format!("closed_loop_capacity/{}", CHANNELS[c]), closed_loop[c]));
    }
    for c in 0..3 {
        metrics.push((format!("one_step_capacity/{}", CHANNELS[c]), one_step[c]));
    }
    let names = names(&ens);
    Ok(DoubleScrollOutcome {
        result: TaskResult { metrics, predictions, trace: head, observable_names: names },
        closed_loop,
        one_step,
    })
}
