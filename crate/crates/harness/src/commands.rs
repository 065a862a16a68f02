//! Subcommand implementations; `main` only parses arguments and maps
//! failures to exit codes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qrc_core::experiments::{run_task, TaskKind, TaskResult};
use qrc_core::optics::DEFAULT_R_SCALE;
use qrc_core::reservoir::presets::{NoiseLevel, NoisePreset};
use qrc_core::reservoir::{
    fit_noise, fit_noise_sample_mean, observables_from_covariance, Backend, NoiseModel, NoiseTrace, Normalization,
    ObservableSelection,
};

use crate::config::{ExperimentConfig, JsaConfig, NoiseSpec, SizeOverrides};
use crate::csvio::Table;
use crate::record::{summarize, write_json, MetricRecord, RunRecord, Timing, SCHEMA_VERSION};
use crate::Failure;

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

/// Writes JSA magnitude, Schmidt spectrum and mode profiles; returns the paths.
pub fn cmd_jsa(cfg: &JsaConfig, out: &Path, quiet: bool) -> Result<Vec<PathBuf>, Failure> {
    let crystal = cfg.crystal()?;
    cfg.source.validate().map_err(|e| Failure::config(format!("source: {e}")))?;
    let phases = cfg.phases.clone().unwrap_or_else(|| vec![0.0]);
    if phases.is_empty() {
        return Err(Failure::config("phases: at least one pump segment is required"));
    }
    if cfg.modes == 0 {
        return Err(Failure::config("modes: must be positive"));
    }
    let source = cfg.source.build(&crystal, phases.len()).map_err(|e| Failure::config(format!("source: {e}")))?;
    let jsa = source.jsa(&phases)?;
    let kept = cfg.modes.min(source.grid.count());
    let schmidt = match qrc_core::optics::schmidt_decompose(&jsa, kept, cfg.source.r_scale) {
        Err(qrc_core::Error::RankDeficient { rank, .. }) => {
            qrc_core::optics::schmidt_decompose(&jsa, rank, cfg.source.r_scale)?
        }
        other => other?,
    };
    create_dir(out)?;
    let lam = source.grid.samples();

    let mut header = vec!["signal\\idler".to_string()];
    header.extend(lam.iter().map(|l| l.to_string()));
    let mut mag = Table::new(&header);
    let m = jsa.magnitude();
    for (a, &ls) in lam.iter().enumerate() {
        let mut row = vec![ls];
        row.extend(m.row(a).iter().copied());
        mag.push(&row);
    }
    let mut spectrum = Table::new(&["k", "coefficient", "r"]);
    let c = schmidt.coefficients();
    for (k, s) in c.iter().enumerate() {
        spectrum.push(&[(k + 1) as f64, *s, cfg.source.r_scale * s / c[0]]);
    }
    let mut profiles = Table::new(&["mode", "lambda", "re", "im"]);
    let h = schmidt.modes_signal();
    for k in 0..schmidt.n_kept() {
        for (a, &l) in lam.iter().enumerate() {
            profiles.push(&[(k + 1) as f64, l, h[(a, k)].re, h[(a, k)].im]);
        }
    }
    let paths = [out.join("jsa_magnitude.csv"), out.join("schmidt_spectrum.csv"), out.join("mode_profiles.csv")];
    mag.write(&paths[0])?;
    spectrum.write(&paths[1])?;
    profiles.write(&paths[2])?;
    if !quiet {
        let k = 1.0 / c.iter().map(|x| x.powi(4)).sum::<f64>();
        println!("crystal {}  poling period {:?}", source.crystal.name, source.crystal.poling_period);
        println!(
            "{} Schmidt coefficients, {} above 1 % of the first, Schmidt number {:.2}, {} mode profiles written",
            c.len(),
            schmidt.modes_above(0.01),
            k,
            schmidt.n_kept()
        );
        for p in &paths {
            println!("wrote {}", p.display());
        }
    }
    Ok(paths.to_vec())
}

fn trace_table(result: &TaskResult) -> Table {
    let mut t = Table::new(&["step", "reservoir", "observable", "value"]);
    let m = result.observable_names.len().max(1);
    for (k, row) in result.trace.row_iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            t.push(&[k.to_string(), (c / m).to_string(), result.observable_names[c % m].clone(), v.to_string()]);
        }
    }
    t
}

fn prediction_table(result: &TaskResult) -> Table {
    let mut t = Table::new(&["step", "channel", "value", "target"]);
    for p in &result.predictions {
        t.push(&[p.step as f64, p.channel as f64, p.value, p.target]);
    }
    t
}

/// Runs every seed of `cfg`, returning records and per-seed results.
fn run_seeds(cfg: &ExperimentConfig, quiet: bool) -> Result<(Vec<MetricRecord>, Vec<(u64, TaskResult, f64)>), Failure> {
    let spec = cfg.to_spec()?;
    let hash = cfg.hash();
    let preset = cfg.preset_label()?;
    let mut records = Vec::new();
    let mut results = Vec::new();
    for &seed in &cfg.seeds {
        let t = Instant::now();
        let r = run_task(&spec, seed).map_err(|e| Failure::from_run(e, seed))?;
        let secs = t.elapsed().as_secs_f64();
        if !quiet {
            let parts: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k} = {v:.4}")).collect();
            eprintln!("seed {seed}: {} ({secs:.2} s)", parts.join(", "));
        }
        for (metric, value) in &r.metrics {
            records.push(MetricRecord {
                task: spec.task.id().to_string(),
                preset: preset.clone(),
                seed,
                metric: metric.clone(),
                value: *value,
                config_hash: hash.clone(),
                version: SCHEMA_VERSION,
            });
        }
        results.push((seed, r, secs));
    }
    Ok((records, results))
}

fn print_summary(records: &[MetricRecord]) {
    println!("{:<32} {:>10} {:>10} {:>6}", "metric", "mean", "std", "seeds");
    for (name, m, s, n) in summarize(records) {
        println!("{name:<32} {m:>10.4} {s:>10.4} {n:>6}");
    }
}

pub fn cmd_run_task(cfg: &ExperimentConfig, quiet: bool) -> Result<RunRecord, Failure> {
    let (records, results) = run_seeds(cfg, quiet)?;
    let out = &cfg.out;
    create_dir(out)?;
    let mut artifacts = Vec::new();
    let mut timing = Vec::new();
    for (seed, r, secs) in &results {
        if !r.predictions.is_empty() {
            let p = out.join(format!("predictions_seed{seed}.csv"));
            prediction_table(r).write(&p)?;
            artifacts.push(p);
        }
        let p = out.join(format!("traces_seed{seed}.csv"));
        trace_table(r).write(&p)?;
        artifacts.push(p);
        timing.push(Timing { seed: *seed, seconds: *secs });
    }
    let metrics_path = out.join("metrics.json");
    write_json(&metrics_path, &records)?;
    write_json(&out.join("timing.json"), &timing)?;
    let record = RunRecord { version: SCHEMA_VERSION, config_hash: cfg.hash(), metrics: records, artifacts };
    write_json(&out.join("run.json"), &record)?;
    if !quiet {
        print_summary(&record.metrics);
        println!("wrote {}", metrics_path.display());
    }
    Ok(record)
}

pub const AXES: [&str; 7] = ["train_size", "tau", "R", "n", "N", "nN", "noise"];

fn positive(axis: &str, v: &str) -> Result<usize, Failure> {
    match v.trim().parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(Failure::config(format!("sweep: axis {axis} needs positive integers, got {v:?}"))),
    }
}

/// The config of one sweep point.
pub fn apply_axis(base: &ExperimentConfig, axis: &str, value: &str) -> Result<ExperimentConfig, Failure> {
    let mut c = base.clone();
    match axis {
        "train_size" => {
            let s = c.sizes.get_or_insert(SizeOverrides { washout: None, train: None, test: None });
            s.train = Some(positive(axis, value)?);
        }
        "tau" => c.tau = positive(axis, value)?,
        "R" => {
            let r = positive(axis, value)?;
            c.reservoirs = Some(r);
            if c.task_kind()? == TaskKind::Memory && c.encoding.is_none() {
                c.preset = Some(format!("memory-r{r}"));
            }
        }
        "n" => c.modes = positive(axis, value)?,
        "N" => c.segments = positive(axis, value)?,
        "nN" => {
            let n = positive(axis, value)?;
            c.modes = n;
            c.segments = n;
        }
        "noise" => {
            c.noise = match value.trim().parse::<f64>() {
                Ok(s) => NoiseSpec::Inline(NoisePreset { std: NoiseLevel::Uniform(s) }),
                Err(_) => NoiseSpec::Preset(value.trim().to_string()),
            }
        }
        _ => return Err(Failure::config(format!("sweep: unknown axis '{axis}' (known: {})", AXES.join(", ")))),
    }
    Ok(c)
}

/// Runs the grid and writes `sweep.csv` (axis, axis_value, seed, metric, value).
pub fn cmd_sweep(base: &ExperimentConfig, axis: &str, values: &[String], quiet: bool) -> Result<PathBuf, Failure> {
    if values.is_empty() {
        return Err(Failure::config("sweep: the axis value list is empty"));
    }
    let points = values.iter().map(|v| apply_axis(base, axis, v)).collect::<Result<Vec<_>, _>>()?;
    for p in &points {
        p.to_spec()?;
    }
    create_dir(&base.out)?;
    let mut table = Table::new(&["axis", "axis_value", "seed", "metric", "value"]);
    let mut all = Vec::new();
    for (v, cfg) in values.iter().zip(&points) {
        let (records, _) = run_seeds(cfg, true)?;
        for r in &records {
            table.push(&[axis.to_string(), v.trim().to_string(), r.seed.to_string(), r.metric.clone(), r.value.to_string()]);
        }
        if !quiet {
            for (name, m, s, _) in summarize(&records) {
                println!("{axis} = {:<12} {name:<32} {m:.4} ± {s:.4}", v.trim());
            }
        }
        all.extend(records);
    }
    let path = base.out.join("sweep.csv");
    table.write(&path)?;
    write_json(&base.out.join("metrics.json"), &all)?;
    if !quiet {
        println!("wrote {}", path.display());
    }
    Ok(path)
}

/// Observables and the noise model fitted to them.
#[derive(Debug, Clone)]
pub struct FittedNoise {
    pub observables: Vec<String>,
    pub model: NoiseModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseReference {
    /// Per-phase sample mean.
    SampleMean,
    /// Normalized single-mode global-phase prediction at each phase.
    SingleMode,
}

/// Groups long-format rows (phase, repetition, observable, value) into traces.
pub fn load_traces(files: &[PathBuf]) -> Result<(Vec<String>, Vec<NoiseTrace>), Failure> {
    if files.is_empty() {
        return Err(Failure::config("fit-noise: no trace files given"));
    }
    let mut names: Vec<String> = Vec::new();
    // phase bits → repetition → observable → value
    let mut grid: BTreeMap<u64, (f64, BTreeMap<i64, BTreeMap<String, f64>>)> = BTreeMap::new();
    for f in files {
        let t = Table::read(f)?;
        let col = |name: &str| {
            t.column(name).ok_or_else(|| {
                Failure::config(format!(
                    "{}: line 1: header lacks column '{name}' (expected phase,repetition,observable,value)",
                    f.display()
                ))
            })
        };
        let (cp, cr, co, cv) = (col("phase")?, col("repetition")?, col("observable")?, col("value")?);
        let ctx = |e: Failure| Failure::config(format!("{}: {}", f.display(), e.message));
        for i in 0..t.rows.len() {
            let phase = t.number(i, cp).map_err(ctx)?;
            let rep = t.number(i, cr).map_err(ctx)? as i64;
            let value = t.number(i, cv).map_err(ctx)?;
            let obs = t.rows[i][co].trim().to_string();
            if !names.contains(&obs) {
                names.push(obs.clone());
            }
            let entry = grid.entry(phase.to_bits()).or_insert_with(|| (phase, BTreeMap::new()));
            entry.1.entry(rep).or_default().insert(obs, value);
        }
    }
    let mut traces = Vec::new();
    for (_, (phase, reps)) in grid {
        let mut samples = Vec::new();
        for (rep, vals) in reps {
            let row = names
                .iter()
                .map(|n| {
                    vals.get(n).copied().ok_or_else(|| {
                        Failure::config(format!("phase {phase}, repetition {rep}: observable '{n}' missing"))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            samples.push(row);
        }
        traces.push(NoiseTrace { phase, samples });
    }
    Ok((names, traces))
}

pub fn fit_noise_files(files: &[PathBuf], reference: NoiseReference) -> Result<FittedNoise, Failure> {
    let (names, traces) = load_traces(files)?;
    let model = match reference {
        NoiseReference::SampleMean => fit_noise_sample_mean(&traces),
        NoiseReference::SingleMode => {
            let sel = ObservableSelection::single_mode(Normalization::MinMax);
            let order: Vec<usize> = names
                .iter()
                .map(|n| {
                    (0..sel.len()).find(|&k| sel.name(k) == *n).ok_or_else(|| {
                        Failure::config(format!("observable '{n}' is not a single-mode observable (q1q1, p1p1, q1p1)"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let backend = Backend::single_mode(DEFAULT_R_SCALE);
            let scaler = backend.analytic_scaler(&sel).expect("single phase")?;
            fit_noise(&traces, |phase| {
                let o = observables_from_covariance(&backend.covariance(&[phase]).expect("one phase"), &sel, Some(&scaler))
                    .expect("valid selection");
                order.iter().map(|&k| o[k]).collect()
            })
        }
    }
    .map_err(|e| Failure::config(format!("fit-noise: {e}")))?;
    Ok(FittedNoise { observables: names, model })
}

/// Writes a noise preset file usable as `noise = { std = [...] }`.
pub fn cmd_fit_noise(files: &[PathBuf], reference: NoiseReference, out: &Path, quiet: bool) -> Result<FittedNoise, Failure> {
    let fitted = fit_noise_files(files, reference)?;
    let std = fitted.model.std();
    let mut text = format!("# observables: {}\nstd = [", fitted.observables.join(", "));
    text.push_str(&std.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(", "));
    text.push_str("]\n");
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    std::fs::write(out, text).map_err(|e| Failure::io(out, e))?;
    if !quiet {
        for (n, s) in fitted.observables.iter().zip(std) {
            println!("{n:<12} std {s:.6}");
        }
        println!("wrote {}", out.display());
    }
    Ok(fitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(task: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!("task = \"{task}\"")).unwrap()
    }

    #[test]
    fn axes_edit_the_right_keys() {
        let c = apply_axis(&base("memory"), "R", "3").unwrap();
        assert_eq!((c.reservoirs, c.preset.as_deref()), (Some(3), Some("memory-r3")));
        let c = apply_axis(&base("kernel-quality"), "nN", "4").unwrap();
        assert_eq!((c.modes, c.segments), (4, 4));
        assert_eq!(apply_axis(&base("xor"), "train_size", "16").unwrap().sizes.unwrap().train, Some(16));
        assert!(matches!(apply_axis(&base("xor"), "noise", "low").unwrap().noise, NoiseSpec::Preset(_)));
        assert!(matches!(apply_axis(&base("xor"), "noise", "0.01").unwrap().noise, NoiseSpec::Inline(_)));
    }

    #[test]
    fn malformed_axis_values() {
        for (axis, v) in [("tau", "0"), ("tau", "1.5"), ("n", ""), ("width", "3")] {
            assert_eq!(apply_axis(&base("xor"), axis, v).unwrap_err().code, Failure::CONFIG, "{axis}={v}");
        }
    }

    #[test]
    fn traces_need_every_observable() {
        let dir = std::env::temp_dir().join(format!("qrc-traces-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.csv");
        std::fs::write(&p, "phase,repetition,observable,value\n0,0,a,1\n0,0,b,2\n0,1,a,1\n").unwrap();
        let e = load_traces(&[p.clone()]).unwrap_err();
        assert!(e.message.contains("'b' missing"), "{}", e.message);
        std::fs::write(&p, "phase,repetition,observable,value\n0,0,a,1\n0,1,a,3\n1,0,a,0\n1,1,a,2\n").unwrap();
        let f = fit_noise_files(&[p], NoiseReference::SampleMean).unwrap();
        assert!((f.model.std()[0] - 2f64.sqrt()).abs() < 1e-12);
        std::fs::remove_dir_all(dir).ok();
    }
}
